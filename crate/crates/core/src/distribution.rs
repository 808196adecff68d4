//! The weighted Hausdorff measure `H_d^{s,w}(B) = ∫_B w(x, x)^{-d/s} dH_d(x)`
//! and comparisons of point counts with its normalized form.

use std::cell::Cell as StdCell;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{SetDescriptor, SetKind};
use crate::kernel::{KernelSpec, Weight, WeightForm};
use crate::potential::Configuration;
use crate::quadrature::{integrate, integrate_2d};

const REL_TOL: f64 = 1e-8;

/// A piece of a set. Membership is half-open: lower bounds are inclusive.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Region {
    Whole,
    /// Parameter range `[t0, t1)` of a one-dimensional set; on a circle the
    /// range is read modulo `2π`.
    Param { t0: f64, t1: f64 },
    /// Ambient box `[lo, hi)`; infinite bounds are allowed.
    Box { lo: Vec<f64>, hi: Vec<f64> },
}

impl Region {
    pub fn contains(&self, set: &SetDescriptor, x: &[f64]) -> bool {
        match self {
            Region::Whole => true,
            Region::Param { t0, t1 } => match set.param_of(x) {
                Some(t) if matches!(set.kind(), SetKind::Circle { .. }) => (t - t0).rem_euclid(2.0 * PI) < t1 - t0,
                Some(t) => *t0 <= t && t < *t1,
                None => false,
            },
            Region::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| *l <= *v && *v < *h),
        }
    }
}

/// An ordered list of disjoint regions covering a set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Partition {
    pub regions: Vec<Region>,
}

impl Partition {
    /// `k` equal parameter ranges of a one-dimensional set, shifted by
    /// `offset`. The outer ends are open so the whole set is covered.
    pub fn param_bins(set: &SetDescriptor, k: usize, offset: f64) -> Result<Self> {
        let (a, b) = set
            .param_range()
            .ok_or_else(|| Error::Unsupported(format!("parameter bins need a one-dimensional set, got a {}", set.kind_name())))?;
        if k == 0 {
            return Err(Error::InvalidArgument("a partition needs at least one region".into()));
        }
        let periodic = matches!(set.kind(), SetKind::Circle { .. });
        let regions = (0..k)
            .map(|i| {
                let mut t0 = a + offset + (b - a) * i as f64 / k as f64;
                let mut t1 = a + offset + (b - a) * (i + 1) as f64 / k as f64;
                if !periodic {
                    if i == 0 {
                        t0 = f64::NEG_INFINITY;
                    }
                    if i + 1 == k {
                        t1 = f64::INFINITY;
                    }
                }
                Region::Param { t0, t1 }
            })
            .collect();
        Ok(Self { regions })
    }

    /// `k^p` grid boxes of a cube or box.
    pub fn box_grid(set: &SetDescriptor, k: usize) -> Result<Self> {
        let (lo, hi) = match set.kind() {
            SetKind::Cube { dim } => (vec![0.0; *dim], vec![1.0; *dim]),
            SetKind::Box { lo, hi } => (lo.clone(), hi.clone()),
            _ => return Err(Error::Unsupported(format!("grid bins need a cube or box, got a {}", set.kind_name()))),
        };
        if k == 0 {
            return Err(Error::InvalidArgument("a partition needs at least one region".into()));
        }
        let p = lo.len();
        let edge = |axis: usize, i: usize| -> f64 {
            if i == 0 {
                f64::NEG_INFINITY
            } else if i == k {
                f64::INFINITY
            } else {
                lo[axis] + (hi[axis] - lo[axis]) * i as f64 / k as f64
            }
        };
        let regions = (0..k.pow(p as u32))
            .map(|mut idx| {
                let mut cell = vec![0; p];
                for slot in cell.iter_mut().rev() {
                    *slot = idx % k;
                    idx /= k;
                }
                Region::Box {
                    lo: cell.iter().enumerate().map(|(a, &i)| edge(a, i)).collect(),
                    hi: cell.iter().enumerate().map(|(a, &i)| edge(a, i + 1)).collect(),
                }
            })
            .collect();
        Ok(Self { regions })
    }

    /// `k` bands of equal height in the last coordinate of a 2-sphere, which
    /// have equal area.
    pub fn sphere_zones(set: &SetDescriptor, k: usize) -> Result<Self> {
        let SetKind::Sphere { center, radius, .. } = set.kind() else {
            return Err(Error::Unsupported(format!("zones need a sphere, got a {}", set.kind_name())));
        };
        if center.len() != 3 || k == 0 {
            return Err(Error::InvalidArgument("zones need a 2-sphere and at least one band".into()));
        }
        let regions = (0..k)
            .map(|i| {
                let z = |j: usize| -> f64 {
                    if j == 0 {
                        f64::NEG_INFINITY
                    } else if j == k {
                        f64::INFINITY
                    } else {
                        center[2] - radius + 2.0 * radius * j as f64 / k as f64
                    }
                };
                Region::Box {
                    lo: vec![f64::NEG_INFINITY, f64::NEG_INFINITY, z(i)],
                    hi: vec![f64::INFINITY, f64::INFINITY, z(i + 1)],
                }
            })
            .collect();
        Ok(Self { regions })
    }

    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }
}

/// `w(x, x)^{-d/s}`, or 1 without a weight.
fn density(weight: Option<&Weight>, d: f64, s: f64, x: &[f64], failure: &StdCell<Option<Error>>) -> f64 {
    match weight {
        None => 1.0,
        Some(w) => match w.diagonal(x) {
            Ok(v) => v.powf(-d / s),
            Err(e) => {
                let prev = failure.take();
                failure.set(Some(prev.unwrap_or(e)));
                0.0
            }
        },
    }
}

/// `∫_{B ∩ A} w(x, x)^{-d/s} dH_d(x)` with relative tolerance `1e-8`.
pub fn weighted_hausdorff(set: &SetDescriptor, weight: Option<&Weight>, s: f64, region: &Region) -> Result<f64> {
    let d = set.hausdorff_dim() as f64;
    if !(s >= d) {
        return Err(Error::InvalidArgument(format!("the weighted measure needs s ≥ d, got s = {s}, d = {d}")));
    }
    let constant = match weight.map(|w| w.form()) {
        None => Some(1.0),
        Some(WeightForm::Constant(c)) => Some(weight.expect("weighted").diagonal(&vec![0.0; set.ambient_dim()]).map(|_| *c)?),
        _ => None,
    };
    if let (Some(c), Region::Whole) = (constant, region) {
        return Ok(c.powf(-d / s) * set.hausdorff_measure());
    }
    let failure = StdCell::new(None);
    let rho = |x: &[f64]| density(weight, d, s, x, &failure);
    let value = match (set.kind(), region) {
        (_, Region::Whole | Region::Param { .. }) if set.param_range().is_some() => {
            let (a, b) = set.param_range().expect("one-dimensional set");
            let (t0, t1) = match region {
                Region::Param { t0, t1 } => (*t0, *t1),
                _ => (a, b),
            };
            let f = |t: f64| {
                let x = set.point_at_param(t).expect("one-dimensional set");
                rho(&x) * set.param_speed(t).expect("one-dimensional set")
            };
            if matches!(set.kind(), SetKind::Circle { .. }) {
                let span = (t1 - t0).min(2.0 * PI);
                integrate(f, t0, t0 + span, REL_TOL, 0.0)
            } else {
                let (lo, hi) = (t0.max(a), t1.min(b));
                if hi > lo {
                    integrate(f, lo, hi, REL_TOL, 0.0)
                } else {
                    0.0
                }
            }
        }
        (SetKind::Cube { .. } | SetKind::Box { .. }, Region::Whole | Region::Box { .. }) if set.ambient_dim() <= 2 => {
            let (slo, shi) = match set.kind() {
                SetKind::Cube { dim } => (vec![0.0; *dim], vec![1.0; *dim]),
                SetKind::Box { lo, hi } => (lo.clone(), hi.clone()),
                _ => unreachable!(),
            };
            let (lo, hi): (Vec<f64>, Vec<f64>) = match region {
                Region::Box { lo, hi } => (
                    slo.iter().zip(lo).map(|(a, b)| a.max(*b)).collect(),
                    shi.iter().zip(hi).map(|(a, b)| a.min(*b)).collect(),
                ),
                _ => (slo, shi),
            };
            if lo.iter().zip(&hi).any(|(a, b)| b <= a) {
                0.0
            } else if lo.len() == 1 {
                integrate(|t| rho(&[t]), lo[0], hi[0], REL_TOL, 0.0)
            } else {
                integrate_2d(|u, v| rho(&[u, v]), lo[0], hi[0], lo[1], hi[1], REL_TOL)
            }
        }
        (SetKind::Sphere { center, radius, .. }, Region::Whole | Region::Box { .. }) if center.len() == 3 => {
            let (zlo, zhi) = match region {
                Region::Box { lo, hi } => {
                    if lo[..2].iter().any(|v| v.is_finite()) || hi[..2].iter().any(|v| v.is_finite()) {
                        return Err(Error::Unsupported("sphere regions must be bands in the last coordinate".into()));
                    }
                    (lo[2], hi[2])
                }
                _ => (f64::NEG_INFINITY, f64::INFINITY),
            };
            let u0 = ((zlo - center[2]) / radius).max(-1.0);
            let u1 = ((zhi - center[2]) / radius).min(1.0);
            if u1 <= u0 {
                0.0
            } else {
                // Archimedes: dA = r² du dφ with u the normalized height.
                let (c, r) = (center.clone(), *radius);
                radius
                    * radius
                    * integrate_2d(
                        |u, phi| {
                            let q = (1.0 - u * u).max(0.0).sqrt();
                            rho(&[c[0] + r * q * phi.cos(), c[1] + r * q * phi.sin(), c[2] + r * u])
                        },
                        u0,
                        u1,
                        0.0,
                        2.0 * PI,
                        REL_TOL,
                    )
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "weighted measure of this region of a {} is not supported",
                set.kind_name()
            )))
        }
    };
    match failure.take() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Number of points of `config` in each region; a point goes to the first
/// region containing it.
pub fn empirical_counts(config: &Configuration, set: &SetDescriptor, partition: &Partition) -> Result<Vec<usize>> {
    let mut counts = vec![0; partition.len()];
    for (i, x) in config.points().enumerate() {
        let k = partition
            .regions
            .iter()
            .position(|r| r.contains(set, x))
            .ok_or_else(|| Error::InvalidArgument(format!("point {i} = {x:?} lies in no region of the partition")))?;
        counts[k] += 1;
    }
    Ok(counts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionMass {
    pub region: Region,
    /// `H_d^{s,w}` of the region.
    pub mass: f64,
    /// `mass / H_d^{s,w}(A)`.
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionRow {
    pub n: usize,
    pub counts: Vec<usize>,
    /// Sup distance of CDFs on one-dimensional sets, otherwise the largest
    /// relative bin error over bins with predicted mass at least `5/N`.
    pub discrepancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistributionReport {
    pub metric: &'static str,
    /// False when the kernel lies outside the hypersingular theorem; the
    /// prediction is then normalized `H_d` and the report is descriptive.
    pub in_theorem: bool,
    pub regions: Vec<RegionMass>,
    pub total_mass: f64,
    pub rows: Vec<DistributionRow>,
    /// Discrepancy strictly decreases from the first to the last row.
    pub decreasing: bool,
    pub tolerance: f64,
    /// The last row is within tolerance.
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Compares configurations of increasing size with the normalized weighted
/// measure. `bins` sets the partition granularity.
pub fn compare_distribution(
    set: &SetDescriptor,
    kernel: &KernelSpec,
    configs: &[Configuration],
    bins: usize,
    tolerance: f64,
) -> Result<DistributionReport> {
    if configs.is_empty() {
        return Err(Error::InvalidArgument("no configurations to compare".into()));
    }
    let d = set.hausdorff_dim() as f64;
    let mut notes = Vec::new();
    let (weight, s, in_theorem) = match kernel.s() {
        Some(s) if s > d => (kernel.weight(), s, true),
        Some(s) if s == d => (kernel.weight(), s, true),
        _ => {
            notes.push("kernel is outside the hypersingular range; compared with normalized H_d".into());
            (None, d.max(1.0), false)
        }
    };
    let one_dim = set.param_range().is_some();
    let partition = if one_dim {
        Partition::param_bins(set, bins, 0.0)?
    } else if matches!(set.kind(), SetKind::Sphere { .. }) {
        Partition::sphere_zones(set, bins)?
    } else {
        Partition::box_grid(set, bins)?
    };
    let total = weighted_hausdorff(set, weight, s, &Region::Whole)?;
    let masses: Vec<f64> = partition
        .regions
        .iter()
        .map(|r| weighted_hausdorff(set, weight, s, r))
        .collect::<Result<_>>()?;
    let regions: Vec<RegionMass> = partition
        .regions
        .iter()
        .zip(&masses)
        .map(|(r, &m)| RegionMass {
            region: r.clone(),
            mass: m,
            fraction: m / total,
        })
        .collect();

    let mut rows = Vec::with_capacity(configs.len());
    for config in configs {
        let n = config.len();
        let counts = empirical_counts(config, set, &partition)?;
        let discrepancy = if one_dim {
            cdf_discrepancy(set, weight, s, config, total)?
        } else {
            let (err, merged) = bin_error(&counts, &regions, n);
            if merged {
                notes.push(format!("N = {n}: bins below 5/N predicted mass were merged"));
            }
            err
        };
        rows.push(DistributionRow { n, counts, discrepancy });
    }
    let decreasing = rows.len() >= 2 && rows.windows(2).all(|w| w[1].discrepancy < w[0].discrepancy);
    let pass = rows.last().is_some_and(|r| r.discrepancy <= tolerance);
    Ok(DistributionReport {
        metric: if one_dim { "sup-cdf" } else { "max-relative-bin-error" },
        in_theorem,
        regions,
        total_mass: total,
        rows,
        decreasing,
        tolerance,
        pass,
        notes,
    })
}

/// Sup distance between the empirical CDF of the parameters and the CDF of
/// the normalized weighted measure, measured from the start of the range.
fn cdf_discrepancy(set: &SetDescriptor, weight: Option<&Weight>, s: f64, config: &Configuration, total: f64) -> Result<f64> {
    let (a, _) = set.param_range().expect("one-dimensional set");
    let mut ts: Vec<f64> = config.points().map(|x| set.param_of(x).expect("one-dimensional set")).collect();
    ts.sort_by(f64::total_cmp);
    let n = ts.len() as f64;
    let mut cum = 0.0;
    let mut prev = a;
    let mut worst: f64 = 0.0;
    for (i, &t) in ts.iter().enumerate() {
        if t > prev {
            cum += weighted_hausdorff(set, weight, s, &Region::Param { t0: prev, t1: t })?;
            prev = t;
        }
        let f = cum / total;
        worst = worst.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    Ok(worst)
}

/// Largest relative error `|count/N - fraction| / fraction` over bins, after
/// merging consecutive bins until each has predicted mass at least `5/N`.
fn bin_error(counts: &[usize], regions: &[RegionMass], n: usize) -> (f64, bool) {
    let floor = 5.0 / n as f64;
    let mut merged = false;
    let mut worst: f64 = 0.0;
    let (mut frac, mut count, mut parts) = (0.0, 0usize, 0usize);
    let close = |frac: f64, count: usize| ((count as f64 / n as f64) - frac).abs() / frac;
    let mut pending: Option<(f64, usize)> = None;
    for (c, r) in counts.iter().zip(regions) {
        frac += r.fraction;
        count += c;
        parts += 1;
        if frac >= floor {
            merged |= parts > 1;
            pending = Some((frac, count));
            worst = worst.max(close(frac, count));
            (frac, count, parts) = (0.0, 0, 0);
        }
    }
    if parts > 0 {
        merged = true;
        // Fold the remainder into the last closed group.
        if let Some((f, c)) = pending {
            worst = worst.max(close(f + frac, c + count));
        } else if frac > 0.0 {
            worst = worst.max(close(frac, count));
        }
    }
    (worst, merged)
}
