//! Normalizations `τ_{s,d}(N)`, the constants `σ_{s,d}`, predicted limits of
//! `𝒫_s(A; N)/τ_{s,d}(N)` and extrapolation of ratio series.

use std::f64::consts::PI;

use serde::Serialize;

use crate::distribution::{weighted_hausdorff, Region};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, SetDescriptor};
use crate::kernel::{KernelSpec, Weight};
use crate::potential::{polarization_with, BracketOptions, Configuration};
use crate::quadrature::integrate;
use crate::solver::{seed_configuration, SeedStyle};

/// `N^{s/d}` for `s > d` and `N ln N` for `s = d`.
pub fn tau(s: f64, d: usize, n: f64) -> Result<f64> {
    let df = d as f64;
    if d == 0 || !(s >= df) {
        return Err(Error::InvalidArgument(format!(
            "τ needs s ≥ d ≥ 1, got s = {s}, d = {d}; use the Chebyshev ratio for s < d"
        )));
    }
    if !(n >= 2.0) {
        return Err(Error::InvalidArgument(format!("τ needs N ≥ 2, got {n}")));
    }
    Ok(if s == df { n * n.ln() } else { n.powf(s / df) })
}

/// Riemann zeta for `s > 1`, from the alternating eta series accelerated
/// with Chebyshev weights.
pub fn zeta(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("ζ(s) needs s > 1, got {s}")));
    }
    const TERMS: i32 = 40;
    let n = TERMS as f64;
    let mut d = (3.0 + 8f64.sqrt()).powi(TERMS);
    d = 0.5 * (d + 1.0 / d);
    let (mut b, mut c, mut sum) = (-1.0, -d, 0.0);
    for k in 0..TERMS {
        let kf = k as f64;
        c = b - c;
        sum += c * (kf + 1.0).powf(-s);
        b *= (kf + n) * (kf - n) / ((kf + 0.5) * (kf + 1.0));
    }
    let eta = sum / d;
    Ok(eta / -((1.0 - s) * std::f64::consts::LN_2).exp_m1())
}

/// `σ_{s,1} = 2(2^s − 1)ζ(s)`.
pub fn sigma_1d_exact(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return Err(Error::InvalidArgument(format!("σ_{{s,1}} needs s > 1, got {s}")));
    }
    Ok(2.0 * (s.exp2() - 1.0) * zeta(s)?)
}

/// Nearest-vector length of the triangular lattice with unit co-volume.
pub fn triangular_spacing() -> f64 {
    (2.0 / 3f64.sqrt()).sqrt()
}

#[derive(Clone, Copy, Debug, Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// `Σ f(|v|) |v|^{-s}` over nonzero vectors of the unit co-volume
/// triangular lattice with `|v| < radius`, outer rows first.
fn lattice_sum(s: f64, radius: f64, f: impl Fn(f64) -> f64) -> f64 {
    let a = triangular_spacing();
    let h = a * 3f64.sqrt() / 2.0;
    let rsq = radius * radius;
    let jmax = (radius / h).floor() as i64;
    let mut rows: Vec<i64> = (-jmax..=jmax).collect();
    rows.sort_by_key(|j| std::cmp::Reverse(j.abs()));
    let mut acc = Neumaier::default();
    for j in rows {
        let y = j as f64 * h;
        let half = (rsq - y * y).max(0.0).sqrt() / a;
        let shift = 0.5 * j as f64;
        for i in (-half - shift).floor() as i64..=(half - shift).ceil() as i64 {
            let x = a * (i as f64 + shift);
            let r2 = x * x + y * y;
            if r2 < rsq && r2 > 0.0 {
                let r = r2.sqrt();
                acc.add(f(r) * r2.powf(-0.5 * s));
            }
        }
    }
    acc.value()
}

/// Direct partial sum over `0 < |v| < radius`.
pub fn epstein_partial_sum(s: f64, radius: f64) -> Result<f64> {
    if !(s > 2.0) {
        return Err(Error::InvalidArgument(format!("the lattice sum diverges for s ≤ 2, got {s}")));
    }
    Ok(lattice_sum(s, radius, |_| 1.0))
}

/// Smooth cutoff: 1 on `[0, 1/2]`, 0 on `[1, ∞)`, infinitely differentiable.
fn cutoff(t: f64) -> f64 {
    let g = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let u = 2.0 * t - 1.0;
    if u <= 0.0 {
        1.0
    } else if u >= 1.0 {
        0.0
    } else {
        g(1.0 - u) / (g(u) + g(1.0 - u))
    }
}

/// Sum with the smooth cutoff at `radius` plus the exact continuum integral
/// of the remainder, `2π R^{2−s} [∫_{1/2}^1 (1 − χ(t)) t^{1−s} dt + 1/(s − 2)]`.
/// The neglected Poisson terms decay faster than any power of `radius`.
fn smoothed_sum(s: f64, radius: f64) -> f64 {
    let inner = integrate(|t| (1.0 - cutoff(t)) * t.powf(1.0 - s), 0.5, 1.0, 1e-14, 0.0);
    lattice_sum(s, radius, |r| cutoff(r / radius)) + 2.0 * PI * radius.powf(2.0 - s) * (inner + 1.0 / (s - 2.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EpsteinSum {
    pub value: f64,
    /// Final summation radius.
    pub radius: f64,
    /// The value at half the final radius.
    pub previous: f64,
}

const EPSTEIN_START: f64 = 4.0;
const EPSTEIN_MAX_RADIUS: f64 = 1024.0;

/// Epstein zeta of the unit co-volume triangular lattice, by smoothly cut
/// off shell summation with radius doubling until the relative change is
/// below `1e-10`.
pub fn epstein_zeta_triangular(s: f64) -> Result<f64> {
    epstein_zeta_triangular_detailed(s).map(|e| e.value)
}

pub fn epstein_zeta_triangular_detailed(s: f64) -> Result<EpsteinSum> {
    if !(s > 2.0) {
        return Err(Error::InvalidArgument(format!("the lattice sum diverges for s ≤ 2, got {s}")));
    }
    let mut r = EPSTEIN_START;
    let mut value = smoothed_sum(s, r);
    loop {
        r *= 2.0;
        let next = smoothed_sum(s, r);
        if (next - value).abs() <= 1e-10 * next.abs() {
            return Ok(EpsteinSum {
                value: next,
                radius: r,
                previous: value,
            });
        }
        if r >= EPSTEIN_MAX_RADIUS {
            return Err(Error::ResourceLimit(format!(
                "lattice sum at s = {s} did not settle to 1e-10 by radius {r}"
            )));
        }
        value = next;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Proved,
    Conjectured,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

/// The conjectured `σ_{s,2} = ((3^{s/2} − 1)/2) ζ_Λ(s)`.
pub fn sigma_2d_conjectured(s: f64) -> Result<Constant> {
    let z = epstein_zeta_triangular(s)?;
    Ok(Constant {
        value: 0.5 * (3f64.powf(0.5 * s) - 1.0) * z,
        provenance: Provenance::Conjectured,
    })
}

/// `σ_{s,d}` where known: exact for `d = 1`, `Vol(B^d)` for `s = d`, and
/// conjectured for `d = 2 < s`.
pub fn sigma(s: f64, d: usize) -> Result<Constant> {
    let df = d as f64;
    if d == 0 || !(s >= df) {
        return Err(Error::InvalidArgument(format!("σ_{{s,d}} needs s ≥ d ≥ 1, got s = {s}, d = {d}")));
    }
    if s == df {
        return Ok(Constant {
            value: unit_ball_volume(d),
            provenance: Provenance::Proved,
        });
    }
    match d {
        1 => Ok(Constant {
            value: sigma_1d_exact(s)?,
            provenance: Provenance::Proved,
        }),
        2 => sigma_2d_conjectured(s),
        _ => Err(Error::UnavailableConstant(format!("σ_{{s,{d}}} is not known for s = {s} > d = {d}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PredictedLimit {
    /// `σ_{s,d} / H_d^{s,w}(A)^{s/d}`.
    pub value: f64,
    pub sigma: f64,
    pub measure: f64,
    pub provenance: Provenance,
}

/// Limit of `𝒫_s^w(A; N)/τ_{s,d}(N)`.
pub fn predicted_limit(set: &SetDescriptor, weight: Option<&Weight>, s: f64) -> Result<PredictedLimit> {
    let d = set.hausdorff_dim();
    let c = sigma(s, d)?;
    let measure = weighted_hausdorff(set, weight, s, &Region::Whole)?;
    Ok(PredictedLimit {
        value: c.value / measure.powf(s / d as f64),
        sigma: c.value,
        measure,
        provenance: c.provenance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// `τ_{s,d}(N)`.
    Tau,
    /// `N`, for the Chebyshev constant when `s < d`.
    PerPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioEntry {
    pub n: usize,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub tau: f64,
    pub ratio: f64,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioSeries {
    pub s: Option<f64>,
    pub d: usize,
    pub normalization: Normalization,
    pub entries: Vec<RatioEntry>,
}

impl RatioSeries {
    /// Builds a series from `(N, lower, upper)` brackets.
    pub fn from_brackets(s: Option<f64>, d: usize, normalization: Normalization, brackets: &[(usize, f64, f64)]) -> Result<Self> {
        let mut entries = Vec::with_capacity(brackets.len());
        for &(n, lower, upper) in brackets {
            let t = match normalization {
                Normalization::Tau => tau(s.ok_or_else(|| Error::InvalidArgument("τ needs a Riesz exponent".into()))?, d, n as f64)?,
                Normalization::PerPoint => n as f64,
            };
            let value = 0.5 * (lower + upper);
            entries.push(RatioEntry {
                n,
                value,
                lower,
                upper,
                tau: t,
                ratio: value / t,
                budget_exhausted: false,
            });
        }
        if entries.windows(2).any(|w| w[1].n <= w[0].n) {
            return Err(Error::InvalidArgument("N must be strictly increasing".into()));
        }
        Ok(Self {
            s,
            d,
            normalization,
            entries,
        })
    }

    pub fn ratios(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.ratio).collect()
    }

    /// Every ratio is at most ten times the median of the last half.
    pub fn bounded(&self) -> bool {
        let tail = &self.entries[self.entries.len() / 2..];
        let mut r: Vec<f64> = tail.iter().map(|e| e.ratio).collect();
        if r.is_empty() {
            return true;
        }
        r.sort_by(f64::total_cmp);
        let median = r[r.len() / 2];
        self.entries.iter().all(|e| e.ratio.abs() <= 10.0 * median.abs())
    }

    pub fn budget_exhausted(&self) -> bool {
        self.entries.iter().any(|e| e.budget_exhausted)
    }
}

fn series_from_configs(
    region: &SetDescriptor,
    kernel: &KernelSpec,
    configs: &[Configuration],
    opts: &BracketOptions,
    s: Option<f64>,
    normalization: Normalization,
) -> Result<RatioSeries> {
    let d = region.hausdorff_dim();
    let mut brackets = Vec::with_capacity(configs.len());
    let mut exhausted = Vec::with_capacity(configs.len());
    for c in configs {
        let e = polarization_with(c, region, kernel, opts)?;
        brackets.push((c.len(), e.lower, e.upper));
        exhausted.push(e.budget_exhausted);
    }
    let mut series = RatioSeries::from_brackets(s, d, normalization, &brackets)?;
    for (e, x) in series.entries.iter_mut().zip(exhausted) {
        e.budget_exhausted = x;
    }
    Ok(series)
}

/// `P(A; ω_N)/τ_{s,d}(N)` for each configuration, with certified brackets.
pub fn ratio_series(
    region: &SetDescriptor,
    kernel: &KernelSpec,
    configs: &[Configuration],
    opts: &BracketOptions,
) -> Result<RatioSeries> {
    let s = kernel
        .s()
        .ok_or_else(|| Error::InvalidArgument("the log kernel has no τ normalization; use the Chebyshev ratio".into()))?;
    series_from_configs(region, kernel, configs, opts, Some(s), Normalization::Tau)
}

/// Ratio series for `N` equally spaced points on the unit circle. The
/// potential is invariant under rotation by `2π/N`, so the bracket is taken
/// over one fundamental arc.
pub fn equally_spaced_circle_series(kernel: &KernelSpec, ns: &[usize], rel_gap: f64) -> Result<RatioSeries> {
    let circle = SetDescriptor::circle(1.0)?;
    let mut brackets = Vec::with_capacity(ns.len());
    let mut exhausted = Vec::with_capacity(ns.len());
    for &n in ns {
        if n == 0 {
            return Err(Error::InvalidArgument("N must be positive".into()));
        }
        let config = seed_configuration(&circle, n, SeedStyle::EquallySpaced)?;
        let gap = 2.0 * PI / n as f64;
        let arc = SetDescriptor::arc([0.0, 0.0], 1.0, 0.0, gap)?;
        let opts = BracketOptions {
            initial_resolution: Some(gap / 8.0),
            ..BracketOptions::relative(rel_gap)
        };
        let e = polarization_with(&config, &arc, kernel, &opts)?;
        brackets.push((n, e.lower, e.upper));
        exhausted.push(e.budget_exhausted);
    }
    let (s, normalization) = match kernel.s() {
        Some(s) if s >= 1.0 => (Some(s), Normalization::Tau),
        s => (s, Normalization::PerPoint),
    };
    let mut series = RatioSeries::from_brackets(s, 1, normalization, &brackets)?;
    for (e, x) in series.entries.iter_mut().zip(exhausted) {
        e.budget_exhausted = x;
    }
    Ok(series)
}

/// Diagnostic series `P(A; ω_N)/N` for integrable kernels (`s < d` or log).
pub fn chebyshev_ratio_series(
    region: &SetDescriptor,
    kernel: &KernelSpec,
    configs: &[Configuration],
    opts: &BracketOptions,
) -> Result<RatioSeries> {
    let d = region.hausdorff_dim() as f64;
    if let Some(s) = kernel.s() {
        if s >= d {
            return Err(Error::InvalidArgument(format!("the Chebyshev ratio needs s < d, got s = {s}, d = {d}")));
        }
    }
    series_from_configs(region, kernel, configs, opts, kernel.s(), Normalization::PerPoint)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SigmaEstimate {
    pub estimate: f64,
    /// `|estimate − last ratio|`.
    pub uncertainty: f64,
    pub method: String,
    /// Relative oscillation of a non-monotone series exceeds 50%.
    pub low_confidence: bool,
    pub tail_len: usize,
}

/// Least-squares fit of `c + b N^{-1/d}` to the last half of the series.
/// The tail model is an empirical choice; no rate is known.
pub fn estimate_limit(series: &RatioSeries) -> Result<SigmaEstimate> {
    let m = series.entries.len();
    if m < 4 {
        return Err(Error::InvalidArgument(format!("limit estimation needs at least 4 entries, got {m}")));
    }
    let d = series.d.max(1) as f64;
    let tail = &series.entries[m - m / 2..];
    let last = series.entries[m - 1].ratio;
    let method = format!("least-squares c + b·N^(-1/{}) over the last {} entries", series.d, tail.len());
    let ratios = series.ratios();
    let monotone = ratios.windows(2).all(|w| w[1] >= w[0]) || ratios.windows(2).all(|w| w[1] <= w[0]);
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &r| (a.min(r), b.max(r)));
    let low_confidence = !monotone && (hi - lo) > 0.5 * last.abs();

    let estimate = if tail.iter().all(|e| e.ratio == tail[0].ratio) {
        tail[0].ratio
    } else {
        let xs: Vec<f64> = tail.iter().map(|e| (e.n as f64).powf(-1.0 / d)).collect();
        let k = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / k;
        let my = tail.iter().map(|e| e.ratio).sum::<f64>() / k;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(tail).map(|(x, e)| (x - mx) * (e.ratio - my)).sum();
        if sxx > 0.0 {
            my - sxy / sxx * mx
        } else {
            my
        }
    };
    Ok(SigmaEstimate {
        estimate,
        uncertainty: (estimate - last).abs(),
        method,
        low_confidence,
        tail_len: tail.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tau_examples() {
        assert_eq!(tau(3.0, 1, 100.0).unwrap(), 1e6);
        assert!((tau(1.0, 1, 100.0).unwrap() - 460.517_018_598_809).abs() < 1e-9);
        assert_eq!(tau(2.0, 2, std::f64::consts::E).unwrap(), std::f64::consts::E);
        assert!(tau(0.5, 1, 10.0).is_err());
        assert!(tau(2.0, 1, 1.0).is_err());
    }

    #[test]
    fn tau_scales_under_tiling() {
        for (s, p) in [(2.0, 1), (3.0, 2), (4.5, 3)] {
            for m in [2.0f64, 3.0] {
                let n = 17.0;
                let lhs = tau(s, p, m.powi(p as i32) * n).unwrap();
                let rhs = m.powf(s) * tau(s, p, n).unwrap();
                assert!((lhs - rhs).abs() <= 1e-12 * rhs);
            }
        }
    }

    #[test]
    fn zeta_values() {
        assert!((zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-14);
        assert!((zeta(3.0).unwrap() - 1.202_056_903_159_594_2).abs() < 1e-14);
        // Direct summation with an Euler–Maclaurin tail.
        let s = 1.5;
        let n = 100_000;
        let direct: f64 = (1..n).map(|k| (k as f64).powf(-s)).sum::<f64>()
            + (n as f64).powf(1.0 - s) / (s - 1.0)
            + 0.5 * (n as f64).powf(-s)
            + s / 12.0 * (n as f64).powf(-s - 1.0);
        assert!((zeta(s).unwrap() - direct).abs() < 1e-11);
        assert!(zeta(1.0).is_err());
        assert!((zeta(60.0).unwrap() - 1.0).abs() < 1e-17);
    }

    #[test]
    fn sigma_examples() {
        assert!((sigma_1d_exact(2.0).unwrap() - PI * PI).abs() < 1e-12);
        assert!((sigma_1d_exact(3.0).unwrap() - 14.0 * 1.202_056_903_159_594_2).abs() < 1e-12);
        let r: Vec<f64> = [4.0, 8.0, 16.0, 32.0].iter().map(|&s| sigma_1d_exact(s).unwrap() / (s + 1.0).exp2()).collect();
        assert!(r.windows(2).all(|w| w[1] < w[0]) && r.iter().all(|&v| v > 1.0));
        assert!((r[3] - 1.0).abs() < 1e-9);
        assert!(sigma_1d_exact(1.0).is_err());
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn epstein_checks() {
        let a = triangular_spacing();
        let z = epstein_zeta_triangular(100.0).unwrap();
        let nearest = 6.0 * a.powf(-100.0);
        assert!((z - nearest).abs() <= 1e-6 * nearest);
        let e = epstein_zeta_triangular_detailed(5.0).unwrap();
        assert!((e.value - e.previous).abs() <= 1e-8 * e.value);
        let r1 = epstein_partial_sum(5.0, 400.0).unwrap();
        let r2 = epstein_partial_sum(5.0, 800.0).unwrap();
        assert!((r1 - r2).abs() <= 1e-8 * r2);
        // The raw sum misses a tail of about 2π R^{-3}/3.
        assert!((r2 + 2.0 * PI / 3.0 * 800f64.powi(-3) - e.value).abs() <= 1e-10 * e.value);
        for s in [2.5, 3.0, 4.0] {
            let e = epstein_zeta_triangular_detailed(s).unwrap();
            assert!((e.value - e.previous).abs() <= 1e-10 * e.value);
        }
        assert!(epstein_zeta_triangular(2.0).is_err());
        let c = sigma_2d_conjectured(5.0).unwrap();
        assert_eq!(c.provenance, Provenance::Conjectured);
    }

    #[test]
    fn predicted_limit_examples() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let p = predicted_limit(&circle, None, 3.0).unwrap();
        assert!((p.value - 14.0 * zeta(3.0).unwrap() / (2.0 * PI).powi(3)).abs() < 1e-12);
        assert!((p.value - 0.067_844_3).abs() < 1e-7);
        let unit = SetDescriptor::interval(0.0, 1.0).unwrap();
        assert!((predicted_limit(&unit, None, 2.0).unwrap().value - PI * PI).abs() < 1e-10);
        assert!((predicted_limit(&circle, None, 1.0).unwrap().value - 1.0 / PI).abs() < 1e-12);
        let sphere = SetDescriptor::sphere(4).unwrap();
        assert!(matches!(predicted_limit(&sphere, None, 4.0), Err(Error::UnavailableConstant(_))));
        let s2 = SetDescriptor::sphere(3).unwrap();
        assert_eq!(predicted_limit(&s2, None, 3.0).unwrap().provenance, Provenance::Conjectured);
        assert_eq!(predicted_limit(&s2, None, 2.0).unwrap().provenance, Provenance::Proved);
    }

    fn synthetic(f: impl Fn(f64) -> f64, ns: &[usize], d: usize) -> RatioSeries {
        let s = (d + 1) as f64;
        let brackets: Vec<(usize, f64, f64)> = ns
            .iter()
            .map(|&n| {
                let v = f(n as f64) * tau(s, d, n as f64).unwrap();
                (n, v, v)
            })
            .collect();
        RatioSeries::from_brackets(Some(s), d, Normalization::Tau, &brackets).unwrap()
    }

    #[test]
    fn estimate_examples() {
        let ns: Vec<usize> = (4..=12).map(|k| 1usize << k).collect();
        let e = estimate_limit(&synthetic(|n| 5.0 + 3.0 / n, &ns, 1)).unwrap();
        assert!((e.estimate - 5.0).abs() < 1e-3 && !e.low_confidence);
        let c = estimate_limit(&synthetic(|_| 2.5, &ns, 1)).unwrap();
        assert_eq!((c.estimate, c.uncertainty), (2.5, 0.0));
        let wild = estimate_limit(&synthetic(|n| if (n as usize).trailing_zeros().is_multiple_of(2) { 1.0 } else { 3.0 }, &ns, 1)).unwrap();
        assert!(wild.low_confidence);
        assert!(estimate_limit(&synthetic(|_| 1.0, &ns[..3], 1)).is_err());
    }

    #[test]
    fn estimate_recovers_planted_constants() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ns: Vec<usize> = (3..=11).map(|k| 1usize << k).collect();
        let mut good = 0;
        for _ in 0..200 {
            let d = rng.random_range(1..=2usize);
            let c = rng.random_range(0.5..20.0);
            let b = rng.random_range(-5.0..5.0);
            let b2 = rng.random_range(-1.0..1.0);
            let series = synthetic(|n| c + b * n.powf(-1.0 / d as f64) + b2 * n.powf(-2.0 / d as f64), &ns, d);
            let e = estimate_limit(&series).unwrap();
            if (e.estimate - c).abs() < e.uncertainty {
                good += 1;
            }
        }
        assert!(good >= 190, "{good}");
    }

    #[test]
    fn chebyshev_series_approaches_uniform_potential() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(0.5).unwrap();
        // ∫ |x − y|^{-1/2} dμ(x) with θ = t² to remove the endpoint singularity.
        let uniform = 2.0 / (2.0 * PI) * integrate(|t: f64| 2.0 * t * (2.0 * (0.5 * t * t).sin()).powf(-0.5), 0.0, PI.sqrt(), 1e-12, 0.0);
        let configs: Vec<Configuration> =
            [16, 64, 256].iter().map(|&n| seed_configuration(&circle, n, SeedStyle::EquallySpaced).unwrap()).collect();
        let series = chebyshev_ratio_series(&circle, &k, &configs, &BracketOptions::relative(1e-8)).unwrap();
        let err: Vec<f64> = series.entries.iter().map(|e| (e.ratio - uniform).abs()).collect();
        assert!(err.windows(2).all(|w| w[1] < w[0]), "{err:?}");
        // The gap closes like N^{-1/2}.
        assert!(err[2] < 0.03 * uniform, "{err:?} {uniform}");
        assert!(chebyshev_ratio_series(&circle, &KernelSpec::riesz(1.0).unwrap(), &configs, &BracketOptions::default()).is_err());
    }

    #[test]
    fn symmetric_series_matches_full_circle() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(3.0).unwrap();
        let series = equally_spaced_circle_series(&k, &[7, 64], 1e-10).unwrap();
        for e in &series.entries {
            let c = seed_configuration(&circle, e.n, SeedStyle::EquallySpaced).unwrap();
            let full = polarization_with(&c, &circle, &k, &BracketOptions::relative(1e-10)).unwrap();
            assert!(full.lower <= e.upper && e.lower <= full.upper);
            assert!((e.tau - (e.n as f64).powi(3)).abs() < 1e-6);
        }
        let est = estimate_limit(&equally_spaced_circle_series(&k, &[64, 128, 256, 512, 1024, 2048, 4096], 1e-9).unwrap()).unwrap();
        let target = predicted_limit(&circle, None, 3.0).unwrap().value;
        assert!((est.estimate - target).abs() <= 0.01 * target);
    }

    #[test]
    fn coincident_points_give_constant_chebyshev_ratio() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let configs: Vec<Configuration> = [1usize, 2, 5, 9]
            .iter()
            .map(|&n| Configuration::new(&circle, &vec![vec![0.0, 1.0]; n]).unwrap())
            .collect();
        let series = chebyshev_ratio_series(&circle, &KernelSpec::log(), &configs, &BracketOptions::relative(1e-10)).unwrap();
        for e in &series.entries {
            assert!((e.ratio + 2f64.ln()).abs() < 1e-9, "{e:?}");
        }
    }
}
