//! Separation and covering radius of configurations, and the `s → ∞` links
//! `𝒫_s^{1/s} → 1/ρ` and `ℰ_s^{1/s} → 1/δ`.

use rayon::prelude::*;
use serde::Serialize;

use crate::energy::energy_of;
use crate::error::{Error, Result};
use crate::geometry::SetDescriptor;
use crate::kernel::KernelSpec;
use crate::potential::search::{self, CellValue, SearchOptions};
use crate::potential::{polarization_with, BracketOptions, Configuration};

/// `min_{i≠j} |x_i − x_j|`; zero when points coincide.
pub fn separation(config: &Configuration) -> Result<f64> {
    if config.len() < 2 {
        return Err(Error::InvalidArgument("separation needs at least two points".into()));
    }
    let pts: Vec<&[f64]> = config.points().collect();
    let best = pts
        .par_iter()
        .enumerate()
        .map(|(i, x)| pts[i + 1..].iter().map(|y| dist(x, y)).fold(f64::INFINITY, f64::min))
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best)
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

fn nearest(config: &Configuration, y: &[f64]) -> f64 {
    config.points().map(|x| dist(x, y)).fold(f64::INFINITY, f64::min)
}

/// Certified bracket `lower ≤ ρ(ω) ≤ upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoveringBracket {
    pub lower: f64,
    pub upper: f64,
    /// A point of the set at distance `lower` from the configuration.
    pub witness: Vec<f64>,
    pub budget_exhausted: bool,
    pub evaluations: u64,
}

impl CoveringBracket {
    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// `max_{y∈A} min_j |x_j − y|` by branch and bound; the nearest distance is
/// 1-Lipschitz, so a cell of radius `h` adds at most `h` to its node value.
pub fn covering_radius(config: &Configuration, set: &SetDescriptor, target_gap: f64) -> Result<CoveringBracket> {
    if !(target_gap > 0.0) {
        return Err(Error::InvalidArgument(format!("target gap must be positive, got {target_gap}")));
    }
    if config.dim() != set.ambient_dim() {
        return Err(Error::InvalidArgument("configuration and set dimensions differ".into()));
    }
    let spacing = (set.hausdorff_measure() / config.len() as f64).powf(1.0 / set.hausdorff_dim() as f64);
    let mesh = set.mesh((set.diameter() / 8.0).min(0.5 * spacing))?;
    let opts = SearchOptions {
        abs_gap: target_gap,
        rel_gap: 0.0,
        max_rounds: 60,
        max_evaluations: 20_000_000,
        keep: 1,
    };
    let out = search::minimize(
        set,
        mesh.cells().to_vec(),
        |cell| {
            let d = nearest(config, cell.node());
            CellValue {
                upper: -d,
                lower: -(d + cell.radius()),
            }
        },
        &opts,
    );
    let lower = nearest(config, &out.witness);
    Ok(CoveringBracket {
        lower,
        upper: (-out.lower).max(lower),
        witness: out.witness,
        budget_exhausted: out.budget_exhausted,
        evaluations: out.evaluations,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtremalStats {
    pub n: usize,
    pub separation: Option<f64>,
    pub covering: CoveringBracket,
}

pub fn extremal_stats(config: &Configuration, set: &SetDescriptor, target_gap: f64) -> Result<ExtremalStats> {
    Ok(ExtremalStats {
        n: config.len(),
        separation: if config.len() >= 2 { Some(separation(config)?) } else { None },
        covering: covering_radius(config, set, target_gap)?,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LargeSRow {
    pub s: f64,
    /// Certified bracket on `P_s(A; ω)`; infinite when it overflows.
    pub polarization: (f64, f64),
    /// Certified bracket on `ρ^s P_s(A; ω)`, computed after rescaling the set
    /// to unit covering radius.
    pub scaled_polarization: (f64, f64),
    /// `P_s^{1/s} ρ(ω)`, from the bracket midpoint.
    pub covering_product: f64,
    pub covering_deviation: f64,
    /// `E_s(ω)^{1/s} δ(ω)`, for `N ≥ 2`.
    pub packing_product: Option<f64>,
    pub packing_deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LargeSReport {
    pub n: usize,
    pub covering_radius: CoveringBracket,
    pub separation: Option<f64>,
    pub rows: Vec<LargeSRow>,
    /// Covering deviations strictly decrease along the `s` list.
    pub covering_decreasing: bool,
}

/// Reports how close `P_s^{1/s} ρ` and `E_s^{1/s} δ` are to 1 along an
/// increasing list of exponents.
pub fn check_large_s_limits(config: &Configuration, set: &SetDescriptor, exponents: &[f64]) -> Result<LargeSReport> {
    if exponents.is_empty() || exponents.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("exponents must be a nonempty increasing list".into()));
    }
    let cover = covering_radius(config, set, 1e-12 * set.diameter())?;
    let rho = 0.5 * (cover.lower + cover.upper);
    let delta = if config.len() >= 2 { Some(separation(config)?) } else { None };
    if !(rho > 0.0) {
        return Err(Error::InvalidArgument("the covering radius vanishes".into()));
    }
    // P_s(A/ρ; ω/ρ) = ρ^s P_s(A; ω) stays of order N for every s.
    let origin = vec![0.0; set.ambient_dim()];
    let scaled_set = set.transformed(1.0 / rho, &origin)?;
    let scaled = config.transformed(1.0 / rho, &origin);
    let packed = delta.filter(|d| *d > 0.0).map(|d| config.transformed(1.0 / d, &origin));
    let mut rows = Vec::with_capacity(exponents.len());
    for &s in exponents {
        let kernel = KernelSpec::riesz(s)?;
        let p = polarization_with(&scaled, &scaled_set, &kernel, &BracketOptions::relative(1e-9))?;
        let covering_product = p.midpoint().powf(1.0 / s);
        let packing_product = match (&packed, delta) {
            (Some(c), _) => Some(energy_of(c, &kernel)?.powf(1.0 / s)),
            (None, Some(_)) => Some(f64::INFINITY),
            (None, None) => None,
        };
        let unscale = rho.powf(-s);
        rows.push(LargeSRow {
            s,
            polarization: (p.lower * unscale, p.upper * unscale),
            scaled_polarization: (p.lower, p.upper),
            covering_product,
            covering_deviation: (covering_product - 1.0).abs(),
            packing_product,
            packing_deviation: packing_product.map(|v| (v - 1.0).abs()),
        });
    }
    let covering_decreasing = rows.windows(2).all(|w| w[1].covering_deviation < w[0].covering_deviation);
    Ok(LargeSReport {
        n: config.len(),
        covering_radius: cover,
        separation: delta,
        rows,
        covering_decreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{seed_configuration, SeedStyle};
    use std::f64::consts::PI;

    #[test]
    fn separation_examples() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let four = seed_configuration(&c, 4, SeedStyle::EquallySpaced).unwrap();
        assert!((separation(&four).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        let dup = Configuration::new(&c, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(separation(&dup).unwrap(), 0.0);
        let i = SetDescriptor::interval(-1.0, 1.0).unwrap();
        let ends = Configuration::new(&i, &[vec![-1.0], vec![1.0]]).unwrap();
        assert_eq!(separation(&ends).unwrap(), 2.0);
    }

    #[test]
    fn covering_examples() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let four = seed_configuration(&c, 4, SeedStyle::EquallySpaced).unwrap();
        let b = covering_radius(&four, &c, 1e-9).unwrap();
        assert!(b.contains(2.0 * (PI / 8.0).sin()) && b.upper - b.lower <= 1e-9, "{b:?}");
        let one = Configuration::new(&c, &[vec![1.0, 0.0]]).unwrap();
        let b = covering_radius(&one, &c, 1e-9).unwrap();
        assert!(b.contains(2.0));
        let unit = SetDescriptor::interval(0.0, 1.0).unwrap();
        let ends = Configuration::new(&unit, &[vec![0.0], vec![1.0]]).unwrap();
        let b = covering_radius(&ends, &unit, 1e-9).unwrap();
        assert!(b.contains(0.5) && !b.budget_exhausted);
    }

    #[test]
    fn covering_bracket_dominates_sampling() {
        for set in [SetDescriptor::cube(2).unwrap(), SetDescriptor::sphere(3).unwrap()] {
            let config = seed_configuration(&set, 12, SeedStyle::JitteredUniform(3)).unwrap();
            let b = covering_radius(&config, &set, 1e-6).unwrap();
            let sampled = set
                .sample_uniform(100_000, 11)
                .iter()
                .map(|y| nearest(&config, y))
                .fold(0.0, f64::max);
            assert!(b.lower <= b.upper && sampled <= b.upper, "{b:?} {sampled}");
            assert!(b.upper - sampled < 0.05);
        }
    }

    #[test]
    fn large_s_limits_on_circle() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let five = seed_configuration(&c, 5, SeedStyle::EquallySpaced).unwrap();
        let r = check_large_s_limits(&five, &c, &[200.0, 400.0]).unwrap();
        assert!(r.rows[0].covering_deviation <= 0.05 && r.covering_decreasing, "{r:?}");
        let one = Configuration::new(&c, &[vec![0.0, 1.0]]).unwrap();
        let r = check_large_s_limits(&one, &c, &[1.0, 10.0, 100.0]).unwrap();
        for row in &r.rows {
            assert!((row.polarization.0.powf(1.0 / row.s) - 0.5).abs() < 1e-9);
            assert!(row.covering_deviation < 1e-9);
        }
    }
}
