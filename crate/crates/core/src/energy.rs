//! Discrete energies `E(ω) = Σ_{i≠j} K(x_i, x_j)`, their minimization, and the
//! inequality `𝒫(A; N) ≥ ℰ(A; N) / (N - 1)` on discretized sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::SetDescriptor;
use crate::kernel::KernelSpec;
use crate::potential::Configuration;
use crate::solver::{
    brute_force_small, default_style, discretize, jitter_coincident, mean_nearest_neighbor, seed_configuration,
    step_along, SeedStyle,
};

/// Sum over ordered pairs, so each unordered pair counts twice for a
/// symmetric kernel. Coincident points give `+∞` unless the kernel clamps.
pub fn energy_of(config: &Configuration, kernel: &KernelSpec) -> Result<f64> {
    if config.len() < 2 {
        return Err(Error::InvalidArgument("energy needs at least two points".into()));
    }
    Ok(energy_flat(config.coords(), config.dim(), kernel))
}

fn energy_flat(coords: &[f64], dim: usize, kernel: &KernelSpec) -> f64 {
    let pts: Vec<&[f64]> = coords.chunks_exact(dim).collect();
    let rows: Vec<f64> = pts
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            pts.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, y)| kernel.eval(x, y))
                .sum::<f64>()
        })
        .collect();
    rows.iter().sum()
}

/// `∂E/∂x_i = Σ_{j≠i} ∂_x K(x_i, x_j) + ∂_y K(x_j, x_i)`.
fn energy_gradient(coords: &[f64], dim: usize, kernel: &KernelSpec) -> Vec<f64> {
    let pts: Vec<&[f64]> = coords.chunks_exact(dim).collect();
    pts.par_iter()
        .enumerate()
        .flat_map_iter(|(i, x)| {
            let mut g = vec![0.0; dim];
            for (j, y) in pts.iter().enumerate() {
                if j == i {
                    continue;
                }
                let (as_source, _) = kernel.gradients(x, y);
                let (_, as_target) = kernel.gradients(y, x);
                for k in 0..dim {
                    g[k] += as_source[k] + as_target[k];
                }
            }
            g
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct EnergyOptions {
    pub seed: u64,
    /// Cap on energy evaluations per restart.
    pub max_evaluations: u64,
    pub restarts: usize,
    /// Layout of the first restart; later restarts use jittered points.
    pub start: Option<SeedStyle>,
}

impl Default for EnergyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            max_evaluations: 5000,
            restarts: 4,
            start: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyTrace {
    pub iterations: u64,
    pub restarts: usize,
    pub evaluations: u64,
    /// Final energy of each restart.
    pub restart_values: Vec<f64>,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyResult {
    pub config: Configuration,
    /// `E(config)`, an upper bound on the minimal energy.
    pub value: f64,
    pub trace: EnergyTrace,
}

/// Projected gradient descent from several starts, keeping the lowest energy.
pub fn minimize_energy(set: &SetDescriptor, kernel: &KernelSpec, n: usize, opts: &EnergyOptions) -> Result<EnergyResult> {
    if n < 2 {
        return Err(Error::InvalidArgument("energy needs at least two points".into()));
    }
    if opts.max_evaluations == 0 {
        return Err(Error::InvalidArgument("the evaluation budget must be positive".into()));
    }
    let restarts = opts.restarts.max(1);
    let first = opts.start.unwrap_or_else(|| default_style(set, n, opts.seed));
    let starts: Vec<Configuration> = (0..restarts)
        .map(|r| {
            let style = if r == 0 {
                first
            } else {
                SeedStyle::JitteredUniform(opts.seed ^ (r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
            };
            seed_configuration(set, n, style)
        })
        .collect::<Result<_>>()?;
    let runs: Vec<(Vec<f64>, f64, u64, u64, bool)> =
        starts.par_iter().map(|c| descend(set, kernel, c.coords().to_vec(), opts.max_evaluations)).collect();
    let mut trace = EnergyTrace {
        iterations: 0,
        restarts,
        evaluations: 0,
        restart_values: Vec::with_capacity(restarts),
        budget_exhausted: false,
    };
    let mut best: Option<(Vec<f64>, f64)> = None;
    for (coords, value, iterations, evaluations, exhausted) in runs {
        trace.iterations += iterations;
        trace.evaluations += evaluations;
        trace.budget_exhausted |= exhausted;
        trace.restart_values.push(value);
        if best.as_ref().is_none_or(|b| value < b.1) {
            best = Some((coords, value));
        }
    }
    let (coords, value) = best.expect("at least one restart");
    let points: Vec<Vec<f64>> = coords.chunks_exact(set.ambient_dim()).map(|x| x.to_vec()).collect();
    Ok(EnergyResult {
        config: Configuration::new(set, &points)?,
        value,
        trace,
    })
}

fn descend(set: &SetDescriptor, kernel: &KernelSpec, mut coords: Vec<f64>, budget: u64) -> (Vec<f64>, f64, u64, u64, bool) {
    let dim = set.ambient_dim();
    jitter_coincident(set, &mut coords);
    let mut e = energy_flat(&coords, dim, kernel);
    let mut evaluations = 1u64;
    let mut iterations = 0u64;
    let initial_step = 0.1 * mean_nearest_neighbor(&coords, dim).max(1e-3 * set.diameter());
    let mut step = initial_step;
    loop {
        if evaluations >= budget {
            return (coords, e, iterations, evaluations, true);
        }
        let mut dir = energy_gradient(&coords, dim, kernel);
        dir.iter_mut().for_each(|v| *v = -*v);
        for (x, g) in coords.chunks_exact(dim).zip(dir.chunks_exact_mut(dim)) {
            if let Some((n, _)) = set.sphere_frame(x) {
                let gn: f64 = g.iter().zip(&n).map(|(a, b)| a * b).sum();
                g.iter_mut().zip(&n).for_each(|(a, b)| *a -= gn * b);
            }
        }
        let mut t = step;
        let mut accepted = None;
        while t > 1e-12 * set.diameter() && evaluations < budget {
            let cand = step_along(set, &coords, &dir, t);
            let ce = energy_flat(&cand, dim, kernel);
            evaluations += 1;
            if ce < e {
                accepted = Some((cand, ce));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, ce)) = accepted else {
            return (coords, e, iterations, evaluations, false);
        };
        let gain = e - ce;
        coords = cand;
        e = ce;
        iterations += 1;
        step = (2.0 * t).min(initial_step);
        if gain < 1e-12 * e.abs().max(f64::MIN_POSITIVE) {
            return (coords, e, iterations, evaluations, false);
        }
    }
}

/// `N Σ_{k=1}^{N-1} (2 sin(πk/N))^{-s}`, the energy of `N` equally spaced
/// points on the unit circle.
pub fn equally_spaced_circle_energy(n: usize, s: f64) -> f64 {
    let half: f64 = (1..n)
        .map(|k| (2.0 * (std::f64::consts::PI * k as f64 / n as f64).sin()).powf(-s))
        .sum();
    n as f64 * half
}

/// Exact optima of both discretized problems and the inequality between them.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PolarEnergyReport {
    pub nodes: usize,
    pub n: usize,
    /// Largest polarization over node multisets, minimum over the nodes.
    pub polarization: f64,
    /// Smallest energy over node multisets.
    pub energy: f64,
    /// `energy / (N - 1)`.
    pub bound: f64,
    pub holds: bool,
    pub polarization_config: Configuration,
    pub energy_config: Configuration,
}

/// Smallest energy over `N`-element multisets of the `M` nodes. Multisets
/// with repeated nodes have infinite energy unless the kernel clamps.
pub fn brute_force_energy(set: &SetDescriptor, m: usize, kernel: &KernelSpec, n: usize, max_work: f64) -> Result<(f64, Configuration)> {
    if n < 2 {
        return Err(Error::InvalidArgument("energy needs at least two points".into()));
    }
    let work = (0..n).fold(1.0, |acc, i| acc * (m + i) as f64 / (i + 1) as f64) * n as f64;
    if work > max_work {
        return Err(Error::BudgetRefused(format!(
            "exhaustive energy search over {m} nodes with N = {n} needs {work:.3e} operations, over the cap {max_work:.3e}"
        )));
    }
    let nodes = discretize(set, m)?;
    // pair[i][j] = K(x_i, x_j) + K(x_j, x_i), counting both orders.
    let pair: Vec<f64> = (0..m)
        .into_par_iter()
        .flat_map_iter(|i| {
            let nodes = &nodes;
            (0..m).map(move |j| kernel.eval(&nodes[i], &nodes[j]) + kernel.eval(&nodes[j], &nodes[i]))
        })
        .collect();
    let self_pair = |i: usize| kernel.eval(&nodes[i], &nodes[i]);

    fn rec(
        m: usize,
        n: usize,
        from: usize,
        tuple: &mut Vec<usize>,
        partial: f64,
        pair: &[f64],
        self_pair: &dyn Fn(usize) -> f64,
        best: &mut (f64, Vec<usize>),
    ) {
        if tuple.len() == n {
            if partial < best.0 {
                *best = (partial, tuple.clone());
            }
            return;
        }
        for i in from..m {
            let mut e = partial;
            for &j in tuple.iter() {
                e += if i == j { 2.0 * self_pair(i) } else { pair[i * m + j] };
            }
            tuple.push(i);
            rec(m, n, i, tuple, e, pair, self_pair, best);
            tuple.pop();
        }
    }

    let per_first: Vec<(f64, Vec<usize>)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::INFINITY, Vec::new());
            let mut tuple = vec![i];
            rec(m, n, i, &mut tuple, 0.0, &pair, &self_pair, &mut best);
            best
        })
        .collect();
    let mut best = (f64::INFINITY, Vec::new());
    for cand in per_first {
        if cand.0 < best.0 || best.1.is_empty() {
            best = cand;
        }
    }
    let points: Vec<Vec<f64>> = best.1.iter().map(|&i| nodes[i].clone()).collect();
    Ok((best.0, Configuration::new(set, &points)?))
}

/// Checks `𝒫 ≥ ℰ / (N - 1)` between the exact optima over `M` nodes.
pub fn check_polarization_energy_bound(
    set: &SetDescriptor,
    m: usize,
    kernel: &KernelSpec,
    n: usize,
    max_work: f64,
) -> Result<PolarEnergyReport> {
    let (energy, energy_config) = brute_force_energy(set, m, kernel, n, max_work)?;
    let polar = brute_force_small(set, m, kernel, n, max_work)?;
    let bound = energy / (n - 1) as f64;
    Ok(PolarEnergyReport {
        nodes: m,
        n,
        polarization: polar.estimate.lower,
        energy,
        bound,
        holds: polar.estimate.lower >= bound,
        polarization_config: polar.config,
        energy_config,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_points(angles: &[f64]) -> Vec<Vec<f64>> {
        angles.iter().map(|t| vec![t.cos(), t.sin()]).collect()
    }

    #[test]
    fn spec_energy_examples() {
        let set = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let three = Configuration::new(&set, &circle_points(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0])).unwrap();
        assert!((energy_of(&three, &k).unwrap() - 2.0).abs() < 1e-14);
        let two = Configuration::new(&set, &[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        assert_eq!(energy_of(&two, &k).unwrap(), 0.5);
        let dup = Configuration::new(&set, &[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(energy_of(&dup, &k).unwrap(), f64::INFINITY);
        assert!(energy_of(&Configuration::new(&set, &[vec![1.0, 0.0]]).unwrap(), &k).is_err());
    }

    #[test]
    fn descent_finds_known_minimizers() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let opts = EnergyOptions {
            start: Some(SeedStyle::JitteredUniform(9)),
            ..EnergyOptions::default()
        };
        let r = minimize_energy(&circle, &k, 3, &opts).unwrap();
        assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
        let r = minimize_energy(&circle, &k, 2, &opts).unwrap();
        assert!((r.value - 0.5).abs() < 1e-8);
        let interval = SetDescriptor::interval(-1.0, 1.0).unwrap();
        let r = minimize_energy(&interval, &k, 2, &EnergyOptions::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12, "{}", r.value);
        let mut xs: Vec<f64> = r.config.points().map(|x| x[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![-1.0, 1.0]);
    }

    #[test]
    fn closed_form_matches_pair_sum() {
        let set = SetDescriptor::circle(1.0).unwrap();
        for (n, s) in [(5, 2.0), (12, 3.0), (7, 0.5)] {
            let c = seed_configuration(&set, n, SeedStyle::EquallySpaced).unwrap();
            let e = energy_of(&c, &KernelSpec::riesz(s).unwrap()).unwrap();
            let f = equally_spaced_circle_energy(n, s);
            assert!((e - f).abs() <= 1e-12 * f);
        }
    }

    #[test]
    fn spec_bound_examples() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let r = check_polarization_energy_bound(&circle, 120, &KernelSpec::riesz(2.0).unwrap(), 2, 1e10).unwrap();
        assert!((r.polarization - 1.0).abs() < 1e-14 && (r.energy - 0.5).abs() < 1e-14);
        assert!(r.holds);
        let r = check_polarization_energy_bound(&circle, 120, &KernelSpec::riesz(3.0).unwrap(), 3, 1e10).unwrap();
        assert!(r.holds);
        let interval = SetDescriptor::interval(-1.0, 1.0).unwrap();
        let r = check_polarization_energy_bound(&interval, 101, &KernelSpec::log(), 2, 1e10).unwrap();
        assert!(r.holds);
        assert!((r.energy + 2.0 * 2f64.ln()).abs() < 1e-14);
    }
}
