//! Search for configurations with large polarization, and an exhaustive
//! oracle for small discretized instances.
//!
//! Annealing maximizes the softmin `-(1/β) log Σ_y exp(-β U(y))` over a node
//! set with `β` doubling each epoch. The node set holds a fixed mesh plus the
//! refined local minima of the current potential, so the surrogate tracks the
//! true minimum closely once `β` is large.

mod brute;
mod seeds;
mod surrogate;

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use brute::{brute_force_small, DEFAULT_BRUTE_FORCE_WORK};
pub use seeds::{default_style, discretize, seed_configuration, tile_configuration, SeedStyle};
pub(crate) use surrogate::{jitter_coincident, mean_nearest_neighbor, step_along};

use crate::error::{Error, Result};
use crate::geometry::{angle_of, SetDescriptor, SetKind};
use crate::kernel::KernelSpec;
use crate::potential::{polarization_with, BracketOptions, Configuration, PolarizationEstimate};
use surrogate::Surrogate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Anneal,
    Exchange,
    /// Independent annealing runs, keeping the best certified lower bound.
    Multistart(usize),
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub method: Method,
    pub seed: u64,
    /// Cap on node-set evaluations per run.
    pub max_evaluations: u64,
    pub epochs: usize,
    /// Base mesh density of the node set.
    pub nodes_per_point: usize,
    /// Starting layout of the first run; later restarts use jittered points.
    pub start: Option<SeedStyle>,
    /// Options for the final certified bracket.
    pub bracket: BracketOptions,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::Anneal,
            seed: 0,
            max_evaluations: 4000,
            epochs: 20,
            nodes_per_point: 16,
            start: None,
            bracket: BracketOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveTrace {
    /// Accepted moves, summed over restarts.
    pub iterations: u64,
    pub restarts: usize,
    pub evaluations: u64,
    /// Smallest potential on the node set after each epoch or move.
    pub best_so_far: Vec<f64>,
    pub budget_exhausted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveResult {
    pub config: Configuration,
    pub estimate: PolarizationEstimate,
    pub trace: SolveTrace,
    pub seed: u64,
}

impl SolveResult {
    pub fn budget_exhausted(&self) -> bool {
        self.trace.budget_exhausted || self.estimate.budget_exhausted
    }
}

struct RunOutcome {
    coords: Vec<f64>,
    trace: SolveTrace,
}

/// Finds an `N`-point configuration with large polarization and certifies
/// its value. Results depend only on the options, not on the thread count.
pub fn optimize(set: &SetDescriptor, kernel: &KernelSpec, n: usize, opts: &SolveOptions) -> Result<SolveResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if opts.max_evaluations == 0 {
        return Err(Error::InvalidArgument("the evaluation budget must be positive".into()));
    }
    let surrogate = Surrogate::new(set, kernel, n, opts.nodes_per_point.max(1))?;
    let first = opts.start.unwrap_or_else(|| default_style(set, n, opts.seed));
    match opts.method {
        Method::Anneal | Method::Exchange => {
            let start = seed_configuration(set, n, first)?;
            let run = if opts.method == Method::Anneal {
                anneal(&surrogate, start.coords().to_vec(), opts)
            } else {
                exchange(&surrogate, start.coords().to_vec(), opts)
            };
            certify(set, kernel, run, opts)
        }
        Method::Multistart(k) => {
            let k = k.max(1);
            let starts: Vec<Configuration> = (0..k)
                .map(|r| {
                    let style = if r == 0 { first } else { SeedStyle::JitteredUniform(restart_seed(opts.seed, r)) };
                    seed_configuration(set, n, style)
                })
                .collect::<Result<_>>()?;
            let results: Vec<SolveResult> = starts
                .par_iter()
                .map(|c| certify(set, kernel, anneal(&surrogate, c.coords().to_vec(), opts), opts))
                .collect::<Result<_>>()?;
            let mut iterations = 0;
            let mut evaluations = 0;
            let mut exhausted = false;
            let mut best: Option<SolveResult> = None;
            for r in results {
                iterations += r.trace.iterations;
                evaluations += r.trace.evaluations;
                exhausted |= r.trace.budget_exhausted;
                if best.as_ref().is_none_or(|b| r.estimate.lower > b.estimate.lower) {
                    best = Some(r);
                }
            }
            let mut best = best.expect("at least one restart");
            best.trace.iterations = iterations;
            best.trace.evaluations = evaluations;
            best.trace.restarts = k;
            best.trace.budget_exhausted = exhausted;
            Ok(best)
        }
    }
}

fn restart_seed(seed: u64, r: usize) -> u64 {
    seed ^ (r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn certify(set: &SetDescriptor, kernel: &KernelSpec, run: RunOutcome, opts: &SolveOptions) -> Result<SolveResult> {
    let config = Configuration::projected(set, &run.coords.chunks_exact(set.ambient_dim()).map(|x| x.to_vec()).collect::<Vec<_>>())?;
    let estimate = polarization_with(&config, set, kernel, &opts.bracket)?;
    Ok(SolveResult {
        config,
        estimate,
        trace: run.trace,
        seed: opts.seed,
    })
}

fn anneal(s: &Surrogate, mut coords: Vec<f64>, opts: &SolveOptions) -> RunOutcome {
    jitter_coincident(s.set, &mut coords);
    let dim = s.dim;
    let mut evaluations = 1u64;
    let mut sample = s.sample(&coords);
    let mut base: Vec<f64> = sample.u[..s.base_len()].iter().filter(|v| v.is_finite()).map(|v| v.abs()).collect();
    base.sort_by(f64::total_cmp);
    let median = base.get(base.len() / 2).copied().unwrap_or(1.0);
    let beta0 = 10.0 / if median > 0.0 { median } else { 1.0 };

    let mut best = (sample.minimum().0, coords.clone());
    let mut trace = SolveTrace {
        iterations: 0,
        restarts: 1,
        evaluations: 0,
        best_so_far: Vec::new(),
        budget_exhausted: false,
    };
    'epochs: for epoch in 0..opts.epochs {
        let beta = beta0 * 2f64.powi(epoch as i32);
        let (mut f, mut p) = sample.softmin(beta);
        let initial_step = 0.1 * mean_nearest_neighbor(&coords, dim).max(1e-3 * s.set.diameter());
        let mut step = initial_step;
        loop {
            if evaluations >= opts.max_evaluations {
                trace.budget_exhausted = true;
                break 'epochs;
            }
            let dir = s.ascent_direction(&coords, &sample, &p);
            let mut t = step;
            let mut accepted = None;
            while t > 1e-12 * s.set.diameter() && evaluations < opts.max_evaluations {
                let cand = step_along(s.set, &coords, &dir, t);
                let cs = s.sample(&cand);
                evaluations += 1;
                let (cf, cp) = cs.softmin(beta);
                if cf > f {
                    accepted = Some((cand, cs, cf, cp));
                    break;
                }
                t *= 0.5;
            }
            let Some((cand, cs, cf, cp)) = accepted else { break };
            let gain = cf - f;
            coords = cand;
            sample = cs;
            f = cf;
            p = cp;
            trace.iterations += 1;
            let low = sample.minimum().0;
            if low > best.0 {
                best = (low, coords.clone());
            }
            step = (2.0 * t).min(initial_step);
            if gain < 1e-10 * f.abs().max(f64::MIN_POSITIVE) {
                break;
            }
        }
        trace.best_so_far.push(best.0);
    }
    trace.evaluations = evaluations;
    RunOutcome { coords: best.1, trace }
}

fn exchange(s: &Surrogate, mut coords: Vec<f64>, opts: &SolveOptions) -> RunOutcome {
    jitter_coincident(s.set, &mut coords);
    let dim = s.dim;
    let mut evaluations = 1u64;
    let mut sample = s.sample(&coords);
    let mut trace = SolveTrace {
        iterations: 0,
        restarts: 1,
        evaluations: 0,
        best_so_far: Vec::new(),
        budget_exhausted: false,
    };
    'moves: loop {
        let (low, at) = sample.minimum();
        let witness = sample.node(at, dim).to_vec();
        let mut order: Vec<(f64, usize)> = coords
            .chunks_exact(dim)
            .enumerate()
            .map(|(j, x)| (s.kernel.eval(x, &witness), j))
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for &(_, j) in &order {
            let mut lambda = 0.5;
            while lambda > 1e-4 {
                if evaluations >= opts.max_evaluations {
                    trace.budget_exhausted = true;
                    break 'moves;
                }
                let x = &coords[j * dim..(j + 1) * dim];
                let moved: Vec<f64> = x.iter().zip(&witness).map(|(a, w)| a + lambda * (w - a)).collect();
                let moved = s.set.project(&moved);
                let mut cand = coords.clone();
                cand[j * dim..(j + 1) * dim].copy_from_slice(&moved);
                let cs = s.sample(&cand);
                evaluations += 1;
                if cs.minimum().0 > low {
                    coords = cand;
                    sample = cs;
                    trace.iterations += 1;
                    trace.best_so_far.push(sample.minimum().0);
                    continue 'moves;
                }
                lambda *= 0.5;
            }
        }
        break;
    }
    trace.evaluations = evaluations;
    RunOutcome { coords, trace }
}

/// Smallest, over rotations about the centre, of the largest distance
/// between matched points of two equal-size configurations on a circle.
pub fn circle_alignment(set: &SetDescriptor, a: &Configuration, b: &Configuration) -> Result<f64> {
    let SetKind::Circle { center, radius } = set.kind() else {
        return Err(Error::InvalidArgument("rotation alignment needs a circle".into()));
    };
    if a.len() != b.len() {
        return Err(Error::InvalidArgument("configurations differ in size".into()));
    }
    let angles = |c: &Configuration| {
        let mut t: Vec<f64> = c.points().map(|x| angle_of(x[0] - center[0], x[1] - center[1])).collect();
        t.sort_by(f64::total_cmp);
        t
    };
    let (ta, tb) = (angles(a), angles(b));
    let n = ta.len();
    let wrap = |x: f64| (x + PI).rem_euclid(2.0 * PI) - PI;
    let mut best = f64::INFINITY;
    for k in 0..n {
        let d0 = tb[k % n] - ta[0];
        let deltas: Vec<f64> = (0..n).map(|i| d0 + wrap(tb[(i + k) % n] - ta[i] - d0)).collect();
        let lo = deltas.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let err = 0.5 * (hi - lo);
        best = best.min(2.0 * radius * (0.5 * err.min(PI)).sin());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alignment_ignores_rotation() {
        let set = SetDescriptor::circle(1.0).unwrap();
        let a = seed_configuration(&set, 5, SeedStyle::EquallySpaced).unwrap();
        let pts: Vec<Vec<f64>> = (0..5)
            .map(|k| {
                let t = 0.3 + 2.0 * PI * k as f64 / 5.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let b = Configuration::new(&set, &pts).unwrap();
        assert!(circle_alignment(&set, &a, &b).unwrap() < 1e-12);
        let mut pts2 = pts.clone();
        pts2[2] = vec![(0.3 + 2.0 * PI * 2.0 / 5.0 + 0.01f64).cos(), (0.3 + 2.0 * PI * 2.0 / 5.0 + 0.01f64).sin()];
        let c = Configuration::new(&set, &pts2).unwrap();
        let e = circle_alignment(&set, &a, &c).unwrap();
        assert!(e > 0.004 && e < 0.006, "{e}");
    }

    #[test]
    fn anneal_finds_equally_spaced_four() {
        let set = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let opts = SolveOptions {
            start: Some(SeedStyle::JitteredUniform(3)),
            bracket: BracketOptions::absolute(1e-8),
            ..SolveOptions::default()
        };
        let r = optimize(&set, &k, 4, &opts).unwrap();
        assert!(r.estimate.lower <= 4.0 + 1e-9 && r.estimate.upper >= 4.0 - 1e-4, "{:?}", r.estimate);
        let ideal = seed_configuration(&set, 4, SeedStyle::EquallySpaced).unwrap();
        assert!(circle_alignment(&set, &r.config, &ideal).unwrap() < 1e-3);
        let again = optimize(&set, &k, 4, &opts).unwrap();
        assert_eq!(r, again);
    }

    #[test]
    fn single_point_and_errors() {
        let set = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let r = optimize(&set, &k, 1, &SolveOptions::default()).unwrap();
        assert!(r.estimate.contains(0.25));
        assert!(optimize(&set, &k, 0, &SolveOptions::default()).is_err());
    }

    #[test]
    fn exchange_improves_a_clustered_start() {
        let set = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let start = SeedStyle::JitteredUniform(11);
        let initial = seed_configuration(&set, 3, start).unwrap();
        let before = polarization_with(&initial, &set, &k, &BracketOptions::absolute(1e-6)).unwrap();
        let opts = SolveOptions {
            method: Method::Exchange,
            start: Some(start),
            ..SolveOptions::default()
        };
        let r = optimize(&set, &k, 3, &opts).unwrap();
        assert!(r.estimate.lower > before.upper);
    }
}
