//! Branch-and-bound minimization of a function over the cells of a set.

use rayon::prelude::*;

use crate::geometry::{Cell, SetDescriptor};

#[derive(Clone, Debug)]
pub(crate) struct SearchOptions {
    pub abs_gap: f64,
    pub rel_gap: f64,
    pub max_rounds: usize,
    pub max_evaluations: u64,
    /// Number of best nodes to keep as candidates.
    pub keep: usize,
}

/// Value at the cell node (an upper bound on the minimum) and a lower bound
/// over the whole cell.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CellValue {
    pub upper: f64,
    pub lower: f64,
}

#[derive(Clone, Debug)]
pub(crate) struct SearchOutcome {
    pub lower: f64,
    pub witness: Vec<f64>,
    /// Nodes with the smallest upper values, best first.
    pub candidates: Vec<(f64, Vec<f64>)>,
    pub finest_radius: f64,
    pub rounds: usize,
    pub evaluations: u64,
    pub budget_exhausted: bool,
}

fn insert_candidate(cands: &mut Vec<(f64, Vec<f64>)>, keep: usize, value: f64, node: &[f64]) {
    if cands.len() == keep && !(value < cands[keep - 1].0) {
        return;
    }
    let pos = cands.partition_point(|(v, _)| *v <= value);
    cands.insert(pos, (value, node.to_vec()));
    cands.truncate(keep);
}

pub(crate) fn minimize<F>(region: &SetDescriptor, roots: Vec<Cell>, eval: F, opts: &SearchOptions) -> SearchOutcome
where
    F: Fn(&Cell) -> CellValue + Sync,
{
    let keep = opts.keep.max(1);
    let initial_radius = roots.iter().map(|c| c.radius()).fold(0.0, f64::max);
    let mut pending = roots;
    let mut live: Vec<(Cell, CellValue)> = Vec::new();
    let mut best_upper = f64::INFINITY;
    let mut witness: Vec<f64> = pending.first().map(|c| c.node().to_vec()).unwrap_or_default();
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut evaluations = 0u64;
    let mut rounds = 0usize;
    let mut finest_radius = initial_radius;
    let mut budget_exhausted = false;

    loop {
        rounds += 1;
        let values: Vec<CellValue> = pending.par_iter().map(&eval).collect();
        evaluations += pending.len() as u64;
        for (cell, v) in pending.drain(..).zip(values) {
            finest_radius = finest_radius.min(cell.radius());
            if v.upper < best_upper {
                best_upper = v.upper;
                witness = cell.node().to_vec();
            }
            insert_candidate(&mut candidates, keep, v.upper, cell.node());
            live.push((cell, v));
        }
        let target = opts.abs_gap.max(opts.rel_gap * best_upper.abs());
        if best_upper.is_finite() {
            live.retain(|(_, v)| v.lower < best_upper);
        }
        let threshold = best_upper - target;
        let blocking = live.iter().filter(|(_, v)| v.lower < threshold).count();
        if blocking == 0 {
            break;
        }
        if rounds >= opts.max_rounds || evaluations + 2 * blocking as u64 > opts.max_evaluations {
            budget_exhausted = true;
            break;
        }
        let mut kept = Vec::with_capacity(live.len());
        for (cell, v) in live.drain(..) {
            if v.lower < threshold {
                pending.extend(region.split_cell(&cell));
            } else {
                kept.push((cell, v));
            }
        }
        live = kept;
        if pending.is_empty() {
            break;
        }
    }

    let lower = live.iter().map(|(_, v)| v.lower).fold(best_upper, f64::min);
    SearchOutcome {
        lower,
        witness,
        candidates,
        finest_radius,
        rounds,
        evaluations,
        budget_exhausted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brackets_minimum_of_lipschitz_function() {
        // f(x) = (x - 0.3)², Lipschitz 2 on [0, 1].
        let set = SetDescriptor::interval(0.0, 1.0).unwrap();
        let roots = set.mesh(0.25).unwrap().cells().to_vec();
        let out = minimize(
            &set,
            roots,
            |c| {
                let x = c.node()[0];
                let f = (x - 0.3) * (x - 0.3);
                CellValue {
                    upper: f,
                    lower: f - 2.0 * c.radius(),
                }
            },
            &SearchOptions {
                abs_gap: 1e-6,
                rel_gap: 0.0,
                max_rounds: 60,
                max_evaluations: 1_000_000,
                keep: 4,
            },
        );
        assert!(!out.budget_exhausted);
        let upper = out.candidates[0].0;
        assert!(out.lower <= 0.0 && upper >= 0.0);
        assert!(upper - out.lower <= 1e-6);
        assert!((out.witness[0] - 0.3).abs() < 1e-3);
        assert_eq!(out.candidates.len(), 4);
        assert!(out.candidates.windows(2).all(|w| w[0].0 <= w[1].0));
    }
}
