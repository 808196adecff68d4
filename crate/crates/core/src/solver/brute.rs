//! Exhaustive search over node multisets of a discretized set.

use rayon::prelude::*;

use super::seeds::discretize;
use super::{SolveResult, SolveTrace};
use crate::error::{Error, Result};
use crate::geometry::{dist, SetDescriptor, SetKind};
use crate::kernel::KernelSpec;
use crate::potential::{Configuration, PolarizationEstimate};

/// Default cap on `C(M + N - 1, N) · M` kernel additions.
pub const DEFAULT_BRUTE_FORCE_WORK: f64 = 2e10;

fn multiset_count(m: usize, n: usize) -> f64 {
    (0..n).fold(1.0, |acc, i| acc * (m + i) as f64 / (i + 1) as f64)
}

/// `min_y (a[y] + b[y])`, giving up once the running minimum is `≤ floor`.
#[inline]
fn min_sum(a: &[f64], b: &[f64], floor: f64) -> f64 {
    let mut best = f64::INFINITY;
    for (ca, cb) in a.chunks(32).zip(b.chunks(32)) {
        let mut lanes = [f64::INFINITY; 4];
        let mut i = 0;
        while i + 4 <= ca.len() {
            for l in 0..4 {
                let v = ca[i + l] + cb[i + l];
                if v < lanes[l] {
                    lanes[l] = v;
                }
            }
            i += 4;
        }
        for k in i..ca.len() {
            let v = ca[k] + cb[k];
            if v < lanes[0] {
                lanes[0] = v;
            }
        }
        best = lanes.iter().fold(best, |m, &v| if v < m { v } else { m });
        if best <= floor {
            return best;
        }
    }
    best
}

struct Search<'a> {
    m: usize,
    n: usize,
    matrix: &'a [f64],
}

impl Search<'_> {
    /// Depth-first over nondecreasing index tuples starting at `from`.
    fn descend(&self, depth: usize, from: usize, partial: &[f64], tuple: &mut Vec<usize>, best: &mut (f64, Vec<usize>)) {
        let m = self.m;
        if depth + 1 == self.n {
            for i in from..m {
                let v = min_sum(partial, &self.matrix[i * m..(i + 1) * m], best.0);
                if v > best.0 {
                    tuple.push(i);
                    *best = (v, tuple.clone());
                    tuple.pop();
                }
            }
            return;
        }
        let mut next = vec![0.0; m];
        for i in from..m {
            for ((o, p), k) in next.iter_mut().zip(partial).zip(&self.matrix[i * m..(i + 1) * m]) {
                *o = p + k;
            }
            tuple.push(i);
            self.descend(depth + 1, i, &next, tuple, best);
            tuple.pop();
        }
    }
}

/// Exact optimum of the polarization problem restricted to `M` nodes of a
/// one-dimensional set: sources are node multisets and the minimum is over
/// the nodes. Refuses when `C(M + N - 1, N) · M` exceeds `max_work`.
pub fn brute_force_small(set: &SetDescriptor, m: usize, kernel: &KernelSpec, n: usize, max_work: f64) -> Result<SolveResult> {
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let work = multiset_count(m, n) * m as f64;
    if work > max_work {
        return Err(Error::BudgetRefused(format!(
            "exhaustive search over {m} nodes with N = {n} needs {work:.3e} operations, over the cap {max_work:.3e}"
        )));
    }
    let nodes = discretize(set, m)?;
    let matrix: Vec<f64> = nodes
        .par_iter()
        .flat_map_iter(|x| nodes.iter().map(move |y| kernel.eval(x, y)))
        .collect();
    let search = Search { m, n, matrix: &matrix };

    let per_first: Vec<(f64, Vec<usize>)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, Vec::new());
            let mut tuple = vec![i];
            let row = &matrix[i * m..(i + 1) * m];
            if n == 1 {
                best = (row.iter().copied().fold(f64::INFINITY, f64::min), tuple);
            } else {
                search.descend(1, i, row, &mut tuple, &mut best);
            }
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for cand in per_first {
        if cand.0 > best.0 {
            best = cand;
        }
    }
    let (value, tuple) = best;
    let points: Vec<Vec<f64>> = tuple.iter().map(|&i| nodes[i].clone()).collect();
    let config = Configuration::new(set, &points)?;
    let mut witness = 0;
    let mut low = f64::INFINITY;
    for y in 0..m {
        let u: f64 = tuple.iter().map(|&i| matrix[i * m + y]).sum();
        if u < low {
            low = u;
            witness = y;
        }
    }
    let spacing = match set.kind() {
        SetKind::Circle { .. } => dist(&nodes[0], &nodes[1 % m]),
        _ => nodes.windows(2).map(|w| dist(&w[0], &w[1])).fold(0.0, f64::max),
    };
    let evaluations = (work / m as f64) as u64;
    Ok(SolveResult {
        config,
        estimate: PolarizationEstimate {
            lower: value,
            upper: value,
            witness: nodes[witness].clone(),
            covering_radius: 0.5 * spacing,
            finest_radius: 0.5 * spacing,
            budget_exhausted: false,
            evaluations,
            rounds: 1,
        },
        trace: SolveTrace {
            iterations: evaluations,
            restarts: 0,
            evaluations,
            best_so_far: vec![value],
            budget_exhausted: false,
        },
        seed: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain enumeration of every multiset, as an independent check.
    fn naive(nodes: &[Vec<f64>], kernel: &KernelSpec, n: usize) -> f64 {
        let m = nodes.len();
        let mut best = f64::NEG_INFINITY;
        let mut idx = vec![0usize; n];
        loop {
            let v = nodes
                .iter()
                .map(|y| idx.iter().map(|&i| kernel.eval(&nodes[i], y)).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            best = best.max(v);
            let mut k = n;
            loop {
                if k == 0 {
                    return best;
                }
                k -= 1;
                if idx[k] + 1 < m {
                    idx[k] += 1;
                    for j in k + 1..n {
                        idx[j] = idx[k];
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn matches_naive_enumeration() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let interval = SetDescriptor::interval(-1.0, 1.0).unwrap();
        for (set, kernel) in [
            (&circle, KernelSpec::riesz(2.0).unwrap()),
            (&interval, KernelSpec::log()),
            (&interval, KernelSpec::riesz(1.5).unwrap()),
        ] {
            for n in 1..=3 {
                let r = brute_force_small(set, 17, &kernel, n, 1e9).unwrap();
                let nodes = discretize(set, 17).unwrap();
                assert_eq!(r.estimate.lower, naive(&nodes, &kernel, n));
            }
        }
    }

    #[test]
    fn spec_brute_force_examples() {
        let circle = SetDescriptor::circle(1.0).unwrap();
        let k = KernelSpec::riesz(2.0).unwrap();
        let one = brute_force_small(&circle, 360, &k, 1, 1e9).unwrap();
        // Node coordinates carry rounding, so antipodal chords are 2 to within ulps.
        assert!((one.estimate.lower - 0.25).abs() < 1e-15);
        let two = brute_force_small(&circle, 360, &k, 2, 1e9).unwrap();
        assert_eq!(two.estimate.lower, 1.0);
        let (a, b) = (two.config.point(0), two.config.point(1));
        assert!((a[0] + b[0]).abs() < 1e-12 && (a[1] + b[1]).abs() < 1e-12);

        let interval = SetDescriptor::interval(-1.0, 1.0).unwrap();
        let r = brute_force_small(&interval, 201, &KernelSpec::log(), 2, 1e9).unwrap();
        let mut xs: Vec<f64> = r.config.points().map(|x| x[0]).collect();
        xs.sort_by(f64::total_cmp);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        // ±0.71 are the nodes nearest ±√2/2.
        assert!((xs[0] + 0.71).abs() < 1e-12 && (xs[1] - 0.71).abs() < 1e-12);
        assert!((xs[1] - h).abs() < 0.005);
        assert!(matches!(
            brute_force_small(&circle, 512, &k, 4, 1e9),
            Err(Error::BudgetRefused(_))
        ));
    }
}
