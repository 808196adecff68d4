//! The potential on a node set that tracks the local minima of `U`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::seeds::discretize_with_params;
use crate::error::Result;
use crate::geometry::{dist_sq, SetDescriptor, SetKind};
use crate::kernel::{KernelSpec, Profile, WeightForm};

/// Base nodes plus, on every evaluation, refined local minimizers of `U`.
pub(crate) struct Surrogate<'a> {
    pub set: &'a SetDescriptor,
    pub kernel: &'a KernelSpec,
    pub dim: usize,
    base: Vec<f64>,
    /// Parameters of the base nodes of a one-dimensional set, in order.
    params: Option<Vec<f64>>,
    periodic: bool,
    spacing: f64,
    /// Number of refined minima kept.
    keep: usize,
}

/// Potentials on the node set for one configuration.
pub(crate) struct Sample {
    pub nodes: Vec<f64>,
    pub u: Vec<f64>,
}

impl Sample {
    pub fn node(&self, i: usize, dim: usize) -> &[f64] {
        &self.nodes[i * dim..(i + 1) * dim]
    }

    /// The smallest potential and its first node.
    pub fn minimum(&self) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        for (i, &v) in self.u.iter().enumerate() {
            if v < best.0 {
                best = (v, i);
            }
        }
        best
    }

    /// `-(1/β) log Σ exp(-β U)` and the normalized weights.
    pub fn softmin(&self, beta: f64) -> (f64, Vec<f64>) {
        let (low, _) = self.minimum();
        if !low.is_finite() {
            return (low, vec![0.0; self.u.len()]);
        }
        let mut p: Vec<f64> = self.u.iter().map(|&v| (-beta * (v - low)).exp()).collect();
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|v| *v /= z);
        (low - z.ln() / beta, p)
    }
}

impl<'a> Surrogate<'a> {
    pub fn new(set: &'a SetDescriptor, kernel: &'a KernelSpec, n: usize, nodes_per_point: usize) -> Result<Self> {
        let target = (nodes_per_point * n).max(256);
        let dim = set.ambient_dim();
        let periodic = matches!(set.kind(), SetKind::Circle { .. });
        let (base, params, spacing) = if set.param_range().is_some() {
            let nodes = discretize_with_params(set, target)?;
            let spacing = set.hausdorff_measure() / target as f64;
            let params = nodes.iter().map(|(t, _)| *t).collect();
            (nodes.into_iter().flat_map(|(_, x)| x).collect(), Some(params), spacing)
        } else {
            let d = set.hausdorff_dim() as f64;
            let res = (set.hausdorff_measure() / target as f64).powf(1.0 / d).min(set.diameter() / 4.0);
            let mesh = set.mesh(res)?;
            let nodes: Vec<f64> = mesh.nodes().flat_map(|x| x.iter().copied()).collect();
            (nodes, None, mesh.covering_radius())
        };
        Ok(Self {
            set,
            kernel,
            dim,
            base,
            params,
            periodic,
            spacing,
            keep: 4 * n + 4,
        })
    }

    pub fn base_len(&self) -> usize {
        self.base.len() / self.dim
    }

    fn potential(&self, coords: &[f64], y: &[f64]) -> f64 {
        coords.chunks_exact(self.dim).map(|x| self.kernel.eval(x, y)).sum()
    }

    fn potentials(&self, coords: &[f64], nodes: &[f64]) -> Vec<f64> {
        nodes.par_chunks_exact(self.dim).map(|y| self.potential(coords, y)).collect()
    }

    /// Potentials on the base nodes and on refined local minima.
    pub fn sample(&self, coords: &[f64]) -> Sample {
        let mut u = self.potentials(coords, &self.base);
        let extra = self.refined_minima(coords, &u);
        let mut nodes = self.base.clone();
        for (y, v) in extra {
            nodes.extend_from_slice(&y);
            u.push(v);
        }
        Sample { nodes, u }
    }

    fn refined_minima(&self, coords: &[f64], u: &[f64]) -> Vec<(Vec<f64>, f64)> {
        let m = u.len();
        let mut starts: Vec<usize> = match &self.params {
            Some(_) => (0..m)
                .filter(|&i| {
                    let left = if i > 0 { Some(i - 1) } else if self.periodic { Some(m - 1) } else { None };
                    let right = if i + 1 < m { Some(i + 1) } else if self.periodic { Some(0) } else { None };
                    left.is_none_or(|l| u[i] <= u[l]) && right.is_none_or(|r| u[i] <= u[r])
                })
                .collect(),
            None => (0..m).collect(),
        };
        starts.retain(|&i| u[i].is_finite());
        starts.sort_by(|&a, &b| u[a].total_cmp(&u[b]).then(a.cmp(&b)));
        if self.params.is_none() {
            // Keep well separated low nodes.
            let mut chosen: Vec<usize> = Vec::new();
            let sep = (2.0 * self.spacing).powi(2);
            for i in starts {
                if chosen.len() == self.keep {
                    break;
                }
                let y = &self.base[i * self.dim..(i + 1) * self.dim];
                if chosen.iter().all(|&j| dist_sq(y, &self.base[j * self.dim..(j + 1) * self.dim]) > sep) {
                    chosen.push(i);
                }
            }
            starts = chosen;
        } else {
            starts.truncate(self.keep);
        }
        starts
            .par_iter()
            .map(|&i| match &self.params {
                Some(params) => self.refine_on_curve(coords, params, i),
                None => self.refine_by_descent(coords, i, u[i]),
            })
            .collect()
    }

    /// One-dimensional minimization on the parameter between the neighbours of node `i`.
    fn refine_on_curve(&self, coords: &[f64], params: &[f64], i: usize) -> (Vec<f64>, f64) {
        let m = params.len();
        let (t0, t1) = self.set.param_range().expect("one-dimensional set");
        let step = (t1 - t0) / if self.periodic { m as f64 } else { (m - 1) as f64 };
        let (mut a, mut b) = (params[i] - step, params[i] + step);
        if !self.periodic {
            a = if i == 0 { params[0] } else { params[i - 1] };
            b = if i + 1 == m { params[m - 1] } else { params[i + 1] };
        }
        let f = |t: f64| {
            let y = self.set.point_at_param(t).expect("one-dimensional set");
            let v = self.potential(coords, &y);
            (v, y)
        };
        let t = brent_minimize(|t| f(t).0, a, b, 1e-12 * (t1 - t0).abs().max(1.0));
        let mut best = f(t);
        for t in [a, b] {
            let cand = f(t);
            if cand.0 < best.0 {
                best = cand;
            }
        }
        (best.1, best.0)
    }

    /// Projected gradient descent of `U` from node `i`.
    fn refine_by_descent(&self, coords: &[f64], i: usize, u0: f64) -> (Vec<f64>, f64) {
        let mut y = self.base[i * self.dim..(i + 1) * self.dim].to_vec();
        let mut v = u0;
        let mut step = self.spacing;
        for _ in 0..30 {
            let mut g = vec![0.0; self.dim];
            for x in coords.chunks_exact(self.dim) {
                let (_, gy) = self.kernel.gradients(x, &y);
                g.iter_mut().zip(&gy).for_each(|(a, b)| *a += b);
            }
            let norm = g.iter().map(|a| a * a).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                break;
            }
            let mut improved = false;
            while step > 1e-9 * self.spacing {
                let cand: Vec<f64> = y.iter().zip(&g).map(|(a, b)| a - step * b / norm).collect();
                let cand = self.set.project(&cand);
                let cv = self.potential(coords, &cand);
                if cv < v {
                    y = cand;
                    v = cv;
                    improved = true;
                    step *= 2.0;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                break;
            }
        }
        (y, v)
    }

    /// `∂/∂x_j Σ_y p_y U(y)`, with the component normal to a circle or
    /// sphere removed.
    pub fn ascent_direction(&self, coords: &[f64], sample: &Sample, p: &[f64]) -> Vec<f64> {
        let dim = self.dim;
        let active: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 1e-14).collect();
        // For w(x, y) = a(x) b(y) the factors are evaluated once per point.
        let factored = match self.kernel.weight().map(|w| w.form()) {
            None => Some((None, vec![1.0; active.len()])),
            Some(WeightForm::Constant(c)) => Some((Some((*c, None)), vec![1.0; active.len()])),
            Some(WeightForm::Separable { u, v }) => Some((
                Some((f64::NAN, Some(u))),
                active.iter().map(|&i| 1.0 / v.value(sample.node(i, dim))).collect(),
            )),
            Some(WeightForm::Custom { .. }) => None,
        };
        let profile = self.kernel.profile();
        let clamp_sq = self.kernel.clamp() * self.kernel.clamp();
        coords
            .par_chunks_exact(dim)
            .flat_map_iter(|x| {
                let mut g = vec![0.0; dim];
                match &factored {
                    Some((form, b)) => {
                        let (a, ga) = match form {
                            None => (1.0, None),
                            Some((c, None)) => (*c, None),
                            Some((_, Some(u))) => (u.value(x), Some(u.gradient(x))),
                        };
                        for (&i, &bi) in active.iter().zip(b) {
                            let y = sample.node(i, dim);
                            let r2 = dist_sq(x, y);
                            if r2 == 0.0 || r2 < clamp_sq {
                                continue;
                            }
                            let phi = profile.from_dist_sq(r2);
                            let dphi_r = match profile {
                                Profile::Riesz { s } => -s * phi / r2,
                                Profile::Log => -1.0 / r2,
                            };
                            let c = p[i] * bi;
                            for k in 0..dim {
                                g[k] += c * a * dphi_r * (x[k] - y[k]);
                            }
                            if let Some(ga) = &ga {
                                for k in 0..dim {
                                    g[k] += c * ga[k] * phi;
                                }
                            }
                        }
                    }
                    None => {
                        for &i in &active {
                            let (gx, _) = self.kernel.gradients(x, sample.node(i, dim));
                            g.iter_mut().zip(&gx).for_each(|(a, b)| *a += p[i] * b);
                        }
                    }
                }
                if let Some((n, _)) = self.set.sphere_frame(x) {
                    let gn: f64 = g.iter().zip(&n).map(|(a, b)| a * b).sum();
                    g.iter_mut().zip(&n).for_each(|(a, b)| *a -= gn * b);
                }
                g
            })
            .collect()
    }
}

/// Brent's minimizer on `[a, b]`: golden sections with parabolic steps.
pub(crate) fn brent_minimize<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    const C: f64 = 0.381_966_011_250_105_1;
    let mut x = a + C * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = f(x);
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        let tol1 = tol + 1e-10 * x.abs();
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            if p.abs() < (0.5 * q * e).abs() && p > q * (a - x) && p < q * (b - x) {
                e = d;
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if m >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= m { a - x } else { b - x };
            d = C * e;
        }
        let u = if d.abs() >= tol1 { x + d } else if d > 0.0 { x + tol1 } else { x - tol1 };
        let fu = f(u);
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv, w, fw, x, fx) = (w, fw, x, fx, u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv, w, fw) = (w, fw, u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    x
}

/// Mean distance from each point to its nearest other point.
pub(crate) fn mean_nearest_neighbor(coords: &[f64], dim: usize) -> f64 {
    let pts: Vec<&[f64]> = coords.chunks_exact(dim).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let total: f64 = pts
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            pts.iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, y)| dist_sq(x, y))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        })
        .collect::<Vec<f64>>()
        .iter()
        .sum();
    total / pts.len() as f64
}

/// Moves `x_j` to `project(x_j + t d_j / max_k |d_k|)`.
pub(crate) fn step_along(set: &SetDescriptor, coords: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    let dim = set.ambient_dim();
    let scale = dir
        .chunks_exact(dim)
        .map(|g| g.iter().map(|a| a * a).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    if !(scale > 0.0) {
        return coords.to_vec();
    }
    coords
        .chunks_exact(dim)
        .zip(dir.chunks_exact(dim))
        .flat_map(|(x, g)| {
            let moved: Vec<f64> = x.iter().zip(g).map(|(a, b)| a + t * b / scale).collect();
            set.project(&moved)
        })
        .collect()
}

/// Separates coincident points by a deterministic offset of `1e-6 · diam`.
pub(crate) fn jitter_coincident(set: &SetDescriptor, coords: &mut [f64]) {
    let dim = set.ambient_dim();
    let n = coords.len() / dim;
    let amount = 1e-6 * set.diameter();
    for i in 1..n {
        let mut copies = 0;
        for j in 0..i {
            if coords[i * dim..(i + 1) * dim] == coords[j * dim..(j + 1) * dim] {
                copies += 1;
            }
        }
        if copies == 0 {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
        let x = &coords[i * dim..(i + 1) * dim];
        let moved: Vec<f64> = x
            .iter()
            .map(|a| a + amount * copies as f64 * (2.0 * rng.random::<f64>() - 1.0))
            .collect();
        let p = set.project(&moved);
        coords[i * dim..(i + 1) * dim].copy_from_slice(&p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_interior_and_boundary_minima() {
        let t = brent_minimize(|x| (x - 0.3).powi(2) + 1.0, 0.0, 1.0, 1e-12);
        assert!((t - 0.3).abs() < 1e-7);
        let t = brent_minimize(|x| x.cos(), 2.0, 4.0, 1e-12);
        assert!((t - std::f64::consts::PI).abs() < 1e-7);
        let t = brent_minimize(|x| x, 0.0, 1.0, 1e-12);
        assert!(t < 1e-6);
    }
}
