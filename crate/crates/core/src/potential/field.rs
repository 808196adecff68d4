//! Certified cell bounds for the potential of a fixed configuration.
//!
//! Near sources are summed directly. A source cluster far enough from the
//! cell is replaced by its monopole and quadrupole terms plus a bound on the
//! third-order remainder, using `‖∇^k |x|^{-s}‖ ≤ (s)_k |x|^{-s-k}`.

use super::tree::SourceTree;
use super::Configuration;
use crate::geometry::dist_sq;
use crate::kernel::{KernelSpec, Profile, Weight};

/// Configurations up to this size are always summed directly.
const DIRECT_LIMIT: usize = 64;

/// Bounds on the potential over one cell.
#[derive(Clone, Copy, Debug)]
pub(crate) struct CellBounds {
    /// An upper bound on `U(node)`.
    pub upper: f64,
    /// A lower bound on `U` over the cell.
    pub lower: f64,
}

#[derive(Clone, Copy, Debug)]
enum Radial {
    Int(i32, f64),
    Real(f64),
    Log,
}

#[inline(always)]
fn inv_pow(inv: f64, k: i32) -> f64 {
    match k {
        1 => inv,
        2 => inv * inv,
        3 => inv * inv * inv,
        4 => {
            let q = inv * inv;
            q * q
        }
        5 => {
            let q = inv * inv;
            q * q * inv
        }
        6 => {
            let q = inv * inv * inv;
            q * q
        }
        _ => inv.powi(k),
    }
}

impl Radial {
    fn new(profile: Profile) -> Self {
        match profile {
            Profile::Riesz { s } if s.fract() == 0.0 && s <= 64.0 => Radial::Int(s as i32, s),
            Profile::Riesz { s } => Radial::Real(s),
            Profile::Log => Radial::Log,
        }
    }

    /// `(s)_k`, or `(k - 1)!` for the log kernel.
    #[inline(always)]
    fn pochhammer(self, k: i32) -> f64 {
        match self {
            Radial::Int(_, s) | Radial::Real(s) => (0..k).map(|i| s + i as f64).product(),
            Radial::Log => (1..k).map(|i| i as f64).product(),
        }
    }

    /// Bound on the norm of the k-th derivative tensor at distance `r`.
    #[inline(always)]
    fn derivative_bound(self, r: f64, k: i32) -> f64 {
        if r <= 0.0 {
            return f64::INFINITY;
        }
        let inv = 1.0 / r;
        match self {
            Radial::Int(n, _) => self.pochhammer(k) * inv_pow(inv, n + k),
            Radial::Real(s) => self.pochhammer(k) * r.powf(-s - k as f64),
            Radial::Log => self.pochhammer(k) * inv_pow(inv, k),
        }
    }

    #[inline(always)]
    fn phi(self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::INFINITY;
        }
        match self {
            Radial::Int(n, _) => inv_pow(1.0 / r, n),
            Radial::Real(s) => r.powf(-s),
            Radial::Log => -r.ln(),
        }
    }

    /// `φ'(r) / r` given `φ(r)`.
    #[inline(always)]
    fn dphi_over_r(self, r: f64, phi: f64) -> f64 {
        match self {
            Radial::Int(_, s) | Radial::Real(s) => -s * phi / (r * r),
            Radial::Log => -1.0 / (r * r),
        }
    }

    /// `φ''(r)` given `φ(r)`.
    #[inline(always)]
    fn second(self, r: f64, phi: f64) -> f64 {
        match self {
            Radial::Int(_, s) | Radial::Real(s) => s * (s + 1.0) * phi / (r * r),
            Radial::Log => 1.0 / (r * r),
        }
    }
}

#[derive(Default)]
struct Accum {
    value: f64,
    grad: Vec<f64>,
    hess: f64,
    /// Far-field error valid over the whole cell.
    remainder: f64,
    /// Far-field error at the node.
    point_remainder: f64,
    first_order: f64,
    taylor: bool,
    magnitude: f64,
    terms: usize,
}

pub(crate) struct PotentialField<'a> {
    profile: Profile,
    radial: Radial,
    weight: Option<&'a Weight>,
    config: &'a Configuration,
    /// Source strengths when the weight factorizes as `a(x) b(y)`.
    strengths: Option<Vec<f64>>,
    tree: Option<SourceTree>,
    /// Far-field error allowed per unit of cluster strength.
    budget: f64,
}

impl<'a> PotentialField<'a> {
    /// The far field may spend about `rel_accuracy · scale` in total, where
    /// `scale` is the magnitude of the potential.
    pub fn new(config: &'a Configuration, kernel: &'a KernelSpec, rel_accuracy: f64, scale: f64) -> Self {
        let profile = kernel.profile();
        let weight = kernel.weight();
        let strengths = match weight {
            None => Some(vec![1.0; config.len()]),
            Some(w) => config.points().map(|x| w.source_strength(x)).collect::<Option<Vec<f64>>>(),
        };
        let mut budget = 0.0;
        let tree = match &strengths {
            Some(a) if config.len() > DIRECT_LIMIT && a.iter().all(|v| *v >= 0.0) => {
                let total: f64 = a.iter().sum();
                if rel_accuracy > 0.0 && scale.is_finite() && scale > 0.0 && total > 0.0 {
                    budget = rel_accuracy * scale / total;
                    Some(SourceTree::build(config.dim(), config.coords(), a))
                } else {
                    None
                }
            }
            _ => None,
        };
        Self {
            profile,
            radial: Radial::new(profile),
            weight,
            config,
            strengths,
            tree,
            budget,
        }
    }

    /// Potential `Σ_j K(x_j, y)` with no distance clamp.
    pub fn exact(&self, y: &[f64]) -> f64 {
        self.exact_with_slack(y).0
    }

    /// The potential and a bound on its accumulated rounding error.
    pub fn exact_with_slack(&self, y: &[f64]) -> (f64, f64) {
        let mut u = 0.0;
        let mut magnitude = 0.0;
        for x in self.config.points() {
            let phi = self.profile.from_dist_sq(dist_sq(x, y));
            let term = match self.weight {
                None => phi,
                Some(w) => w.value(x, y) * phi,
            };
            u += term;
            if term.is_finite() {
                magnitude += term.abs();
            }
        }
        (u, 4.0 * f64::EPSILON * (self.config.len() as f64 + 4.0) * magnitude)
    }

    /// Bounds over the part of the set within `h` of `y`. `frame` gives the
    /// unit normal and radius when the set is a circle or sphere through `y`,
    /// which lets the gradient term act only along the tangent directions.
    pub fn cell(&self, y: &[f64], h: f64, frame: Option<(&[f64], f64)>) -> CellBounds {
        match (self.weight, &self.strengths) {
            (Some(w), None) => self.cell_general(w, y, h),
            (None, None) => unreachable!("unweighted kernels always have unit strengths"),
            (_, Some(a)) => {
                let mut acc = Accum {
                    grad: vec![0.0; y.len()],
                    taylor: true,
                    ..Default::default()
                };
                match &self.tree {
                    Some(t) => self.walk(t, 0, y, h, &mut acc),
                    None => {
                        for (x, &aj) in self.config.points().zip(a) {
                            self.add_source(&mut acc, x, aj, y, h);
                        }
                    }
                }
                self.finish(acc, y, h, frame)
            }
        }
    }

    #[inline]
    fn add_source(&self, acc: &mut Accum, x: &[f64], a: f64, y: &[f64], h: f64) {
        let r = dist_sq(x, y).sqrt();
        acc.terms += 1;
        acc.first_order += a * self.radial.phi(r + h);
        if r == 0.0 {
            acc.value = f64::INFINITY;
            acc.taylor = false;
            return;
        }
        let phi = self.radial.phi(r);
        acc.value += a * phi;
        acc.magnitude += (a * phi).abs();
        if r > h {
            let d = a * self.radial.dphi_over_r(r, phi);
            for ((g, yk), xk) in acc.grad.iter_mut().zip(y).zip(x) {
                *g += d * (yk - xk);
            }
            acc.hess += a * self.radial.derivative_bound(r - h, 2);
        } else {
            acc.taylor = false;
        }
    }

    fn walk(&self, t: &SourceTree, id: usize, y: &[f64], h: f64, acc: &mut Accum) {
        let node = &t.nodes[id];
        let c = t.centroid(id);
        let d = dist_sq(c, y).sqrt();
        let near = d - h;
        let clearance = near - node.radius;
        if node.radius > 0.0 && clearance > 0.0 && node.radius <= 0.5 * near {
            let rad = self.radial;
            let dipole_cell = node.dipole * rad.derivative_bound(near, 1);
            let rem_cell = node.third_moment * rad.derivative_bound(clearance, 3) / 6.0 + dipole_cell;
            if rem_cell <= self.budget * node.strength {
                let a = node.strength;
                let phi = rad.phi(d);
                let dphi = rad.dphi_over_r(d, phi);
                let q = t.quadrupole(id);
                let dim = t.dim;
                let mut uqu = 0.0;
                for i in 0..dim {
                    let ui = y[i] - c[i];
                    for j in 0..dim {
                        uqu += ui * q[i * dim + j] * (y[j] - c[j]);
                    }
                }
                uqu /= d * d;
                let quad = 0.5 * (rad.second(d, phi) * uqu + dphi * (node.second_moment - uqu));
                acc.value += a * phi + quad;
                acc.magnitude += (a * phi).abs() + quad.abs();
                acc.terms += 2;
                acc.point_remainder += node.third_moment * rad.derivative_bound(d - node.radius, 3) / 6.0
                    + node.dipole * rad.derivative_bound(d, 1);
                // The quadrupole term moves by at most h · ½ M₂ · (s)_3 (d - h)^{-s-3}.
                acc.remainder += rem_cell + 0.5 * h * node.second_moment * rad.derivative_bound(near, 3);
                let second_rem = 0.5 * node.second_moment * rad.derivative_bound(clearance, 2) + dipole_cell;
                acc.first_order += (a * rad.phi(d + h) - second_rem).max(a * rad.phi(d + h + node.radius));
                let g = a * dphi;
                for ((gk, yk), ck) in acc.grad.iter_mut().zip(y).zip(c) {
                    *gk += g * (yk - ck);
                }
                acc.hess += a * rad.derivative_bound(near, 2);
                return;
            }
        }
        match node.children {
            Some((l, r)) => {
                self.walk(t, l, y, h, acc);
                self.walk(t, r, y, h, acc);
            }
            None => {
                for i in node.start..node.end {
                    self.add_source(acc, t.point(i), t.strengths[i], y, h);
                }
            }
        }
    }

    fn finish(&self, acc: Accum, y: &[f64], h: f64, frame: Option<(&[f64], f64)>) -> CellBounds {
        let slack = 4.0 * f64::EPSILON * (acc.terms as f64 + 4.0) * acc.magnitude;
        let mut lower = acc.first_order;
        if acc.taylor {
            // On a sphere of radius R through y, a displacement Δ of length
            // at most h has normal component |Δ|²/(2R).
            let linear = match frame {
                Some((n, radius)) => {
                    let gn: f64 = acc.grad.iter().zip(n).map(|(g, v)| g * v).sum();
                    let gt = acc.grad.iter().zip(n).map(|(g, v)| (g - gn * v).powi(2)).sum::<f64>().sqrt();
                    h * gt + gn.abs() * h * h / (2.0 * radius)
                }
                None => h * acc.grad.iter().map(|v| v * v).sum::<f64>().sqrt(),
            };
            let second = acc.value - linear - 0.5 * h * h * acc.hess - acc.remainder;
            if second > lower {
                lower = second;
            }
        }
        lower -= slack;
        let mut upper = acc.value + acc.point_remainder + slack;
        if !acc.value.is_finite() {
            upper = f64::INFINITY;
        }
        if let Some(w) = self.weight {
            let b = w.target_factor(y).unwrap_or(1.0);
            let (b_lo, b_hi) = w.target_factor_range(y, h).unwrap_or((1.0, 1.0));
            upper *= b;
            lower = if lower >= 0.0 { b_lo * lower } else { b_hi * lower };
        }
        CellBounds { upper, lower }
    }

    fn cell_general(&self, w: &Weight, y: &[f64], h: f64) -> CellBounds {
        let mut upper = 0.0;
        let mut lower = 0.0;
        let mut magnitude = 0.0;
        for x in self.config.points() {
            let r = dist_sq(x, y).sqrt();
            let term = w.value(x, y) * self.radial.phi(r);
            upper += term;
            if term.is_finite() {
                magnitude += term.abs();
            }
            let (w_lo, w_hi) = w.range_in_target(x, y, h);
            let far = self.radial.phi(r + h);
            lower += if far >= 0.0 { w_lo * far } else { w_hi * far };
        }
        let slack = 4.0 * f64::EPSILON * (self.config.len() as f64 + 4.0) * magnitude;
        CellBounds {
            upper: upper + slack,
            lower: lower - slack,
        }
    }

    /// Lower bound over the ball using only the per-source monotone bound,
    /// which is monotone under adding sources for nonnegative kernels.
    pub fn first_order_lower(&self, y: &[f64], h: f64) -> f64 {
        let mut lower = 0.0;
        for x in self.config.points() {
            let r = dist_sq(x, y).sqrt();
            let far = self.radial.phi(r + h);
            let (w_lo, w_hi) = match self.weight {
                None => (1.0, 1.0),
                Some(w) => w.range_in_target(x, y, h),
            };
            lower += if far >= 0.0 { w_lo * far } else { w_hi * far };
        }
        lower
    }
}
