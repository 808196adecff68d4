//! Compact sets `A ⊂ ℝ^p` with closed-form Hausdorff measure, certified
//! meshing, uniform sampling and nearest-point projection.
//!
//! All distances are ambient Euclidean distances.

mod curve;
mod mesh;

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use curve::ParametricCurve;
pub use mesh::{Cell, Mesh, DEFAULT_NODE_CAP};

use crate::error::{Error, Result};

/// Largest ambient dimension accepted by the library.
pub const MAX_DIM: usize = 16;

/// The supported geometries.
#[derive(Clone, Debug)]
pub enum SetKind {
    /// `[a, b] ⊂ ℝ`.
    Interval { a: f64, b: f64 },
    /// Circle in the plane.
    Circle { center: [f64; 2], radius: f64 },
    /// Closed circular arc from angle `start` to `end` (counter-clockwise).
    Arc {
        center: [f64; 2],
        radius: f64,
        start: f64,
        end: f64,
    },
    /// Sphere `S^{p-1} ⊂ ℝ^p`.
    Sphere {
        dim: usize,
        center: Vec<f64>,
        radius: f64,
    },
    /// Closed ball in `ℝ^p`.
    Ball {
        dim: usize,
        center: Vec<f64>,
        radius: f64,
    },
    /// Unit cube `[0, 1]^p`.
    Cube { dim: usize },
    /// Axis-aligned box `[lo, hi]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Parametric C¹ curve.
    Curve(ParametricCurve),
}

/// A compact set together with its dimensions and `H_d` measure.
#[derive(Clone, Debug)]
pub struct SetDescriptor {
    kind: SetKind,
    ambient_dim: usize,
    hausdorff_dim: usize,
    measure: f64,
    diameter: f64,
}

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: usize) -> f64 {
    assert!(k > 0);
    if k.is_multiple_of(2) {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        // Γ(1/2) = √π, Γ(x + 1) = x Γ(x).
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < k as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Volume of the unit ball in `ℝ^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    PI.powf(d as f64 / 2.0) / gamma_half(d + 2)
}

/// Surface area of the unit sphere `S^{p-1} ⊂ ℝ^p`.
pub fn unit_sphere_area(p: usize) -> f64 {
    2.0 * PI.powf(p as f64 / 2.0) / gamma_half(p)
}

fn finite(v: &[f64]) -> bool {
    v.iter().all(|x| x.is_finite())
}

fn check_dim(p: usize) -> Result<()> {
    if p == 0 || p > MAX_DIM {
        return Err(Error::InvalidSet(format!("ambient dimension {p} outside 1..={MAX_DIM}")));
    }
    Ok(())
}

pub(crate) fn dist(x: &[f64], y: &[f64]) -> f64 {
    dist_sq(x, y).sqrt()
}

pub(crate) fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Angle of `(x, y)` in `[0, 2π)`.
pub(crate) fn angle_of(x: f64, y: f64) -> f64 {
    let t = y.atan2(x);
    if t < 0.0 {
        let u = t + 2.0 * PI;
        if u >= 2.0 * PI {
            0.0
        } else {
            u
        }
    } else {
        t
    }
}

impl SetDescriptor {
    fn build(kind: SetKind) -> Result<Self> {
        let (ambient_dim, hausdorff_dim, measure, diameter) = match &kind {
            SetKind::Interval { a, b } => {
                if !(a.is_finite() && b.is_finite() && a < b) {
                    return Err(Error::InvalidSet(format!("interval needs a < b, got [{a}, {b}]")));
                }
                (1, 1, b - a, b - a)
            }
            SetKind::Circle { center, radius } => {
                if !(finite(center) && radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidSet(format!("circle radius must be positive, got {radius}")));
                }
                (2, 1, 2.0 * PI * radius, 2.0 * radius)
            }
            SetKind::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let span = end - start;
                if !(finite(center) && radius.is_finite() && *radius > 0.0 && span > 0.0 && span <= 2.0 * PI) {
                    return Err(Error::InvalidSet(format!(
                        "arc needs radius > 0 and 0 < end - start <= 2π, got r={radius}, span={span}"
                    )));
                }
                let diam = if span >= PI { 2.0 * radius } else { 2.0 * radius * (span / 2.0).sin() };
                (2, 1, radius * span, diam)
            }
            SetKind::Sphere { dim, center, radius } => {
                check_dim(*dim)?;
                if *dim < 2 || center.len() != *dim || !finite(center) || !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidSet("sphere needs p >= 2, matching center and radius > 0".into()));
                }
                (*dim, dim - 1, unit_sphere_area(*dim) * radius.powi(*dim as i32 - 1), 2.0 * radius)
            }
            SetKind::Ball { dim, center, radius } => {
                check_dim(*dim)?;
                if center.len() != *dim || !finite(center) || !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidSet("ball needs matching center and radius > 0".into()));
                }
                (*dim, *dim, unit_ball_volume(*dim) * radius.powi(*dim as i32), 2.0 * radius)
            }
            SetKind::Cube { dim } => {
                check_dim(*dim)?;
                (*dim, *dim, 1.0, (*dim as f64).sqrt())
            }
            SetKind::Box { lo, hi } => {
                check_dim(lo.len())?;
                if lo.len() != hi.len() || !finite(lo) || !finite(hi) || lo.iter().zip(hi).any(|(a, b)| a >= b) {
                    return Err(Error::InvalidSet("box needs lo < hi in every coordinate".into()));
                }
                let vol = lo.iter().zip(hi).map(|(a, b)| b - a).product();
                (lo.len(), lo.len(), vol, dist(lo, hi))
            }
            SetKind::Curve(c) => {
                check_dim(c.dim())?;
                const PROBES: usize = 1024;
                let mut scale: f64 = 0.0;
                let mut speeds = Vec::with_capacity(PROBES + 1);
                for i in 0..=PROBES {
                    let t = i as f64 / PROBES as f64;
                    let p = c.point(t);
                    let v = c.tangent(t);
                    if p.len() != c.dim() || v.len() != c.dim() || !finite(&p) || !finite(&v) {
                        return Err(Error::InvalidSet(format!("curve '{}' is not finite at t={t}", c.name())));
                    }
                    scale = scale.max(p.iter().fold(0.0f64, |m, x| m.max(x.abs())));
                    speeds.push(c.speed(t));
                }
                let vmax = speeds.iter().cloned().fold(0.0, f64::max);
                if let Some(i) = speeds.iter().position(|&s| !(s > 1e-12 * vmax.max(scale).max(1e-300))) {
                    return Err(Error::InvalidSet(format!(
                        "curve '{}' has vanishing derivative near t={}",
                        c.name(),
                        i as f64 / PROBES as f64
                    )));
                }
                let length = c.arclength(0.0, 1.0);
                let samples: Vec<Vec<f64>> = (0..=256).map(|i| c.point(i as f64 / 256.0)).collect();
                let mut diam: f64 = 0.0;
                for i in 0..samples.len() {
                    for j in i + 1..samples.len() {
                        diam = diam.max(dist(&samples[i], &samples[j]));
                    }
                }
                (c.dim(), 1, length, diam.max(1e-300))
            }
        };
        Ok(Self {
            kind,
            ambient_dim,
            hausdorff_dim,
            measure,
            diameter,
        })
    }

    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::build(SetKind::Interval { a, b })
    }

    /// Circle of radius `r` centred at the origin.
    pub fn circle(radius: f64) -> Result<Self> {
        Self::circle_at([0.0, 0.0], radius)
    }

    pub fn circle_at(center: [f64; 2], radius: f64) -> Result<Self> {
        Self::build(SetKind::Circle { center, radius })
    }

    pub fn arc(center: [f64; 2], radius: f64, start: f64, end: f64) -> Result<Self> {
        Self::build(SetKind::Arc {
            center,
            radius,
            start,
            end,
        })
    }

    /// Unit sphere `S^{p-1} ⊂ ℝ^p`.
    pub fn sphere(p: usize) -> Result<Self> {
        Self::sphere_at(vec![0.0; p], 1.0)
    }

    pub fn sphere_at(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::build(SetKind::Sphere {
            dim: center.len(),
            center,
            radius,
        })
    }

    /// Unit ball `B^p`.
    pub fn ball(p: usize) -> Result<Self> {
        Self::ball_at(vec![0.0; p], 1.0)
    }

    pub fn ball_at(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::build(SetKind::Ball {
            dim: center.len(),
            center,
            radius,
        })
    }

    /// Unit cube `[0, 1]^p`.
    pub fn cube(p: usize) -> Result<Self> {
        Self::build(SetKind::Cube { dim: p })
    }

    pub fn boxed(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        Self::build(SetKind::Box { lo, hi })
    }

    pub fn curve(curve: ParametricCurve) -> Result<Self> {
        Self::build(SetKind::Curve(curve))
    }

    pub fn kind(&self) -> &SetKind {
        &self.kind
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn hausdorff_dim(&self) -> usize {
        self.hausdorff_dim
    }

    /// `H_d(A)`, normalised so the unit `d`-cube has measure one.
    pub fn hausdorff_measure(&self) -> f64 {
        self.measure
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Short lowercase name of the kind.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            SetKind::Interval { .. } => "interval",
            SetKind::Circle { .. } => "circle",
            SetKind::Arc { .. } => "arc",
            SetKind::Sphere { .. } => "sphere",
            SetKind::Ball { .. } => "ball",
            SetKind::Cube { .. } => "cube",
            SetKind::Box { .. } => "box",
            SetKind::Curve(_) => "curve",
        }
    }

    /// Membership tolerance used for configurations: `1e-9 · diam(A)`.
    pub fn membership_tolerance(&self) -> f64 {
        1e-9 * self.diameter
    }

    /// True when `x` lies within `tol` of the set.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        x.len() == self.ambient_dim && finite(x) && dist(&self.project(x), x) <= tol
    }

    /// A nearest point of the set. Ties are broken towards the
    /// lexicographically smallest candidate.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            SetKind::Interval { a, b } => vec![x[0].clamp(*a, *b)],
            SetKind::Circle { center, radius } => radial(x, center, *radius),
            SetKind::Sphere { center, radius, .. } => radial(x, center, *radius),
            SetKind::Ball { center, radius, .. } => {
                if dist(x, center) <= *radius {
                    x.to_vec()
                } else {
                    radial(x, center, *radius)
                }
            }
            SetKind::Cube { .. } => x.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
            SetKind::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).map(|(v, (l, h))| v.clamp(*l, *h)).collect(),
            SetKind::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let (vx, vy) = (x[0] - center[0], x[1] - center[1]);
                let at = |t: f64| vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()];
                let span = end - start;
                if vx == 0.0 && vy == 0.0 {
                    // Every arc point is equidistant; take the lexicographically smallest.
                    let mut best = at(*start);
                    let mut cands = vec![at(*end)];
                    if rel_angle(PI, *start) <= span {
                        cands.push(vec![center[0] - radius, center[1]]);
                    }
                    for c in cands {
                        if lex_less(&c, &best) {
                            best = c;
                        }
                    }
                    return best;
                }
                let rel = rel_angle(angle_of(vx, vy), *start);
                if rel <= span {
                    return at(start + rel);
                }
                let (p0, p1) = (at(*start), at(*end));
                let (d0, d1) = (dist_sq(x, &p0), dist_sq(x, &p1));
                if d0 < d1 || (d0 == d1 && !lex_less(&p1, &p0)) {
                    p0
                } else {
                    p1
                }
            }
            SetKind::Curve(c) => project_curve(c, x),
        }
    }

    /// Outward unit normal and radius at `x` when the set is a circle, arc or
    /// sphere.
    pub fn sphere_frame(&self, x: &[f64]) -> Option<(Vec<f64>, f64)> {
        let (center, radius): (&[f64], f64) = match &self.kind {
            SetKind::Circle { center, radius } | SetKind::Arc { center, radius, .. } => (center, *radius),
            SetKind::Sphere { center, radius, .. } => (center, *radius),
            _ => return None,
        };
        let n: Vec<f64> = x.iter().zip(center).map(|(a, c)| (a - c) / radius).collect();
        Some((n, radius))
    }

    /// `n` independent points drawn from normalised `H_d` on the set.
    pub fn sample_uniform(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let curve_total = match &self.kind {
            SetKind::Curve(_) => self.measure,
            _ => 0.0,
        };
        (0..n).map(|_| self.sample_one(&mut rng, curve_total)).collect()
    }

    fn sample_one(&self, rng: &mut ChaCha8Rng, curve_total: f64) -> Vec<f64> {
        match &self.kind {
            SetKind::Interval { a, b } => vec![a + (b - a) * rng.random::<f64>()],
            SetKind::Circle { center, radius } => {
                let t = 2.0 * PI * rng.random::<f64>();
                vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            }
            SetKind::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let t = start + (end - start) * rng.random::<f64>();
                vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()]
            }
            SetKind::Sphere { center, radius, .. } => {
                let dir = gaussian_direction(rng, center.len());
                center.iter().zip(&dir).map(|(c, d)| c + radius * d).collect()
            }
            SetKind::Ball { dim, center, radius } => {
                let dir = gaussian_direction(rng, *dim);
                let r = radius * rng.random::<f64>().powf(1.0 / *dim as f64);
                center.iter().zip(&dir).map(|(c, d)| c + r * d).collect()
            }
            SetKind::Cube { dim } => (0..*dim).map(|_| rng.random::<f64>()).collect(),
            SetKind::Box { lo, hi } => lo.iter().zip(hi).map(|(l, h)| l + (h - l) * rng.random::<f64>()).collect(),
            SetKind::Curve(c) => {
                let target = curve_total * rng.random::<f64>();
                c.point(c.param_at_length(target, curve_total))
            }
        }
    }

    /// Parameter range of a one-dimensional set: angle for circles and arcs,
    /// abscissa for intervals, curve parameter for curves.
    pub fn param_range(&self) -> Option<(f64, f64)> {
        match &self.kind {
            SetKind::Interval { a, b } => Some((*a, *b)),
            SetKind::Circle { .. } => Some((0.0, 2.0 * PI)),
            SetKind::Arc { start, end, .. } => Some((*start, *end)),
            SetKind::Curve(_) => Some((0.0, 1.0)),
            _ => None,
        }
    }

    /// Parameter of a point of a one-dimensional set.
    pub fn param_of(&self, x: &[f64]) -> Option<f64> {
        match &self.kind {
            SetKind::Interval { .. } => Some(x[0]),
            SetKind::Circle { center, .. } => Some(angle_of(x[0] - center[0], x[1] - center[1])),
            SetKind::Arc { center, start, .. } => {
                Some(start + rel_angle(angle_of(x[0] - center[0], x[1] - center[1]), *start))
            }
            SetKind::Curve(c) => Some(curve_param(c, x)),
            _ => None,
        }
    }

    /// Point at parameter `t` of a one-dimensional set.
    pub fn point_at_param(&self, t: f64) -> Option<Vec<f64>> {
        match &self.kind {
            SetKind::Interval { .. } => Some(vec![t]),
            SetKind::Circle { center, radius } | SetKind::Arc { center, radius, .. } => {
                Some(vec![center[0] + radius * t.cos(), center[1] + radius * t.sin()])
            }
            SetKind::Curve(c) => Some(c.point(t)),
            _ => None,
        }
    }

    /// Point at arclength fraction `f ∈ [0, 1]` of a one-dimensional set.
    pub fn point_at_fraction(&self, f: f64) -> Option<Vec<f64>> {
        let f = f.clamp(0.0, 1.0);
        match &self.kind {
            SetKind::Curve(c) => Some(c.point(c.param_at_length(f * self.measure, self.measure))),
            _ => {
                let (t0, t1) = self.param_range()?;
                self.point_at_param(t0 + f * (t1 - t0))
            }
        }
    }

    /// Arclength element `|dγ/dt|` of a one-dimensional set.
    pub fn param_speed(&self, t: f64) -> Option<f64> {
        match &self.kind {
            SetKind::Interval { .. } => Some(1.0),
            SetKind::Circle { radius, .. } | SetKind::Arc { radius, .. } => Some(*radius),
            SetKind::Curve(c) => Some(c.speed(t)),
            _ => None,
        }
    }

    /// The image of the set under `x ↦ α x + shift`.
    pub fn transformed(&self, alpha: f64, shift: &[f64]) -> Result<Self> {
        if !(alpha > 0.0) || shift.len() != self.ambient_dim {
            return Err(Error::InvalidArgument("transform needs alpha > 0 and a shift of ambient dimension".into()));
        }
        let map = |v: &[f64]| -> Vec<f64> { v.iter().zip(shift).map(|(x, s)| alpha * x + s).collect() };
        match &self.kind {
            SetKind::Interval { a, b } => Self::interval(alpha * a + shift[0], alpha * b + shift[0]),
            SetKind::Circle { center, radius } => {
                let c = map(center);
                Self::circle_at([c[0], c[1]], alpha * radius)
            }
            SetKind::Arc {
                center,
                radius,
                start,
                end,
            } => {
                let c = map(center);
                Self::arc([c[0], c[1]], alpha * radius, *start, *end)
            }
            SetKind::Sphere { center, radius, .. } => Self::sphere_at(map(center), alpha * radius),
            SetKind::Ball { center, radius, .. } => Self::ball_at(map(center), alpha * radius),
            SetKind::Cube { dim } => Self::boxed(map(&vec![0.0; *dim]), map(&vec![1.0; *dim])),
            SetKind::Box { lo, hi } => Self::boxed(map(lo), map(hi)),
            SetKind::Curve(c) => {
                let (c1, c2) = (c.clone(), c.clone());
                let s1: Vec<f64> = shift.to_vec();
                let curve = ParametricCurve::new(
                    format!("{}-transformed", c.name()),
                    c.dim(),
                    move |t| c1.point(t).iter().zip(&s1).map(|(x, s)| alpha * x + s).collect(),
                    move |t| c2.tangent(t).iter().map(|v| alpha * v).collect(),
                )
                .with_tolerance(c.rel_tol());
                Self::curve(curve)
            }
        }
    }
}

/// Angle `t - start` reduced to `[0, 2π)`.
fn rel_angle(t: f64, start: f64) -> f64 {
    let r = (t - start).rem_euclid(2.0 * PI);
    if r >= 2.0 * PI {
        0.0
    } else {
        r
    }
}

fn radial(x: &[f64], center: &[f64], radius: f64) -> Vec<f64> {
    let v: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
    let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n == 0.0 {
        // Centre tie: the lexicographically smallest point is c - r e_1.
        let mut p = center.to_vec();
        p[0] -= radius;
        return p;
    }
    center.iter().zip(&v).map(|(c, a)| c + radius * a / n).collect()
}

fn gaussian_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

fn curve_param(c: &ParametricCurve, x: &[f64]) -> f64 {
    const SCAN: usize = 2048;
    let mut best_t = 0.0;
    let mut best_p = c.point(0.0);
    let mut best_d = dist_sq(x, &best_p);
    for i in 1..=SCAN {
        let t = i as f64 / SCAN as f64;
        let p = c.point(t);
        let d = dist_sq(x, &p);
        if d < best_d || (d == best_d && lex_less(&p, &best_p)) {
            best_t = t;
            best_d = d;
            best_p = p;
        }
    }
    // Golden-section refinement on the neighbouring bracket.
    let h = 1.0 / SCAN as f64;
    let (mut lo, mut hi) = ((best_t - h).max(0.0), (best_t + h).min(1.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| dist_sq(x, &c.point(t));
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..80 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    // The squared distance is flat at the minimum, so finish with a secant
    // solve of the stationarity condition (γ(t) - x)·γ'(t) = 0.
    let (lo0, hi0) = ((best_t - h).max(0.0), (best_t + h).min(1.0));
    let g = |t: f64| -> f64 {
        let p = c.point(t);
        c.tangent(t).iter().zip(p.iter().zip(x)).map(|(v, (a, b))| v * (a - b)).sum()
    };
    let mut t0 = 0.5 * (lo + hi);
    let mut t1 = (t0 + 1e-7).min(hi0);
    if t1 == t0 {
        t1 = t0 - 1e-7;
    }
    let (mut g0, mut g1) = (g(t0), g(t1));
    for _ in 0..30 {
        if g1 == g0 {
            break;
        }
        let t2 = (t1 - g1 * (t1 - t0) / (g1 - g0)).clamp(lo0, hi0);
        t0 = t1;
        g0 = g1;
        t1 = t2;
        g1 = g(t1);
        if (t1 - t0).abs() < 1e-16 {
            break;
        }
    }
    let mid = 0.5 * (lo + hi);
    let t = if g(t1).abs() <= g(mid).abs() { t1 } else { mid };
    if f(t) <= best_d * (1.0 + 1e-12) {
        t
    } else {
        best_t
    }
}

fn project_curve(c: &ParametricCurve, x: &[f64]) -> Vec<f64> {
    c.point(curve_param(c, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_measures() {
        assert_eq!(SetDescriptor::circle(1.0).unwrap().hausdorff_measure(), 2.0 * PI);
        assert_eq!(SetDescriptor::cube(3).unwrap().hausdorff_measure(), 1.0);
        assert!((SetDescriptor::sphere(3).unwrap().hausdorff_measure() - 4.0 * PI).abs() < 1e-14);
        assert!((SetDescriptor::ball(3).unwrap().hausdorff_measure() - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((SetDescriptor::ball(2).unwrap().hausdorff_measure() - PI).abs() < 1e-15);
        assert_eq!(SetDescriptor::interval(-1.0, 1.0).unwrap().hausdorff_measure(), 2.0);
    }

    #[test]
    fn gamma_half_values() {
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(6), 2.0);
        assert!((gamma_half(1) - PI.sqrt()).abs() < 1e-15);
        assert!((gamma_half(5) - 0.75 * PI.sqrt()).abs() < 1e-15);
        assert_eq!(unit_ball_volume(1), 2.0);
    }

    #[test]
    fn half_circle_curve_measure() {
        let s = SetDescriptor::curve(ParametricCurve::half_circle()).unwrap();
        assert!((s.hausdorff_measure() - PI).abs() < 1e-8 * PI);
        assert_eq!(s.hausdorff_dim(), 1);
    }

    #[test]
    fn degenerate_curve_rejected() {
        let c = ParametricCurve::new("stalled", 2, |t| vec![t * t, 0.0], |t| vec![2.0 * t, 0.0]);
        assert!(matches!(SetDescriptor::curve(c), Err(Error::InvalidSet(_))));
    }

    #[test]
    fn invalid_sets_rejected() {
        assert!(SetDescriptor::interval(1.0, 1.0).is_err());
        assert!(SetDescriptor::circle(0.0).is_err());
        assert!(SetDescriptor::sphere(1).is_err());
        assert!(SetDescriptor::boxed(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn projection_examples() {
        let s = SetDescriptor::sphere(3).unwrap();
        assert_eq!(s.project(&[2.0, 0.0, 0.0]), vec![1.0, 0.0, 0.0]);
        assert_eq!(s.project(&[0.0, 0.0, 0.0]), vec![-1.0, 0.0, 0.0]);
        let q = SetDescriptor::cube(2).unwrap();
        assert_eq!(q.project(&[-0.3, 0.5]), vec![0.0, 0.5]);
        let i = SetDescriptor::interval(0.0, 1.0).unwrap();
        assert_eq!(i.project(&[0.4]), vec![0.4]);
    }

    #[test]
    fn arc_projection_outside_span_goes_to_endpoint() {
        let a = SetDescriptor::arc([0.0, 0.0], 1.0, 0.0, PI / 2.0).unwrap();
        let p = a.project(&[0.0, -2.0]);
        assert!(dist(&p, &[1.0, 0.0]) < 1e-15);
        let q = a.project(&[-1.0, 3.0]);
        assert!(dist(&q, &[0.0, 1.0]) < 1e-15);
    }

    #[test]
    fn curve_projection_is_nearest() {
        let s = SetDescriptor::curve(ParametricCurve::half_circle()).unwrap();
        let p = s.project(&[0.3, 2.0]);
        let want = [0.3 / (0.09f64 + 4.0).sqrt(), 2.0 / (0.09f64 + 4.0).sqrt()];
        assert!(dist(&p, &want) < 1e-9);
    }

    #[test]
    fn samples_are_members_and_deterministic() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let a = c.sample_uniform(4, 7);
        for p in &a {
            assert!((p[0].hypot(p[1]) - 1.0).abs() < 1e-15);
        }
        assert_eq!(a, c.sample_uniform(4, 7));
        for set in [
            SetDescriptor::ball(3).unwrap(),
            SetDescriptor::sphere(4).unwrap(),
            SetDescriptor::boxed(vec![-1.0, 2.0], vec![0.0, 5.0]).unwrap(),
            SetDescriptor::curve(ParametricCurve::ellipse(2.0, 1.0)).unwrap(),
        ] {
            for p in set.sample_uniform(50, 3) {
                assert!(set.contains(&p, 1e-9), "{} sample {:?}", set.kind_name(), p);
            }
        }
    }

    #[test]
    fn sphere_height_is_uniform() {
        // Archimedes: the z-coordinate of a uniform point on S² is uniform on [-1, 1].
        let s = SetDescriptor::sphere(3).unwrap();
        let mut z: Vec<f64> = s.sample_uniform(100_000, 11).into_iter().map(|p| p[2]).collect();
        z.sort_by(f64::total_cmp);
        let n = z.len() as f64;
        let ks = z
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let f = (v + 1.0) / 2.0;
                (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS distance {ks}");
    }

    #[test]
    fn params_round_trip() {
        let c = SetDescriptor::circle_at([1.0, -2.0], 3.0).unwrap();
        let p = c.point_at_param(4.0).unwrap();
        assert!((c.param_of(&p).unwrap() - 4.0).abs() < 1e-13);
    }
}
