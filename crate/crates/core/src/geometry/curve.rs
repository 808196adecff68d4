use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::quadrature;

type VectorMap = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;

/// A C¹ curve `γ: [0, 1] → ℝ^p` given by its map and derivative.
#[derive(Clone)]
pub struct ParametricCurve {
    name: String,
    dim: usize,
    map: VectorMap,
    derivative: VectorMap,
    rel_tol: f64,
}

impl fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricCurve")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("rel_tol", &self.rel_tol)
            .finish()
    }
}

impl ParametricCurve {
    pub fn new<M, D>(name: impl Into<String>, dim: usize, map: M, derivative: D) -> Self
    where
        M: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
        D: Fn(f64) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            dim,
            map: Arc::new(map),
            derivative: Arc::new(derivative),
            rel_tol: 1e-10,
        }
    }

    /// Relative tolerance of the arclength quadrature (default `1e-10`).
    pub fn with_tolerance(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Upper half of the unit circle, `t ↦ (cos πt, sin πt)`.
    pub fn half_circle() -> Self {
        Self::new(
            "half-circle",
            2,
            |t| vec![(PI * t).cos(), (PI * t).sin()],
            |t| vec![-PI * (PI * t).sin(), PI * (PI * t).cos()],
        )
    }

    /// Closed ellipse with semi-axes `a`, `b`.
    pub fn ellipse(a: f64, b: f64) -> Self {
        let w = 2.0 * PI;
        Self::new(
            "ellipse",
            2,
            move |t| vec![a * (w * t).cos(), b * (w * t).sin()],
            move |t| vec![-a * w * (w * t).sin(), b * w * (w * t).cos()],
        )
    }

    /// Circular helix of the given radius, rising `pitch` per turn.
    pub fn helix(radius: f64, pitch: f64, turns: f64) -> Self {
        let w = 2.0 * PI * turns;
        Self::new(
            "helix",
            3,
            move |t| vec![radius * (w * t).cos(), radius * (w * t).sin(), pitch * turns * t],
            move |t| vec![-radius * w * (w * t).sin(), radius * w * (w * t).cos(), pitch * turns],
        )
    }

    /// Straight segment from `from` to `to`.
    pub fn segment(from: Vec<f64>, to: Vec<f64>) -> Self {
        let dim = from.len();
        let (a, b) = (from.clone(), to.clone());
        let d: Vec<f64> = to.iter().zip(&from).map(|(q, p)| q - p).collect();
        Self::new(
            "segment",
            dim,
            move |t| a.iter().zip(&b).map(|(p, q)| p + t * (q - p)).collect(),
            move |_| d.clone(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rel_tol(&self) -> f64 {
        self.rel_tol
    }

    pub fn point(&self, t: f64) -> Vec<f64> {
        (self.map)(t)
    }

    pub fn tangent(&self, t: f64) -> Vec<f64> {
        (self.derivative)(t)
    }

    pub fn speed(&self, t: f64) -> f64 {
        self.tangent(t).iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Arclength of `γ([t0, t1])`.
    pub fn arclength(&self, t0: f64, t1: f64) -> f64 {
        quadrature::integrate(|t| self.speed(t), t0, t1, self.rel_tol, 0.0)
    }

    /// Parameter `t` with `arclength(0, t) = target`, by Newton iteration
    /// safeguarded with bisection.
    pub(crate) fn param_at_length(&self, target: f64, total: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut t = (target / total).clamp(0.0, 1.0);
        for _ in 0..100 {
            let f = self.arclength(0.0, t) - target;
            if f.abs() <= 1e-13 * total.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let speed = self.speed(t);
            let newton = t - f / speed;
            t = if speed > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 {
                break;
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_circle_length_is_pi() {
        let c = ParametricCurve::half_circle();
        assert!((c.arclength(0.0, 1.0) - PI).abs() < 1e-8 * PI);
    }

    #[test]
    fn ellipse_length_matches_reference() {
        // Perimeter of the (2, 1) ellipse, 4·a·E(e²=3/4).
        let c = ParametricCurve::ellipse(2.0, 1.0);
        assert!((c.arclength(0.0, 1.0) - 9.688_448_220_547_675).abs() < 1e-8);
    }

    #[test]
    fn inverse_arclength_round_trip() {
        let c = ParametricCurve::ellipse(2.0, 1.0);
        let total = c.arclength(0.0, 1.0);
        for k in 1..8 {
            let target = total * k as f64 / 8.0;
            let t = c.param_at_length(target, total);
            assert!((c.arclength(0.0, t) - target).abs() < 1e-9);
        }
    }
}
