//! Interaction kernels `K(x, y) = w(x, y) / |x - y|^s` and `-log |x - y|`.
//!
//! The first argument is the source and the second the observation point,
//! so the potential of a configuration is `U(y) = Σ_j K(x_j, y)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{dist_sq, SetDescriptor};

/// Radial profile `φ(r)` of a kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    Riesz { s: f64 },
    Log,
}

impl Profile {
    /// `φ` evaluated from a squared distance. Integer exponents avoid `powf`
    /// so that rational distances give exactly rounded results.
    #[inline]
    pub fn from_dist_sq(&self, r2: f64) -> f64 {
        match *self {
            Profile::Riesz { s } => {
                if r2 == 0.0 {
                    return f64::INFINITY;
                }
                if s.fract() == 0.0 && s <= 64.0 {
                    let k = s as i32;
                    if k % 2 == 0 {
                        1.0 / r2.powi(k / 2)
                    } else {
                        1.0 / (r2.powi(k / 2) * r2.sqrt())
                    }
                } else {
                    r2.powf(-0.5 * s)
                }
            }
            Profile::Log => {
                if r2 == 0.0 {
                    f64::INFINITY
                } else {
                    -0.5 * r2.ln()
                }
            }
        }
    }

    #[inline]
    pub fn at(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::INFINITY;
        }
        match *self {
            Profile::Riesz { s } => {
                if s.fract() == 0.0 && s <= 64.0 {
                    1.0 / r.powi(s as i32)
                } else {
                    r.powf(-s)
                }
            }
            Profile::Log => -r.ln(),
        }
    }

    /// `φ'(r)`, which is negative.
    #[inline]
    pub fn derivative(&self, r: f64) -> f64 {
        match *self {
            Profile::Riesz { s } => -s * self.at(r) / r,
            Profile::Log => -1.0 / r,
        }
    }

    /// Bound on the operator norm of the Hessian of `y ↦ φ(|y - x|)` at
    /// distance `r`: `max(|φ''|, |φ'|/r)`.
    #[inline]
    pub fn hessian_bound(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return f64::INFINITY;
        }
        match *self {
            Profile::Riesz { s } => s * (s + 1.0) * self.at(r) / (r * r),
            Profile::Log => 1.0 / (r * r),
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match *self {
            Profile::Riesz { s } => Some(s),
            Profile::Log => None,
        }
    }
}

type FieldFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type PairFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// A positive scalar function used to build separable weights.
#[derive(Clone)]
pub enum ScalarField {
    Constant(f64),
    /// `offset + gradient · x`.
    Linear { offset: f64, gradient: Vec<f64> },
    /// User evaluator with a declared Lipschitz constant.
    Custom { name: String, f: FieldFn, lipschitz: f64 },
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarField::Constant(c) => write!(f, "Constant({c})"),
            ScalarField::Linear { offset, gradient } => write!(f, "Linear({offset} + {gradient:?}·x)"),
            ScalarField::Custom { name, lipschitz, .. } => write!(f, "Custom({name}, L={lipschitz})"),
        }
    }
}

impl ScalarField {
    /// `a + b·x₀`; on the unit circle this is `a + b cos θ`.
    pub fn axial(a: f64, b: f64, dim: usize) -> Self {
        let mut gradient = vec![0.0; dim];
        gradient[0] = b;
        ScalarField::Linear { offset: a, gradient }
    }

    pub fn custom<F>(name: impl Into<String>, f: F, lipschitz: f64) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        ScalarField::Custom {
            name: name.into(),
            f: Arc::new(f),
            lipschitz,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            ScalarField::Constant(c) => *c,
            ScalarField::Linear { offset, gradient } => offset + gradient.iter().zip(x).map(|(g, v)| g * v).sum::<f64>(),
            ScalarField::Custom { f, .. } => f(x),
        }
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match self {
            ScalarField::Constant(_) => vec![0.0; x.len()],
            ScalarField::Linear { gradient, .. } => gradient.clone(),
            ScalarField::Custom { f, .. } => central_difference(|z| f(z), x),
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match self {
            ScalarField::Constant(_) => 0.0,
            ScalarField::Linear { gradient, .. } => gradient.iter().map(|g| g * g).sum::<f64>().sqrt(),
            ScalarField::Custom { lipschitz, .. } => *lipschitz,
        }
    }

    /// Range of the field over the ball of radius `h` about `x`.
    pub fn range_on_ball(&self, x: &[f64], h: f64) -> (f64, f64) {
        let v = self.value(x);
        let l = self.lipschitz() * h;
        (v - l, v + l)
    }

    fn is_constant(&self) -> bool {
        matches!(self, ScalarField::Constant(_))
    }
}

fn central_difference<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Vec<f64> {
    let mut z = x.to_vec();
    (0..x.len())
        .map(|i| {
            let step = 1e-6 * x[i].abs().max(1.0);
            z[i] = x[i] + step;
            let fp = f(&z);
            z[i] = x[i] - step;
            let fm = f(&z);
            z[i] = x[i];
            (fp - fm) / (2.0 * step)
        })
        .collect()
}

/// The functional form of a weight `w(x, y)` (source `x`, target `y`).
#[derive(Clone)]
pub enum WeightForm {
    Constant(f64),
    /// `w(x, y) = u(x) / v(y)`: sources of strength `u`, demand `v`.
    Separable { u: ScalarField, v: ScalarField },
    /// User evaluator; `lipschitz` bounds the variation in either argument.
    Custom { name: String, f: PairFn, lipschitz: f64 },
}

impl fmt::Debug for WeightForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightForm::Constant(c) => write!(f, "Constant({c})"),
            WeightForm::Separable { u, v } => write!(f, "Separable(u={u:?}, v={v:?})"),
            WeightForm::Custom { name, lipschitz, .. } => write!(f, "Custom({name}, L={lipschitz})"),
        }
    }
}

/// A CPD weight with a declared lower bound on the diagonal.
#[derive(Clone, Debug)]
pub struct Weight {
    form: WeightForm,
    w_min: f64,
}

impl Weight {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument(format!("constant weight must be positive, got {c}")));
        }
        Ok(Self {
            form: WeightForm::Constant(c),
            w_min: c,
        })
    }

    pub fn separable(u: ScalarField, v: ScalarField, w_min: f64) -> Result<Self> {
        Self::new(WeightForm::Separable { u, v }, w_min)
    }

    pub fn custom<F>(name: impl Into<String>, f: F, lipschitz: f64, w_min: f64) -> Result<Self>
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(
            WeightForm::Custom {
                name: name.into(),
                f: Arc::new(f),
                lipschitz,
            },
            w_min,
        )
    }

    pub fn new(form: WeightForm, w_min: f64) -> Result<Self> {
        if !(w_min > 0.0 && w_min.is_finite()) {
            return Err(Error::InvalidArgument(format!("w_min must be positive, got {w_min}")));
        }
        Ok(Self { form, w_min })
    }

    pub fn form(&self) -> &WeightForm {
        &self.form
    }

    pub fn w_min(&self) -> f64 {
        self.w_min
    }

    pub fn value(&self, x: &[f64], y: &[f64]) -> f64 {
        match &self.form {
            WeightForm::Constant(c) => *c,
            WeightForm::Separable { u, v } => u.value(x) / v.value(y),
            WeightForm::Custom { f, .. } => f(x, y),
        }
    }

    /// `w(x, x)`, checked against the declared lower bound.
    pub fn diagonal(&self, x: &[f64]) -> Result<f64> {
        let w = self.value(x, x);
        if !(w >= self.w_min) {
            return Err(Error::CpdViolation {
                value: w,
                w_min: self.w_min,
                point: x.to_vec(),
            });
        }
        Ok(w)
    }

    /// Spot check of the diagonal bound and of finiteness off the diagonal.
    pub fn audit(&self, set: &SetDescriptor, samples: usize, seed: u64) -> Result<()> {
        let pts = set.sample_uniform(samples, seed);
        for p in &pts {
            self.diagonal(p)?;
        }
        for pair in pts.windows(2) {
            let w = self.value(&pair[0], &pair[1]);
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "weight is not finite and nonnegative off the diagonal at {:?}, {:?}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(())
    }

    /// Whether `w(x, y) = a(x) b(y)`.
    pub(crate) fn source_strength(&self, x: &[f64]) -> Option<f64> {
        match &self.form {
            WeightForm::Constant(c) => Some(*c),
            WeightForm::Separable { u, .. } => Some(u.value(x)),
            WeightForm::Custom { .. } => None,
        }
    }

    /// Range of the target factor `b(y)` over a ball, for factorizable weights.
    pub(crate) fn target_factor_range(&self, y: &[f64], h: f64) -> Option<(f64, f64)> {
        match &self.form {
            WeightForm::Constant(_) => Some((1.0, 1.0)),
            WeightForm::Separable { v, .. } => {
                let (lo, hi) = v.range_on_ball(y, h);
                let b_lo = 1.0 / hi;
                let b_hi = if lo > 0.0 { 1.0 / lo } else { f64::INFINITY };
                Some((b_lo.max(0.0), b_hi))
            }
            WeightForm::Custom { .. } => None,
        }
    }

    pub(crate) fn target_factor(&self, y: &[f64]) -> Option<f64> {
        match &self.form {
            WeightForm::Constant(_) => Some(1.0),
            WeightForm::Separable { v, .. } => Some(1.0 / v.value(y)),
            WeightForm::Custom { .. } => None,
        }
    }

    /// Range of `w(x, ·)` over the ball of radius `h` about `y`.
    pub(crate) fn range_in_target(&self, x: &[f64], y: &[f64], h: f64) -> (f64, f64) {
        match &self.form {
            WeightForm::Custom { f, lipschitz, .. } => {
                let w = f(x, y);
                ((w - lipschitz * h).max(0.0), w + lipschitz * h)
            }
            _ => {
                let a = self.source_strength(x).unwrap_or(1.0);
                let (lo, hi) = self.target_factor_range(y, h).unwrap_or((1.0, 1.0));
                (a * lo, a * hi)
            }
        }
    }

    /// Gradients of `w(x, y)` with respect to `x` and to `y`.
    pub fn gradients(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        match &self.form {
            WeightForm::Constant(_) => (vec![0.0; x.len()], vec![0.0; y.len()]),
            WeightForm::Separable { u, v } => {
                let (uv, vv) = (u.value(x), v.value(y));
                let gx = u.gradient(x).into_iter().map(|g| g / vv).collect();
                let gy = v.gradient(y).into_iter().map(|g| -uv * g / (vv * vv)).collect();
                (gx, gy)
            }
            WeightForm::Custom { f, .. } => {
                let gx = central_difference(|z| f(z, y), x);
                let gy = central_difference(|z| f(x, z), y);
                (gx, gy)
            }
        }
    }

    pub(crate) fn is_constant(&self) -> bool {
        match &self.form {
            WeightForm::Constant(_) => true,
            WeightForm::Separable { u, v } => u.is_constant() && v.is_constant(),
            WeightForm::Custom { .. } => false,
        }
    }
}

/// A kernel together with its distance clamp `ε`.
#[derive(Clone, Debug)]
pub struct KernelSpec {
    profile: Profile,
    weight: Option<Weight>,
    clamp: f64,
}

impl KernelSpec {
    pub fn riesz(s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidArgument(format!("Riesz exponent must be positive, got {s}")));
        }
        Ok(Self {
            profile: Profile::Riesz { s },
            weight: None,
            clamp: 0.0,
        })
    }

    pub fn log() -> Self {
        Self {
            profile: Profile::Log,
            weight: None,
            clamp: 0.0,
        }
    }

    /// Weighted Riesz kernel; the weight is audited on 10⁴ samples of `set`.
    pub fn weighted_riesz(s: f64, weight: Weight, set: &SetDescriptor) -> Result<Self> {
        let mut k = Self::riesz(s)?;
        weight.audit(set, 10_000, 0x5eed)?;
        k.weight = Some(weight);
        Ok(k)
    }

    /// Replaces the distance clamp `ε ≥ 0`.
    pub fn with_clamp(mut self, eps: f64) -> Result<Self> {
        if !(eps >= 0.0 && eps.is_finite()) {
            return Err(Error::InvalidArgument(format!("clamp must be nonnegative, got {eps}")));
        }
        self.clamp = eps;
        Ok(self)
    }

    pub fn profile(&self) -> Profile {
        self.profile
    }

    pub fn s(&self) -> Option<f64> {
        self.profile.exponent()
    }

    pub fn is_log(&self) -> bool {
        self.profile == Profile::Log
    }

    pub fn weight(&self) -> Option<&Weight> {
        self.weight.as_ref()
    }

    pub fn clamp(&self) -> f64 {
        self.clamp
    }

    /// Whether `K(x, y) = K(y, x)` for all arguments by construction.
    pub fn is_symmetric(&self) -> bool {
        self.weight.as_ref().is_none_or(|w| w.is_constant())
    }

    /// `w(x, y) / max(|x - y|, ε)^s`, or `-log max(|x - y|, ε)`.
    #[inline]
    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let r2 = dist_sq(x, y).max(self.clamp * self.clamp);
        let phi = self.profile.from_dist_sq(r2);
        match &self.weight {
            None => phi,
            Some(w) => w.value(x, y) * phi,
        }
    }

    /// `w(x, x)`, or 1 for unweighted kernels.
    pub fn diagonal_weight(&self, x: &[f64]) -> Result<f64> {
        match &self.weight {
            None => Ok(1.0),
            Some(w) => w.diagonal(x),
        }
    }

    /// Gradients of `K(x, y)` in `x` and in `y`, with the clamp applied.
    pub fn gradients(&self, x: &[f64], y: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let r = dist_sq(x, y).sqrt();
        let p = x.len();
        if r < self.clamp || r == 0.0 {
            return (vec![0.0; p], vec![0.0; p]);
        }
        let phi = self.profile.at(r);
        let dphi = self.profile.derivative(r);
        // ∂/∂y φ(|y - x|) = φ'(r) (y - x)/r.
        let dy: Vec<f64> = y.iter().zip(x).map(|(a, b)| dphi * (a - b) / r).collect();
        match &self.weight {
            None => (dy.iter().map(|v| -v).collect(), dy),
            Some(w) => {
                let wv = w.value(x, y);
                let (gx, gy) = w.gradients(x, y);
                let ex = dy.iter().zip(&gx).map(|(d, g)| -wv * d + g * phi).collect();
                let ey = dy.iter().zip(&gy).map(|(d, g)| wv * d + g * phi).collect();
                (ex, ey)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_examples() {
        let k = KernelSpec::riesz(2.0).unwrap();
        assert_eq!(k.eval(&[1.0, 0.0], &[-1.0, 0.0]), 0.25);
        let c = SetDescriptor::circle(1.0).unwrap();
        let w = KernelSpec::weighted_riesz(2.0, Weight::constant(2.0).unwrap(), &c).unwrap();
        assert_eq!(w.eval(&[1.0, 0.0], &[-1.0, 0.0]), 0.5);
        assert_eq!(KernelSpec::log().eval(&[0.0], &[0.5]), 2f64.ln());
        assert_eq!(k.eval(&[0.3, 0.1], &[0.3, 0.1]), f64::INFINITY);
    }

    #[test]
    fn diagonal_examples() {
        let w = Weight::constant(3.0).unwrap();
        assert_eq!(w.diagonal(&[0.2, 0.9]).unwrap(), 3.0);
        let u = Weight::separable(ScalarField::axial(2.0, 1.0, 2), ScalarField::Constant(1.0), 1.0).unwrap();
        assert_eq!(u.diagonal(&[1.0, 0.0]).unwrap(), 3.0);
        let v = Weight::separable(ScalarField::Constant(1.0), ScalarField::axial(2.0, 1.0, 2), 0.3).unwrap();
        assert_eq!(v.diagonal(&[-1.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn cpd_violation_detected() {
        let w = Weight::separable(ScalarField::axial(0.5, 1.0, 2), ScalarField::Constant(1.0), 0.1).unwrap();
        assert!(matches!(w.diagonal(&[-1.0, 0.0]), Err(Error::CpdViolation { .. })));
        let c = SetDescriptor::circle(1.0).unwrap();
        assert!(KernelSpec::weighted_riesz(2.0, w, &c).is_err());
    }

    #[test]
    fn clamp_limits_singularity() {
        let k = KernelSpec::riesz(2.0).unwrap().with_clamp(0.5).unwrap();
        assert_eq!(k.eval(&[0.0], &[0.0]), 4.0);
        assert!(KernelSpec::riesz(-1.0).is_err());
        assert!(KernelSpec::riesz(1.0).unwrap().with_clamp(-1.0).is_err());
    }

    #[test]
    fn odd_and_fractional_exponents() {
        let x = [0.0, 0.0];
        let y = [3.0, 4.0];
        assert_eq!(KernelSpec::riesz(3.0).unwrap().eval(&x, &y), 1.0 / 125.0);
        let half = KernelSpec::riesz(0.5).unwrap().eval(&x, &y);
        assert!((half - 5f64.powf(-0.5)).abs() < 1e-16);
    }

    #[test]
    fn gradients_match_finite_differences() {
        let c = SetDescriptor::circle(1.0).unwrap();
        let w = Weight::separable(ScalarField::axial(2.0, 1.0, 2), ScalarField::axial(3.0, -0.5, 2), 0.1).unwrap();
        for k in [KernelSpec::riesz(1.5).unwrap(), KernelSpec::log(), KernelSpec::weighted_riesz(2.0, w, &c).unwrap()] {
            let x = [0.3, -0.2];
            let y = [-0.4, 0.5];
            let (gx, gy) = k.gradients(&x, &y);
            let fx = central_difference(|z| k.eval(z, &y), &x);
            let fy = central_difference(|z| k.eval(&x, z), &y);
            for i in 0..2 {
                assert!((gx[i] - fx[i]).abs() < 1e-6 * (1.0 + fx[i].abs()));
                assert!((gy[i] - fy[i]).abs() < 1e-6 * (1.0 + fy[i].abs()));
            }
        }
    }

    #[test]
    fn hessian_bound_dominates_second_difference() {
        for p in [Profile::Riesz { s: 3.0 }, Profile::Log] {
            let r = 0.7;
            let h = 1e-4;
            let second = (p.at(r + h) - 2.0 * p.at(r) + p.at(r - h)) / (h * h);
            assert!(second.abs() <= p.hessian_bound(r) * (1.0 + 1e-6));
            assert!(p.derivative(r).abs() / r <= p.hessian_bound(r));
        }
    }
}
