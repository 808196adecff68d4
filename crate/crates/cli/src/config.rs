//! Experiment configuration files (TOML) and their translation into library
//! objects. Every error names the offending field.

use std::collections::BTreeMap;
use std::path::PathBuf;

use polarization::solver::Method;
use polarization::{BracketOptions, KernelSpec, ParametricCurve, ScalarField, SeedStyle, SetDescriptor, Weight};
use serde::{Deserialize, Serialize};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub task: Option<String>,
    #[serde(default)]
    pub seed: u64,
    pub set: Option<SetConfig>,
    pub kernel: Option<KernelConfig>,
    #[serde(default)]
    pub weights: BTreeMap<String, WeightConfig>,
    #[serde(default)]
    pub schedule: Schedule,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub solve: SolveConfig,
    #[serde(default)]
    pub sigma: SigmaConfig,
    #[serde(default)]
    pub distribution: DistributionConfig,
    #[serde(default)]
    pub limits: LimitsConfig,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SetConfig {
    pub kind: String,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub radius: Option<f64>,
    pub center: Option<Vec<f64>>,
    pub dim: Option<usize>,
    pub lo: Option<Vec<f64>>,
    pub hi: Option<Vec<f64>>,
    pub start: Option<f64>,
    pub end: Option<f64>,
    /// Named curve for `kind = "curve"`: half-circle, ellipse, helix, segment.
    pub curve: Option<String>,
    pub axes: Option<[f64; 2]>,
    pub pitch: Option<f64>,
    pub turns: Option<f64>,
    pub from: Option<Vec<f64>>,
    pub to: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub kind: String,
    pub s: Option<f64>,
    pub clamp: Option<f64>,
    /// Name of an entry in `[weights]`.
    pub weight: Option<String>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    pub kind: String,
    pub value: Option<f64>,
    pub u: Option<FieldConfig>,
    pub v: Option<FieldConfig>,
    pub w_min: Option<f64>,
}

/// A constant, or `offset + gradient · x`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum FieldConfig {
    Constant(f64),
    Linear { offset: f64, gradient: Vec<f64> },
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    #[serde(default)]
    pub n: Vec<usize>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Budget {
    pub max_evaluations: u64,
    pub bracket_rel_gap: f64,
    pub bracket_abs_gap: f64,
    pub max_rounds: usize,
    pub max_cell_evaluations: u64,
}

impl Default for Budget {
    fn default() -> Self {
        let b = BracketOptions::default();
        Self {
            max_evaluations: 4000,
            bracket_rel_gap: b.rel_gap,
            bracket_abs_gap: b.target_gap,
            max_rounds: b.max_rounds,
            max_cell_evaluations: b.max_evaluations,
        }
    }
}

impl Budget {
    pub fn bracket(&self) -> BracketOptions {
        BracketOptions {
            target_gap: self.bracket_abs_gap,
            rel_gap: self.bracket_rel_gap,
            initial_resolution: None,
            max_rounds: self.max_rounds,
            max_evaluations: self.max_cell_evaluations,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolveConfig {
    pub method: String,
    pub restarts: usize,
    pub start: Option<String>,
    pub epochs: usize,
    pub nodes_per_point: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            method: "anneal".into(),
            restarts: 4,
            start: None,
            epochs: 20,
            nodes_per_point: 16,
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SigmaConfig {
    /// `equally-spaced`, `seed` (the set's default layout) or `solver`.
    pub configurations: String,
}

impl Default for SigmaConfig {
    fn default() -> Self {
        Self {
            configurations: "equally-spaced".into(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct DistributionConfig {
    pub bins: usize,
    pub tolerance: f64,
}

impl Default for DistributionConfig {
    fn default() -> Self {
        Self { bins: 8, tolerance: 0.1 }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitsConfig {
    pub s: Vec<f64>,
    pub configurations: String,
}

impl Default for LimitsConfig {
    fn default() -> Self {
        Self {
            s: vec![50.0, 100.0, 200.0, 400.0],
            configurations: "equally-spaced".into(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub suite: String,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { suite: "all".into() }
    }
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// File name stem; defaults to the task name.
    pub stem: Option<String>,
}

pub fn parse(text: &str) -> Result<ExperimentConfig, String> {
    let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| format!("config: {e}"))?;
    if cfg.version != CONFIG_VERSION {
        return Err(format!("version: expected {CONFIG_VERSION}, got {}", cfg.version));
    }
    if cfg.schedule.n.windows(2).any(|w| w[1] <= w[0]) {
        return Err("schedule.n: must be strictly increasing".into());
    }
    if let Some(k) = &cfg.kernel {
        if let Some(w) = &k.weight {
            if !cfg.weights.contains_key(w) {
                return Err(format!("kernel.weight: no weight named {w:?} in [weights]"));
            }
        }
    }
    Ok(cfg)
}

fn need<T: Copy>(v: Option<T>, field: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("{field}: required"))
}

fn lib(field: &str) -> impl Fn(polarization::Error) -> String + '_ {
    move |e| format!("{field}: {e}")
}

impl ExperimentConfig {
    pub fn build_set(&self) -> Result<SetDescriptor, String> {
        let c = self.set.as_ref().ok_or("set: missing table [set]")?;
        let err = lib("set");
        let center2 = |default: [f64; 2]| -> Result<[f64; 2], String> {
            match &c.center {
                None => Ok(default),
                Some(v) if v.len() == 2 => Ok([v[0], v[1]]),
                Some(_) => Err("set.center: expected two coordinates".into()),
            }
        };
        match c.kind.as_str() {
            "interval" => SetDescriptor::interval(need(c.a, "set.a")?, need(c.b, "set.b")?).map_err(err),
            "circle" => SetDescriptor::circle_at(center2([0.0, 0.0])?, c.radius.unwrap_or(1.0)).map_err(err),
            "arc" => SetDescriptor::arc(center2([0.0, 0.0])?, c.radius.unwrap_or(1.0), need(c.start, "set.start")?, need(c.end, "set.end")?)
                .map_err(err),
            "sphere" | "ball" => {
                let center = match (&c.center, c.dim) {
                    (Some(v), _) => v.clone(),
                    (None, Some(p)) => vec![0.0; p],
                    (None, None) => return Err("set.dim: required".into()),
                };
                let r = c.radius.unwrap_or(1.0);
                if c.kind == "sphere" {
                    SetDescriptor::sphere_at(center, r).map_err(err)
                } else {
                    SetDescriptor::ball_at(center, r).map_err(err)
                }
            }
            "cube" => SetDescriptor::cube(need(c.dim, "set.dim")?).map_err(err),
            "box" => {
                let lo = c.lo.clone().ok_or("set.lo: required")?;
                let hi = c.hi.clone().ok_or("set.hi: required")?;
                SetDescriptor::boxed(lo, hi).map_err(err)
            }
            "curve" => {
                let curve = match c.curve.as_deref() {
                    Some("half-circle") => ParametricCurve::half_circle(),
                    Some("ellipse") => {
                        let [a, b] = need(c.axes, "set.axes")?;
                        ParametricCurve::ellipse(a, b)
                    }
                    Some("helix") => ParametricCurve::helix(c.radius.unwrap_or(1.0), need(c.pitch, "set.pitch")?, need(c.turns, "set.turns")?),
                    Some("segment") => ParametricCurve::segment(c.from.clone().ok_or("set.from: required")?, c.to.clone().ok_or("set.to: required")?),
                    Some(other) => {
                        return Err(format!(
                            "set.curve: unknown curve {other:?}; expected half-circle, ellipse, helix or segment"
                        ))
                    }
                    None => return Err("set.curve: required".into()),
                };
                SetDescriptor::curve(curve).map_err(err)
            }
            other => Err(format!(
                "set.kind: unknown set kind {other:?}; expected interval, circle, arc, sphere, ball, cube, box or curve"
            )),
        }
    }

    pub fn build_kernel(&self, set: &SetDescriptor) -> Result<KernelSpec, String> {
        let k = self.kernel.as_ref().ok_or("kernel: missing table [kernel]")?;
        let err = lib("kernel");
        let mut kernel = match k.kind.as_str() {
            "riesz" => {
                let s = need(k.s, "kernel.s")?;
                match &k.weight {
                    None => KernelSpec::riesz(s).map_err(err)?,
                    Some(name) => {
                        let w = self.build_weight(name, set.ambient_dim())?;
                        KernelSpec::weighted_riesz(s, w, set).map_err(lib("kernel.weight"))?
                    }
                }
            }
            "log" => {
                if k.weight.is_some() {
                    return Err("kernel.weight: weights apply to Riesz kernels only".into());
                }
                if k.s.is_some() {
                    return Err("kernel.s: the log kernel takes no exponent".into());
                }
                KernelSpec::log()
            }
            other => return Err(format!("kernel.kind: unknown kernel kind {other:?}; expected riesz or log")),
        };
        if let Some(eps) = k.clamp {
            kernel = kernel.with_clamp(eps).map_err(lib("kernel.clamp"))?;
        }
        Ok(kernel)
    }

    fn build_weight(&self, name: &str, dim: usize) -> Result<Weight, String> {
        let w = &self.weights[name];
        let field = format!("weights.{name}");
        let scalar = |f: &Option<FieldConfig>, part: &str| -> Result<ScalarField, String> {
            match f {
                None => Err(format!("{field}.{part}: required")),
                Some(FieldConfig::Constant(c)) => Ok(ScalarField::Constant(*c)),
                Some(FieldConfig::Linear { offset, gradient }) => {
                    if gradient.len() != dim {
                        return Err(format!("{field}.{part}.gradient: expected {dim} components, got {}", gradient.len()));
                    }
                    Ok(ScalarField::Linear {
                        offset: *offset,
                        gradient: gradient.clone(),
                    })
                }
            }
        };
        match w.kind.as_str() {
            "constant" => Weight::constant(need(w.value, &format!("{field}.value"))?).map_err(|e| format!("{field}: {e}")),
            "separable" => Weight::separable(scalar(&w.u, "u")?, scalar(&w.v, "v")?, need(w.w_min, &format!("{field}.w_min"))?)
                .map_err(|e| format!("{field}: {e}")),
            other => Err(format!("{field}.kind: unknown weight kind {other:?}; expected constant or separable")),
        }
    }

    pub fn schedule(&self) -> Result<&[usize], String> {
        if self.schedule.n.is_empty() {
            return Err("schedule.n: at least one N is required".into());
        }
        Ok(&self.schedule.n)
    }

    pub fn method(&self) -> Result<Method, String> {
        match self.solve.method.as_str() {
            "anneal" => Ok(Method::Anneal),
            "exchange" => Ok(Method::Exchange),
            "multistart" => Ok(Method::Multistart(self.solve.restarts.max(1))),
            other => Err(format!("solve.method: unknown method {other:?}; expected anneal, exchange or multistart")),
        }
    }

    pub fn start(&self) -> Result<Option<SeedStyle>, String> {
        match self.solve.start.as_deref() {
            None => Ok(None),
            Some(s) => parse_style(s, self.seed).map(Some).map_err(|e| format!("solve.start: {e}")),
        }
    }
}

pub fn parse_style(name: &str, seed: u64) -> Result<SeedStyle, String> {
    match name {
        "equally-spaced" => Ok(SeedStyle::EquallySpaced),
        "tensor-lattice" => Ok(SeedStyle::TensorLattice),
        "fibonacci-sphere" => Ok(SeedStyle::FibonacciSphere),
        "jittered-uniform" => Ok(SeedStyle::JitteredUniform(seed)),
        other => Err(format!(
            "unknown layout {other:?}; expected equally-spaced, tensor-lattice, fibonacci-sphere or jittered-uniform"
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
version = 1
[set]
kind = "circle"
[kernel]
kind = "riesz"
s = 3.0
[schedule]
n = [4, 8]
"#;

    #[test]
    fn parses_and_builds() {
        let cfg = parse(BASE).unwrap();
        let set = cfg.build_set().unwrap();
        assert_eq!(set.kind_name(), "circle");
        assert_eq!(cfg.build_kernel(&set).unwrap().s(), Some(3.0));
        assert_eq!(cfg.schedule().unwrap(), &[4, 8]);
    }

    #[test]
    fn errors_name_the_field() {
        let bad = BASE.replace("\"circle\"", "\"torus\"");
        assert!(parse(&bad).unwrap().build_set().unwrap_err().starts_with("set.kind"));
        let bad = BASE.replace("\"riesz\"", "\"yukawa\"");
        let cfg = parse(&bad).unwrap();
        assert!(cfg.build_kernel(&cfg.build_set().unwrap()).unwrap_err().starts_with("kernel.kind"));
        assert!(parse(&BASE.replace("[4, 8]", "[8, 4]")).unwrap_err().starts_with("schedule.n"));
        assert!(parse(&BASE.replace("version = 1", "version = 7")).unwrap_err().starts_with("version"));
        let dangling = BASE.replace("s = 3.0", "s = 3.0\nweight = \"w\"");
        assert!(parse(&dangling).unwrap_err().starts_with("kernel.weight"));
    }

    #[test]
    fn weighted_kernel() {
        let text = BASE.replace("s = 3.0", "s = 3.0\nweight = \"w\"")
            + "[weights.w]\nkind = \"separable\"\nu = { offset = 2.0, gradient = [1.0, 0.0] }\nv = 1.0\nw_min = 1.0\n";
        let cfg = parse(&text).unwrap();
        let set = cfg.build_set().unwrap();
        let k = cfg.build_kernel(&set).unwrap();
        assert_eq!(k.eval(&[1.0, 0.0], &[-1.0, 0.0]), 3.0 / 8.0);
    }
}
