//! One function per task; each returns per-N records and a summary.

use polarization::asymptotics::{
    chebyshev_ratio_series, equally_spaced_circle_series, estimate_limit, predicted_limit, ratio_series, tau, RatioSeries,
};
use polarization::distribution::compare_distribution;
use polarization::energy::{minimize_energy, EnergyOptions};
use polarization::extremal::check_large_s_limits;
use polarization::geometry::SetKind;
use polarization::solver::default_style;
use polarization::verify::{run_suite, Check};
use polarization::{optimize, seed_configuration, Configuration, KernelSpec, SeedStyle, SetDescriptor, SolveOptions, SolveResult};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;

#[derive(Clone, Debug, Serialize)]
pub struct Record {
    pub n: usize,
    pub value: f64,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub tau: Option<f64>,
    pub ratio: Option<f64>,
    pub budget_exhausted: bool,
    pub details: Value,
}

pub struct Outcome {
    pub records: Vec<Record>,
    pub summary: Value,
    /// Additional plot tables: (file suffix, CSV text).
    pub tables: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl Outcome {
    fn new(records: Vec<Record>, summary: Value) -> Self {
        Self {
            records,
            summary,
            tables: Vec::new(),
            checks: Vec::new(),
        }
    }
}

type TaskResult = Result<Outcome, String>;

fn lib<T>(r: polarization::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

/// `τ_{s,d}(N)` where it is defined, otherwise `N`.
fn normalization(kernel: &KernelSpec, d: usize, n: usize) -> f64 {
    match kernel.s() {
        Some(s) if s >= d as f64 && n >= 2 => tau(s, d, n as f64).unwrap_or(n as f64),
        _ => n as f64,
    }
}

fn solve_options(cfg: &ExperimentConfig) -> Result<SolveOptions, String> {
    Ok(SolveOptions {
        method: cfg.method()?,
        seed: cfg.seed,
        max_evaluations: cfg.budget.max_evaluations,
        epochs: cfg.solve.epochs,
        nodes_per_point: cfg.solve.nodes_per_point,
        start: cfg.start()?,
        bracket: cfg.budget.bracket(),
    })
}

fn solve_record(r: &SolveResult, kernel: &KernelSpec, d: usize) -> Record {
    let n = r.config.len();
    let t = normalization(kernel, d, n);
    let value = r.estimate.midpoint();
    Record {
        n,
        value,
        lower: Some(r.estimate.lower),
        upper: Some(r.estimate.upper),
        tau: Some(t),
        ratio: Some(value / t),
        budget_exhausted: r.budget_exhausted(),
        details: json!({
            "witness": r.estimate.witness,
            "config": r.config.to_vecs(),
            "evaluations": r.trace.evaluations,
            "restarts": r.trace.restarts,
            "seed": r.seed,
        }),
    }
}

pub fn solve(cfg: &ExperimentConfig) -> TaskResult {
    let set = cfg.build_set()?;
    let kernel = cfg.build_kernel(&set)?;
    let opts = solve_options(cfg)?;
    let d = set.hausdorff_dim();
    let mut records = Vec::new();
    for &n in cfg.schedule()? {
        let r = lib(optimize(&set, &kernel, n, &opts))?;
        records.push(solve_record(&r, &kernel, d));
    }
    Ok(Outcome::new(records, json!({ "normalization": norm_name(&kernel, d) })))
}

fn norm_name(kernel: &KernelSpec, d: usize) -> &'static str {
    match kernel.s() {
        Some(s) if s > d as f64 => "N^(s/d)",
        Some(s) if s == d as f64 => "N ln N",
        _ => "N",
    }
}

pub fn energy(cfg: &ExperimentConfig) -> TaskResult {
    let set = cfg.build_set()?;
    let kernel = cfg.build_kernel(&set)?;
    let d = set.hausdorff_dim() as f64;
    let opts = EnergyOptions {
        seed: cfg.seed,
        max_evaluations: cfg.budget.max_evaluations,
        restarts: cfg.solve.restarts.max(1),
        start: cfg.start()?,
    };
    let mut records = Vec::new();
    for &n in cfg.schedule()? {
        let r = lib(minimize_energy(&set, &kernel, n, &opts))?;
        let nf = n as f64;
        let t = match kernel.s() {
            Some(s) if s > d => nf.powf(1.0 + s / d),
            Some(s) if s == d => nf * nf * nf.ln(),
            _ => nf * nf,
        };
        records.push(Record {
            n,
            value: r.value,
            lower: None,
            upper: Some(r.value),
            tau: Some(t),
            ratio: Some(r.value / t),
            budget_exhausted: r.trace.budget_exhausted,
            details: json!({
                "config": r.config.to_vecs(),
                "restart_values": r.trace.restart_values,
                "evaluations": r.trace.evaluations,
            }),
        });
    }
    let normalization = match kernel.s() {
        Some(s) if s > d => "N^(1+s/d)",
        Some(s) if s == d => "N^2 ln N",
        _ => "N^2",
    };
    Ok(Outcome::new(records, json!({ "normalization": normalization })))
}

fn is_unit_circle(set: &SetDescriptor) -> bool {
    matches!(set.kind(), SetKind::Circle { center, radius } if *center == [0.0, 0.0] && *radius == 1.0)
}

fn configurations(cfg: &ExperimentConfig, set: &SetDescriptor, kernel: &KernelSpec, how: &str, field: &str) -> Result<Vec<Configuration>, String> {
    let mut out = Vec::new();
    for &n in cfg.schedule()? {
        let c = match how {
            "equally-spaced" => lib(seed_configuration(set, n, SeedStyle::EquallySpaced)).map_err(|e| format!("{field}: {e}"))?,
            "seed" => lib(seed_configuration(set, n, default_style(set, n, cfg.seed)))?,
            "solver" => lib(optimize(set, kernel, n, &solve_options(cfg)?))?.config,
            other => return Err(format!("{field}: unknown source {other:?}; expected equally-spaced, seed or solver")),
        };
        out.push(c);
    }
    Ok(out)
}

fn series_records(series: &RatioSeries) -> Vec<Record> {
    series
        .entries
        .iter()
        .map(|e| Record {
            n: e.n,
            value: e.value,
            lower: Some(e.lower),
            upper: Some(e.upper),
            tau: Some(e.tau),
            ratio: Some(e.ratio),
            budget_exhausted: e.budget_exhausted,
            details: Value::Null,
        })
        .collect()
}

pub fn sigma(cfg: &ExperimentConfig) -> TaskResult {
    let set = cfg.build_set()?;
    let kernel = cfg.build_kernel(&set)?;
    let d = set.hausdorff_dim();
    let how = cfg.sigma.configurations.as_str();
    let bracket = cfg.budget.bracket();
    let integrable = kernel.s().is_none_or(|s| s < d as f64);
    let series = if how == "equally-spaced" && is_unit_circle(&set) && kernel.weight().is_none() && bracket.target_gap == 0.0 {
        lib(equally_spaced_circle_series(&kernel, cfg.schedule()?, bracket.rel_gap))?
    } else {
        let configs = configurations(cfg, &set, &kernel, how, "sigma.configurations")?;
        if integrable {
            lib(chebyshev_ratio_series(&set, &kernel, &configs, &bracket))?
        } else {
            lib(ratio_series(&set, &kernel, &configs, &bracket))?
        }
    };
    let estimate = if series.entries.len() >= 4 {
        lib(estimate_limit(&series)).map(|e| json!(e)).unwrap_or(Value::Null)
    } else {
        Value::Null
    };
    let predicted = match kernel.s() {
        Some(s) if !integrable => match predicted_limit(&set, kernel.weight(), s) {
            Ok(p) => json!(p),
            Err(e) => json!({ "unavailable": e.to_string() }),
        },
        _ => json!({ "unavailable": "no limit constant for integrable kernels" }),
    };
    Ok(Outcome::new(
        series_records(&series),
        json!({
            "normalization": if integrable { "N" } else { norm_name(&kernel, d) },
            "configurations": how,
            "estimate": estimate,
            "predicted": predicted,
            "bounded": series.bounded(),
            "tail_model": "c + b N^(-1/d), least squares over the last half",
        }),
    ))
}

pub fn distribution(cfg: &ExperimentConfig) -> TaskResult {
    let set = cfg.build_set()?;
    let kernel = cfg.build_kernel(&set)?;
    let d = set.hausdorff_dim();
    let opts = solve_options(cfg)?;
    let mut results = Vec::new();
    for &n in cfg.schedule()? {
        results.push(lib(optimize(&set, &kernel, n, &opts))?);
    }
    let configs: Vec<Configuration> = results.iter().map(|r| r.config.clone()).collect();
    let report = lib(compare_distribution(&set, &kernel, &configs, cfg.distribution.bins, cfg.distribution.tolerance))?;
    let mut records = Vec::new();
    let mut table = String::from("N,region,predicted_mass,predicted_fraction,empirical_fraction\n");
    for (r, row) in results.iter().zip(&report.rows) {
        let mut rec = solve_record(r, &kernel, d);
        rec.details = json!({ "counts": row.counts, "discrepancy": row.discrepancy, "config": r.config.to_vecs() });
        records.push(rec);
        for (i, (m, c)) in report.regions.iter().zip(&row.counts).enumerate() {
            table.push_str(&format!("{},{},{},{},{}\n", row.n, i, m.mass, m.fraction, *c as f64 / row.n as f64));
        }
    }
    let mut out = Outcome::new(
        records,
        json!({
            "metric": report.metric,
            "in_theorem": report.in_theorem,
            "regions": report.regions,
            "total_mass": report.total_mass,
            "decreasing": report.decreasing,
            "tolerance": report.tolerance,
            "pass": report.pass,
            "notes": report.notes,
        }),
    );
    out.tables.push(("regions".into(), table));
    Ok(out)
}

pub fn limits(cfg: &ExperimentConfig) -> TaskResult {
    let set = cfg.build_set()?;
    let how = cfg.limits.configurations.as_str();
    let s_max = *cfg.limits.s.last().ok_or("limits.s: at least one exponent is required")?;
    let solver_kernel = KernelSpec::riesz(s_max.min(64.0)).map_err(|e| format!("limits.s: {e}"))?;
    let configs = configurations(cfg, &set, &solver_kernel, how, "limits.configurations")?;
    let mut records = Vec::new();
    let mut table = String::from("N,s,scaled_lower,scaled_upper,covering_product,covering_deviation,packing_product\n");
    let mut decreasing = true;
    for c in &configs {
        let rep = check_large_s_limits(c, &set, &cfg.limits.s).map_err(|e| format!("limits.s: {e}"))?;
        decreasing &= rep.covering_decreasing;
        let rho = 0.5 * (rep.covering_radius.lower + rep.covering_radius.upper);
        for row in &rep.rows {
            table.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                rep.n,
                row.s,
                row.scaled_polarization.0,
                row.scaled_polarization.1,
                row.covering_product,
                row.covering_deviation,
                row.packing_product.map(|v| v.to_string()).unwrap_or_default()
            ));
        }
        let last = rep.rows.last().expect("nonempty exponent list");
        // P_s^{1/s} at the largest s, which tends to 1/ρ.
        let root = |v: f64| v.powf(1.0 / last.s) / rho;
        let (lo, hi) = last.scaled_polarization;
        records.push(Record {
            n: rep.n,
            value: root(0.5 * (lo + hi)),
            lower: Some(root(lo)),
            upper: Some(root(hi)),
            tau: Some(1.0 / rho),
            ratio: Some(last.covering_product),
            budget_exhausted: rep.covering_radius.budget_exhausted,
            details: json!(rep),
        });
    }
    let mut out = Outcome::new(
        records,
        json!({ "value": "P_s^(1/s) at the largest s", "normalization": "1/rho", "covering_deviation_decreasing": decreasing }),
    );
    out.tables.push(("limits".into(), table));
    Ok(out)
}

pub fn verify(suite: &str) -> TaskResult {
    let checks = lib(run_suite(suite))?;
    let failed = checks.iter().filter(|c| !c.pass).count();
    let mut out = Outcome::new(Vec::new(), json!({ "suite": suite, "checks": checks.len(), "failed": failed }));
    out.checks = checks;
    Ok(out)
}
