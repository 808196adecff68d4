//! `polarize`: command-line driver for polarization experiments.

mod config;
mod output;
mod tasks;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "polarize", version, about = "Certified Riesz polarization experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads. Results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize and certify N-point configurations for each N in the schedule.
    Solve(Common),
    /// Minimize the discrete energy for each N.
    Energy(Common),
    /// Normalized polarization ratios and an estimate of their limit.
    Sigma(Common),
    /// Compare optimal configurations with the predicted limit distribution.
    Distribution(Common),
    /// Covering and packing behaviour as s grows.
    Limits(Common),
    /// Run the built-in verification suites.
    Verify {
        /// Suite name, or `all`.
        suite: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn load(common: &Common, task: &str, required: bool) -> Result<Option<ExperimentConfig>, String> {
    let Some(path) = &common.config else {
        return if required { Err("--config: a configuration file is required".into()) } else { Ok(None) };
    };
    let text = std::fs::read_to_string(path).map_err(|e| format!("--config: {}: {e}", path.display()))?;
    let mut cfg = config::parse(&text)?;
    if let Some(t) = &cfg.task {
        if t != task {
            return Err(format!("task: the configuration is for {t:?}, not {task:?}"));
        }
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(Some(cfg))
}

fn default_config() -> ExperimentConfig {
    config::parse("version = 1").expect("minimal configuration parses")
}

fn print_checks(checks: &[polarization::verify::Check]) {
    println!("{:<14} {:<58} {:>22} {:>22} {:>12}  verdict", "suite", "claim", "expected", "observed", "tolerance");
    for c in checks {
        println!(
            "{:<14} {:<58} {:>22} {:>22} {:>12}  {}",
            c.suite,
            c.claim,
            c.expected,
            c.observed,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let started = Instant::now();
    let (task, common, suite) = match &cli.command {
        Command::Solve(c) => ("solve", c, None),
        Command::Energy(c) => ("energy", c, None),
        Command::Sigma(c) => ("sigma", c, None),
        Command::Distribution(c) => ("distribution", c, None),
        Command::Limits(c) => ("limits", c, None),
        Command::Verify { suite, common } => ("verify", common, suite.clone()),
    };
    if let Some(k) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .map_err(|e| format!("--threads: {e}"))?;
    }
    let loaded = load(common, task, task != "verify")?;
    let write = loaded.is_some() || common.out.is_some();
    let cfg = loaded.unwrap_or_else(default_config);
    let outcome = match task {
        "solve" => tasks::solve(&cfg),
        "energy" => tasks::energy(&cfg),
        "sigma" => tasks::sigma(&cfg),
        "distribution" => tasks::distribution(&cfg),
        "limits" => tasks::limits(&cfg),
        _ => tasks::verify(suite.as_deref().unwrap_or(&cfg.verify.suite)),
    }?;

    if task == "verify" {
        print_checks(&outcome.checks);
    } else {
        for r in &outcome.records {
            let bracket = match (r.lower, r.upper) {
                (Some(l), Some(u)) => format!("[{l:.10e}, {u:.10e}]"),
                (_, Some(u)) => format!("<= {u:.10e}"),
                _ => String::new(),
            };
            let ratio = r.ratio.map(|v| format!("{v:.8}")).unwrap_or_default();
            let flag = if r.budget_exhausted { "  (budget exhausted)" } else { "" };
            println!("N={:<8} value={:.10e} {bracket} ratio={ratio}{flag}", r.n, r.value);
        }
    }

    if write {
        let dir = common.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("results"));
        let stem = cfg.output.stem.clone().unwrap_or_else(|| task.to_string());
        let doc = output::document(task, &cfg, &outcome, started.elapsed());
        let mut files = vec![
            (format!("{stem}.json"), serde_json::to_string_pretty(&doc).map_err(|e| e.to_string())? + "\n"),
            (format!("{stem}.csv"), output::records_csv(&outcome.records)?),
        ];
        for (suffix, text) in &outcome.tables {
            files.push((format!("{stem}_{suffix}.csv"), text.clone()));
        }
        for p in output::write_all(&dir, &files)? {
            eprintln!("wrote {}", p.display());
        }
    }

    if outcome.checks.iter().any(|c| !c.pass) {
        return Ok(ExitCode::from(1));
    }
    if outcome.records.iter().any(|r| r.budget_exhausted) {
        eprintln!("warning: an evaluation budget was exhausted; every bracket is still certified but some are less refined than requested");
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
