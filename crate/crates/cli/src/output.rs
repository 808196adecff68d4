//! Result files: one JSON document and one CSV table per run, plus optional
//! plot tables. Files are written to a temporary name and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::tasks::{Outcome, Record};

pub const SCHEMA_VERSION: u32 = 1;

pub fn document(task: &str, cfg: &ExperimentConfig, outcome: &Outcome, runtime: Duration) -> Value {
    let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    json!({
        "schema_version": SCHEMA_VERSION,
        "task": task,
        "inputs": cfg,
        "records": outcome.records,
        "summary": outcome.summary,
        "checks": outcome.checks,
        "metadata": {
            "tool_version": env!("CARGO_PKG_VERSION"),
            "seed": cfg.seed,
            "timestamp": format!("unix {unix}, runtime {:.3} s", runtime.as_secs_f64()),
        },
    })
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn records_csv(records: &[Record]) -> Result<String, String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let e = |e: csv::Error| e.to_string();
    w.write_record(["N", "value", "lower", "upper", "tau", "ratio"]).map_err(e)?;
    for r in records {
        w.write_record([r.n.to_string(), r.value.to_string(), cell(r.lower), cell(r.upper), cell(r.tau), cell(r.ratio)])
            .map_err(e)?;
    }
    String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

/// Writes every file, or none: nothing is renamed until all temporaries
/// have been written.
pub fn write_all(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>, String> {
    fs::create_dir_all(dir).map_err(|e| format!("output.dir: {}: {e}", dir.display()))?;
    let mut staged = Vec::new();
    for (name, text) in files {
        let tmp = dir.join(format!(".{name}.tmp"));
        let res = fs::File::create(&tmp).and_then(|mut f| {
            f.write_all(text.as_bytes())?;
            f.sync_all()
        });
        if let Err(e) = res {
            for (t, _) in &staged {
                let _ = fs::remove_file(t);
            }
            let _ = fs::remove_file(&tmp);
            return Err(format!("output.dir: {}: {e}", tmp.display()));
        }
        staged.push((tmp, dir.join(name)));
    }
    let mut done = Vec::new();
    for (tmp, dest) in staged {
        fs::rename(&tmp, &dest).map_err(|e| format!("output.dir: {}: {e}", dest.display()))?;
        done.push(dest);
    }
    Ok(done)
}
