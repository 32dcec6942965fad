//! Command-line driver for `qst-core`: JSON configuration, experiment
//! dispatch, CSV output and the run metadata sidecar.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;
pub mod pool;

use std::time::Instant;

use serde_json::{json, Value};

use crate::config::{Experiment, RunConfig};
use crate::error::CliError;
use crate::experiments::{run_experiment, Report};
use crate::pool::RayonExecutor;

/// Outcome of [`execute`], already written to `cfg.out`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub meta: Value,
}

/// Run `experiment` with `cfg` and write its CSV files plus `meta.json`
/// into `cfg.out`. Nothing is written when the run fails.
pub fn execute(experiment: Experiment, cfg: &RunConfig) -> Result<Outcome, CliError> {
    if let Some(e) = cfg.experiment {
        if e != experiment {
            return Err(CliError::Config {
                path: Some("experiment".into()),
                message: format!(
                    "config is for '{}' but '{}' was requested",
                    e.name(),
                    experiment.name()
                ),
            });
        }
    }
    cfg.validate(experiment)?;
    // fail before a long computation rather than after it
    let existed = cfg.out.exists();
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io {
        path: cfg.out.display().to_string(),
        message: e.to_string(),
    })?;
    let outcome = run_and_write(experiment, cfg);
    if outcome.is_err() && !existed {
        // only succeeds while the directory is still empty
        let _ = std::fs::remove_dir(&cfg.out);
    }
    outcome
}

fn run_and_write(experiment: Experiment, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let exec = RayonExecutor::new(cfg.workers).map_err(|e| CliError::Config {
        path: Some("workers".into()),
        message: e.to_string(),
    })?;
    let start = Instant::now();
    let report = run_experiment(cfg, experiment, &exec)?;
    let wall = start.elapsed().as_secs_f64();

    let mut resolved = cfg.clone();
    resolved.experiment = Some(experiment);
    let meta = json!({
        "tool": "qst",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": experiment.name(),
        "config": resolved,
        "seed": cfg.seed,
        "workers": exec.workers(),
        "wall_time_s": wall,
        "pulse_checksums": report
            .pulse_checksums
            .iter()
            .map(|c| format!("{c:016x}"))
            .collect::<Vec<_>>(),
        "warnings": report.warnings,
        "results": report.summary,
    });
    let mut files = report.files.clone();
    let meta_text = serde_json::to_string_pretty(&meta).expect("metadata serializes") + "\n";
    files.push(("meta.json".into(), meta_text.into_bytes()));
    output::write_all(&cfg.out, &files)?;
    Ok(Outcome { report, meta })
}
