use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qst::config::{parse_config, Experiment, RunConfig};
use qst::error::CliError;

/// Simulate and optimize excitation transfer through a multimode channel.
#[derive(Debug, Parser)]
#[command(name = "qst", version)]
struct Cli {
    /// Experiment to run.
    #[arg(value_enum)]
    experiment: Experiment,
    /// JSON configuration file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Output directory (overrides `out`).
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Worker threads (overrides `workers`).
    #[arg(long)]
    workers: Option<usize>,
    /// Random seed (overrides `seed`).
    #[arg(long)]
    seed: Option<u64>,
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => parse_config(p)?,
        None => RunConfig::default(),
    };
    if let Some(o) = &cli.out {
        cfg.out = o.clone();
    }
    if cli.workers.is_some() {
        cfg.workers = cli.workers;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    let outcome = qst::execute(cli.experiment, &cfg)?;
    for w in &outcome.report.warnings {
        eprintln!("warning: {w}");
    }
    println!("{}", cfg.out.join("meta.json").display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
