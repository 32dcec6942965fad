//! One function per experiment. Each returns the files to write and a JSON
//! summary for the metadata sidecar.

use qst_core::optimize::{
    fit_trend_points, optimize_round_trip, optimize_transfer, OptimizationResult, TrendPoint,
};
use qst_core::protocol::{
    revival_peaks, run_round_trip, run_transfer, transfer_fidelity, RoundTripDrive,
    EDGE_WARNING_THRESHOLD,
};
use qst_core::robustness::{
    disorder_average, leakage_infidelity, pulse_checksum, stray_photon_infidelity, sweep_detuning,
    sweep_dissipation, FrozenPulse, Loss, SweepResult,
};
use qst_core::{Executor, Levels, PulseParams, Scheme, SystemSpec, TransferSchedule};
use serde_json::{json, Value};

use crate::config::{Drive, Experiment, LossKind, ObjectiveKind, RunConfig};
use crate::error::CliError;
use crate::output::{fits_csv, optimum_csv, scan_csv, sweep_csv, timeseries_csv};

/// Everything a run produces besides `meta.json`.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: Value,
    pub pulse_checksums: Vec<u64>,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(summary: Value) -> Self {
        Report {
            files: Vec::new(),
            summary,
            pulse_checksums: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn file(mut self, name: &str, text: String) -> Self {
        self.files.push((name.to_string(), text.into_bytes()));
        self
    }
}

fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

fn with_zero(mut v: Vec<f64>) -> Vec<f64> {
    v.insert(0, 0.0);
    v
}

fn has_loss(spec: &SystemSpec) -> bool {
    spec.qubit_a.gamma > 0.0 || spec.qubit_b.gamma > 0.0 || spec.channel.kappa_c > 0.0
}

fn edge_warning(edge: f64) -> Option<String> {
    (edge > EDGE_WARNING_THRESHOLD).then(|| {
        format!("outermost modes reached population {edge:.3e}; the mode ladder may be truncated too tightly")
    })
}

fn optimum_summary(r: &OptimizationResult) -> Value {
    json!({
        "g_ratio": r.g_ratio,
        "kappa_opt": r.kappa_opt,
        "tau_d_opt": r.tau_d_opt,
        "F_opt": r.f_opt,
        "infidelity": r.infidelity(),
        "t_cycle": r.t_cycle_opt,
        "converged": r.refinement.converged,
        "start": [r.refinement.start.0, r.refinement.start.1],
        "start_infidelity": r.refinement.start_infidelity,
        "refinement_trace": r.refinement.trace,
        "candidates": r.candidates.iter().map(|c| json!({
            "start": [c.start.0, c.start.1],
            "kappa": c.kappa,
            "tau_d": c.tau_d,
            "infidelity": c.infidelity,
            "converged": c.converged,
            "evaluations": c.evaluations,
        })).collect::<Vec<_>>(),
        "missing_cells": r.scan.missing(),
    })
}

fn pulse_summary(p: &FrozenPulse) -> Value {
    json!({
        "g_ratio": p.g_ratio,
        "kappa": p.kappa,
        "tau_d": p.tau_d,
        "intrinsic_infidelity": p.intrinsic_infidelity,
    })
}

/// Pulses for each coupling ratio: the configured optima, or fresh
/// optimizations of the ideal transfer.
fn frozen_pulses<E: Executor>(
    cfg: &RunConfig,
    exec: &E,
) -> Result<(Vec<FrozenPulse>, Vec<OptimizationResult>), CliError> {
    let scheme = Scheme::from(cfg.scheme);
    let icfg = cfg.integrator.to_config();
    match &cfg.optima {
        Some(optima) => {
            let mut out = Vec::with_capacity(optima.len());
            for o in optima {
                let spec = cfg.spec_for(o.g_ratio)?;
                let ideal = ideal_spec(&spec);
                let f = transfer_fidelity(&ideal, o.kappa, o.tau_d, scheme, &icfg)?;
                out.push(FrozenPulse {
                    g_ratio: o.g_ratio,
                    kappa: o.kappa,
                    tau_d: o.tau_d,
                    scheme,
                    intrinsic_infidelity: 1.0 - f,
                });
            }
            Ok((out, Vec::new()))
        }
        None => {
            let opts = cfg.optimize_options()?;
            let mut pulses = Vec::new();
            let mut results = Vec::new();
            for &g in &cfg.g_ratios {
                let spec = ideal_spec(&cfg.spec_for(g)?);
                let r = optimize_transfer(&spec, g, scheme, &opts, exec)?;
                pulses.push(FrozenPulse::from_optimum(&r, scheme));
                results.push(r);
            }
            Ok((pulses, results))
        }
    }
}

/// The lossless, disorder-free, resonant system the pulses are optimized
/// for.
fn ideal_spec(spec: &SystemSpec) -> SystemSpec {
    let mut s = spec.clone();
    s.channel.kappa_c = 0.0;
    s.channel.disorder_offsets = None;
    s.channel.central_detuning = 0.0;
    for q in [&mut s.qubit_a, &mut s.qubit_b] {
        q.gamma = 0.0;
        q.detuning = 0.0;
        q.levels = Levels::Two;
        q.anharmonicity = None;
    }
    s
}

fn single_pulse<E: Executor>(
    cfg: &RunConfig,
    spec: &SystemSpec,
    g: f64,
    round_trip: bool,
    exec: &E,
) -> Result<(f64, f64, Option<OptimizationResult>), CliError> {
    if let Some(p) = cfg.pulse {
        return Ok((p.kappa, p.tau_d, None));
    }
    let opts = cfg.optimize_options()?;
    let ideal = ideal_spec(spec);
    let r = if round_trip {
        optimize_round_trip(&ideal, g, &opts, exec)?
    } else {
        optimize_transfer(&ideal, g, Scheme::from(cfg.scheme), &opts, exec)?
    };
    Ok((r.kappa_opt, r.tau_d_opt, Some(r)))
}

fn round_trip<E: Executor>(cfg: &RunConfig, exec: &E) -> Result<Report, CliError> {
    let g = cfg.require_g_ratio()?;
    let spec = cfg.spec_for(g)?;
    let icfg = cfg.integrator.to_config();
    let nu = spec.channel.nu_fsr;
    let (drive, pulse_json, opt) = match cfg.drive {
        Drive::Constant => (RoundTripDrive::Constant(g * nu), Value::Null, None),
        Drive::Pulse => {
            let (kappa, tau_d, opt) = single_pulse(cfg, &spec, g, true, exec)?;
            let p = PulseParams::new(g * nu, kappa, tau_d);
            (
                RoundTripDrive::Pulse(p),
                json!({"kappa": kappa, "tau_d": tau_d, "t_cycle": p.cycle_duration()}),
                opt,
            )
        }
    };
    let t_final = match (cfg.drive, cfg.t_final) {
        (_, Some(t)) => Some(t),
        (Drive::Constant, None) => Some(4.0 / nu),
        (Drive::Pulse, None) => None,
    };
    let r = run_round_trip(&spec, drive, t_final, &icfg)?;
    let peaks: Vec<Value> = revival_peaks(&r.sim)
        .iter()
        .map(|p| json!({"t": p.t, "P_A": p.value, "prominence": p.prominence}))
        .collect();
    let mut rep = Report::new(json!({
        "g_ratio": g,
        "pulse": pulse_json,
        "return_probability": r.return_probability,
        "revivals": peaks,
        "edge_pop_max": r.sim.edge_pop_max,
        "norm_drift": r.sim.norm_drift,
        "optimization": opt.as_ref().map(optimum_summary),
    }))
    .file(
        "timeseries.csv",
        timeseries_csv(
            &r.sim,
            spec.qubit_a.levels == Levels::Three,
            has_loss(&spec),
        ),
    );
    rep.warnings.extend(edge_warning(r.sim.edge_pop_max));
    Ok(rep)
}

fn transfer<E: Executor>(cfg: &RunConfig, exec: &E) -> Result<Report, CliError> {
    let g = cfg.require_g_ratio()?;
    let spec = cfg.spec_for(g)?;
    let (kappa, tau_d, opt) = single_pulse(cfg, &spec, g, false, exec)?;
    let scheme = Scheme::from(cfg.scheme);
    let schedule =
        TransferSchedule::new(scheme, PulseParams::new(spec.qubit_a.g_max, kappa, tau_d));
    let r = run_transfer(&spec, &schedule, &cfg.integrator.to_config())?;
    let frozen = FrozenPulse {
        g_ratio: g,
        kappa,
        tau_d,
        scheme,
        intrinsic_infidelity: f64::NAN,
    };
    let mut rep = Report::new(json!({
        "g_ratio": g,
        "pulse": {"kappa": kappa, "tau_d": tau_d, "t_cycle": schedule.pulse.cycle_duration()},
        "t_end": r.t_end,
        "fidelity": r.fidelity,
        "infidelity": r.infidelity(),
        "edge_pop_max": r.sim.edge_pop_max,
        "norm_drift": r.sim.norm_drift,
        "optimization": opt.as_ref().map(optimum_summary),
    }))
    .file(
        "timeseries.csv",
        timeseries_csv(
            &r.sim,
            spec.qubit_a.levels == Levels::Three,
            has_loss(&spec),
        ),
    );
    rep.pulse_checksums.push(pulse_checksum(&[frozen]));
    rep.warnings.extend(edge_warning(r.sim.edge_pop_max));
    Ok(rep)
}

fn optimize<E: Executor>(cfg: &RunConfig, exec: &E) -> Result<Report, CliError> {
    let g = cfg.require_g_ratio()?;
    let spec = cfg.spec_for(g)?;
    let opts = cfg.optimize_options()?;
    let r = match cfg.scan.objective {
        ObjectiveKind::Transfer => {
            optimize_transfer(&spec, g, Scheme::from(cfg.scheme), &opts, exec)?
        }
        ObjectiveKind::RoundTrip => optimize_round_trip(&spec, g, &opts, exec)?,
    };
    Ok(Report::new(optimum_summary(&r))
        .file("scan.csv", scan_csv(&r.scan))
        .file("optimum.csv", optimum_csv(std::slice::from_ref(&r))))
}

fn sweep_report(
    pulses: &[FrozenPulse],
    results: &[OptimizationResult],
    sweeps: Vec<SweepResult>,
) -> Report {
    let mut rep = Report::new(json!({
        "pulses": pulses.iter().map(pulse_summary).collect::<Vec<_>>(),
        "parameters": sweeps.iter().map(|s| s.parameter.clone()).collect::<Vec<_>>(),
    }))
    .file("sweep.csv", sweep_csv(&sweeps));
    if !results.is_empty() {
        rep = rep.file("optimum.csv", optimum_csv(results));
    }
    rep.pulse_checksums = sweeps.iter().map(|s| s.pulse_checksum).collect();
    rep
}

fn sweep<E: Executor>(
    cfg: &RunConfig,
    experiment: Experiment,
    exec: &E,
) -> Result<Report, CliError> {
    let (pulses, results) = frozen_pulses(cfg, exec)?;
    // the sweeps vary one imperfection on top of the configured system
    let base = cfg.spec_for(pulses[0].g_ratio)?;
    let icfg = cfg.integrator.to_config();
    let eps_default = with_zero(logspace(1e-4, 1e-1, 7));
    let values = |default: Vec<f64>| cfg.values.clone().unwrap_or(default);
    let sweeps = match experiment {
        Experiment::SweepDissipation => {
            let default = match cfg.loss {
                LossKind::Gamma => with_zero(logspace(1e-5, 1e-2, 7)),
                LossKind::KappaC => with_zero(logspace(1e-5, 1e-1, 9)),
            };
            vec![sweep_dissipation(
                &base,
                &pulses,
                Loss::from(cfg.loss),
                &values(default),
                &icfg,
                exec,
            )?]
        }
        Experiment::SweepDisorder => vec![disorder_average(
            &base,
            &pulses,
            &values(vec![0.0, 0.01, 0.02, 0.05, 0.1, 0.2]),
            cfg.realizations,
            cfg.seed,
            &icfg,
            exec,
        )?],
        Experiment::SweepDetuning => {
            let default = (0..9).map(|i| -0.02 + 0.005 * i as f64).collect();
            vec![sweep_detuning(
                &base,
                &pulses,
                &values(default),
                cfg.detuning_split.into(),
                &icfg,
                exec,
            )?]
        }
        Experiment::SweepLeakage => {
            let mut all = Vec::new();
            for p in &pulses {
                all.extend(leakage_infidelity(
                    &base,
                    p,
                    &values(eps_default.clone()),
                    &cfg.alphas,
                    &icfg,
                )?);
            }
            all
        }
        Experiment::SweepStrayPhoton => {
            let mut all = Vec::new();
            for p in &pulses {
                all.push(stray_photon_infidelity(
                    &base,
                    p,
                    &values(eps_default.clone()),
                    cfg.weights.as_deref(),
                    &icfg,
                    exec,
                )?);
            }
            all
        }
        _ => unreachable!("not a sweep"),
    };
    Ok(sweep_report(&pulses, &results, sweeps))
}

fn fit_trends<E: Executor>(cfg: &RunConfig, exec: &E) -> Result<Report, CliError> {
    let (pulses, results) = frozen_pulses(cfg, exec)?;
    let spec = cfg.spec_for(pulses[0].g_ratio)?;
    let points: Vec<TrendPoint> = pulses
        .iter()
        .map(|p| TrendPoint {
            g_ratio: p.g_ratio,
            kappa: p.kappa,
            tau_d: p.tau_d,
            t_cycle: p.schedule(&spec).duration(),
        })
        .collect();
    let fits = fit_trend_points(&points)?;
    let fit_json = |f: &qst_core::fit::FitResult| json!({"model": f.model.to_string(), "coeffs": f.coeffs, "residual_norm": f.residual_norm, "r_squared": f.r_squared});
    let mut rep = Report::new(json!({
        "pulses": pulses.iter().map(pulse_summary).collect::<Vec<_>>(),
        "kappa_opt": fit_json(&fits.kappa),
        "t_cycle": fit_json(&fits.t_cycle),
        "tau_d_opt": fit_json(&fits.tau_d),
        "g_range": [fits.g_range.0, fits.g_range.1],
    }))
    .file("fits.csv", fits_csv(&fits));
    if !results.is_empty() {
        rep = rep.file("optimum.csv", optimum_csv(&results));
    }
    rep.pulse_checksums.push(pulse_checksum(&pulses));
    Ok(rep)
}

pub fn run_experiment<E: Executor>(
    cfg: &RunConfig,
    experiment: Experiment,
    exec: &E,
) -> Result<Report, CliError> {
    cfg.validate(experiment)?;
    let mut rep = match experiment {
        Experiment::RoundTrip => round_trip(cfg, exec)?,
        Experiment::Transfer => transfer(cfg, exec)?,
        Experiment::Optimize => optimize(cfg, exec)?,
        Experiment::FitTrends => fit_trends(cfg, exec)?,
        sweep_kind => sweep(cfg, sweep_kind, exec)?,
    };
    let mut warnings = cfg.warnings(experiment);
    warnings.append(&mut rep.warnings);
    rep.warnings = warnings;
    Ok(rep)
}
