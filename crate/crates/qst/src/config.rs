//! Run configuration. The JSON schema is strict: unknown keys are errors and
//! every optional field has a documented default.

use std::path::{Path, PathBuf};

use qst_core::integrator::IntegratorConfig;
use qst_core::optimize::{OptimizeOptions, ScanAxes};
use qst_core::robustness::{DetuningSplit, Loss};
use qst_core::simplex::SimplexOptions;
use qst_core::{ChannelSpec, Levels, QubitSpec, Scheme, SystemSpec};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    RoundTrip,
    Transfer,
    Optimize,
    SweepDissipation,
    SweepDisorder,
    SweepDetuning,
    SweepLeakage,
    SweepStrayPhoton,
    FitTrends,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::RoundTrip => "round-trip",
            Experiment::Transfer => "transfer",
            Experiment::Optimize => "optimize",
            Experiment::SweepDissipation => "sweep-dissipation",
            Experiment::SweepDisorder => "sweep-disorder",
            Experiment::SweepDetuning => "sweep-detuning",
            Experiment::SweepLeakage => "sweep-leakage",
            Experiment::SweepStrayPhoton => "sweep-stray-photon",
            Experiment::FitTrends => "fit-trends",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QubitConfig {
    /// 2 or 3.
    pub levels: u8,
    pub detuning: f64,
    pub anharmonicity: Option<f64>,
    pub gamma: f64,
}

impl Default for QubitConfig {
    fn default() -> Self {
        QubitConfig {
            levels: 2,
            detuning: 0.0,
            anharmonicity: None,
            gamma: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    pub n_modes: usize,
    pub nu_fsr: f64,
    pub central_detuning: f64,
    pub disorder_offsets: Option<Vec<f64>>,
    pub kappa_c: f64,
    pub parity_origin: Option<i64>,
    pub qubit_a: QubitConfig,
    pub qubit_b: QubitConfig,
}

impl Default for SystemConfig {
    fn default() -> Self {
        let c = ChannelSpec::default();
        SystemConfig {
            n_modes: c.n_modes,
            nu_fsr: c.nu_fsr,
            central_detuning: c.central_detuning,
            disorder_offsets: None,
            kappa_c: c.kappa_c,
            parity_origin: None,
            qubit_a: QubitConfig::default(),
            qubit_b: QubitConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SchemeConfig {
    #[default]
    SimultaneousIdentical,
    DelayedMirror {
        offset: f64,
    },
}

impl From<SchemeConfig> for Scheme {
    fn from(s: SchemeConfig) -> Scheme {
        match s {
            SchemeConfig::SimultaneousIdentical => Scheme::SimultaneousIdentical,
            SchemeConfig::DelayedMirror { offset } => Scheme::DelayedMirror { offset },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub kappa: f64,
    pub tau_d: f64,
}

/// A previously optimized pulse for one coupling ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimumConfig {
    pub g_ratio: f64,
    pub kappa: f64,
    pub tau_d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Drive {
    #[default]
    Pulse,
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ObjectiveKind {
    #[default]
    Transfer,
    RoundTrip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    #[default]
    Gamma,
    KappaC,
}

impl From<LossKind> for Loss {
    fn from(l: LossKind) -> Loss {
        match l {
            LossKind::Gamma => Loss::QubitRelaxation,
            LossKind::KappaC => Loss::ChannelDecay,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitKind {
    #[default]
    QubitB,
    Symmetric,
}

impl From<SplitKind> for DetuningSplit {
    fn from(s: SplitKind) -> DetuningSplit {
        match s {
            SplitKind::QubitB => DetuningSplit::QubitB,
            SplitKind::Symmetric => DetuningSplit::Symmetric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub rtol: f64,
    pub atol: f64,
    pub samples: usize,
    pub max_step: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        IntegratorSection {
            rtol: d.rtol,
            atol: d.atol,
            samples: d.samples,
            max_step: None,
            max_steps: d.max_steps,
        }
    }
}

impl IntegratorSection {
    pub fn to_config(&self) -> IntegratorConfig {
        IntegratorConfig {
            rtol: self.rtol,
            atol: self.atol,
            max_step: self.max_step.unwrap_or(f64::INFINITY),
            samples: self.samples,
            max_steps: self.max_steps,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanSection {
    pub objective: ObjectiveKind,
    pub kappa_range: [f64; 2],
    pub tau_d_range: [f64; 2],
    pub resolution: [usize; 2],
    /// Integrator tolerances `[rtol, atol]` for the grid cells.
    pub scan_tolerances: [f64; 2],
    pub tie_tolerance: f64,
    pub target_infidelity: f64,
    pub candidate_infidelity: f64,
    pub max_candidates: usize,
    pub max_iterations: usize,
    pub diameter_tol: f64,
}

impl Default for ScanSection {
    fn default() -> Self {
        let d = OptimizeOptions::default();
        ScanSection {
            objective: ObjectiveKind::Transfer,
            kappa_range: [0.1, 20.0],
            tau_d_range: [0.0, 2.0],
            resolution: [41, 41],
            scan_tolerances: [d.scan_cfg.rtol, d.scan_cfg.atol],
            tie_tolerance: d.tie_tolerance,
            target_infidelity: d.target_infidelity,
            candidate_infidelity: d.candidate_infidelity,
            max_candidates: d.max_candidates,
            max_iterations: d.simplex.max_iterations,
            diameter_tol: d.simplex.diameter_tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Must match the command-line experiment when both are given.
    pub experiment: Option<Experiment>,
    pub system: SystemConfig,
    /// `g / ν_fsr` for single-ratio experiments.
    pub g_ratio: Option<f64>,
    /// Separate `g / ν_fsr` for qubit B; defaults to `g_ratio`.
    pub g_b: Option<f64>,
    pub scheme: SchemeConfig,
    /// Fixed pulse for `transfer` and `round-trip`; optimized when absent.
    pub pulse: Option<PulseConfig>,
    pub drive: Drive,
    /// End time of a round trip; defaults to the pulse cycle, or `4/ν_fsr`
    /// for a constant drive.
    pub t_final: Option<f64>,
    pub integrator: IntegratorSection,
    pub scan: ScanSection,
    /// Coupling ratios for sweeps and trend fits.
    pub g_ratios: Vec<f64>,
    /// Frozen optimal pulses; optimized per ratio when absent.
    pub optima: Option<Vec<OptimumConfig>>,
    /// Swept parameter values; every sweep has its own default.
    pub values: Option<Vec<f64>>,
    pub loss: LossKind,
    pub realizations: usize,
    pub seed: u64,
    pub alphas: Vec<f64>,
    pub detuning_split: SplitKind,
    pub weights: Option<Vec<f64>>,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: None,
            system: SystemConfig::default(),
            g_ratio: None,
            g_b: None,
            scheme: SchemeConfig::default(),
            pulse: None,
            drive: Drive::default(),
            t_final: None,
            integrator: IntegratorSection::default(),
            scan: ScanSection::default(),
            g_ratios: vec![0.2, 0.4, 0.6, 0.8],
            optima: None,
            values: None,
            loss: LossKind::default(),
            realizations: 100,
            seed: 0,
            alphas: vec![1.0, 10.0],
            detuning_split: SplitKind::default(),
            weights: None,
            out: PathBuf::from("out"),
            workers: None,
        }
    }
}

pub fn parse_config_str(text: &str) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Config {
            path: (path != ".").then_some(path),
            message: e.into_inner().to_string(),
        }
    })
}

pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config {
        path: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config_str(&text)
}

fn config_error(path: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        path: Some(path.into()),
        message: message.into(),
    }
}

fn qubit(q: &QubitConfig, g: f64, path: &str) -> Result<QubitSpec, CliError> {
    let levels = match q.levels {
        2 => Levels::Two,
        3 => Levels::Three,
        n => {
            return Err(config_error(
                &format!("{path}.levels"),
                format!("levels must be 2 or 3 (got {n})"),
            ))
        }
    };
    Ok(QubitSpec {
        levels,
        detuning: q.detuning,
        anharmonicity: q.anharmonicity,
        gamma: q.gamma,
        g_max: g,
    })
}

impl RunConfig {
    /// The system with both couplings set from `g_ratio` (and `g_b`).
    /// Specs that fail validation are reported with every violation.
    pub fn spec_for(&self, g_ratio: f64) -> Result<SystemSpec, CliError> {
        let s = &self.system;
        let nu = s.nu_fsr;
        let spec = SystemSpec {
            channel: ChannelSpec {
                n_modes: s.n_modes,
                nu_fsr: nu,
                central_detuning: s.central_detuning,
                disorder_offsets: s.disorder_offsets.clone(),
                kappa_c: s.kappa_c,
            },
            qubit_a: qubit(&s.qubit_a, g_ratio * nu, "system.qubit_a")?,
            qubit_b: qubit(
                &s.qubit_b,
                self.g_b.unwrap_or(g_ratio) * nu,
                "system.qubit_b",
            )?,
            parity_origin: s.parity_origin,
        };
        let violations = spec.validate();
        if !violations.is_empty() {
            let msgs: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(config_error("system", msgs.join("; ")));
        }
        Ok(spec)
    }

    pub fn require_g_ratio(&self) -> Result<f64, CliError> {
        match self.g_ratio {
            Some(g) if g > 0.0 && g.is_finite() => Ok(g),
            Some(g) => Err(config_error(
                "g_ratio",
                format!("must be positive (got {g})"),
            )),
            None => Err(config_error("g_ratio", "required for this experiment")),
        }
    }

    pub fn optimize_options(&self) -> Result<OptimizeOptions, CliError> {
        let s = &self.scan;
        let axes = ScanAxes::new(
            (s.kappa_range[0], s.kappa_range[1]),
            (s.tau_d_range[0], s.tau_d_range[1]),
            (s.resolution[0], s.resolution[1]),
        )
        .map_err(|e| config_error("scan", e.to_string()))?;
        let mut opts = OptimizeOptions::with_axes(axes);
        opts.scan_cfg = opts
            .scan_cfg
            .with_tolerances(s.scan_tolerances[0], s.scan_tolerances[1]);
        opts.refine_cfg = self.integrator.to_config();
        opts.simplex = SimplexOptions {
            diameter_tol: s.diameter_tol,
            max_iterations: s.max_iterations,
            ..opts.simplex
        };
        opts.tie_tolerance = s.tie_tolerance;
        opts.target_infidelity = s.target_infidelity;
        opts.candidate_infidelity = s.candidate_infidelity;
        opts.max_candidates = s.max_candidates;
        Ok(opts)
    }

    /// Structural checks that do not depend on the physics.
    pub fn validate(&self, experiment: Experiment) -> Result<(), CliError> {
        if let Some(e) = self.experiment {
            if e != experiment {
                return Err(config_error(
                    "experiment",
                    format!(
                        "config is for {} but {} was requested",
                        e.name(),
                        experiment.name()
                    ),
                ));
            }
        }
        self.integrator
            .to_config()
            .validate()
            .map_err(|e| config_error("integrator", e.to_string()))?;
        if self.g_ratios.is_empty() {
            return Err(config_error("g_ratios", "must not be empty"));
        }
        if let Some(v) = &self.values {
            if v.is_empty() {
                return Err(config_error("values", "must not be empty"));
            }
        }
        if let Some(o) = &self.optima {
            if o.is_empty() {
                return Err(config_error("optima", "must not be empty"));
            }
        }
        if self.alphas.is_empty() {
            return Err(config_error("alphas", "must not be empty"));
        }
        if self.realizations == 0 {
            return Err(config_error("realizations", "must be at least 1"));
        }
        if self.workers == Some(0) {
            return Err(config_error("workers", "must be at least 1"));
        }
        self.optimize_options()?;
        Ok(())
    }

    /// Non-fatal remarks about the configuration.
    pub fn warnings(&self, experiment: Experiment) -> Vec<String> {
        let mut w = Vec::new();
        if experiment == Experiment::RoundTrip && self.g_b.is_some() {
            w.push("g_b is ignored for round-trip: qubit B stays decoupled (g_B = 0)".into());
        } else if self.g_b.is_some() && self.g_b != self.g_ratio {
            w.push("g_b differs from g_ratio, but the pulse schedule drives both qubits with one envelope of height g_ratio".into());
        }
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_transfer_config_gets_defaults() {
        let c = parse_config_str(r#"{"experiment": "transfer", "g_ratio": 0.5}"#).unwrap();
        assert_eq!(c.experiment, Some(Experiment::Transfer));
        assert_eq!(c.system.n_modes, 51);
        assert_eq!(c.scheme, SchemeConfig::SimultaneousIdentical);
        let spec = c.spec_for(0.5).unwrap();
        assert_eq!(spec.qubit_a.g_max, 0.5);
        assert_eq!(spec.qubit_b.g_max, 0.5);
    }

    #[test]
    fn unknown_key_is_named() {
        let e = parse_config_str(r#"{"system": {"qubit_a": {"gama": 0.1}}}"#).unwrap_err();
        let CliError::Config { path, message } = e else {
            panic!()
        };
        assert!(message.contains("gama"), "{message}");
        assert_eq!(path.as_deref(), Some("system.qubit_a.gama"));
    }

    #[test]
    fn malformed_json_is_a_config_error() {
        assert_eq!(
            parse_config_str("{\"g_ratio\": ").unwrap_err().exit_code(),
            2
        );
    }

    #[test]
    fn delayed_mirror_scheme_parses() {
        let c =
            parse_config_str(r#"{"scheme": {"type": "delayed-mirror", "offset": 0.25}}"#).unwrap();
        assert_eq!(
            Scheme::from(c.scheme),
            Scheme::DelayedMirror { offset: 0.25 }
        );
    }

    #[test]
    fn round_trip_with_g_b_warns() {
        let c = parse_config_str(r#"{"g_ratio": 0.5, "g_b": 0.3}"#).unwrap();
        assert_eq!(c.warnings(Experiment::RoundTrip).len(), 1);
        assert_eq!(c.warnings(Experiment::Transfer).len(), 1);
        let same = parse_config_str(r#"{"g_ratio": 0.5, "g_b": 0.5}"#).unwrap();
        assert!(same.warnings(Experiment::Transfer).is_empty());
    }

    #[test]
    fn invalid_system_lists_violations() {
        let c = parse_config_str(r#"{"system": {"n_modes": 4}}"#).unwrap();
        let CliError::Config { message, .. } = c.spec_for(0.5).unwrap_err() else {
            panic!()
        };
        assert!(message.contains("n_modes must be odd"), "{message}");
        let c = parse_config_str(r#"{"system": {"qubit_a": {"levels": 3}}}"#).unwrap();
        let CliError::Config { message, .. } = c.spec_for(0.5).unwrap_err() else {
            panic!()
        };
        assert!(message.contains("anharmonicity required"), "{message}");
    }

    #[test]
    fn experiment_mismatch_is_rejected() {
        let c = parse_config_str(r#"{"experiment": "optimize"}"#).unwrap();
        assert!(c.validate(Experiment::Transfer).is_err());
        assert!(c.validate(Experiment::Optimize).is_ok());
    }

    #[test]
    fn empty_ranges_are_rejected() {
        for text in [
            r#"{"values": []}"#,
            r#"{"g_ratios": []}"#,
            r#"{"scan": {"resolution": [1, 5]}}"#,
            r#"{"scan": {"kappa_range": [2.0, 1.0]}}"#,
        ] {
            let c = parse_config_str(text).unwrap();
            assert!(c.validate(Experiment::Optimize).is_err(), "{text}");
        }
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = parse_config_str(r#"{"g_ratio": 0.5, "seed": 7}"#).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_config_str(&text).unwrap(), c);
    }
}
