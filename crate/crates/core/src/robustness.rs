//! Imperfection studies with the pulse frozen at the ideal optimum: loss,
//! static mode disorder, qubit detuning, `|f⟩` leakage of the sender and a
//! stray photon in the channel.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::dynamics::{DensityMatrix, System};
use crate::error::Error;
use crate::exec::Executor;
use crate::integrator::IntegratorConfig;
use crate::math::sqrt;
use crate::model::{Levels, PulseParams, Scheme, SystemSpec, TransferSchedule};
use crate::optimize::OptimizationResult;
use crate::protocol::{
    run_transfer, run_transfer_mixed, run_transfer_on, single_excitation_system,
};
use crate::statespace::{sample_disorder, BasisState, Manifolds, QubitLevel};

/// Pulse parameters taken from an ideal-case optimization and reused
/// unchanged by every sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrozenPulse {
    pub g_ratio: f64,
    pub kappa: f64,
    pub tau_d: f64,
    pub scheme: Scheme,
    /// Infidelity of the lossless, disorder-free transfer with this pulse.
    pub intrinsic_infidelity: f64,
}

impl FrozenPulse {
    pub fn from_optimum(opt: &OptimizationResult, scheme: Scheme) -> Self {
        FrozenPulse {
            g_ratio: opt.g_ratio,
            kappa: opt.kappa_opt,
            tau_d: opt.tau_d_opt,
            scheme,
            intrinsic_infidelity: opt.infidelity(),
        }
    }

    /// `spec` with both maximum couplings set to `g_ratio · ν_fsr`.
    pub fn apply(&self, spec: &SystemSpec) -> SystemSpec {
        let mut s = spec.clone();
        s.set_coupling(self.g_ratio * spec.channel.nu_fsr);
        s
    }

    pub fn schedule(&self, spec: &SystemSpec) -> TransferSchedule {
        TransferSchedule::new(
            self.scheme,
            PulseParams::new(self.g_ratio * spec.channel.nu_fsr, self.kappa, self.tau_d),
        )
    }

    fn hash_into(&self, h: &mut Fnv) {
        h.f64(self.g_ratio);
        h.f64(self.kappa);
        h.f64(self.tau_d);
        match self.scheme {
            Scheme::SimultaneousIdentical => h.bytes(&[0]),
            Scheme::DelayedMirror { offset } => {
                h.bytes(&[1]);
                h.f64(offset);
            }
        }
    }
}

/// 64-bit FNV-1a.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn bytes(&mut self, b: &[u8]) {
        for &x in b {
            self.0 ^= u64::from(x);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    fn f64(&mut self, x: f64) {
        self.bytes(&x.to_bits().to_le_bytes());
    }
}

/// Checksum of the exact pulse parameters used by a sweep.
pub fn pulse_checksum(pulses: &[FrozenPulse]) -> u64 {
    let mut h = Fnv::new();
    for p in pulses {
        p.hash_into(&mut h);
    }
    h.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub g_ratio: f64,
    pub infidelity: f64,
    /// Standard error of the mean, for averaged points.
    pub stderr: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: String,
    /// Grouped by pulse in the order given, values ascending within a group.
    pub points: Vec<SweepPoint>,
    pub pulse_checksum: u64,
}

impl SweepResult {
    /// The points belonging to one coupling ratio.
    pub fn series(&self, g_ratio: f64) -> Vec<SweepPoint> {
        self.points
            .iter()
            .copied()
            .filter(|p| p.g_ratio == g_ratio)
            .collect()
    }
}

fn sorted(values: &[f64]) -> Result<Vec<f64>, Error> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("sweep values must be finite".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

fn collect(
    parameter: String,
    pulses: &[FrozenPulse],
    values: &[f64],
    results: Vec<Result<(f64, Option<f64>), Error>>,
) -> Result<SweepResult, Error> {
    let mut points = Vec::with_capacity(results.len());
    for (n, r) in results.into_iter().enumerate() {
        let (infidelity, stderr) = r?;
        points.push(SweepPoint {
            value: values[n % values.len()],
            g_ratio: pulses[n / values.len()].g_ratio,
            infidelity,
            stderr,
        });
    }
    Ok(SweepResult {
        parameter,
        points,
        pulse_checksum: pulse_checksum(pulses),
    })
}

fn transfer_infidelity(
    spec: &SystemSpec,
    pulse: &FrozenPulse,
    cfg: &IntegratorConfig,
) -> Result<f64, Error> {
    let sched = pulse.schedule(spec);
    Ok(1.0 - run_transfer(spec, &sched, &cfg.with_samples(2))?.fidelity)
}

/// Which loss channel a dissipation sweep turns on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// Relaxation `γ` on both qubits.
    QubitRelaxation,
    /// Uniform decay `κ_c` of every channel mode.
    ChannelDecay,
}

impl Loss {
    pub fn name(self) -> &'static str {
        match self {
            Loss::QubitRelaxation => "gamma",
            Loss::ChannelDecay => "kappa_c",
        }
    }

    pub fn apply(self, spec: &mut SystemSpec, rate: f64) {
        match self {
            Loss::QubitRelaxation => {
                spec.qubit_a.gamma = rate;
                spec.qubit_b.gamma = rate;
            }
            Loss::ChannelDecay => spec.channel.kappa_c = rate,
        }
    }
}

/// Transfer infidelity against a loss rate, with the no-jump solver.
pub fn sweep_dissipation<E: Executor>(
    spec: &SystemSpec,
    pulses: &[FrozenPulse],
    loss: Loss,
    values: &[f64],
    cfg: &IntegratorConfig,
    exec: &E,
) -> Result<SweepResult, Error> {
    let values = sorted(values)?;
    if values.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidArgument("loss rates must be >= 0".into()));
    }
    let results = exec.map(pulses.len() * values.len(), |n| {
        let pulse = &pulses[n / values.len()];
        let mut s = pulse.apply(spec);
        loss.apply(&mut s, values[n % values.len()]);
        Ok((transfer_infidelity(&s, pulse, cfg)?, None))
    });
    collect(loss.name().into(), pulses, &values, results)
}

/// The same lossy transfer solved with the no-jump solver and with the full
/// master equation, returned as `(no-jump, Lindblad)` infidelities.
pub fn dissipation_cross_check(
    spec: &SystemSpec,
    pulse: &FrozenPulse,
    loss: Loss,
    rate: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64), Error> {
    let mut s = pulse.apply(spec);
    loss.apply(&mut s, rate);
    let sys = single_excitation_system(&s)?;
    let sched = pulse.schedule(&s);
    let initial = BasisState::ExcA(QubitLevel::E);
    let cfg = cfg.with_samples(2);
    let nh = run_transfer_on(&sys, &sched, initial, &cfg)?.fidelity;
    let rho0 = DensityMatrix::pure(&sys.state(initial)?);
    let lb = run_transfer_mixed(&sys, &sched, &rho0, &cfg)?.fidelity;
    Ok((1.0 - nh, 1.0 - lb))
}

fn mean_and_stderr(xs: &[f64]) -> (f64, Option<f64>) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, None);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, Some(sqrt(var / n)))
}

/// Infidelity averaged over static Gaussian mode-frequency disorder.
/// Realization `r` of every point uses the seed `seed + r`.
pub fn disorder_average<E: Executor>(
    spec: &SystemSpec,
    pulses: &[FrozenPulse],
    deltas: &[f64],
    n_realizations: usize,
    seed: u64,
    cfg: &IntegratorConfig,
    exec: &E,
) -> Result<SweepResult, Error> {
    let deltas = sorted(deltas)?;
    if n_realizations == 0 {
        return Err(Error::InvalidArgument(
            "need at least one disorder realization".into(),
        ));
    }
    let n_modes = spec.n_modes();
    let per_point = n_realizations;
    let runs = exec.map(pulses.len() * deltas.len() * per_point, |n| {
        let pulse = &pulses[n / (deltas.len() * per_point)];
        let delta = deltas[(n / per_point) % deltas.len()];
        let r = (n % per_point) as u64;
        let mut s = pulse.apply(spec);
        s.channel.disorder_offsets = Some(sample_disorder(delta, n_modes, seed.wrapping_add(r))?);
        transfer_infidelity(&s, pulse, cfg)
    });
    let mut results = Vec::with_capacity(pulses.len() * deltas.len());
    for chunk in runs.chunks(per_point) {
        let mut xs = Vec::with_capacity(per_point);
        let mut err = None;
        for r in chunk {
            match r {
                Ok(v) => xs.push(*v),
                Err(e) => {
                    err = Some(e.clone());
                    break;
                }
            }
        }
        results.push(match err {
            Some(e) => Err(e),
            None => Ok(mean_and_stderr(&xs)),
        });
    }
    collect("delta".into(), pulses, &deltas, results)
}

/// How a detuning `Δω = ω_B − ω_A` is split between the qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DetuningSplit {
    /// Qubit A stays resonant with the central mode.
    #[default]
    QubitB,
    /// `∓Δω/2` on A and B.
    Symmetric,
}

pub fn sweep_detuning<E: Executor>(
    spec: &SystemSpec,
    pulses: &[FrozenPulse],
    values: &[f64],
    split: DetuningSplit,
    cfg: &IntegratorConfig,
    exec: &E,
) -> Result<SweepResult, Error> {
    let values = sorted(values)?;
    let results = exec.map(pulses.len() * values.len(), |n| {
        let pulse = &pulses[n / values.len()];
        let dw = values[n % values.len()];
        let mut s = pulse.apply(spec);
        match split {
            DetuningSplit::QubitB => s.qubit_b.detuning = spec.qubit_a.detuning + dw,
            DetuningSplit::Symmetric => {
                s.qubit_a.detuning = spec.qubit_a.detuning - 0.5 * dw;
                s.qubit_b.detuning = spec.qubit_a.detuning + 0.5 * dw;
            }
        }
        Ok((transfer_infidelity(&s, pulse, cfg)?, None))
    });
    collect("delta_omega".into(), pulses, &values, results)
}

fn check_probabilities(eps: &[f64]) -> Result<Vec<f64>, Error> {
    let eps = sorted(eps)?;
    if eps.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::InvalidArgument(
            "error probabilities must lie in [0, 1]".into(),
        ));
    }
    Ok(eps)
}

/// `(1 − ε)·a + ε·b`.
fn convex(eps: f64, a: f64, b: f64) -> f64 {
    (1.0 - eps) * a + eps * b
}

/// Both qubits three-level with anharmonicity `alpha`.
fn three_level(spec: &SystemSpec, alpha: f64) -> SystemSpec {
    let mut s = spec.clone();
    for q in [&mut s.qubit_a, &mut s.qubit_b] {
        q.levels = Levels::Three;
        q.anharmonicity = Some(alpha);
    }
    s
}

/// Branch infidelities `(I_e, I_f)` of a sender prepared in `|e⟩` or `|f⟩`:
/// one minus the final population of `|e⟩_B`.
pub fn leakage_branches(
    spec: &SystemSpec,
    pulse: &FrozenPulse,
    alpha: f64,
    cfg: &IntegratorConfig,
) -> Result<(f64, f64), Error> {
    let s = three_level(&pulse.apply(spec), alpha);
    let sched = pulse.schedule(&s);
    let cfg = cfg.with_samples(2);
    let single = System::new(&s, Manifolds::SINGLE)?;
    let i_e =
        1.0 - run_transfer_on(&single, &sched, BasisState::ExcA(QubitLevel::E), &cfg)?.fidelity;
    let double = System::new(&s, Manifolds::DOUBLE)?;
    let i_f =
        1.0 - run_transfer_on(&double, &sched, BasisState::ExcA(QubitLevel::F), &cfg)?.fidelity;
    Ok((i_e, i_f))
}

/// Infidelity against the `|f⟩` preparation error `ε_f`, one series per
/// anharmonicity, each the exact mixture of the two branches.
pub fn leakage_infidelity(
    spec: &SystemSpec,
    pulse: &FrozenPulse,
    epsilons: &[f64],
    alphas: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<SweepResult>, Error> {
    let eps = check_probabilities(epsilons)?;
    let mut out = Vec::with_capacity(alphas.len());
    for &alpha in alphas {
        let (i_e, i_f) = leakage_branches(spec, pulse, alpha, cfg)?;
        out.push(SweepResult {
            parameter: format!("epsilon_f[alpha={alpha}]"),
            points: eps
                .iter()
                .map(|&e| SweepPoint {
                    value: e,
                    g_ratio: pulse.g_ratio,
                    infidelity: convex(e, i_e, i_f),
                    stderr: None,
                })
                .collect(),
            pulse_checksum: pulse_checksum(core::slice::from_ref(pulse)),
        });
    }
    Ok(out)
}

/// Branch infidelities for the clean channel and for a stray photon in
/// each mode `k`: `(I_0, [I_k])`.
pub fn stray_photon_branches<E: Executor>(
    spec: &SystemSpec,
    pulse: &FrozenPulse,
    cfg: &IntegratorConfig,
    exec: &E,
) -> Result<(f64, Vec<f64>), Error> {
    let s = pulse.apply(spec);
    let sched = pulse.schedule(&s);
    let cfg = cfg.with_samples(2);
    let single = System::new(&s, Manifolds::SINGLE)?;
    let i_0 =
        1.0 - run_transfer_on(&single, &sched, BasisState::ExcA(QubitLevel::E), &cfg)?.fidelity;
    let double = System::new(&s, Manifolds::DOUBLE)?;
    let branches = exec.map(s.n_modes(), |k| {
        run_transfer_on(&double, &sched, BasisState::ExcAPhoton(k), &cfg).map(|r| 1.0 - r.fidelity)
    });
    Ok((i_0, branches.into_iter().collect::<Result<Vec<_>, _>>()?))
}

/// Infidelity against the stray-photon probability `ε_p`, with the photon
/// spread over the modes with `weights` (uniform when `None`).
pub fn stray_photon_infidelity<E: Executor>(
    spec: &SystemSpec,
    pulse: &FrozenPulse,
    epsilons: &[f64],
    weights: Option<&[f64]>,
    cfg: &IntegratorConfig,
    exec: &E,
) -> Result<SweepResult, Error> {
    let eps = check_probabilities(epsilons)?;
    let n = spec.n_modes();
    let weights = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: w.len(),
                });
            }
            let total: f64 = w.iter().sum();
            if w.iter().any(|&x| !(x >= 0.0)) || (total - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidArgument(
                    "photon weights must be >= 0 and sum to 1".into(),
                ));
            }
            w.to_vec()
        }
        None => vec![1.0 / n as f64; n],
    };
    let (i_0, branches) = stray_photon_branches(spec, pulse, cfg, exec)?;
    let i_photon: f64 = weights.iter().zip(&branches).map(|(w, i)| w * i).sum();
    Ok(SweepResult {
        parameter: "epsilon_p".into(),
        points: eps
            .iter()
            .map(|&e| SweepPoint {
                value: e,
                g_ratio: pulse.g_ratio,
                infidelity: convex(e, i_0, i_photon),
                stderr: None,
            })
            .collect(),
        pulse_checksum: pulse_checksum(core::slice::from_ref(pulse)),
    })
}
