//! The two experiments: the single-qubit round trip (qubit B decoupled) and
//! the two-qubit transfer, plus the revival and edge-mode diagnostics.

use alloc::vec::Vec;

use crate::dynamics::{DensityMatrix, SimResult, System};
use crate::error::Error;
use crate::integrator::IntegratorConfig;
use crate::model::{
    ConstantCoupling, Couplings, PulseParams, Scheme, SingleQubitPulse, SystemSpec,
    TransferSchedule,
};
use crate::statespace::{BasisState, Manifolds, QubitLevel};

/// Populations of the outermost modes above this value signal that the mode
/// ladder is truncated too tightly.
pub const EDGE_WARNING_THRESHOLD: f64 = 1e-6;

/// Minimum prominence of a local maximum of `P_A(t)` to count as a revival.
pub const REVIVAL_PROMINENCE: f64 = 0.05;

/// Coupling of qubit A during a round trip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RoundTripDrive {
    Constant(f64),
    Pulse(PulseParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripResult {
    pub sim: SimResult,
    /// `P_A` at the final time (`t_cycle` for a pulse by default).
    pub return_probability: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransferResult {
    pub sim: SimResult,
    /// `P_B` at the end of the schedule.
    pub fidelity: f64,
    pub t_end: f64,
    pub schedule: TransferSchedule,
}

impl TransferResult {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.fidelity
    }

    /// `1 - P_B(t)` on the sample grid.
    pub fn residual_b(&self) -> Vec<f64> {
        self.sim.p_b.iter().map(|p| 1.0 - p).collect()
    }

    /// `1 - P_A(t)` on the sample grid.
    pub fn residual_a(&self) -> Vec<f64> {
        self.sim.p_a.iter().map(|p| 1.0 - p).collect()
    }
}

fn has_loss(spec: &SystemSpec) -> bool {
    spec.qubit_a.gamma > 0.0 || spec.qubit_b.gamma > 0.0 || spec.channel.kappa_c > 0.0
}

/// The single-excitation system, with the vacuum added when the `SystemSpec` is
/// lossy.
pub fn single_excitation_system(spec: &SystemSpec) -> Result<System, Error> {
    let manifolds = if has_loss(spec) {
        Manifolds::VACUUM.union(Manifolds::SINGLE)
    } else {
        Manifolds::SINGLE
    };
    System::new(spec, manifolds)
}

/// Propagate a pure initial state with the closed solver, or the no-jump
/// solver when the system has dissipators.
fn run_pure<C: Couplings + ?Sized>(
    sys: &System,
    couplings: &C,
    initial: BasisState,
    t_final: f64,
    cfg: &IntegratorConfig,
) -> Result<SimResult, Error> {
    let psi0 = sys.state(initial)?;
    if sys.dissipators.is_empty() {
        sys.propagate_pure(couplings, &psi0, t_final, cfg)
    } else {
        sys.propagate_nonhermitian(couplings, &psi0, t_final, cfg)
    }
}

/// Emission and recapture by qubit A alone, starting from `|e⟩_A`. The
/// final time defaults to the pulse cycle; it is required for a constant
/// drive.
pub fn run_round_trip(
    spec: &SystemSpec,
    drive: RoundTripDrive,
    t_final: Option<f64>,
    cfg: &IntegratorConfig,
) -> Result<RoundTripResult, Error> {
    let sys = single_excitation_system(spec)?;
    let initial = BasisState::ExcA(QubitLevel::E);
    let sim = match drive {
        RoundTripDrive::Constant(g) => {
            let t = t_final.ok_or_else(|| {
                Error::InvalidArgument("constant-coupling round trip needs a final time".into())
            })?;
            run_pure(
                &sys,
                &ConstantCoupling { g_a: g, g_b: 0.0 },
                initial,
                t,
                cfg,
            )?
        }
        RoundTripDrive::Pulse(p) => {
            let t = t_final.unwrap_or_else(|| p.cycle_duration());
            run_pure(&sys, &SingleQubitPulse(p), initial, t, cfg)?
        }
    };
    Ok(RoundTripResult {
        return_probability: sim.final_p_a(),
        sim,
    })
}

/// Transfer `|e⟩_A → |e⟩_B` under `schedule`, propagated over its full
/// duration. Uses the no-jump solver when the `SystemSpec` has loss.
pub fn run_transfer(
    spec: &SystemSpec,
    schedule: &TransferSchedule,
    cfg: &IntegratorConfig,
) -> Result<TransferResult, Error> {
    let sys = single_excitation_system(spec)?;
    run_transfer_on(&sys, schedule, BasisState::ExcA(QubitLevel::E), cfg)
}

/// Transfer on a prebuilt system from an arbitrary basis state.
pub fn run_transfer_on(
    sys: &System,
    schedule: &TransferSchedule,
    initial: BasisState,
    cfg: &IntegratorConfig,
) -> Result<TransferResult, Error> {
    let t_end = schedule.duration();
    let sim = run_pure(sys, schedule, initial, t_end, cfg)?;
    Ok(TransferResult {
        fidelity: sim.final_p_b(),
        sim,
        t_end,
        schedule: *schedule,
    })
}

/// Transfer from a mixed initial state with the Lindblad solver.
pub fn run_transfer_mixed(
    sys: &System,
    schedule: &TransferSchedule,
    rho0: &DensityMatrix,
    cfg: &IntegratorConfig,
) -> Result<TransferResult, Error> {
    let t_end = schedule.duration();
    let sim = sys.propagate_lindblad(schedule, rho0, t_end, cfg)?;
    Ok(TransferResult {
        fidelity: sim.final_p_b(),
        sim,
        t_end,
        schedule: *schedule,
    })
}

/// Largest population of the two outermost modes over all samples.
pub fn edge_mode_diagnostic(sim: &SimResult) -> f64 {
    sim.edge_pop_max
}

/// Transfer fidelity for the pulse `(g_max, κ, τ_d)` under `scheme`, with
/// only the endpoint sampled.
pub fn transfer_fidelity(
    spec: &SystemSpec,
    kappa: f64,
    tau_d: f64,
    scheme: Scheme,
    cfg: &IntegratorConfig,
) -> Result<f64, Error> {
    if !(kappa > 0.0 && kappa.is_finite()) || !(tau_d >= 0.0 && tau_d.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "need kappa > 0 and tau_d >= 0 (got {kappa}, {tau_d})"
        )));
    }
    let schedule =
        TransferSchedule::new(scheme, PulseParams::new(spec.qubit_a.g_max, kappa, tau_d));
    Ok(run_transfer(spec, &schedule, &cfg.with_samples(2))?.fidelity)
}

/// Return probability of the round trip for the pulse `(g_max, κ, τ_d)`.
pub fn round_trip_return(
    spec: &SystemSpec,
    kappa: f64,
    tau_d: f64,
    cfg: &IntegratorConfig,
) -> Result<f64, Error> {
    if !(kappa > 0.0 && kappa.is_finite()) || !(tau_d >= 0.0 && tau_d.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "need kappa > 0 and tau_d >= 0 (got {kappa}, {tau_d})"
        )));
    }
    let pulse = PulseParams::new(spec.qubit_a.g_max, kappa, tau_d);
    Ok(run_round_trip(
        spec,
        RoundTripDrive::Pulse(pulse),
        None,
        &cfg.with_samples(2),
    )?
    .return_probability)
}

/// A local maximum of a sampled curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub index: usize,
    pub t: f64,
    pub value: f64,
    pub prominence: f64,
}

/// Interior local maxima of `values` whose topographic prominence is at
/// least `min_prominence`, in time order.
pub fn find_peaks(times: &[f64], values: &[f64], min_prominence: f64) -> Vec<Peak> {
    let n = values.len();
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i] > values[i - 1] {
            // handle flat tops: advance across equal samples
            let mut j = i;
            while j + 1 < n && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < n && values[j + 1] < values[i] {
                let peak = (i + j) / 2;
                let v = values[peak];
                let mut left_min = v;
                for k in (0..i).rev() {
                    if values[k] > v {
                        break;
                    }
                    left_min = left_min.min(values[k]);
                }
                let mut right_min = v;
                for &x in &values[j + 1..] {
                    if x > v {
                        break;
                    }
                    right_min = right_min.min(x);
                }
                let prominence = v - left_min.max(right_min);
                if prominence >= min_prominence {
                    peaks.push(Peak {
                        index: peak,
                        t: times[peak],
                        value: v,
                        prominence,
                    });
                }
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    peaks
}

/// Revival peaks of `P_A(t)` using [`REVIVAL_PROMINENCE`].
pub fn revival_peaks(sim: &SimResult) -> Vec<Peak> {
    find_peaks(&sim.times, &sim.p_a, REVIVAL_PROMINENCE)
}
