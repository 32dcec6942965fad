//! Physical description of the two-qubit, N-mode channel system and the
//! coupling envelopes that drive it.
//!
//! Frequencies are ordinary frequencies in units of the free spectral range;
//! times are in units of its inverse. See the crate docs for the 2π rule.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{cosh, sech};

/// Number of levels kept for a qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Levels {
    Two,
    Three,
}

/// Which of the two qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Qubit {
    A,
    B,
}

impl fmt::Display for Qubit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Qubit::A => "qubit_a",
            Qubit::B => "qubit_b",
        })
    }
}

/// The standing-wave mode ladder of the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    /// Number of modes kept; odd so there is a unique central mode.
    pub n_modes: usize,
    /// Mode spacing. This is the unit of frequency and is normally 1.
    pub nu_fsr: f64,
    /// Offset of the central mode from the rotating-frame origin.
    pub central_detuning: f64,
    /// Static per-mode frequency offsets, one per mode.
    pub disorder_offsets: Option<Vec<f64>>,
    /// Uniform mode decay rate.
    pub kappa_c: f64,
}

impl Default for ChannelSpec {
    fn default() -> Self {
        ChannelSpec {
            n_modes: 51,
            nu_fsr: 1.0,
            central_detuning: 0.0,
            disorder_offsets: None,
            kappa_c: 0.0,
        }
    }
}

impl ChannelSpec {
    pub fn central_index(&self) -> usize {
        self.n_modes / 2
    }

    /// Mode detunings `(k - k_c) ν_fsr + central_detuning + ξ_k` for every
    /// mode, in ordinary-frequency units.
    pub fn mode_detunings(&self) -> Vec<f64> {
        let kc = self.central_index() as f64;
        (0..self.n_modes)
            .map(|k| {
                let xi = self
                    .disorder_offsets
                    .as_ref()
                    .and_then(|d| d.get(k).copied())
                    .unwrap_or(0.0);
                (k as f64 - kc) * self.nu_fsr + self.central_detuning + xi
            })
            .collect()
    }
}

/// A single qubit (two- or three-level transmon-like emitter).
#[derive(Debug, Clone, PartialEq)]
pub struct QubitSpec {
    pub levels: Levels,
    /// `ω_q - ω_ref` in the rotating frame.
    pub detuning: f64,
    /// Positive anharmonicity; the f level sits at `2 δ - α`. Required for
    /// three-level qubits.
    pub anharmonicity: Option<f64>,
    /// Relaxation rate.
    pub gamma: f64,
    /// Maximum coupling to the channel.
    pub g_max: f64,
}

impl Default for QubitSpec {
    fn default() -> Self {
        QubitSpec {
            levels: Levels::Two,
            detuning: 0.0,
            anharmonicity: None,
            gamma: 0.0,
            g_max: 0.5,
        }
    }
}

/// Complete physical description of the system.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SystemSpec {
    pub channel: ChannelSpec,
    pub qubit_a: QubitSpec,
    pub qubit_b: QubitSpec,
    /// Mode index at which qubit B couples with sign +1; `None` means the
    /// central mode.
    pub parity_origin: Option<i64>,
}

impl SystemSpec {
    /// Default two-level system with `n_modes` modes and both maximum
    /// couplings equal to `g`.
    pub fn with_modes_and_coupling(n_modes: usize, g: f64) -> Self {
        let mut spec = SystemSpec::default();
        spec.channel.n_modes = n_modes;
        spec.set_coupling(g);
        spec
    }

    pub fn set_coupling(&mut self, g: f64) {
        self.qubit_a.g_max = g;
        self.qubit_b.g_max = g;
    }

    pub fn qubit(&self, q: Qubit) -> &QubitSpec {
        match q {
            Qubit::A => &self.qubit_a,
            Qubit::B => &self.qubit_b,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.channel.n_modes
    }

    pub fn parity_origin(&self) -> i64 {
        self.parity_origin
            .unwrap_or(self.channel.central_index() as i64)
    }

    /// Coupling sign of mode `k` for qubit B, `(-1)^(k - parity_origin)`.
    pub fn sign_b(&self, k: usize) -> f64 {
        if (k as i64 - self.parity_origin()).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Every invariant violation; empty when the `SystemSpec` is usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let ch = &self.channel;
        if ch.n_modes.is_multiple_of(2) {
            out.push(Violation::NModesEven(ch.n_modes));
        }
        if ch.n_modes < 3 {
            out.push(Violation::TooFewModes(ch.n_modes));
        }
        if !(ch.nu_fsr.is_finite() && ch.nu_fsr > 0.0) {
            out.push(Violation::NonPositive("nu_fsr"));
        }
        if !ch.central_detuning.is_finite() {
            out.push(Violation::NonFinite("central_detuning"));
        }
        if !(ch.kappa_c.is_finite() && ch.kappa_c >= 0.0) {
            out.push(Violation::Negative("kappa_c"));
        }
        if let Some(d) = &ch.disorder_offsets {
            if d.len() != ch.n_modes {
                out.push(Violation::DisorderLength {
                    expected: ch.n_modes,
                    found: d.len(),
                });
            }
            if d.iter().any(|x| !x.is_finite()) {
                out.push(Violation::NonFinite("disorder_offsets"));
            }
        }
        for q in [Qubit::A, Qubit::B] {
            let spec = self.qubit(q);
            if !spec.detuning.is_finite() {
                out.push(Violation::QubitField(q, "detuning must be finite"));
            }
            if !(spec.gamma.is_finite() && spec.gamma >= 0.0) {
                out.push(Violation::QubitField(q, "gamma must be finite and >= 0"));
            }
            if !(spec.g_max.is_finite() && spec.g_max > 0.0) {
                out.push(Violation::QubitField(q, "g_max must be finite and > 0"));
            }
            match (spec.levels, spec.anharmonicity) {
                (Levels::Three, None) => out.push(Violation::AnharmonicityRequired(q)),
                (_, Some(a)) if !(a.is_finite() && a > 0.0) => out.push(Violation::QubitField(
                    q,
                    "anharmonicity must be finite and > 0",
                )),
                _ => {}
            }
        }
        out
    }
}

/// One failed invariant of a [`SystemSpec`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NModesEven(usize),
    TooFewModes(usize),
    NonPositive(&'static str),
    Negative(&'static str),
    NonFinite(&'static str),
    DisorderLength { expected: usize, found: usize },
    AnharmonicityRequired(Qubit),
    QubitField(Qubit, &'static str),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NModesEven(n) => write!(f, "n_modes must be odd (got {n})"),
            Violation::TooFewModes(n) => write!(f, "n_modes must be at least 3 (got {n})"),
            Violation::NonPositive(name) => write!(f, "{name} must be finite and > 0"),
            Violation::Negative(name) => write!(f, "{name} must be finite and >= 0"),
            Violation::NonFinite(name) => write!(f, "{name} must be finite"),
            Violation::DisorderLength { expected, found } => write!(
                f,
                "disorder_offsets has length {found}, expected n_modes = {expected}"
            ),
            Violation::AnharmonicityRequired(q) => {
                write!(f, "{q}: anharmonicity required for three-level qubit")
            }
            Violation::QubitField(q, msg) => write!(f, "{q}: {msg}"),
        }
    }
}

/// Three-segment hyperbolic-secant coupling envelope: a sech ramp-up of
/// duration `τ = 6/κ`, a plateau of length `tau_d` at `g0`, and the mirrored
/// ramp-down.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseParams {
    pub g0: f64,
    pub kappa: f64,
    pub tau_d: f64,
}

impl PulseParams {
    pub fn new(g0: f64, kappa: f64, tau_d: f64) -> Self {
        PulseParams { g0, kappa, tau_d }
    }

    /// Ramp duration `τ = 6/κ`.
    pub fn ramp_duration(&self) -> f64 {
        6.0 / self.kappa
    }

    /// `2τ + τ_d`.
    pub fn cycle_duration(&self) -> f64 {
        2.0 * self.ramp_duration() + self.tau_d
    }

    /// Envelope value at `t`; zero outside `[0, t_cycle]`.
    pub fn envelope(&self, t: f64) -> f64 {
        let tau = self.ramp_duration();
        let hold_end = tau + self.tau_d;
        let end = tau + hold_end;
        if !(0.0..=end).contains(&t) {
            0.0
        } else if t < tau {
            self.g0 * sech(self.kappa * (t - tau))
        } else if t < hold_end {
            self.g0
        } else {
            self.g0 / cosh(self.kappa * (t - hold_end))
        }
    }

    /// Segment boundaries `[0, τ, τ + τ_d, t_cycle]`, shifted by `start`.
    pub fn breakpoints(&self, start: f64) -> [f64; 4] {
        let tau = self.ramp_duration();
        [
            start,
            start + tau,
            start + tau + self.tau_d,
            start + self.cycle_duration(),
        ]
    }
}

/// Timing relation between the two qubits' envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Scheme {
    /// Both qubits follow the same envelope at the same time.
    #[default]
    SimultaneousIdentical,
    /// Qubit B follows the envelope delayed by `offset`.
    DelayedMirror { offset: f64 },
}

/// Time-dependent couplings `(g_A(t), g_B(t))` plus the instants at which
/// they are not smooth.
pub trait Couplings {
    fn couplings(&self, t: f64) -> (f64, f64);

    /// Times where the envelope or its derivatives jump. The integrator never
    /// steps across them.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl<C: Couplings + ?Sized> Couplings for &C {
    fn couplings(&self, t: f64) -> (f64, f64) {
        (**self).couplings(t)
    }

    fn breakpoints(&self) -> Vec<f64> {
        (**self).breakpoints()
    }
}

/// The two-qubit pulse schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSchedule {
    pub scheme: Scheme,
    pub pulse: PulseParams,
}

impl TransferSchedule {
    pub fn new(scheme: Scheme, pulse: PulseParams) -> Self {
        TransferSchedule { scheme, pulse }
    }

    pub fn offset(&self) -> f64 {
        match self.scheme {
            Scheme::SimultaneousIdentical => 0.0,
            Scheme::DelayedMirror { offset } => offset,
        }
    }

    /// Total protocol duration: `t_cycle` plus the B offset.
    pub fn duration(&self) -> f64 {
        self.pulse.cycle_duration() + self.offset()
    }
}

impl Couplings for TransferSchedule {
    fn couplings(&self, t: f64) -> (f64, f64) {
        let ga = self.pulse.envelope(t);
        match self.scheme {
            Scheme::SimultaneousIdentical => (ga, ga),
            Scheme::DelayedMirror { offset } => (ga, self.pulse.envelope(t - offset)),
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.pulse.breakpoints(0.0).to_vec();
        if self.offset() != 0.0 {
            out.extend_from_slice(&self.pulse.breakpoints(self.offset()));
        }
        out
    }
}

/// Time-independent couplings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCoupling {
    pub g_a: f64,
    pub g_b: f64,
}

impl Couplings for ConstantCoupling {
    fn couplings(&self, _t: f64) -> (f64, f64) {
        (self.g_a, self.g_b)
    }
}

/// Qubit A driven by a pulse while qubit B stays decoupled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitPulse(pub PulseParams);

impl Couplings for SingleQubitPulse {
    fn couplings(&self, t: f64) -> (f64, f64) {
        (self.0.envelope(t), 0.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints(0.0).to_vec()
    }
}

/// Couplings sampled from arbitrary closures, mainly for tests and oracles.
pub struct FnCouplings<F: Fn(f64) -> (f64, f64)>(pub F);

impl<F: Fn(f64) -> (f64, f64)> Couplings for FnCouplings<F> {
    fn couplings(&self, t: f64) -> (f64, f64) {
        (self.0)(t)
    }
}

/// Sorted, de-duplicated breakpoints strictly inside `(t0, t1)`.
pub(crate) fn interior_breakpoints(mut bps: Vec<f64>, t0: f64, t1: f64) -> Vec<f64> {
    bps.retain(|&b| b > t0 && b < t1 && b.is_finite());
    bps.sort_by(f64::total_cmp);
    bps.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
    bps
}

/// Uniform grid of `n` points covering `[t0, t1]` (one point if `n < 2`).
pub fn uniform_times(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t1],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    t1
                } else {
                    t0 + (t1 - t0) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}
