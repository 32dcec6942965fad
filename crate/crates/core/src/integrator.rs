//! Adaptive Dormand–Prince 5(4) integration of complex linear ODEs with
//! embedded error control and a continuous fourth-order extension for
//! output between steps.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math::{pow, sqrt};
use crate::model::interior_breakpoints;
use crate::C64;

/// Tolerances and output resolution of the propagators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Upper bound on the step size.
    pub max_step: f64,
    /// Number of uniformly spaced output samples (including both ends).
    pub samples: usize,
    /// Accepted plus rejected steps allowed before giving up.
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-12,
            atol: 1e-14,
            max_step: f64::INFINITY,
            samples: 2001,
            max_steps: 20_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples;
        self
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !(self.rtol > 0.0 && self.atol > 0.0 && self.max_step > 0.0) {
            return Err(Error::InvalidArgument(
                "integrator tolerances and max_step must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Step bookkeeping of one integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;

struct Workspace {
    k: [Vec<C64>; 7],
    stage: Vec<C64>,
    y_new: Vec<C64>,
    dense: [Vec<C64>; 5],
}

impl Workspace {
    fn new(n: usize) -> Self {
        let z = || vec![C64::new(0.0, 0.0); n];
        Workspace {
            k: [z(), z(), z(), z(), z(), z(), z()],
            stage: z(),
            y_new: z(),
            dense: [z(), z(), z(), z(), z()],
        }
    }
}

/// Scaled RMS norm used for error control.
fn scaled_norm(v: &[C64], y: &[C64], rtol: f64, atol: f64) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let s: f64 = v
        .iter()
        .zip(y)
        .map(|(e, y)| {
            let sc = atol + rtol * y.norm();
            e.norm_sqr() / (sc * sc)
        })
        .sum();
    sqrt(s / v.len() as f64)
}

/// Integrate `dy/dt = rhs(t, y)` from `t0` to `t1`.
///
/// The step never crosses an entry of `breakpoints`; the stage cache is reset
/// there because the right-hand side may be discontinuous. `observe(i, t, y)`
/// is called once for every entry of the ascending `sample_times` (which must
/// lie in `[t0, t1]`), with `y` interpolated from the surrounding step.
/// Returns the state at `t1`.
pub fn integrate<F, O>(
    mut rhs: F,
    y0: &[C64],
    t0: f64,
    t1: f64,
    breakpoints: &[f64],
    sample_times: &[f64],
    cfg: &IntegratorConfig,
    mut observe: O,
) -> Result<(Vec<C64>, Stats), Error>
where
    F: FnMut(f64, &[C64], &mut [C64]),
    O: FnMut(usize, f64, &[C64]),
{
    cfg.validate()?;
    if !(t1 >= t0) {
        return Err(Error::InvalidArgument(
            "integration interval must be ascending".into(),
        ));
    }
    let n = y0.len();
    let mut ws = Workspace::new(n);
    let mut y = y0.to_vec();
    let mut stats = Stats::default();
    let mut next_sample = 0;

    while next_sample < sample_times.len() && sample_times[next_sample] <= t0 {
        observe(next_sample, sample_times[next_sample], &y);
        next_sample += 1;
    }
    if t1 == t0 || n == 0 {
        while next_sample < sample_times.len() {
            observe(next_sample, sample_times[next_sample], &y);
            next_sample += 1;
        }
        return Ok((y, stats));
    }

    let mut segments = interior_breakpoints(breakpoints.to_vec(), t0, t1);
    segments.push(t1);

    let mut t = t0;
    let mut h = 0.0;
    let mut fac_old = 1e-4;
    for &seg_end in &segments {
        // stages at either end of the segment must see the segment's own
        // side of a discontinuity, so time is kept strictly inside it
        let (lo, hi) = (t.next_up(), seg_end.next_down());
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (t, seg_end) };
        let mut rhs = |s: f64, y: &[C64], dy: &mut [C64]| rhs(s.clamp(lo, hi), y, dy);
        rhs(t, &y, &mut ws.k[0]);
        stats.evaluations += 1;
        if h == 0.0 {
            h = initial_step(&mut rhs, t, &y, seg_end - t, cfg, &mut ws, &mut stats);
        }
        let mut last = false;
        while !last {
            if stats.accepted + stats.rejected >= cfg.max_steps {
                return Err(Error::MaxStepsExceeded {
                    t,
                    steps: cfg.max_steps,
                });
            }
            h = h.min(cfg.max_step);
            let h_proposed = h;
            let remaining = seg_end - t;
            if h >= remaining * (1.0 - 1e-12) {
                h = remaining;
                last = true;
            }
            if h <= 1e-14 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t });
            }

            let err = dp_step(&mut rhs, t, h, &y, cfg, &mut ws);
            stats.evaluations += 6;
            if !err.is_finite() {
                return Err(Error::NonFinite { t });
            }

            let fac11 = pow(err, 0.2 - BETA * 0.75);
            if err <= 1.0 {
                let mut fac = fac11 / pow(fac_old, BETA);
                fac = (1.0 / FAC_MAX).max((1.0 / FAC_MIN).min(fac / SAFETY));
                fac_old = err.max(1e-4);
                stats.accepted += 1;

                let t_new = if last { seg_end } else { t + h };
                if next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                    prepare_dense(h, &y, &mut ws);
                    let mut buf = vec![C64::new(0.0, 0.0); n];
                    while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                        let ts = sample_times[next_sample];
                        if ts == t_new {
                            observe(next_sample, ts, &ws.y_new);
                        } else {
                            interpolate(&ws, (ts - t) / h, &mut buf);
                            observe(next_sample, ts, &buf);
                        }
                        next_sample += 1;
                    }
                }

                core::mem::swap(&mut y, &mut ws.y_new);
                // first-same-as-last: the final stage is the next step's first
                let (first, rest) = ws.k.split_at_mut(1);
                core::mem::swap(&mut first[0], &mut rest[5]);
                t = t_new;
                // a step clipped to the segment end says little about the
                // next segment; carry the unclipped proposal over instead
                h = if last && h < h_proposed {
                    h_proposed
                } else {
                    h / fac
                };
            } else {
                stats.rejected += 1;
                last = false;
                h /= (1.0 / FAC_MIN).min(fac11 / SAFETY);
            }
        }
    }
    while next_sample < sample_times.len() {
        observe(next_sample, sample_times[next_sample], &y);
        next_sample += 1;
    }
    Ok((y, stats))
}

/// One Dormand–Prince step from `(t, y)` with `k[0] = f(t, y)` precomputed.
/// Leaves the fifth-order solution in `y_new`, `f(t+h, y_new)` in `k[6]` and
/// returns the scaled error estimate.
fn dp_step<F>(
    rhs: &mut F,
    t: f64,
    h: f64,
    y: &[C64],
    cfg: &IntegratorConfig,
    ws: &mut Workspace,
) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let Workspace {
        k, stage, y_new, ..
    } = ws;

    for i in 0..n {
        stage[i] = y[i] + k[0][i] * (h * A21);
    }
    rhs(t + C2 * h, stage, &mut k[1]);
    for i in 0..n {
        stage[i] = y[i] + (k[0][i] * A31 + k[1][i] * A32) * h;
    }
    rhs(t + C3 * h, stage, &mut k[2]);
    for i in 0..n {
        stage[i] = y[i] + (k[0][i] * A41 + k[1][i] * A42 + k[2][i] * A43) * h;
    }
    rhs(t + C4 * h, stage, &mut k[3]);
    for i in 0..n {
        stage[i] = y[i] + (k[0][i] * A51 + k[1][i] * A52 + k[2][i] * A53 + k[3][i] * A54) * h;
    }
    rhs(t + C5 * h, stage, &mut k[4]);
    for i in 0..n {
        stage[i] = y[i]
            + (k[0][i] * A61 + k[1][i] * A62 + k[2][i] * A63 + k[3][i] * A64 + k[4][i] * A65) * h;
    }
    rhs(t + h, stage, &mut k[5]);
    for i in 0..n {
        y_new[i] = y[i]
            + (k[0][i] * A71 + k[2][i] * A73 + k[3][i] * A74 + k[4][i] * A75 + k[5][i] * A76) * h;
    }
    rhs(t + h, y_new, &mut k[6]);

    // error vector, reusing the stage buffer
    for i in 0..n {
        stage[i] = (k[0][i] * E1
            + k[2][i] * E3
            + k[3][i] * E4
            + k[4][i] * E5
            + k[5][i] * E6
            + k[6][i] * E7)
            * h;
    }
    let mut s = 0.0;
    for i in 0..n {
        let sc = cfg.atol + cfg.rtol * y[i].norm().max(y_new[i].norm());
        s += stage[i].norm_sqr() / (sc * sc);
    }
    sqrt(s / n as f64)
}

fn prepare_dense(h: f64, y: &[C64], ws: &mut Workspace) {
    let Workspace {
        k, y_new, dense, ..
    } = ws;
    for i in 0..y.len() {
        let ydiff = y_new[i] - y[i];
        let bspl = k[0][i] * h - ydiff;
        dense[0][i] = y[i];
        dense[1][i] = ydiff;
        dense[2][i] = bspl;
        dense[3][i] = ydiff - k[6][i] * h - bspl;
        dense[4][i] = (k[0][i] * D1
            + k[2][i] * D3
            + k[3][i] * D4
            + k[4][i] * D5
            + k[5][i] * D6
            + k[6][i] * D7)
            * h;
    }
}

fn interpolate(ws: &Workspace, theta: f64, out: &mut [C64]) {
    let th1 = 1.0 - theta;
    let d = &ws.dense;
    for i in 0..out.len() {
        out[i] = d[0][i] + (d[1][i] + (d[2][i] + (d[3][i] + d[4][i] * th1) * theta) * th1) * theta;
    }
}

/// Starting step from the local Lipschitz estimate (Hairer, Nørsett & Wanner).
fn initial_step<F>(
    rhs: &mut F,
    t: f64,
    y: &[C64],
    span: f64,
    cfg: &IntegratorConfig,
    ws: &mut Workspace,
    stats: &mut Stats,
) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let d0 = scaled_norm(y, y, cfg.rtol, cfg.atol);
    let d1 = scaled_norm(&ws.k[0], y, cfg.rtol, cfg.atol);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0 = h0.min(cfg.max_step).min(span);
    for i in 0..y.len() {
        ws.stage[i] = y[i] + ws.k[0][i] * h0;
    }
    rhs(t + h0, &ws.stage, &mut ws.k[1]);
    stats.evaluations += 1;
    for i in 0..y.len() {
        ws.y_new[i] = ws.k[1][i] - ws.k[0][i];
    }
    let d2 = scaled_norm(&ws.y_new, y, cfg.rtol, cfg.atol) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        pow(0.01 / d1.max(d2), 0.2)
    };
    (100.0 * h0).min(h1).min(cfg.max_step).min(span)
}
