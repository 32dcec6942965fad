//! Pulse optimization over `(κ, τ_d)`: a coarse grid scan, simplex
//! refinement of promising cells, selection of the fastest high-fidelity
//! optimum, and the empirical trend fits across coupling ratios.

use alloc::vec::Vec;

use crate::error::Error;
use crate::exec::Executor;
use crate::fit::{fit_exponential, fit_logarithmic, FitResult};
use crate::integrator::IntegratorConfig;
use crate::math::{exp, ln};
use crate::model::{PulseParams, Scheme, SystemSpec, TransferSchedule};
use crate::protocol::{round_trip_return, transfer_fidelity};
use crate::simplex::{minimize, SimplexOptions};

/// Scan coordinates: `κ` log-spaced, `τ_d` linear, both ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanAxes {
    pub kappa: Vec<f64>,
    pub tau_d: Vec<f64>,
}

impl ScanAxes {
    pub fn new(
        kappa_range: (f64, f64),
        tau_d_range: (f64, f64),
        resolution: (usize, usize),
    ) -> Result<ScanAxes, Error> {
        let (k0, k1) = kappa_range;
        let (d0, d1) = tau_d_range;
        if !(k0 > 0.0 && k1 > k0 && k1.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "kappa range must satisfy 0 < min < max (got {k0}, {k1})"
            )));
        }
        if !(d0 >= 0.0 && d1 > d0 && d1.is_finite()) {
            return Err(Error::InvalidArgument(alloc::format!(
                "tau_d range must satisfy 0 <= min < max (got {d0}, {d1})"
            )));
        }
        if resolution.0 < 2 || resolution.1 < 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "scan resolution must be at least 2 per axis (got {}x{})",
                resolution.0,
                resolution.1
            )));
        }
        let (l0, l1) = (ln(k0), ln(k1));
        let nk = resolution.0 - 1;
        let kappa = (0..=nk)
            .map(|i| match i {
                0 => k0,
                i if i == nk => k1,
                i => exp(l0 + (l1 - l0) * i as f64 / nk as f64),
            })
            .collect();
        let nd = resolution.1 - 1;
        let tau_d = (0..=nd)
            .map(|j| {
                if j == nd {
                    d1
                } else {
                    d0 + (d1 - d0) * j as f64 / nd as f64
                }
            })
            .collect();
        Ok(ScanAxes { kappa, tau_d })
    }

    pub fn kappa_bounds(&self) -> (f64, f64) {
        (self.kappa[0], self.kappa[self.kappa.len() - 1])
    }

    /// Half the grid spacing in the refinement coordinates `(ln κ, τ_d)`.
    pub fn half_spacing(&self) -> [f64; 2] {
        let (k0, k1) = self.kappa_bounds();
        let d = &self.tau_d;
        [
            0.5 * (ln(k1) - ln(k0)) / (self.kappa.len() - 1) as f64,
            0.5 * (d[d.len() - 1] - d[0]) / (d.len() - 1) as f64,
        ]
    }
}

impl Default for ScanAxes {
    /// 41 × 41 points over `κ ∈ [0.1, 20]`, `τ_d ∈ [0, 2]`.
    fn default() -> Self {
        ScanAxes::new((0.1, 20.0), (0.0, 2.0), (41, 41)).expect("default axes are valid")
    }
}

/// Infidelity on a `κ × τ_d` grid, row-major in `κ`. Cells whose
/// propagation failed are `None`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub kappa: Vec<f64>,
    pub tau_d: Vec<f64>,
    pub infidelity: Vec<Option<f64>>,
}

impl ScanGrid {
    pub fn shape(&self) -> (usize, usize) {
        (self.kappa.len(), self.tau_d.len())
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        self.infidelity[i * self.tau_d.len() + j]
    }

    pub fn missing(&self) -> usize {
        self.infidelity.iter().filter(|v| v.is_none()).count()
    }

    /// Cell with the lowest infidelity.
    pub fn best(&self) -> Option<(usize, usize, f64)> {
        let (nk, nd) = self.shape();
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..nk {
            for j in 0..nd {
                if let Some(v) = self.get(i, j) {
                    if best.is_none_or(|b| v < b.2) {
                        best = Some((i, j, v));
                    }
                }
            }
        }
        best
    }

    /// Cells no worse than any of their (up to eight) evaluated neighbours.
    pub fn local_minima(&self) -> Vec<(usize, usize, f64)> {
        let (nk, nd) = self.shape();
        let mut out = Vec::new();
        for i in 0..nk {
            for j in 0..nd {
                let Some(v) = self.get(i, j) else { continue };
                let mut is_min = true;
                for a in i.saturating_sub(1)..=(i + 1).min(nk - 1) {
                    for b in j.saturating_sub(1)..=(j + 1).min(nd - 1) {
                        if let Some(w) = self.get(a, b) {
                            if w < v {
                                is_min = false;
                            }
                        }
                    }
                }
                if is_min {
                    out.push((i, j, v));
                }
            }
        }
        out
    }
}

/// Figure of merit minimized by the optimizer.
pub trait Objective: Sync {
    fn infidelity(&self, kappa: f64, tau_d: f64, cfg: &IntegratorConfig) -> Result<f64, Error>;

    /// Total protocol duration for the pulse `(κ, τ_d)`.
    fn duration(&self, kappa: f64, tau_d: f64) -> f64;

    /// `g / ν_fsr` of the underlying system.
    fn g_ratio(&self) -> f64;
}

/// `1 - P_B` at the end of the two-qubit transfer.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferObjective {
    pub spec: SystemSpec,
    pub scheme: Scheme,
}

impl Objective for TransferObjective {
    fn infidelity(&self, kappa: f64, tau_d: f64, cfg: &IntegratorConfig) -> Result<f64, Error> {
        Ok(1.0 - transfer_fidelity(&self.spec, kappa, tau_d, self.scheme, cfg)?)
    }

    fn duration(&self, kappa: f64, tau_d: f64) -> f64 {
        TransferSchedule::new(
            self.scheme,
            PulseParams::new(self.spec.qubit_a.g_max, kappa, tau_d),
        )
        .duration()
    }

    fn g_ratio(&self) -> f64 {
        self.spec.qubit_a.g_max / self.spec.channel.nu_fsr
    }
}

/// `1 - P_A(t_cycle)` for the single-qubit round trip.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTripObjective {
    pub spec: SystemSpec,
}

impl Objective for RoundTripObjective {
    fn infidelity(&self, kappa: f64, tau_d: f64, cfg: &IntegratorConfig) -> Result<f64, Error> {
        Ok(1.0 - round_trip_return(&self.spec, kappa, tau_d, cfg)?)
    }

    fn duration(&self, kappa: f64, tau_d: f64) -> f64 {
        PulseParams::new(self.spec.qubit_a.g_max, kappa, tau_d).cycle_duration()
    }

    fn g_ratio(&self) -> f64 {
        self.spec.qubit_a.g_max / self.spec.channel.nu_fsr
    }
}

/// Evaluate `objective` on every grid cell. Failed cells are recorded as
/// missing rather than aborting the scan.
pub fn grid_scan<O: Objective, E: Executor>(
    objective: &O,
    axes: &ScanAxes,
    cfg: &IntegratorConfig,
    exec: &E,
) -> ScanGrid {
    let nd = axes.tau_d.len();
    let infidelity = exec.map(axes.kappa.len() * nd, |n| {
        objective
            .infidelity(axes.kappa[n / nd], axes.tau_d[n % nd], cfg)
            .ok()
    });
    ScanGrid {
        kappa: axes.kappa.clone(),
        tau_d: axes.tau_d.clone(),
        infidelity,
    }
}

/// Outcome of one simplex descent.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub start: (f64, f64),
    pub start_infidelity: f64,
    pub kappa: f64,
    pub tau_d: f64,
    pub infidelity: f64,
    pub converged: bool,
    pub iterations: usize,
    pub evaluations: usize,
    /// Best infidelity after each simplex iteration.
    pub trace: Vec<f64>,
}

/// Nelder–Mead descent in `(ln κ, τ_d)` from `start`, with `κ` kept inside
/// `kappa_bounds` and `τ_d` clamped at zero. The result is never worse than
/// the start point.
pub fn refine_optimum<O: Objective>(
    objective: &O,
    start: (f64, f64),
    kappa_bounds: (f64, f64),
    opts: &SimplexOptions,
    cfg: &IntegratorConfig,
) -> Result<Refinement, Error> {
    let (k0, k1) = kappa_bounds;
    if !(start.0 >= k0 && start.0 <= k1 && start.1 >= 0.0) {
        return Err(Error::InvalidArgument(alloc::format!(
            "refinement start ({}, {}) outside the search bounds",
            start.0,
            start.1
        )));
    }
    let start_infidelity = objective.infidelity(start.0, start.1, cfg)?;
    let (l0, l1) = (ln(k0), ln(k1));
    let project = |x: [f64; 2]| [x[0].clamp(l0, l1), x[1].max(0.0)];
    let f = |x: [f64; 2]| {
        objective
            .infidelity(exp(x[0]), x[1], cfg)
            .unwrap_or(f64::INFINITY)
    };
    let r = minimize(f, project, [ln(start.0), start.1], opts);
    let (kappa, tau_d, infidelity) = if r.value <= start_infidelity {
        (exp(r.best[0]).clamp(k0, k1), r.best[1], r.value)
    } else {
        (start.0, start.1, start_infidelity)
    };
    Ok(Refinement {
        start,
        start_infidelity,
        kappa,
        tau_d,
        infidelity,
        converged: r.converged,
        iterations: r.iterations,
        evaluations: r.evaluations,
        trace: r.trace,
    })
}

/// Settings for [`optimize`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizeOptions {
    pub axes: ScanAxes,
    /// Integrator settings for the grid scan.
    pub scan_cfg: IntegratorConfig,
    /// Integrator settings for the refinement.
    pub refine_cfg: IntegratorConfig,
    pub simplex: SimplexOptions,
    /// Optima closer than this in infidelity count as tied; the faster one
    /// wins.
    pub tie_tolerance: f64,
    /// Infidelity that counts as high fidelity.
    pub target_infidelity: f64,
    /// Grid minima above this infidelity are not refined.
    pub candidate_infidelity: f64,
    /// Upper bound on the number of refined candidates.
    pub max_candidates: usize,
}

impl OptimizeOptions {
    pub fn with_axes(axes: ScanAxes) -> Self {
        let simplex = SimplexOptions {
            initial_step: axes.half_spacing(),
            ..SimplexOptions::default()
        };
        OptimizeOptions {
            axes,
            scan_cfg: IntegratorConfig::default().with_tolerances(1e-8, 1e-10),
            refine_cfg: IntegratorConfig::default(),
            simplex,
            tie_tolerance: 1e-4,
            target_infidelity: 1e-3,
            candidate_infidelity: 1e-2,
            max_candidates: 8,
        }
    }
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions::with_axes(ScanAxes::default())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult {
    pub g_ratio: f64,
    pub kappa_opt: f64,
    pub tau_d_opt: f64,
    pub f_opt: f64,
    /// Total protocol duration at the optimum.
    pub t_cycle_opt: f64,
    pub scan: ScanGrid,
    /// The refinement that produced the optimum.
    pub refinement: Refinement,
    /// Every refinement attempted, in the order tried.
    pub candidates: Vec<Refinement>,
}

impl OptimizationResult {
    pub fn infidelity(&self) -> f64 {
        1.0 - self.f_opt
    }
}

/// Scan, refine and select the fastest high-fidelity optimum.
///
/// Grid local minima below `candidate_infidelity` are refined in order of
/// increasing protocol duration. The first whose refined infidelity is at
/// most `max(target_infidelity, best_grid + tie_tolerance)` is taken. If
/// none qualifies, the grid cells within `tie_tolerance` of the grid best
/// are considered tied, the fastest of them is refined, and the best of all
/// refinements is returned (ties again resolved by duration).
pub fn optimize<O: Objective, E: Executor>(
    objective: &O,
    opts: &OptimizeOptions,
    exec: &E,
) -> Result<OptimizationResult, Error> {
    let scan = grid_scan(objective, &opts.axes, &opts.scan_cfg, exec);
    let (_, _, grid_best) = scan
        .best()
        .ok_or_else(|| Error::InvalidArgument("every scan cell failed to propagate".into()))?;
    let duration = |i: usize, j: usize| objective.duration(scan.kappa[i], scan.tau_d[j]);
    let bounds = opts.axes.kappa_bounds();
    let accept = opts.target_infidelity.max(grid_best + opts.tie_tolerance);

    let mut minima: Vec<(usize, usize, f64)> = scan
        .local_minima()
        .into_iter()
        .filter(|c| c.2 <= opts.candidate_infidelity)
        .collect();
    minima.sort_by(|a, b| {
        duration(a.0, a.1)
            .total_cmp(&duration(b.0, b.1))
            .then(a.2.total_cmp(&b.2))
    });

    let mut candidates: Vec<Refinement> = Vec::new();
    let mut chosen = None;
    for &(i, j, _) in minima.iter().take(opts.max_candidates) {
        let r = refine_optimum(
            objective,
            (scan.kappa[i], scan.tau_d[j]),
            bounds,
            &opts.simplex,
            &opts.refine_cfg,
        )?;
        let ok = r.infidelity <= accept;
        candidates.push(r);
        if ok {
            chosen = Some(candidates.len() - 1);
            break;
        }
    }

    let chosen = match chosen {
        Some(c) => c,
        None => {
            let (nk, nd) = scan.shape();
            let mut tied: Option<(usize, usize)> = None;
            for i in 0..nk {
                for j in 0..nd {
                    if let Some(v) = scan.get(i, j) {
                        if v <= grid_best + opts.tie_tolerance
                            && tied.is_none_or(|(a, b)| duration(i, j) < duration(a, b))
                        {
                            tied = Some((i, j));
                        }
                    }
                }
            }
            let (i, j) = tied.expect("grid best exists");
            candidates.push(refine_optimum(
                objective,
                (scan.kappa[i], scan.tau_d[j]),
                bounds,
                &opts.simplex,
                &opts.refine_cfg,
            )?);
            let best = candidates
                .iter()
                .map(|r| r.infidelity)
                .fold(f64::INFINITY, f64::min);
            let mut pick = 0;
            for (n, r) in candidates.iter().enumerate() {
                let d = objective.duration(r.kappa, r.tau_d);
                let p = &candidates[pick];
                let in_tie = r.infidelity <= best + opts.tie_tolerance;
                let pick_in_tie = p.infidelity <= best + opts.tie_tolerance;
                if in_tie && (!pick_in_tie || d < objective.duration(p.kappa, p.tau_d)) {
                    pick = n;
                }
            }
            pick
        }
    };

    let refinement = candidates[chosen].clone();
    Ok(OptimizationResult {
        g_ratio: objective.g_ratio(),
        kappa_opt: refinement.kappa,
        tau_d_opt: refinement.tau_d,
        f_opt: 1.0 - refinement.infidelity,
        t_cycle_opt: objective.duration(refinement.kappa, refinement.tau_d),
        scan,
        refinement,
        candidates,
    })
}

/// [`optimize`] for the two-qubit transfer with `g_max` of both qubits set
/// to `g_ratio · ν_fsr`.
pub fn optimize_transfer<E: Executor>(
    spec: &SystemSpec,
    g_ratio: f64,
    scheme: Scheme,
    opts: &OptimizeOptions,
    exec: &E,
) -> Result<OptimizationResult, Error> {
    if !(g_ratio > 0.0 && g_ratio.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "g_ratio must be positive (got {g_ratio})"
        )));
    }
    let mut spec = spec.clone();
    spec.set_coupling(g_ratio * spec.channel.nu_fsr);
    optimize(&TransferObjective { spec, scheme }, opts, exec)
}

/// [`optimize`] for the single-qubit round trip.
pub fn optimize_round_trip<E: Executor>(
    spec: &SystemSpec,
    g_ratio: f64,
    opts: &OptimizeOptions,
    exec: &E,
) -> Result<OptimizationResult, Error> {
    if !(g_ratio > 0.0 && g_ratio.is_finite()) {
        return Err(Error::InvalidArgument(alloc::format!(
            "g_ratio must be positive (got {g_ratio})"
        )));
    }
    let mut spec = spec.clone();
    spec.set_coupling(g_ratio * spec.channel.nu_fsr);
    optimize(&RoundTripObjective { spec }, opts, exec)
}

/// Empirical trends of the optimal parameters against `g / ν_fsr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendFits {
    /// `κ_opt ≈ a·exp(b·x)`.
    pub kappa: FitResult,
    /// `t_cycle ≈ a·exp(b·x)`.
    pub t_cycle: FitResult,
    /// `τ_d,opt ≈ c·ln(x) + d`.
    pub tau_d: FitResult,
    /// Smallest and largest fitted `g / ν_fsr`.
    pub g_range: (f64, f64),
}

/// One optimum as seen by the trend fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendPoint {
    pub g_ratio: f64,
    pub kappa: f64,
    pub tau_d: f64,
    pub t_cycle: f64,
}

impl From<&OptimizationResult> for TrendPoint {
    fn from(r: &OptimizationResult) -> Self {
        TrendPoint {
            g_ratio: r.g_ratio,
            kappa: r.kappa_opt,
            tau_d: r.tau_d_opt,
            t_cycle: r.t_cycle_opt,
        }
    }
}

/// Fit the optimal-parameter trends. Needs at least three results with
/// distinct coupling ratios.
pub fn fit_trends(results: &[OptimizationResult]) -> Result<TrendFits, Error> {
    let points: Vec<TrendPoint> = results.iter().map(TrendPoint::from).collect();
    fit_trend_points(&points)
}

pub fn fit_trend_points(points: &[TrendPoint]) -> Result<TrendFits, Error> {
    let xs: Vec<f64> = points.iter().map(|r| r.g_ratio).collect();
    let mut distinct = xs.clone();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidArgument(alloc::format!(
            "trend fits need at least 3 distinct coupling ratios (got {})",
            distinct.len()
        )));
    }
    let kappa: Vec<f64> = points.iter().map(|r| r.kappa).collect();
    let t_cycle: Vec<f64> = points.iter().map(|r| r.t_cycle).collect();
    let tau_d: Vec<f64> = points.iter().map(|r| r.tau_d).collect();
    Ok(TrendFits {
        kappa: fit_exponential(&xs, &kappa)?,
        t_cycle: fit_exponential(&xs, &t_cycle)?,
        tau_d: fit_logarithmic(&xs, &tau_d)?,
        g_range: (distinct[0], distinct[distinct.len() - 1]),
    })
}

/// Pulse parameters predicted by the trend fits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interpolated {
    pub kappa: f64,
    pub tau_d: f64,
    /// The query lies outside the fitted range; treat the value as advisory.
    pub extrapolated: bool,
    /// The predicted delay was negative and has been set to zero.
    pub clamped: bool,
}

pub fn interpolate_optimal(fits: &TrendFits, g_ratio: f64) -> Interpolated {
    let (lo, hi) = fits.g_range;
    let raw_tau_d = fits.tau_d.eval(g_ratio);
    Interpolated {
        kappa: fits.kappa.eval(g_ratio),
        tau_d: raw_tau_d.max(0.0),
        extrapolated: !(lo..=hi).contains(&g_ratio),
        clamped: raw_tau_d < 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exec::Sequential;
    use crate::fit::FitModel;

    /// Cheap analytic landscape with two basins: a deep slow one and a
    /// shallower fast one.
    struct TwoBasins {
        fast_floor: f64,
    }

    /// Sits on a node of the 21-point axes.
    const SLOW_KAPPA: f64 = 0.37606030930863943;

    impl Objective for TwoBasins {
        fn infidelity(&self, kappa: f64, tau_d: f64, _: &IntegratorConfig) -> Result<f64, Error> {
            let slow = 1e-5 + 0.5 * ((ln(kappa) - ln(SLOW_KAPPA)).powi(2) + (tau_d - 1.0).powi(2));
            let fast =
                self.fast_floor + 0.5 * ((ln(kappa) - ln(10.0)).powi(2) + (tau_d - 0.4).powi(2));
            Ok(slow.min(fast).min(1.0))
        }

        fn duration(&self, kappa: f64, tau_d: f64) -> f64 {
            12.0 / kappa + tau_d
        }

        fn g_ratio(&self) -> f64 {
            0.5
        }
    }

    fn small_opts() -> OptimizeOptions {
        OptimizeOptions::with_axes(ScanAxes::new((0.1, 20.0), (0.0, 2.0), (21, 21)).unwrap())
    }

    #[test]
    fn axes_are_ascending_and_hit_the_ends() {
        let a = ScanAxes::default();
        assert_eq!(a.kappa.len(), 41);
        assert_eq!(a.tau_d.len(), 41);
        assert_eq!(a.kappa[0], 0.1);
        assert_eq!(a.kappa[40], 20.0);
        assert_eq!(a.tau_d[40], 2.0);
        assert!(a.kappa.windows(2).all(|w| w[1] > w[0]));
        let r = a.kappa[1] / a.kappa[0];
        assert!((a.kappa[21] / a.kappa[20] - r).abs() < 1e-12);
    }

    #[test]
    fn axes_reject_bad_ranges() {
        assert!(ScanAxes::new((0.0, 1.0), (0.0, 1.0), (3, 3)).is_err());
        assert!(ScanAxes::new((1.0, 1.0), (0.0, 1.0), (3, 3)).is_err());
        assert!(ScanAxes::new((0.1, 1.0), (-1.0, 1.0), (3, 3)).is_err());
        assert!(ScanAxes::new((0.1, 1.0), (0.0, 1.0), (1, 3)).is_err());
    }

    #[test]
    fn local_minima_of_a_bowl() {
        let grid = ScanGrid {
            kappa: alloc::vec![1.0, 2.0, 3.0],
            tau_d: alloc::vec![0.0, 1.0, 2.0],
            infidelity: [0.5, 0.4, 0.5, 0.4, 0.1, 0.4, 0.5, 0.4, 0.5]
                .iter()
                .map(|&v| Some(v))
                .collect(),
        };
        assert_eq!(grid.local_minima(), alloc::vec![(1, 1, 0.1)]);
        assert_eq!(grid.best(), Some((1, 1, 0.1)));
    }

    #[test]
    fn missing_cells_are_skipped() {
        let grid = ScanGrid {
            kappa: alloc::vec![1.0, 2.0],
            tau_d: alloc::vec![0.0, 1.0],
            infidelity: alloc::vec![None, Some(0.3), Some(0.2), None],
        };
        assert_eq!(grid.missing(), 2);
        assert_eq!(grid.best(), Some((1, 0, 0.2)));
    }

    #[test]
    fn fast_basin_wins_when_it_reaches_the_target() {
        let r = optimize(&TwoBasins { fast_floor: 5e-4 }, &small_opts(), &Sequential).unwrap();
        assert!((r.kappa_opt - 10.0).abs() < 1e-2, "{r:?}");
        assert!((r.tau_d_opt - 0.4).abs() < 1e-3);
        assert!(r.infidelity() <= 1e-3);
    }

    #[test]
    fn deepest_basin_wins_when_the_fast_one_misses_the_target() {
        let r = optimize(&TwoBasins { fast_floor: 5e-3 }, &small_opts(), &Sequential).unwrap();
        assert!((r.kappa_opt - SLOW_KAPPA).abs() < 1e-3, "{r:?}");
        assert!((r.tau_d_opt - 1.0).abs() < 1e-3);
    }

    #[test]
    fn refinement_never_worse_than_start() {
        let opts = small_opts();
        let cfg = IntegratorConfig::default();
        for start in [(0.5, 0.0), (3.0, 1.5), (20.0, 2.0)] {
            let r = refine_optimum(
                &TwoBasins { fast_floor: 5e-4 },
                start,
                opts.axes.kappa_bounds(),
                &opts.simplex,
                &cfg,
            )
            .unwrap();
            assert!(r.infidelity <= r.start_infidelity);
            assert!(r.tau_d >= 0.0);
            assert!(r.kappa >= 0.1 && r.kappa <= 20.0);
        }
    }

    #[test]
    fn refinement_rejects_out_of_bounds_start() {
        let opts = small_opts();
        let cfg = IntegratorConfig::default();
        assert!(refine_optimum(
            &TwoBasins { fast_floor: 5e-4 },
            (50.0, 0.0),
            opts.axes.kappa_bounds(),
            &opts.simplex,
            &cfg
        )
        .is_err());
        assert!(refine_optimum(
            &TwoBasins { fast_floor: 5e-4 },
            (1.0, -0.1),
            opts.axes.kappa_bounds(),
            &opts.simplex,
            &cfg
        )
        .is_err());
    }

    fn synthetic(g: f64, kappa: f64, tau_d: f64) -> OptimizationResult {
        OptimizationResult {
            g_ratio: g,
            kappa_opt: kappa,
            tau_d_opt: tau_d,
            f_opt: 1.0,
            t_cycle_opt: 12.0 / kappa + tau_d,
            scan: ScanGrid {
                kappa: Vec::new(),
                tau_d: Vec::new(),
                infidelity: Vec::new(),
            },
            refinement: Refinement {
                start: (kappa, tau_d),
                start_infidelity: 0.0,
                kappa,
                tau_d,
                infidelity: 0.0,
                converged: true,
                iterations: 0,
                evaluations: 0,
                trace: Vec::new(),
            },
            candidates: Vec::new(),
        }
    }

    #[test]
    fn trends_recover_exact_models() {
        let rs: Vec<_> = [0.2, 0.4, 0.6, 0.8]
            .iter()
            .map(|&g: &f64| synthetic(g, 2.0 * (3.0 * g).exp(), 0.1 * g.ln() + 0.5))
            .collect();
        let fits = fit_trends(&rs).unwrap();
        assert_eq!(fits.kappa.model, FitModel::Exponential);
        assert!((fits.kappa.coeffs[0] - 2.0).abs() < 1e-8);
        assert!((fits.kappa.coeffs[1] - 3.0).abs() < 1e-8);
        assert!((fits.tau_d.coeffs[0] - 0.1).abs() < 1e-8);
        assert!((fits.tau_d.coeffs[1] - 0.5).abs() < 1e-8);
        assert_eq!(fits.g_range, (0.2, 0.8));
    }

    #[test]
    fn trends_need_three_distinct_ratios() {
        let rs = [
            synthetic(0.2, 1.0, 0.1),
            synthetic(0.2, 1.1, 0.1),
            synthetic(0.4, 2.0, 0.2),
        ];
        assert!(fit_trends(&rs).is_err());
    }

    #[test]
    fn interpolation_flags_and_clamps() {
        let rs: Vec<_> = [0.2, 0.4, 0.6, 0.8]
            .iter()
            .map(|&g: &f64| synthetic(g, 2.0 * (3.0 * g).exp(), 0.1 * g.ln() + 0.2))
            .collect();
        let fits = fit_trends(&rs).unwrap();
        let at = interpolate_optimal(&fits, 0.4);
        assert!(!at.extrapolated && !at.clamped);
        assert!((at.kappa - 2.0 * (1.2f64).exp()).abs() < 1e-8);
        let below = interpolate_optimal(&fits, 0.05);
        assert!(below.extrapolated);
        assert!(below.clamped);
        assert_eq!(below.tau_d, 0.0);
    }
}
