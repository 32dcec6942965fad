//! Time propagation of pure states, no-jump (non-Hermitian) states and
//! density matrices, with sampled populations.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::Error;
use crate::integrator::{integrate, IntegratorConfig, Stats};
use crate::math::sqrt;
use crate::model::{uniform_times, Couplings, SystemSpec};
use crate::statespace::{Basis, BasisState, DissipatorSet, Element, HamiltonianMatrix, Manifolds};
use crate::C64;

const TWO_PI: f64 = 2.0 * PI;

/// Amplitude vector over a [`Basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState(pub Vec<C64>);

impl QuantumState {
    /// The basis vector `|s⟩`.
    pub fn basis_state(basis: &Basis, s: BasisState) -> Result<Self, Error> {
        let i = basis
            .index_of(s)
            .ok_or_else(|| Error::InvalidArgument(alloc::format!("{s:?} is not in the basis")))?;
        let mut v = vec![C64::new(0.0, 0.0); basis.dim()];
        v[i] = C64::new(1.0, 0.0);
        Ok(QuantumState(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.0.iter().map(|a| a.norm_sqr()).sum())
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.0.iter().map(|a| a.norm_sqr()).collect()
    }
}

/// Row-major density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    pub data: Vec<C64>,
}

impl DensityMatrix {
    pub fn pure(psi: &QuantumState) -> Self {
        let d = psi.dim();
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] = psi.0[i] * psi.0[j].conj();
            }
        }
        DensityMatrix { dim: d, data }
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|`.
    pub fn mixture(terms: &[(f64, QuantumState)]) -> Result<Self, Error> {
        let d = terms
            .first()
            .map(|(_, p)| p.dim())
            .ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for (w, psi) in terms {
            if psi.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: psi.dim(),
                });
            }
            for i in 0..d {
                for j in 0..d {
                    data[i * d + j] += psi.0[i] * psi.0[j].conj() * *w;
                }
            }
        }
        Ok(DensityMatrix { dim: d, data })
    }

    pub fn from_raw(dim: usize, data: Vec<C64>) -> Result<Self, Error> {
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        Ok(DensityMatrix { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim + j]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest `|ρ - ρ†|` element.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i).re).collect()
    }

    fn symmetrized(dim: usize, raw: &[C64]) -> Self {
        let mut data = raw.to_vec();
        for i in 0..dim {
            for j in i..dim {
                let avg = (raw[i * dim + j] + raw[j * dim + i].conj()) * 0.5;
                data[i * dim + j] = avg;
                data[j * dim + i] = avg.conj();
            }
        }
        DensityMatrix { dim, data }
    }
}

/// Populations read off a state or density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Populations {
    /// Qubit A in `|e⟩` (all states with A excited to e).
    pub p_a: f64,
    /// Qubit B in `|e⟩`.
    pub p_b: f64,
    /// Mean photon number `⟨c_k† c_k⟩` per mode.
    pub modes: Vec<f64>,
    /// Qubit A in `|f⟩`.
    pub p_f_a: f64,
    pub p_vac: f64,
}

/// Precomputed index sets for reading populations.
#[derive(Debug, Clone)]
struct PopulationMap {
    a_e: Vec<usize>,
    b_e: Vec<usize>,
    a_f: Vec<usize>,
    vacuum: Option<usize>,
    // (state index, mode, photon count)
    photons: Vec<(usize, usize, f64)>,
    n_modes: usize,
}

impl PopulationMap {
    fn new(basis: &Basis) -> Self {
        let mut map = PopulationMap {
            a_e: Vec::new(),
            b_e: Vec::new(),
            a_f: Vec::new(),
            vacuum: basis.index_of(BasisState::Vacuum),
            photons: Vec::new(),
            n_modes: basis.n_modes(),
        };
        for (i, s) in basis.states().iter().enumerate() {
            match s.level_a() {
                1 => map.a_e.push(i),
                2 => map.a_f.push(i),
                _ => {}
            }
            if s.level_b() == 1 {
                map.b_e.push(i);
            }
            match *s {
                BasisState::Photon(k) | BasisState::ExcAPhoton(k) | BasisState::ExcBPhoton(k) => {
                    map.photons.push((i, k, 1.0))
                }
                BasisState::TwoPhotons(k, l) if k == l => map.photons.push((i, k, 2.0)),
                BasisState::TwoPhotons(k, l) => {
                    map.photons.push((i, k, 1.0));
                    map.photons.push((i, l, 1.0));
                }
                _ => {}
            }
        }
        map
    }

    fn read(&self, prob: &[f64], lost: f64) -> Populations {
        let sum = |ix: &[usize]| ix.iter().map(|&i| prob[i]).sum::<f64>();
        let mut modes = vec![0.0; self.n_modes];
        for &(i, k, n) in &self.photons {
            modes[k] += n * prob[i];
        }
        Populations {
            p_a: sum(&self.a_e),
            p_b: sum(&self.b_e),
            modes,
            p_f_a: sum(&self.a_f),
            p_vac: self.vacuum.map_or(0.0, |v| prob[v]) + lost,
        }
    }
}

/// Populations of a pure state.
pub fn populations(psi: &QuantumState, basis: &Basis) -> Result<Populations, Error> {
    check_dim(basis.dim(), psi.dim())?;
    Ok(PopulationMap::new(basis).read(&psi.probabilities(), 0.0))
}

/// Populations of a density matrix.
pub fn populations_mixed(rho: &DensityMatrix, basis: &Basis) -> Result<Populations, Error> {
    check_dim(basis.dim(), rho.dim())?;
    Ok(PopulationMap::new(basis).read(&rho.probabilities(), 0.0))
}

fn check_dim(expected: usize, found: usize) -> Result<(), Error> {
    if expected != found {
        Err(Error::DimensionMismatch { expected, found })
    } else {
        Ok(())
    }
}

/// State at the end of a propagation.
#[derive(Debug, Clone, PartialEq)]
pub enum FinalState {
    Pure(QuantumState),
    Mixed(DensityMatrix),
}

/// Sampled observables of one propagation.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub times: Vec<f64>,
    pub p_a: Vec<f64>,
    pub p_b: Vec<f64>,
    pub p_f_a: Vec<f64>,
    pub p_vac: Vec<f64>,
    /// `mode_pops[sample][k]`.
    pub mode_pops: Vec<Vec<f64>>,
    pub final_state: FinalState,
    /// `|‖ψ‖ - 1|` (pure, and the decayed weight for no-jump runs) or
    /// `|tr ρ - 1|` at the final time.
    pub norm_drift: f64,
    /// Largest population of the two outermost modes over all samples.
    pub edge_pop_max: f64,
    pub stats: Stats,
}

impl SimResult {
    fn with_capacity(n: usize, final_state: FinalState) -> Self {
        SimResult {
            times: Vec::with_capacity(n),
            p_a: Vec::with_capacity(n),
            p_b: Vec::with_capacity(n),
            p_f_a: Vec::with_capacity(n),
            p_vac: Vec::with_capacity(n),
            mode_pops: Vec::with_capacity(n),
            final_state,
            norm_drift: 0.0,
            edge_pop_max: 0.0,
            stats: Stats::default(),
        }
    }

    fn push(&mut self, t: f64, p: Populations) {
        self.times.push(t);
        self.p_a.push(p.p_a);
        self.p_b.push(p.p_b);
        self.p_f_a.push(p.p_f_a);
        self.p_vac.push(p.p_vac);
        if let (Some(first), Some(last)) = (p.modes.first(), p.modes.last()) {
            self.edge_pop_max = self.edge_pop_max.max(*first).max(*last);
        }
        self.mode_pops.push(p.modes);
    }

    pub fn final_p_a(&self) -> f64 {
        self.p_a.last().copied().unwrap_or(0.0)
    }

    pub fn final_p_b(&self) -> f64 {
        self.p_b.last().copied().unwrap_or(0.0)
    }

    pub fn final_mode_total(&self) -> f64 {
        self.mode_pops.last().map_or(0.0, |m| m.iter().sum())
    }
}

/// Basis, Hamiltonian and dissipators of one system, built once and shared.
#[derive(Debug, Clone)]
pub struct System {
    pub basis: Basis,
    pub hamiltonian: HamiltonianMatrix,
    pub dissipators: DissipatorSet,
    pops: PopulationMap,
}

impl System {
    /// Build the system on the given manifolds. The vacuum is required (and
    /// checked) only when the `SystemSpec` has nonzero loss rates.
    pub fn new(spec: &SystemSpec, manifolds: Manifolds) -> Result<System, Error> {
        let violations = spec.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidSpec(violations));
        }
        Self::new_unchecked(spec, manifolds)
    }

    /// As [`System::new`] but without validating the `SystemSpec` (used for
    /// deliberately degenerate toy systems such as a single mode).
    pub fn new_unchecked(spec: &SystemSpec, manifolds: Manifolds) -> Result<System, Error> {
        let basis = Basis::build(spec, manifolds);
        let hamiltonian = HamiltonianMatrix::build(spec, &basis)?;
        let dissipators = DissipatorSet::build(spec, &basis)?;
        let pops = PopulationMap::new(&basis);
        Ok(System {
            basis,
            hamiltonian,
            dissipators,
            pops,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn state(&self, s: BasisState) -> Result<QuantumState, Error> {
        QuantumState::basis_state(&self.basis, s)
    }

    /// Solve `i dψ/dt = H(t) ψ` on `[0, t_final]`.
    pub fn propagate_pure<C: Couplings + ?Sized>(
        &self,
        couplings: &C,
        psi0: &QuantumState,
        t_final: f64,
        cfg: &IntegratorConfig,
    ) -> Result<SimResult, Error> {
        let gen = Generator::closed(&self.hamiltonian);
        self.propagate_vector(&gen, couplings, psi0, t_final, cfg, false)
    }

    /// Evolve under `H_eff = H - (i/2) Σ rate L†L`. Exact for the excited
    /// populations when every jump lands in the vacuum, which is checked.
    /// The decayed weight is reported as vacuum population.
    pub fn propagate_nonhermitian<C: Couplings + ?Sized>(
        &self,
        couplings: &C,
        psi0: &QuantumState,
        t_final: f64,
        cfg: &IntegratorConfig,
    ) -> Result<SimResult, Error> {
        let vac = self.basis.index_of(BasisState::Vacuum);
        for (j, jump) in self.dissipators.jumps.iter().enumerate() {
            if jump.elements.iter().any(|e| Some(e.row) != vac) {
                return Err(Error::NonVacuumJump { jump: j });
            }
        }
        let gen = Generator::damped(&self.hamiltonian, &self.dissipators);
        self.propagate_vector(&gen, couplings, psi0, t_final, cfg, true)
    }

    fn propagate_vector<C: Couplings + ?Sized>(
        &self,
        gen: &Generator<'_>,
        couplings: &C,
        psi0: &QuantumState,
        t_final: f64,
        cfg: &IntegratorConfig,
        lossy: bool,
    ) -> Result<SimResult, Error> {
        check_dim(self.dim(), psi0.dim())?;
        if (psi0.norm() - 1.0).abs() > 1e-8 {
            return Err(Error::InvalidArgument(
                "initial state must be normalized".into(),
            ));
        }
        let times = uniform_times(0.0, t_final, cfg.samples);
        let mut result = SimResult::with_capacity(times.len(), FinalState::Pure(psi0.clone()));
        let mut prob = vec![0.0; self.dim()];
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
            let (ga, gb) = couplings.couplings(t);
            gen.apply(ga, gb, y, dy);
        };
        let (y, stats) = integrate(
            rhs,
            &psi0.0,
            0.0,
            t_final,
            &couplings.breakpoints(),
            &times,
            cfg,
            |_, t, y| {
                let mut norm2 = 0.0;
                for (p, a) in prob.iter_mut().zip(y) {
                    *p = a.norm_sqr();
                    norm2 += *p;
                }
                let lost = if lossy { (1.0 - norm2).max(0.0) } else { 0.0 };
                result.push(t, self.pops.read(&prob, lost));
            },
        )?;
        let psi = QuantumState(y);
        result.norm_drift = (psi.norm() - 1.0).abs();
        result.final_state = FinalState::Pure(psi);
        result.stats = stats;
        Ok(result)
    }

    /// Integrate the Lindblad master equation
    /// `dρ/dt = -i[H(t), ρ] + Σ rate (L ρ L† - ½{L†L, ρ})`.
    pub fn propagate_lindblad<C: Couplings + ?Sized>(
        &self,
        couplings: &C,
        rho0: &DensityMatrix,
        t_final: f64,
        cfg: &IntegratorConfig,
    ) -> Result<SimResult, Error> {
        let d = self.dim();
        check_dim(d, rho0.dim())?;
        if !self.dissipators.is_empty() && self.basis.index_of(BasisState::Vacuum).is_none() {
            return Err(Error::MissingVacuum);
        }
        let lind = Lindbladian::new(&self.hamiltonian, &self.dissipators);
        let times = uniform_times(0.0, t_final, cfg.samples);
        let mut result = SimResult::with_capacity(times.len(), FinalState::Mixed(rho0.clone()));
        let rhs = |t: f64, y: &[C64], dy: &mut [C64]| {
            let (ga, gb) = couplings.couplings(t);
            lind.apply(ga, gb, y, dy);
        };
        let (y, stats) = integrate(
            rhs,
            &rho0.data,
            0.0,
            t_final,
            &couplings.breakpoints(),
            &times,
            cfg,
            |_, t, y| {
                let rho = DensityMatrix::symmetrized(d, y);
                result.push(t, self.pops.read(&rho.probabilities(), 0.0));
            },
        )?;
        let rho = DensityMatrix::symmetrized(d, &y);
        result.norm_drift = (rho.trace().re - 1.0).abs();
        result.final_state = FinalState::Mixed(rho);
        result.stats = stats;
        Ok(result)
    }

    /// Populations of a pure state in this system's basis.
    pub fn populations(&self, psi: &QuantumState) -> Result<Populations, Error> {
        check_dim(self.dim(), psi.dim())?;
        Ok(self.pops.read(&psi.probabilities(), 0.0))
    }
}

/// `y ↦ -i H_eff y` for the structured Hamiltonian.
struct Generator<'a> {
    h: &'a HamiltonianMatrix,
    // ½ Σ rate (L†L)_ii; off-diagonal parts in `damping_offdiag`
    damping: Vec<f64>,
    damping_offdiag: Vec<Element>,
}

impl<'a> Generator<'a> {
    fn closed(h: &'a HamiltonianMatrix) -> Self {
        Generator {
            h,
            damping: Vec::new(),
            damping_offdiag: Vec::new(),
        }
    }

    fn damped(h: &'a HamiltonianMatrix, diss: &DissipatorSet) -> Self {
        let mut damping = vec![0.0; h.dim()];
        let mut damping_offdiag = Vec::new();
        for (i, j, v) in decay_operator(diss) {
            if i == j {
                damping[i] += 0.5 * v;
            } else {
                damping_offdiag.push(Element {
                    row: i,
                    col: j,
                    value: 0.5 * v,
                });
            }
        }
        if damping.iter().all(|&x| x == 0.0) && damping_offdiag.is_empty() {
            damping.clear();
        }
        Generator {
            h,
            damping,
            damping_offdiag,
        }
    }

    #[inline]
    fn apply(&self, g_a: f64, g_b: f64, y: &[C64], out: &mut [C64]) {
        // -i d y = (d y.im, -d y.re)
        for ((o, &d), a) in out.iter_mut().zip(&self.h.diag).zip(y) {
            *o = C64::new(d * a.im, -d * a.re);
        }
        for (elems, g) in [(&self.h.coupling_a, g_a), (&self.h.coupling_b, g_b)] {
            if g == 0.0 {
                continue;
            }
            let c = TWO_PI * g;
            for e in elems.iter() {
                let v = c * e.value;
                let (yr, yc) = (y[e.row], y[e.col]);
                out[e.row] += C64::new(v * yc.im, -v * yc.re);
                out[e.col] += C64::new(v * yr.im, -v * yr.re);
            }
        }
        if !self.damping.is_empty() {
            for ((o, &k), a) in out.iter_mut().zip(&self.damping).zip(y) {
                *o -= *a * k;
            }
        }
        for e in &self.damping_offdiag {
            out[e.row] -= y[e.col] * e.value;
        }
    }
}

/// Entries `(i, j, value)` of `Σ rate L†L`, merged.
fn decay_operator(diss: &DissipatorSet) -> Vec<(usize, usize, f64)> {
    let mut acc: alloc::collections::BTreeMap<(usize, usize), f64> = Default::default();
    for jump in &diss.jumps {
        for a in &jump.elements {
            for b in &jump.elements {
                if a.row == b.row {
                    *acc.entry((a.col, b.col)).or_insert(0.0) += jump.rate * a.value * b.value;
                }
            }
        }
    }
    acc.into_iter().map(|((i, j), v)| (i, j, v)).collect()
}

/// Superoperator of the master equation acting on a row-major `ρ`.
struct Lindbladian<'a> {
    h: &'a HamiltonianMatrix,
    // (rate, elements) per jump
    jumps: Vec<(f64, &'a [Element])>,
    // ½ Σ rate L†L
    half_decay: Vec<(usize, usize, f64)>,
}

impl<'a> Lindbladian<'a> {
    fn new(h: &'a HamiltonianMatrix, diss: &'a DissipatorSet) -> Self {
        Lindbladian {
            h,
            jumps: diss
                .jumps
                .iter()
                .map(|j| (j.rate, j.elements.as_slice()))
                .collect(),
            half_decay: decay_operator(diss)
                .into_iter()
                .map(|(i, j, v)| (i, j, 0.5 * v))
                .collect(),
        }
    }

    fn apply(&self, g_a: f64, g_b: f64, rho: &[C64], out: &mut [C64]) {
        let d = self.h.dim();
        let minus_i = C64::new(0.0, -1.0);
        // -i (D ρ - ρ D)
        for i in 0..d {
            let di = self.h.diag[i];
            for j in 0..d {
                out[i * d + j] = minus_i * rho[i * d + j] * (di - self.h.diag[j]);
            }
        }
        for (elems, g) in [(&self.h.coupling_a, g_a), (&self.h.coupling_b, g_b)] {
            if g == 0.0 {
                continue;
            }
            let c = TWO_PI * g;
            for e in elems.iter() {
                let v = minus_i * (c * e.value);
                let (r, cl) = (e.row, e.col);
                for j in 0..d {
                    // H ρ
                    out[r * d + j] += v * rho[cl * d + j];
                    out[cl * d + j] += v * rho[r * d + j];
                    // - ρ H
                    out[j * d + cl] -= v * rho[j * d + r];
                    out[j * d + r] -= v * rho[j * d + cl];
                }
            }
        }
        for &(rate, elems) in &self.jumps {
            for a in elems {
                for b in elems {
                    out[a.row * d + b.row] += rho[a.col * d + b.col] * (rate * a.value * b.value);
                }
            }
        }
        for &(i, k, v) in &self.half_decay {
            for j in 0..d {
                // -½ K ρ - ½ ρ K
                out[i * d + j] -= rho[k * d + j] * v;
                out[j * d + k] -= rho[j * d + i] * v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ConstantCoupling, Levels};
    use crate::statespace::QubitLevel;

    fn single_mode() -> (SystemSpec, System) {
        let spec = SystemSpec::with_modes_and_coupling(1, 0.5);
        let sys = System::new_unchecked(&spec, Manifolds::SINGLE).unwrap();
        (spec, sys)
    }

    #[test]
    fn rabi_period_is_one_over_two_g() {
        let (_, sys) = single_mode();
        let g = 0.37;
        let psi0 = sys.state(BasisState::ExcA(QubitLevel::E)).unwrap();
        let cfg = IntegratorConfig::default().with_samples(301);
        let r = sys
            .propagate_pure(&ConstantCoupling { g_a: g, g_b: 0.0 }, &psi0, 3.0, &cfg)
            .unwrap();
        for (t, p) in r.times.iter().zip(&r.p_a) {
            let exact = (2.0 * PI * g * t).cos().powi(2);
            assert!((p - exact).abs() < 1e-6, "t={t}: {p} vs {exact}");
        }
    }

    #[test]
    fn decoupled_populations_constant() {
        let spec = SystemSpec::with_modes_and_coupling(5, 0.5);
        let sys = System::new(&spec, Manifolds::SINGLE).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); sys.dim()];
        psi[0] = C64::new(0.6, 0.0);
        psi[4] = C64::new(0.0, 0.8);
        let psi0 = QuantumState(psi);
        let cfg = IntegratorConfig::default().with_samples(11);
        let r = sys
            .propagate_pure(&ConstantCoupling { g_a: 0.0, g_b: 0.0 }, &psi0, 2.0, &cfg)
            .unwrap();
        for i in 0..r.times.len() {
            assert!((r.p_a[i] - 0.36).abs() < 1e-12);
            assert!((r.mode_pops[i][2] - 0.64).abs() < 1e-12);
        }
    }

    #[test]
    fn populations_examples() {
        let mut spec = SystemSpec::with_modes_and_coupling(5, 0.5);
        spec.qubit_a.levels = Levels::Three;
        spec.qubit_a.anharmonicity = Some(1.0);
        let all = Manifolds::VACUUM
            .union(Manifolds::SINGLE)
            .union(Manifolds::DOUBLE);
        let basis = Basis::build(&spec, all);
        let a = QuantumState::basis_state(&basis, BasisState::ExcA(QubitLevel::E)).unwrap();
        let p = populations(&a, &basis).unwrap();
        assert_eq!((p.p_a, p.p_b, p.p_f_a, p.p_vac), (1.0, 0.0, 0.0, 0.0));
        assert!(p.modes.iter().all(|&m| m == 0.0));

        let mut v = vec![C64::new(0.0, 0.0); basis.dim()];
        let s = 0.5f64.sqrt();
        v[basis.index_of(BasisState::ExcA(QubitLevel::E)).unwrap()] = C64::new(s, 0.0);
        v[basis.index_of(BasisState::Photon(2)).unwrap()] = C64::new(s, 0.0);
        let p = populations(&QuantumState(v), &basis).unwrap();
        assert!((p.p_a - 0.5).abs() < 1e-15 && (p.modes[2] - 0.5).abs() < 1e-15);

        let both = QuantumState::basis_state(&basis, BasisState::ExcAExcB).unwrap();
        let p = populations(&both, &basis).unwrap();
        assert_eq!((p.p_a, p.p_b), (1.0, 1.0));

        let two = QuantumState::basis_state(&basis, BasisState::TwoPhotons(1, 1)).unwrap();
        assert_eq!(populations(&two, &basis).unwrap().modes[1], 2.0);
    }

    #[test]
    fn nonhermitian_free_decay() {
        let mut spec = SystemSpec::with_modes_and_coupling(3, 0.5);
        spec.qubit_a.gamma = 1e-2;
        let sys = System::new(&spec, Manifolds::VACUUM.union(Manifolds::SINGLE)).unwrap();
        let psi0 = sys.state(BasisState::ExcA(QubitLevel::E)).unwrap();
        let cfg = IntegratorConfig::default().with_samples(2);
        let r = sys
            .propagate_nonhermitian(&ConstantCoupling { g_a: 0.0, g_b: 0.0 }, &psi0, 10.0, &cfg)
            .unwrap();
        // exp(-0.2 π) to 30 digits (mpmath)
        let exact = 0.533_488_091_091_103_2;
        assert!((r.final_p_a() - exact).abs() < 1e-9, "{}", r.final_p_a());
        assert!((r.p_vac[1] - (1.0 - exact)).abs() < 1e-9);
    }

    #[test]
    fn nonhermitian_rejects_non_vacuum_jumps() {
        let mut spec = SystemSpec::with_modes_and_coupling(3, 0.5);
        spec.channel.kappa_c = 0.1;
        let all = Manifolds::VACUUM
            .union(Manifolds::SINGLE)
            .union(Manifolds::DOUBLE);
        let sys = System::new(&spec, all).unwrap();
        let psi0 = sys.state(BasisState::ExcA(QubitLevel::E)).unwrap();
        let r = sys.propagate_nonhermitian(
            &ConstantCoupling { g_a: 0.1, g_b: 0.0 },
            &psi0,
            1.0,
            &IntegratorConfig::default(),
        );
        assert!(matches!(r, Err(Error::NonVacuumJump { .. })));
    }

    #[test]
    fn lindblad_mode_decay() {
        let mut spec = SystemSpec::with_modes_and_coupling(3, 0.5);
        spec.channel.kappa_c = 0.1;
        let sys = System::new(&spec, Manifolds::VACUUM.union(Manifolds::SINGLE)).unwrap();
        let psi0 = sys.state(BasisState::Photon(1)).unwrap();
        let rho0 = DensityMatrix::pure(&psi0);
        let cfg = IntegratorConfig::default().with_samples(5);
        let r = sys
            .propagate_lindblad(&ConstantCoupling { g_a: 0.0, g_b: 0.0 }, &rho0, 1.0, &cfg)
            .unwrap();
        let exact = 0.533_488_091_091_103_2;
        assert!((r.mode_pops.last().unwrap()[1] - exact).abs() < 1e-9);
        assert!(r.norm_drift < 1e-12);
    }

    #[test]
    fn lindblad_without_loss_matches_pure() {
        let spec = SystemSpec::with_modes_and_coupling(5, 0.6);
        let sys = System::new(&spec, Manifolds::VACUUM.union(Manifolds::SINGLE)).unwrap();
        let psi0 = sys.state(BasisState::ExcA(QubitLevel::E)).unwrap();
        let c = ConstantCoupling { g_a: 0.6, g_b: 0.3 };
        let cfg = IntegratorConfig::default().with_samples(21);
        let pure = sys.propagate_pure(&c, &psi0, 2.0, &cfg).unwrap();
        let mixed = sys
            .propagate_lindblad(&c, &DensityMatrix::pure(&psi0), 2.0, &cfg)
            .unwrap();
        let (FinalState::Pure(psi), FinalState::Mixed(rho)) =
            (&pure.final_state, &mixed.final_state)
        else {
            panic!("unexpected final state kinds");
        };
        let outer = DensityMatrix::pure(psi);
        let worst = outer
            .data
            .iter()
            .zip(&rho.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-8, "{worst}");
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let spec = SystemSpec::with_modes_and_coupling(3, 0.5);
        let sys = System::new(&spec, Manifolds::SINGLE).unwrap();
        let psi = QuantumState(vec![C64::new(1.0, 0.0); 2]);
        let r = sys.propagate_pure(
            &ConstantCoupling { g_a: 0.1, g_b: 0.1 },
            &psi,
            1.0,
            &IntegratorConfig::default(),
        );
        assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
    }
}
