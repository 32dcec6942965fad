//! Excitation-number-resolved basis, Hamiltonian and jump operators.
//!
//! The Hamiltonian is kept in the structured form
//! `H(t) = H_diag + 2π g_A(t) V_A + 2π g_B(t) V_B`, with `H_diag` dense on the
//! diagonal (angular units) and `V_A`, `V_B` as lists of real matrix elements.
//! Every element connects states of equal excitation number.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

use crate::error::Error;
use crate::math::sqrt;
use crate::model::{Levels, SystemSpec};
use crate::C64;

const TWO_PI: f64 = 2.0 * PI;

/// Excited level of a qubit (`|e⟩` or `|f⟩`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QubitLevel {
    E,
    F,
}

/// One product state of the truncated qubit-qubit-channel space. Qubits not
/// mentioned are in `|g⟩`; modes not mentioned are empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BasisState {
    Vacuum,
    ExcA(QubitLevel),
    ExcB(QubitLevel),
    Photon(usize),
    ExcAPhoton(usize),
    ExcBPhoton(usize),
    ExcAExcB,
    /// Photons in modes `k ≤ l` (`k == l` is a doubly occupied mode).
    TwoPhotons(usize, usize),
}

impl BasisState {
    /// Total excitation number, counting `|f⟩` as 2.
    pub fn excitations(&self) -> u32 {
        let occ = Occupation::of(*self);
        occ.a as u32 + occ.b as u32 + occ.n_photons as u32
    }

    /// Level of qubit A (0 = g, 1 = e, 2 = f).
    pub fn level_a(&self) -> u8 {
        Occupation::of(*self).a
    }

    /// Level of qubit B (0 = g, 1 = e, 2 = f).
    pub fn level_b(&self) -> u8 {
        Occupation::of(*self).b
    }

    /// Photon number in mode `k`.
    pub fn photons_in(&self, k: usize) -> u8 {
        Occupation::of(*self).count(k)
    }
}

/// Occupation-number view used to apply ladder operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Occupation {
    a: u8,
    b: u8,
    // sorted mode indices, one entry per photon
    photons: [usize; 2],
    n_photons: u8,
}

impl Occupation {
    fn of(s: BasisState) -> Self {
        use BasisState::*;
        let lvl = |l: QubitLevel| if l == QubitLevel::E { 1 } else { 2 };
        let (a, b, photons, n) = match s {
            Vacuum => (0, 0, [0, 0], 0),
            ExcA(l) => (lvl(l), 0, [0, 0], 0),
            ExcB(l) => (0, lvl(l), [0, 0], 0),
            Photon(k) => (0, 0, [k, 0], 1),
            ExcAPhoton(k) => (1, 0, [k, 0], 1),
            ExcBPhoton(k) => (0, 1, [k, 0], 1),
            ExcAExcB => (1, 1, [0, 0], 0),
            TwoPhotons(k, l) => (0, 0, [k, l], 2),
        };
        Occupation {
            a,
            b,
            photons,
            n_photons: n,
        }
    }

    fn state(&self) -> Option<BasisState> {
        use BasisState::*;
        let p = &self.photons[..self.n_photons as usize];
        let lvl = |x: u8| if x == 1 { QubitLevel::E } else { QubitLevel::F };
        Some(match (self.a, self.b, p) {
            (0, 0, []) => Vacuum,
            (a @ (1 | 2), 0, []) => ExcA(lvl(a)),
            (0, b @ (1 | 2), []) => ExcB(lvl(b)),
            (0, 0, [k]) => Photon(*k),
            (1, 0, [k]) => ExcAPhoton(*k),
            (0, 1, [k]) => ExcBPhoton(*k),
            (1, 1, []) => ExcAExcB,
            (0, 0, [k, l]) => TwoPhotons(*k.min(l), *k.max(l)),
            _ => return None,
        })
    }

    fn count(&self, k: usize) -> u8 {
        self.photons[..self.n_photons as usize]
            .iter()
            .filter(|&&m| m == k)
            .count() as u8
    }

    /// `c_k† |self⟩` as (amplitude, state); `None` beyond two photons.
    fn add_photon(mut self, k: usize) -> Option<(f64, Self)> {
        if self.n_photons >= 2 {
            return None;
        }
        let n = self.count(k);
        self.photons[self.n_photons as usize] = k;
        self.n_photons += 1;
        if self.n_photons == 2 && self.photons[0] > self.photons[1] {
            self.photons.swap(0, 1);
        }
        Some((sqrt(n as f64 + 1.0), self))
    }

    /// `c_k |self⟩`.
    fn remove_photon(mut self, k: usize) -> Option<(f64, Self)> {
        let n = self.count(k);
        if n == 0 {
            return None;
        }
        let pos = self.photons[..self.n_photons as usize]
            .iter()
            .position(|&m| m == k)?;
        if pos == 0 && self.n_photons == 2 {
            self.photons[0] = self.photons[1];
        }
        self.n_photons -= 1;
        self.photons[self.n_photons as usize] = 0;
        Some((sqrt(n as f64), self))
    }

    /// Qubit lowering `σ |l⟩ = √l |l-1⟩` (transmon ladder).
    fn lower_a(mut self) -> Option<(f64, Self)> {
        if self.a == 0 {
            return None;
        }
        let amp = sqrt(self.a as f64);
        self.a -= 1;
        Some((amp, self))
    }

    fn lower_b(mut self) -> Option<(f64, Self)> {
        if self.b == 0 {
            return None;
        }
        let amp = sqrt(self.b as f64);
        self.b -= 1;
        Some((amp, self))
    }
}

/// Set of excitation manifolds `{0, 1, 2}` to include in a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Manifolds(u8);

impl Manifolds {
    pub const VACUUM: Manifolds = Manifolds(0b001);
    pub const SINGLE: Manifolds = Manifolds(0b010);
    pub const DOUBLE: Manifolds = Manifolds(0b100);

    pub const fn union(self, other: Manifolds) -> Manifolds {
        Manifolds(self.0 | other.0)
    }

    pub fn contains(&self, m: u32) -> bool {
        m < 3 && self.0 & (1 << m) != 0
    }

    /// Manifolds from a list of excitation counts; `None` if any exceeds 2.
    pub fn from_counts(counts: &[u32]) -> Option<Manifolds> {
        counts.iter().try_fold(Manifolds(0), |acc, &m| {
            (m < 3).then_some(Manifolds(acc.0 | (1 << m)))
        })
    }
}

/// Ordered basis with a state → index map.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    states: Vec<BasisState>,
    index: BTreeMap<BasisState, usize>,
    n_modes: usize,
    manifolds: Manifolds,
}

impl Basis {
    /// Enumerate the basis. Order: vacuum; `e` of A, `e` of B, photons
    /// `0..N`; then `f` of A, `f` of B, A-e + photon `k`, B-e + photon `k`,
    /// both qubits excited, and photon pairs `(k, l)` with `k ≤ l` in
    /// lexicographic order. `f` states appear only for three-level qubits.
    pub fn build(spec: &SystemSpec, manifolds: Manifolds) -> Basis {
        use BasisState::*;
        let n = spec.n_modes();
        let mut states = Vec::new();
        if manifolds.contains(0) {
            states.push(Vacuum);
        }
        if manifolds.contains(1) {
            states.push(ExcA(QubitLevel::E));
            states.push(ExcB(QubitLevel::E));
            states.extend((0..n).map(Photon));
        }
        if manifolds.contains(2) {
            if spec.qubit_a.levels == Levels::Three {
                states.push(ExcA(QubitLevel::F));
            }
            if spec.qubit_b.levels == Levels::Three {
                states.push(ExcB(QubitLevel::F));
            }
            states.extend((0..n).map(ExcAPhoton));
            states.extend((0..n).map(ExcBPhoton));
            states.push(ExcAExcB);
            for k in 0..n {
                states.extend((k..n).map(|l| TwoPhotons(k, l)));
            }
        }
        let index = states.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Basis {
            states,
            index,
            n_modes: n,
            manifolds,
        }
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn manifolds(&self) -> Manifolds {
        self.manifolds
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn index_of(&self, s: BasisState) -> Option<usize> {
        self.index.get(&s).copied()
    }

    pub fn state(&self, i: usize) -> BasisState {
        self.states[i]
    }

    fn lookup(&self, occ: &Occupation) -> Option<usize> {
        occ.state().and_then(|s| self.index_of(s))
    }
}

/// A real matrix element `M[row][col] = value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Element {
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

/// The structured Hamiltonian `H_diag + 2π g_A V_A + 2π g_B V_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    dim: usize,
    /// Diagonal in angular units.
    pub diag: Vec<f64>,
    /// Upper-triangle elements (`row < col`) of the unscaled coupling `V_A`;
    /// the lower triangle is the mirror image.
    pub coupling_a: Vec<Element>,
    pub coupling_b: Vec<Element>,
}

impl HamiltonianMatrix {
    pub fn build(spec: &SystemSpec, basis: &Basis) -> Result<HamiltonianMatrix, Error> {
        if spec.n_modes() != basis.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: spec.n_modes(),
                found: basis.n_modes(),
            });
        }
        let n = basis.n_modes();
        let detunings = spec.channel.mode_detunings();
        let qa = &spec.qubit_a;
        let qb = &spec.qubit_b;
        let level_energy = |q: &crate::model::QubitSpec, l: u8| match l {
            0 => 0.0,
            1 => q.detuning,
            _ => 2.0 * q.detuning - q.anharmonicity.unwrap_or(0.0),
        };
        let diag = basis
            .states()
            .iter()
            .map(|s| {
                let occ = Occupation::of(*s);
                let photon_energy: f64 = occ.photons[..occ.n_photons as usize]
                    .iter()
                    .map(|&k| detunings[k])
                    .sum();
                TWO_PI * (level_energy(qa, occ.a) + level_energy(qb, occ.b) + photon_energy)
            })
            .collect();

        // Enumerate the lowering half `c_k† σ_q`; the raising half is its
        // transpose.
        let mut coupling_a = Vec::new();
        let mut coupling_b = Vec::new();
        for (src, s) in basis.states().iter().enumerate() {
            let occ = Occupation::of(*s);
            for k in 0..n {
                if let Some((amp, dst)) = occ
                    .lower_a()
                    .and_then(|(a1, o)| o.add_photon(k).map(|(a2, o)| (a1 * a2, o)))
                {
                    if let Some(dst) = basis.lookup(&dst) {
                        coupling_a.push(upper(dst, src, amp));
                    }
                }
                if let Some((amp, dst)) = occ
                    .lower_b()
                    .and_then(|(a1, o)| o.add_photon(k).map(|(a2, o)| (a1 * a2, o)))
                {
                    if let Some(dst) = basis.lookup(&dst) {
                        coupling_b.push(upper(dst, src, amp * spec.sign_b(k)));
                    }
                }
            }
        }
        coupling_a.sort_by_key(|e| (e.row, e.col));
        coupling_b.sort_by_key(|e| (e.row, e.col));
        Ok(HamiltonianMatrix {
            dim: basis.dim(),
            diag,
            coupling_a,
            coupling_b,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dense row-major `H` at the given couplings (angular units).
    pub fn dense(&self, g_a: f64, g_b: f64) -> Vec<C64> {
        let d = self.dim;
        let mut m = vec![C64::new(0.0, 0.0); d * d];
        for (i, &x) in self.diag.iter().enumerate() {
            m[i * d + i] = C64::new(x, 0.0);
        }
        for (elems, g) in [(&self.coupling_a, g_a), (&self.coupling_b, g_b)] {
            for e in elems {
                let v = TWO_PI * g * e.value;
                m[e.row * d + e.col] += v;
                m[e.col * d + e.row] += v;
            }
        }
        m
    }

    /// Unscaled coupling matrix element `⟨row| V |col⟩` (both triangles).
    pub fn coupling_element(&self, which: crate::model::Qubit, row: usize, col: usize) -> f64 {
        let elems = match which {
            crate::model::Qubit::A => &self.coupling_a,
            crate::model::Qubit::B => &self.coupling_b,
        };
        let (r, c) = (row.min(col), row.max(col));
        elems
            .iter()
            .filter(|e| e.row == r && e.col == c)
            .map(|e| e.value)
            .sum()
    }
}

fn upper(i: usize, j: usize, value: f64) -> Element {
    Element {
        row: i.min(j),
        col: i.max(j),
        value,
    }
}

/// Source of a jump operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpKind {
    Qubit(crate::model::Qubit),
    Mode(usize),
}

/// One Lindblad channel `rate · D[L]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jump {
    pub kind: JumpKind,
    /// Angular rate (`2π γ` or `2π κ_c`).
    pub rate: f64,
    /// Nonzero elements of `L`.
    pub elements: Vec<Element>,
}

/// All jump operators of a system; empty when the system is closed.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DissipatorSet {
    pub jumps: Vec<Jump>,
}

impl DissipatorSet {
    /// Qubit relaxation `σ_A`, `σ_B` and mode loss `c_k`, restricted to
    /// elements whose source and target both lie in the basis. Jumps with
    /// zero rate are omitted.
    pub fn build(spec: &SystemSpec, basis: &Basis) -> Result<DissipatorSet, Error> {
        use crate::model::Qubit;
        if spec.n_modes() != basis.n_modes() {
            return Err(Error::DimensionMismatch {
                expected: spec.n_modes(),
                found: basis.n_modes(),
            });
        }
        let any =
            spec.qubit_a.gamma > 0.0 || spec.qubit_b.gamma > 0.0 || spec.channel.kappa_c > 0.0;
        if !any {
            return Ok(DissipatorSet::default());
        }
        if basis.index_of(BasisState::Vacuum).is_none() {
            return Err(Error::MissingVacuum);
        }
        let collect = |op: &dyn Fn(Occupation) -> Option<(f64, Occupation)>| {
            basis
                .states()
                .iter()
                .enumerate()
                .filter_map(|(src, s)| {
                    let (amp, dst) = op(Occupation::of(*s))?;
                    let dst = basis.lookup(&dst)?;
                    Some(Element {
                        row: dst,
                        col: src,
                        value: amp,
                    })
                })
                .collect::<Vec<_>>()
        };
        let mut jumps = Vec::new();
        if spec.qubit_a.gamma > 0.0 {
            jumps.push(Jump {
                kind: JumpKind::Qubit(Qubit::A),
                rate: TWO_PI * spec.qubit_a.gamma,
                elements: collect(&|o| o.lower_a()),
            });
        }
        if spec.qubit_b.gamma > 0.0 {
            jumps.push(Jump {
                kind: JumpKind::Qubit(Qubit::B),
                rate: TWO_PI * spec.qubit_b.gamma,
                elements: collect(&|o| o.lower_b()),
            });
        }
        if spec.channel.kappa_c > 0.0 {
            for k in 0..basis.n_modes() {
                jumps.push(Jump {
                    kind: JumpKind::Mode(k),
                    rate: TWO_PI * spec.channel.kappa_c,
                    elements: collect(&|o| o.remove_photon(k)),
                });
            }
        }
        Ok(DissipatorSet { jumps })
    }

    pub fn is_empty(&self) -> bool {
        self.jumps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.jumps.len()
    }
}

/// Static Gaussian mode-frequency offsets with standard deviation
/// `δ ν_fsr / 3` (in units where `ν_fsr = 1`), deterministic in `seed`.
pub fn sample_disorder(delta: f64, n_modes: usize, seed: u64) -> Result<Vec<f64>, Error> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::InvalidArgument(
            "disorder strength must be finite and >= 0".into(),
        ));
    }
    if delta == 0.0 {
        return Ok(vec![0.0; n_modes]);
    }
    let normal = Normal::new(0.0, delta / 3.0)
        .map_err(|_| Error::InvalidArgument("invalid disorder distribution".into()))?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Ok((0..n_modes).map(|_| normal.sample(&mut rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Qubit;

    fn three_level(n: usize) -> SystemSpec {
        let mut spec = SystemSpec::with_modes_and_coupling(n, 0.5);
        for q in [&mut spec.qubit_a, &mut spec.qubit_b] {
            q.levels = Levels::Three;
            q.anharmonicity = Some(1.0);
        }
        spec
    }

    #[test]
    fn basis_dimensions() {
        let spec = SystemSpec::default();
        assert_eq!(Basis::build(&spec, Manifolds::SINGLE).dim(), 53);
        let b = Basis::build(&spec, Manifolds::SINGLE.union(Manifolds::VACUUM));
        assert_eq!(b.dim(), 54);
        assert_eq!(
            Basis::build(&three_level(51), Manifolds::DOUBLE).dim(),
            1431
        );
        assert_eq!(Basis::build(&three_level(3), Manifolds::DOUBLE).dim(), 15);
        // two-level qubits simply omit the f states
        let two = SystemSpec::with_modes_and_coupling(3, 0.5);
        assert_eq!(Basis::build(&two, Manifolds::DOUBLE).dim(), 13);
    }

    #[test]
    fn basis_order_and_index_bijection() {
        let spec = three_level(5);
        let all = Manifolds::VACUUM
            .union(Manifolds::SINGLE)
            .union(Manifolds::DOUBLE);
        let b = Basis::build(&spec, all);
        assert_eq!(b.state(0), BasisState::Vacuum);
        assert_eq!(b.state(1), BasisState::ExcA(QubitLevel::E));
        assert_eq!(b.state(2), BasisState::ExcB(QubitLevel::E));
        assert_eq!(b.state(3), BasisState::Photon(0));
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(*s), Some(i));
        }
        let mut exc: Vec<u32> = b.states().iter().map(|s| s.excitations()).collect();
        let sorted = {
            let mut e = exc.clone();
            e.sort();
            e
        };
        assert_eq!(exc, sorted);
        exc.dedup();
        assert_eq!(exc, vec![0, 1, 2]);
    }

    #[test]
    fn single_mode_jaynes_cummings_block() {
        // N=1 is below the validated minimum but the construction still
        // applies; it is the textbook JC block.
        let spec = SystemSpec::with_modes_and_coupling(1, 0.5);
        let b = Basis::build(&spec, Manifolds::SINGLE);
        let h = HamiltonianMatrix::build(&spec, &b).unwrap();
        let a = b.index_of(BasisState::ExcA(QubitLevel::E)).unwrap();
        let p = b.index_of(BasisState::Photon(0)).unwrap();
        assert_eq!(h.coupling_element(Qubit::A, a, p), 1.0);
        assert_eq!(h.coupling_element(Qubit::A, p, a), 1.0);
        assert_eq!(h.coupling_element(Qubit::A, a, a), 0.0);
        assert_eq!(h.coupling_a.len(), 1);
    }

    #[test]
    fn qubit_b_signs() {
        let mut spec = SystemSpec::with_modes_and_coupling(3, 0.5);
        spec.parity_origin = Some(1);
        let b = Basis::build(&spec, Manifolds::SINGLE);
        let h = HamiltonianMatrix::build(&spec, &b).unwrap();
        let bq = b.index_of(BasisState::ExcB(QubitLevel::E)).unwrap();
        let signs: Vec<f64> = (0..3)
            .map(|k| h.coupling_element(Qubit::B, bq, b.index_of(BasisState::Photon(k)).unwrap()))
            .collect();
        assert_eq!(signs, vec![-1.0, 1.0, -1.0]);
    }

    #[test]
    fn f_level_couples_with_sqrt2() {
        let spec = three_level(3);
        let b = Basis::build(&spec, Manifolds::DOUBLE);
        let h = HamiltonianMatrix::build(&spec, &b).unwrap();
        let f = b.index_of(BasisState::ExcA(QubitLevel::F)).unwrap();
        for k in 0..3 {
            let ep = b.index_of(BasisState::ExcAPhoton(k)).unwrap();
            assert!((h.coupling_element(Qubit::A, f, ep) - 2f64.sqrt()).abs() < 1e-15);
        }
        let f_diag = h.diag[f];
        assert!((f_diag - TWO_PI * (0.0 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn couplings_conserve_excitations() {
        let spec = three_level(4);
        let all = Manifolds::VACUUM
            .union(Manifolds::SINGLE)
            .union(Manifolds::DOUBLE);
        let b = Basis::build(&spec, all);
        let h = HamiltonianMatrix::build(&spec, &b).unwrap();
        for e in h.coupling_a.iter().chain(&h.coupling_b) {
            assert!(e.row < e.col);
            assert_eq!(b.state(e.row).excitations(), b.state(e.col).excitations());
        }
    }

    #[test]
    fn dissipator_counts_and_targets() {
        let mut spec = SystemSpec::with_modes_and_coupling(3, 0.5);
        let basis = Basis::build(&spec, Manifolds::VACUUM.union(Manifolds::SINGLE));
        assert!(DissipatorSet::build(&spec, &basis).unwrap().is_empty());
        spec.qubit_a.gamma = 0.01;
        spec.qubit_b.gamma = 0.01;
        spec.channel.kappa_c = 0.02;
        let d = DissipatorSet::build(&spec, &basis).unwrap();
        assert_eq!(d.len(), 5);
        let qubit_jumps = d
            .jumps
            .iter()
            .filter(|j| matches!(j.kind, JumpKind::Qubit(_)))
            .count();
        assert_eq!(qubit_jumps, 2);
        for j in &d.jumps {
            for e in &j.elements {
                assert_eq!(basis.state(e.row), BasisState::Vacuum);
            }
        }
        let no_vac = Basis::build(&spec, Manifolds::SINGLE);
        assert_eq!(
            DissipatorSet::build(&spec, &no_vac),
            Err(Error::MissingVacuum)
        );
    }

    #[test]
    fn every_jump_lowers_excitation_by_one() {
        let mut spec = three_level(3);
        spec.qubit_a.gamma = 0.01;
        spec.qubit_b.gamma = 0.01;
        spec.channel.kappa_c = 0.01;
        let all = Manifolds::VACUUM
            .union(Manifolds::SINGLE)
            .union(Manifolds::DOUBLE);
        let basis = Basis::build(&spec, all);
        let d = DissipatorSet::build(&spec, &basis).unwrap();
        let mut total = 0;
        for j in &d.jumps {
            for e in &j.elements {
                total += 1;
                assert_eq!(
                    basis.state(e.col).excitations(),
                    basis.state(e.row).excitations() + 1
                );
            }
        }
        // every state with at least one excitation has somewhere to decay
        let excited = basis
            .states()
            .iter()
            .filter(|s| s.excitations() > 0)
            .count();
        assert!(total >= excited);
    }

    #[test]
    fn disorder_zero_and_determinism() {
        assert_eq!(sample_disorder(0.0, 7, 1).unwrap(), vec![0.0; 7]);
        let a = sample_disorder(0.3, 11, 42).unwrap();
        let b = sample_disorder(0.3, 11, 42).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_disorder(0.3, 11, 43).unwrap());
        assert!(sample_disorder(-0.1, 3, 0).is_err());
    }

    #[test]
    fn disorder_standard_deviation() {
        let n = 100_000;
        let xs = sample_disorder(0.3, n, 7).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1) as f64;
        let std = var.sqrt();
        assert!((std - 0.1).abs() < 0.001, "std = {std}");
        assert!(mean.abs() < 0.003);
    }
}
