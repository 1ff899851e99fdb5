//! Measurement-based braiding of Majorana pairs.
//!
//! A braid of anyons 3 and 4 is realized with ancillas 1 and 2 by the fixed
//! cycle `n₁₃, n₁₄, n₁₂` followed by a logical Pauli chosen from the
//! outcomes, or by the forced variant that repeats each step until it reads
//! vacuum. The same protocol runs on three [`Backend`]s: exact anyon
//! amplitudes, a Majorana Fock space and a stabilizer lattice with twists.
//!
//! Anyon labels are 1-based throughout. `n_ab` is the fermion number of
//! `iγ_aγ_b` (`a < b`), whose eigenvalue is `2n − 1`.

use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::anyon::{AnyonError, Pairing, TopoState};
use crate::dense::{fidelity_up_to_phase, FockSpace, StateVector};
use crate::pauli::{PauliString, Phase};
use crate::sim::{CodeState, SimError};
use crate::SeedStream;

const EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum MbbError {
    #[error(transparent)]
    Anyon(#[from] AnyonError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("anyons ({0},{1}) are not in the vacuum channel")]
    NotVacuum(usize, usize),
    #[error("anyon {0} out of range")]
    AnyonIndex(usize),
    #[error("outcome {0} has zero probability")]
    ZeroProbability(u8),
    #[error("forced measurement exceeded {0} attempts")]
    MaxAttempts(usize),
    #[error("backend {0} has no state access")]
    NoState(&'static str),
    #[error("shots must be positive")]
    NoShots,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendTag {
    Anyon,
    Fock,
    Lattice,
}

/// Operations shared by every backend.
pub trait Backend: Send {
    fn tag(&self) -> BackendTag;

    fn n_anyons(&self) -> usize;

    /// Projective measurement of `n_ab`; `forced` post-selects an outcome.
    fn measure_pair(&mut self, a: usize, b: usize, forced: Option<u8>) -> Result<u8, MbbError>;

    /// `Some(n)` when `n_ab` is definite.
    fn pair_value(&self, a: usize, b: usize) -> Result<Option<u8>, MbbError>;

    /// Apply `iγ_aγ_b`.
    fn apply_bilinear(&mut self, a: usize, b: usize) -> Result<(), MbbError>;

    fn measurement_count(&self) -> usize;

    /// Expectations of the even Majorana monomials, see [`monomial_masks`].
    fn monomials(&self) -> Result<Vec<f64>, MbbError>;

    /// The state in the Fock space of [`Self::n_anyons`] modes.
    fn fock_state(&self) -> Result<StateVector, MbbError> {
        Err(MbbError::NoState(tag_name(self.tag())))
    }
}

fn tag_name(t: BackendTag) -> &'static str {
    match t {
        BackendTag::Anyon => "anyon",
        BackendTag::Fock => "fock",
        BackendTag::Lattice => "lattice",
    }
}

fn check_pair(n: usize, a: usize, b: usize) -> Result<(), MbbError> {
    for x in [a, b] {
        if x == 0 || x > n {
            return Err(MbbError::AnyonIndex(x));
        }
    }
    if a == b {
        return Err(MbbError::AnyonIndex(a));
    }
    Ok(())
}

/// Subsets of `1..=n` with even size, as bitmasks in increasing order.
pub fn monomial_masks(n: usize) -> Vec<u32> {
    (0..1u32 << n).filter(|m| m.count_ones() % 2 == 0).collect()
}

/// `i^{k/2} γ_{s₁}⋯γ_{s_k}` (increasing `s`), Hermitian.
fn monomial(gammas: &[PauliString], mask: u32) -> PauliString {
    let mut p = PauliString::identity();
    for (k, g) in gammas.iter().enumerate() {
        if mask >> k & 1 == 1 {
            p = p.multiply(g);
        }
    }
    let ph = p.phase() * Phase::from_exponent(mask.count_ones() as i64 / 2);
    p.with_phase(ph)
}

fn fock_monomials(fs: &FockSpace, v: &StateVector) -> Vec<f64> {
    let gammas: Vec<PauliString> = (1..=fs.modes()).map(|k| fs.majorana(k)).collect();
    monomial_masks(fs.modes()).into_iter().map(|m| v.expectation(&monomial(&gammas, m)).unwrap()).collect()
}

/// Exact pair-basis amplitudes.
#[derive(Clone, Debug)]
pub struct AnyonBackend {
    state: TopoState,
    rng: SeedStream,
    measurements: usize,
}

impl AnyonBackend {
    pub fn new(state: TopoState, rng: SeedStream) -> Self {
        AnyonBackend { state, rng, measurements: 0 }
    }

    /// Every pair of `pairing` in the vacuum.
    pub fn vacuum(pairing: Pairing, rng: SeedStream) -> Result<Self, MbbError> {
        let probe = TopoState::basis(pairing.clone(), 0)?;
        let mut labels = 0;
        for (k, &(a, b)) in pairing.pairs().iter().enumerate() {
            labels |= (probe.fock_flip(a, b)? as usize) << k;
        }
        Ok(Self::new(TopoState::basis(pairing, labels)?, rng))
    }

    pub fn state(&self) -> &TopoState {
        &self.state
    }

    fn in_pair_basis(&self, a: usize, b: usize) -> Result<TopoState, MbbError> {
        let p = self.state.pairing().with_pair(a, b)?;
        Ok(self.state.transform(&p)?)
    }
}

impl Backend for AnyonBackend {
    fn tag(&self) -> BackendTag {
        BackendTag::Anyon
    }

    fn n_anyons(&self) -> usize {
        self.state.n_anyons()
    }

    fn measure_pair(&mut self, a: usize, b: usize, forced: Option<u8>) -> Result<u8, MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        let t = self.in_pair_basis(a, b)?;
        let flip = t.fock_flip(a, b)? as u8;
        let (label, post) = t.measure_pair(a, b, &mut self.rng, forced.map(|n| n ^ flip)).map_err(|e| match e {
            AnyonError::ZeroProbability(l) => MbbError::ZeroProbability(l ^ flip),
            e => e.into(),
        })?;
        self.measurements += 1;
        self.state = post;
        Ok(label ^ flip)
    }

    fn pair_value(&self, a: usize, b: usize) -> Result<Option<u8>, MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        let t = self.in_pair_basis(a, b)?;
        let k = t.pairing().index_of(a, b).expect("pair present");
        let p1: f64 = t.amplitudes().iter().enumerate().filter(|(l, _)| l >> k & 1 == 1).map(|(_, x)| x.norm_sqr()).sum();
        let flip = t.fock_flip(a, b)? as u8;
        Ok(if p1 < EPS {
            Some(flip)
        } else if p1 > 1.0 - EPS {
            Some(1 ^ flip)
        } else {
            None
        })
    }

    fn apply_bilinear(&mut self, a: usize, b: usize) -> Result<(), MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        let home = self.state.pairing().clone();
        let t = self.in_pair_basis(a, b)?;
        let k = t.pairing().index_of(a, b).expect("pair present");
        let flip = t.fock_flip(a, b)? as usize;
        let sign = if a < b { 1.0 } else { -1.0 };
        let amps = t
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(l, x)| x * (sign * (2.0 * ((l >> k & 1) ^ flip) as f64 - 1.0)))
            .collect();
        self.state = TopoState::new(t.pairing().clone(), amps)?.transform(&home)?;
        Ok(())
    }

    fn measurement_count(&self) -> usize {
        self.measurements
    }

    fn monomials(&self) -> Result<Vec<f64>, MbbError> {
        let fs = FockSpace::new(self.n_anyons()).expect("4 or 6 modes");
        Ok(fock_monomials(&fs, &self.state.to_fock()))
    }

    fn fock_state(&self) -> Result<StateVector, MbbError> {
        Ok(self.state.to_fock())
    }
}

/// State vector of `n` Majorana modes.
#[derive(Clone, Debug)]
pub struct FockBackend {
    fs: FockSpace,
    v: StateVector,
    rng: SeedStream,
    measurements: usize,
}

impl FockBackend {
    pub fn new(modes: usize, v: StateVector, rng: SeedStream) -> Result<Self, MbbError> {
        let fs = FockSpace::new(modes).map_err(|_| MbbError::AnyonIndex(modes))?;
        Ok(FockBackend { fs, v, rng, measurements: 0 })
    }

    /// Vacuum of every pair in `pairs`.
    pub fn vacuum(modes: usize, pairs: &[(usize, usize)], rng: SeedStream) -> Result<Self, MbbError> {
        let fs = FockSpace::new(modes).map_err(|_| MbbError::AnyonIndex(modes))?;
        let mut v = fs.vacuum();
        for &(a, b) in pairs {
            check_pair(modes, a, b)?;
            let p = fs.project_pair(&v, a.min(b), a.max(b), 0);
            if p.norm() < 1e-6 {
                v = fs.project_pair(&v.apply(&fs.majorana(a)).unwrap(), a.min(b), a.max(b), 0);
            } else {
                v = p;
            }
            v = v.scaled(C64::new(1.0 / v.norm(), 0.0));
        }
        Self::new(modes, v, rng)
    }

    pub fn space(&self) -> FockSpace {
        self.fs
    }
}

impl Backend for FockBackend {
    fn tag(&self) -> BackendTag {
        BackendTag::Fock
    }

    fn n_anyons(&self) -> usize {
        self.fs.modes()
    }

    fn measure_pair(&mut self, a: usize, b: usize, forced: Option<u8>) -> Result<u8, MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        let (lo, hi) = (a.min(b), a.max(b));
        let one = self.fs.project_pair(&self.v, lo, hi, 1);
        let p1 = one.norm().powi(2);
        let n = forced.unwrap_or_else(|| (self.rng.random::<f64>() < p1) as u8);
        let post = if n == 1 { one } else { self.fs.project_pair(&self.v, lo, hi, 0) };
        let norm = post.norm();
        if norm < 1e-9 {
            return Err(MbbError::ZeroProbability(n));
        }
        self.measurements += 1;
        self.v = post.scaled(C64::new(1.0 / norm, 0.0));
        Ok(n)
    }

    fn pair_value(&self, a: usize, b: usize) -> Result<Option<u8>, MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        let e = self.v.expectation(&self.fs.bilinear(a.min(b), a.max(b))).unwrap();
        Ok(if e > 1.0 - 1e-9 {
            Some(1)
        } else if e < -1.0 + 1e-9 {
            Some(0)
        } else {
            None
        })
    }

    fn apply_bilinear(&mut self, a: usize, b: usize) -> Result<(), MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        self.v = self.v.apply(&self.fs.bilinear(a, b)).unwrap();
        Ok(())
    }

    fn measurement_count(&self) -> usize {
        self.measurements
    }

    fn monomials(&self) -> Result<Vec<f64>, MbbError> {
        Ok(fock_monomials(&self.fs, &self.v))
    }

    fn fock_state(&self) -> Result<StateVector, MbbError> {
        Ok(self.v.clone())
    }
}

/// How the lattice backend reads out a pair parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Readout {
    /// Single-site measurements of the reduced parity string.
    Direct,
    /// One projective measurement of the whole string.
    Ideal,
}

/// Twists on a stabilizer lattice; anyon `k` is the `k`-th twist Majorana
/// along the path.
#[derive(Clone, Debug)]
pub struct LatticeBackend {
    code: CodeState,
    bilinears: Arc<Vec<Vec<Option<PauliString>>>>,
    readout: Readout,
    /// Pair-parity readouts; the code state counts individual site and
    /// plaquette measurements.
    parity_measurements: usize,
}

impl LatticeBackend {
    pub fn new(code: CodeState, readout: Readout) -> Result<Self, MbbError> {
        let n = code.twist_majoranas().len();
        let mut table = vec![vec![None; n]; n];
        for a in 0..n {
            for b in a + 1..n {
                table[a][b] = Some(code.majorana_bilinear(a, b)?);
            }
        }
        Ok(LatticeBackend { code, bilinears: Arc::new(table), readout, parity_measurements: 0 })
    }

    /// Fresh ground state sharing this backend's precomputed data.
    pub fn reinit(&self, rng: SeedStream) -> Result<Self, MbbError> {
        Ok(LatticeBackend { code: self.code.reinit(rng)?, bilinears: self.bilinears.clone(), readout: self.readout, parity_measurements: 0 })
    }

    pub fn code(&self) -> &CodeState {
        &self.code
    }

    /// Reduced `iγ_aγ_b` for `a < b`.
    fn parity(&self, a: usize, b: usize) -> &PauliString {
        self.bilinears[a - 1][b - 1].as_ref().expect("a < b")
    }

    /// Apply the twist Majorana `γ_a` (a logical operator of the code).
    pub fn apply_majorana(&mut self, a: usize) -> Result<(), MbbError> {
        let g = self.code.twist_majoranas().get(a.wrapping_sub(1)).cloned().ok_or(MbbError::AnyonIndex(a))?;
        self.code.apply_pauli(&g)?;
        Ok(())
    }

    /// Measure each pair and flip it to vacuum with a single twist Majorana.
    pub fn prepare_vacuum(&mut self, pairs: &[(usize, usize)]) -> Result<(), MbbError> {
        for &(a, b) in pairs {
            if self.measure_pair(a, b, None)? == 1 {
                self.apply_majorana(a)?;
            }
        }
        Ok(())
    }
}

impl Backend for LatticeBackend {
    fn tag(&self) -> BackendTag {
        BackendTag::Lattice
    }

    fn n_anyons(&self) -> usize {
        self.code.twist_majoranas().len()
    }

    fn measure_pair(&mut self, a: usize, b: usize, forced: Option<u8>) -> Result<u8, MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        let r = self.parity(a.min(b), a.max(b)).clone();
        let f = forced.map(|n| 2 * n as i8 - 1);
        let v = match self.readout {
            Readout::Direct => self.code.measure_parity_direct_forced(&r, f).map(|d| d.outcome),
            Readout::Ideal => match f {
                Some(f) => self.code.measure_pauli_forced(&r, f),
                None => self.code.measure_pauli(&r),
            },
        };
        let v = v.map_err(|e| match (e, forced) {
            (SimError::Tableau(crate::tableau::TableauError::ImpossibleOutcome(_)), Some(n)) => MbbError::ZeroProbability(n),
            (e, _) => e.into(),
        })?;
        self.parity_measurements += 1;
        Ok(((v + 1) / 2) as u8)
    }

    fn pair_value(&self, a: usize, b: usize) -> Result<Option<u8>, MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        Ok(self.code.expectation(self.parity(a.min(b), a.max(b)))?.map(|v| ((v + 1) / 2) as u8))
    }

    fn apply_bilinear(&mut self, a: usize, b: usize) -> Result<(), MbbError> {
        check_pair(self.n_anyons(), a, b)?;
        let p = self.parity(a.min(b), a.max(b)).clone();
        self.code.apply_pauli(&p)?;
        Ok(())
    }

    fn measurement_count(&self) -> usize {
        self.parity_measurements
    }

    fn monomials(&self) -> Result<Vec<f64>, MbbError> {
        let g = self.code.twist_majoranas();
        monomial_masks(g.len())
            .into_iter()
            .map(|m| Ok(self.code.expectation(&monomial(g, m))?.map_or(0.0, f64::from)))
            .collect()
    }
}

/// Logical Pauli completing a braid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CorrectionOp {
    I,
    /// `iγ₁γ₃`
    X,
    /// `iγ₁γ₄`
    Y,
    /// `iγ₃γ₄`
    Z,
}

/// Outcomes of one braid cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MbbRecord {
    pub n12_initial: u8,
    pub n13: u8,
    pub n14: u8,
    pub n12_final: u8,
    pub backend: BackendTag,
    pub measurements: usize,
    /// Measurements spent on each of the three steps (forced runs only).
    pub attempts: Option<[usize; 3]>,
}

impl MbbRecord {
    pub fn outcomes(&self) -> (u8, u8, u8) {
        (self.n13, self.n14, self.n12_final)
    }
}

/// Roles `(1, 2, 3, 4)`: ancillas, then the braided pair.
pub type Roles = [usize; 4];

pub const DEFAULT_ROLES: Roles = [1, 2, 3, 4];

/// The fixed cycle: exactly three measurements.
pub fn run_cycle(b: &mut dyn Backend, roles: Roles) -> Result<MbbRecord, MbbError> {
    let [r1, r2, r3, r4] = roles;
    if b.pair_value(r1, r2)? != Some(0) {
        return Err(MbbError::NotVacuum(r1, r2));
    }
    let start = b.measurement_count();
    let n13 = b.measure_pair(r1, r3, None)?;
    let n14 = b.measure_pair(r1, r4, None)?;
    let n12_final = b.measure_pair(r1, r2, None)?;
    Ok(MbbRecord { n12_initial: 0, n13, n14, n12_final, backend: b.tag(), measurements: b.measurement_count() - start, attempts: None })
}

/// As [`run_cycle`] with prescribed outcomes.
pub fn run_cycle_forced(b: &mut dyn Backend, roles: Roles, outcomes: (u8, u8, u8)) -> Result<MbbRecord, MbbError> {
    let [r1, r2, r3, r4] = roles;
    if b.pair_value(r1, r2)? != Some(0) {
        return Err(MbbError::NotVacuum(r1, r2));
    }
    let start = b.measurement_count();
    let n13 = b.measure_pair(r1, r3, Some(outcomes.0))?;
    let n14 = b.measure_pair(r1, r4, Some(outcomes.1))?;
    let n12_final = b.measure_pair(r1, r2, Some(outcomes.2))?;
    Ok(MbbRecord { n12_initial: 0, n13, n14, n12_final, backend: b.tag(), measurements: b.measurement_count() - start, attempts: None })
}

pub fn correction_for(r: &MbbRecord) -> CorrectionOp {
    match (r.n13 != r.n14, r.n12_final == 1) {
        (false, false) => CorrectionOp::I,
        (true, false) => CorrectionOp::Z,
        (false, true) => CorrectionOp::Y,
        (true, true) => CorrectionOp::X,
    }
}

pub fn apply_correction(b: &mut dyn Backend, op: CorrectionOp, roles: Roles) -> Result<(), MbbError> {
    let [r1, _, r3, r4] = roles;
    match op {
        CorrectionOp::I => Ok(()),
        CorrectionOp::X => b.apply_bilinear(r1, r3),
        CorrectionOp::Y => b.apply_bilinear(r1, r4),
        CorrectionOp::Z => b.apply_bilinear(r3, r4),
    }
}

/// A corrected braid of roles 3 and 4.
pub fn braid(b: &mut dyn Backend, roles: Roles) -> Result<(MbbRecord, CorrectionOp), MbbError> {
    let r = run_cycle(b, roles)?;
    let op = correction_for(&r);
    apply_correction(b, op, roles)?;
    Ok((r, op))
}

/// `(1 + γ₄γ₃)/√2` on the roles' modes.
pub fn braid_operator(fs: &FockSpace, v: &StateVector, roles: Roles) -> StateVector {
    fs.braid(v, roles[2], roles[3])
}

/// `|⟨R₃₄ ψ_initial | ψ_final⟩|`.
pub fn verify_braid_equivalence(initial: &StateVector, final_corrected: &StateVector, fs: &FockSpace, roles: Roles) -> Result<f64, MbbError> {
    let target = braid_operator(fs, initial, roles);
    fidelity_up_to_phase(&target, final_corrected).map_err(|_| MbbError::NoState("fock"))
}

/// Each step is repeated, re-measuring the previous pair in between, until
/// it reads vacuum.
pub fn run_forced(b: &mut dyn Backend, roles: Roles, max_attempts: usize) -> Result<MbbRecord, MbbError> {
    let [r1, r2, r3, r4] = roles;
    if b.pair_value(r1, r2)? != Some(0) {
        return Err(MbbError::NotVacuum(r1, r2));
    }
    let start = b.measurement_count();
    let steps = [((r1, r3), (r1, r2)), ((r1, r4), (r1, r3)), ((r1, r2), (r1, r4))];
    let mut attempts = [0usize; 3];
    for (k, &(target, reset)) in steps.iter().enumerate() {
        loop {
            attempts[k] += 1;
            if b.measure_pair(target.0, target.1, None)? == 0 {
                break;
            }
            if attempts[k] >= max_attempts {
                return Err(MbbError::MaxAttempts(max_attempts));
            }
            b.measure_pair(reset.0, reset.1, None)?;
        }
    }
    Ok(MbbRecord {
        n12_initial: 0,
        n13: 0,
        n14: 0,
        n12_final: 0,
        backend: b.tag(),
        measurements: b.measurement_count() - start,
        attempts: Some(attempts),
    })
}

/// Six anyons with pairs (1,2), (3,5), (4,6) in the vacuum.
pub const STATS_PAIRS: [(usize, usize); 3] = [(1, 2), (3, 5), (4, 6)];

/// Source of fresh six-anyon backends for the statistics experiment.
#[derive(Clone, Debug)]
pub enum StatsBackend {
    Anyon,
    Fock,
    /// Template state; each shot re-prepares its ground state.
    Lattice(LatticeBackend),
}

impl StatsBackend {
    pub fn tag(&self) -> BackendTag {
        match self {
            StatsBackend::Anyon => BackendTag::Anyon,
            StatsBackend::Fock => BackendTag::Fock,
            StatsBackend::Lattice(_) => BackendTag::Lattice,
        }
    }

    pub fn prepare(&self, rng: SeedStream) -> Result<Box<dyn Backend>, MbbError> {
        Ok(match self {
            StatsBackend::Anyon => Box::new(AnyonBackend::vacuum(Pairing::new(&STATS_PAIRS)?, rng)?),
            StatsBackend::Fock => Box::new(FockBackend::vacuum(6, &STATS_PAIRS, rng)?),
            StatsBackend::Lattice(t) => {
                if t.n_anyons() != 6 {
                    return Err(MbbError::AnyonIndex(t.n_anyons()));
                }
                let mut l = t.reinit(rng)?;
                l.prepare_vacuum(&STATS_PAIRS)?;
                Box::new(l)
            }
        })
    }
}

/// One shot: `n` corrected braids of (3,4), then a measurement of `P₃₅`.
/// Returns whether `P₃₅` changed.
pub fn stats_shot(src: &StatsBackend, n_braids: usize, rng: SeedStream) -> Result<bool, MbbError> {
    let mut b = src.prepare(rng)?;
    let before = b.pair_value(3, 5)?.ok_or(MbbError::NotVacuum(3, 5))?;
    for _ in 0..n_braids {
        braid(b.as_mut(), DEFAULT_ROLES)?;
    }
    Ok(b.measure_pair(3, 5, None)? != before)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatsResult {
    pub backend: BackendTag,
    pub n_braids: usize,
    pub shots: usize,
    pub seed: u64,
    pub flips: usize,
    pub frequency: f64,
    /// 95% Wilson score interval.
    pub ci95: (f64, f64),
}

/// Wilson score interval at confidence `level`.
pub fn wilson_interval(successes: usize, trials: usize, level: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z = Normal::new(0.0, 1.0).unwrap().inverse_cdf(0.5 + level / 2.0);
    let d = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / d;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / d;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Flip frequency of `P₃₅` over independent seeded shots. Shot `i` uses
/// [`crate::shot_stream`]`(seed, i)`, so the result does not depend on the
/// thread count.
pub fn run_statistics(src: &StatsBackend, n_braids: usize, shots: usize, seed: u64) -> Result<StatsResult, MbbError> {
    if shots == 0 {
        return Err(MbbError::NoShots);
    }
    let flips = (0..shots as u64)
        .into_par_iter()
        .map(|i| stats_shot(src, n_braids, crate::shot_stream(seed, i)).map(usize::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(StatsResult {
        backend: src.tag(),
        n_braids,
        shots,
        seed,
        flips,
        frequency: flips as f64 / shots as f64,
        ci95: wilson_interval(flips, shots, 0.95),
    })
}
