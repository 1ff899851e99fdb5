//! Cross-validation of the stabilizer simulator against dense state vectors.
//!
//! A seeded sequence of random Pauli measurements is replayed on both
//! simulators. Per shot, the dense state is driven with the tableau's
//! outcomes, which must all have positive Born probability, and outcomes the
//! tableau reports as deterministic must have probability one. Separately,
//! the dense simulator samples its own outcomes and per-step marginals are
//! compared.

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::Serialize;

use crate::dense::{measure_projective, prepare_ground, DenseError, StateVector};
use crate::lattice::TwistLattice;
use crate::pauli::{Letter, PauliString, Phase};
use crate::sim::{CodeState, SimError};
use crate::{seed_stream, shot_stream};

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Dense(#[from] DenseError),
    #[error("shots must be positive")]
    NoShots,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepStats {
    pub operator: String,
    pub deterministic: bool,
    pub tableau_plus: f64,
    pub dense_plus: f64,
    /// `3·√(2p(1−p)/shots)` at the pooled estimate.
    pub tolerance: f64,
    pub within: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub sites: usize,
    pub shots: usize,
    pub seed: u64,
    /// Ground-state expectations agree on every plaquette and logical probe.
    pub ground_agrees: bool,
    /// Shots where a tableau outcome had zero dense probability or a
    /// deterministic outcome was not certain.
    pub per_seed_mismatches: usize,
    pub steps: Vec<StepStats>,
    pub passed: bool,
}

/// Random Hermitian Pauli measurements mixing plaquettes, low-weight
/// strings and products of the two; some steps repeat their predecessor.
pub fn random_sequence(lat: &TwistLattice, len: usize, seed: u64) -> Vec<PauliString> {
    let mut rng = seed_stream(seed);
    let sites: Vec<usize> = (0..lat.n_sites()).collect();
    let mut out: Vec<PauliString> = Vec::with_capacity(len);
    while out.len() < len {
        if let Some(last) = out.last() {
            if rng.random::<f64>() < 0.2 {
                out.push(last.clone());
                continue;
            }
        }
        let w = rng.random_range(1..=3);
        let mut p = PauliString::identity();
        for &s in sites.choose_multiple(&mut rng, w) {
            p = p.multiply(&PauliString::single(s, *Letter::ALL.choose(&mut rng).unwrap()));
        }
        if rng.random::<f64>() < 0.3 {
            p = p.multiply(lat.operators().choose(&mut rng).unwrap());
        }
        if !p.is_identity() {
            out.push(p.unsigned().with_phase(if rng.random::<bool>() { Phase::ONE } else { Phase::MINUS_ONE }));
        }
    }
    out
}

fn probes(lat: &TwistLattice) -> Vec<PauliString> {
    let mut out: Vec<PauliString> = lat.operators().to_vec();
    for s in 0..lat.n_sites() {
        for l in [Letter::X, Letter::Z] {
            out.push(PauliString::single(s, l));
        }
    }
    out
}

fn dense_plus(v: &StateVector, p: &PauliString) -> Result<f64, DenseError> {
    Ok(((1.0 + v.expectation(p)?) / 2.0).clamp(0.0, 1.0))
}

pub fn oracle_check(lat: &TwistLattice, sequence: &[PauliString], shots: usize, seed: u64) -> Result<OracleReport, OracleError> {
    if shots == 0 {
        return Err(OracleError::NoShots);
    }
    let ground = prepare_ground(lat)?;
    let tab0 = CodeState::init_ground(lat, seed)?;
    let mut ground_agrees = true;
    for p in probes(lat) {
        let t = tab0.expectation(&p)?.map_or(0.0, f64::from);
        ground_agrees &= (ground.expectation(&p)? - t).abs() < 1e-9;
    }

    let k = sequence.len();
    let mut tab_plus = vec![0usize; k];
    let mut dense_plus_count = vec![0usize; k];
    let mut det = vec![true; k];
    let mut mismatches = 0;
    for shot in 0..shots as u64 {
        let mut st = tab0.reinit(shot_stream(seed, 2 * shot))?;
        let mut v = ground.clone();
        let mut bad = false;
        for (i, p) in sequence.iter().enumerate() {
            let was_det = st.expectation(p)?.is_some();
            let o = st.measure_pauli(p)?;
            det[i] &= was_det;
            tab_plus[i] += (o == 1) as usize;
            let pp = dense_plus(&v, p)?;
            let prob = if o == 1 { pp } else { 1.0 - pp };
            if prob < 1e-9 || (was_det && prob < 1.0 - 1e-9) {
                bad = true;
                break;
            }
            v = v.project(p, o)?;
            v.normalize()?;
        }
        mismatches += bad as usize;

        let mut rng = shot_stream(seed, 2 * shot + 1);
        let mut v = ground.clone();
        for (i, p) in sequence.iter().enumerate() {
            let (o, nv) = measure_projective(&v, p, &mut rng)?;
            dense_plus_count[i] += (o == 1) as usize;
            v = nv;
        }
    }

    let n = shots as f64;
    let steps: Vec<StepStats> = (0..k)
        .map(|i| {
            let (t, d) = (tab_plus[i] as f64 / n, dense_plus_count[i] as f64 / n);
            let p = (t + d) / 2.0;
            let tolerance = 3.0 * (2.0 * p * (1.0 - p) / n).sqrt();
            let within = (t - d).abs() <= tolerance.max(1e-12);
            StepStats { operator: sequence[i].to_string(), deterministic: det[i], tableau_plus: t, dense_plus: d, tolerance, within }
        })
        .collect();
    let passed = ground_agrees && mismatches == 0 && steps.iter().all(|s| s.within);
    Ok(OracleReport { sites: lat.n_sites(), shots, seed, ground_agrees, per_seed_mismatches: mismatches, steps, passed })
}
