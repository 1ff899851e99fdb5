//! Exact state-vector oracle for small lattices and Majorana Fock spaces.
//!
//! Qubit `k` of a lattice state is site `k`; basis index bit `k` is its value.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use thiserror::Error;

use crate::lattice::TwistLattice;
use crate::pauli::{Letter, PauliString, Phase};
use crate::SeedStream;

pub const MAX_QUBITS: usize = 20;
pub const MAX_MODES: usize = 6;
const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenseError {
    #[error("{0} qubits exceeds the dense limit of {MAX_QUBITS}")]
    TooLarge(usize),
    #[error("projection annihilated the state")]
    Annihilated,
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("{0} Majorana modes: need an even count up to {MAX_MODES}")]
    Modes(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

fn masks(p: &PauliString) -> (usize, usize, u32) {
    let (mut xm, mut zm, mut ny) = (0usize, 0usize, 0u32);
    for (s, l) in p.support() {
        let (x, z) = l.bits();
        if x {
            xm |= 1 << s;
        }
        if z {
            zm |= 1 << s;
        }
        if x && z {
            ny += 1;
        }
    }
    (xm, zm, ny)
}

impl StateVector {
    pub fn basis(n: usize, index: usize) -> Result<Self, DenseError> {
        if n > MAX_QUBITS {
            return Err(DenseError::TooLarge(n));
        }
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self, DenseError> {
        Self::basis(n, 0)
    }

    /// Wrap raw amplitudes (normalized here).
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self, DenseError> {
        let n = amps.len().trailing_zeros() as usize;
        if amps.len() != 1 << n {
            return Err(DenseError::Dimension(amps.len(), 1 << n));
        }
        let mut v = StateVector { n, amps };
        v.normalize()?;
        Ok(v)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<(), DenseError> {
        let nrm = self.norm();
        if nrm < NORM_EPS {
            return Err(DenseError::Annihilated);
        }
        for a in &mut self.amps {
            *a /= nrm;
        }
        Ok(())
    }

    fn check_support(&self, p: &PauliString) -> Result<(), DenseError> {
        match p.max_site() {
            Some(s) if s >= self.n => Err(DenseError::Dimension(s + 1, self.n)),
            _ => Ok(()),
        }
    }

    /// `P|v⟩` (no normalization).
    pub fn apply(&self, p: &PauliString) -> Result<StateVector, DenseError> {
        self.check_support(p)?;
        let (xm, zm, ny) = masks(p);
        let ph = p.phase() * Phase::from_exponent(ny as i64);
        let ph = ph.to_complex();
        let mut out = vec![C64::new(0.0, 0.0); self.amps.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let sgn = if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            out[i ^ xm] = ph * a * sgn;
        }
        Ok(StateVector { n: self.n, amps: out })
    }

    pub fn inner(&self, o: &StateVector) -> Result<C64, DenseError> {
        if self.n != o.n {
            return Err(DenseError::Dimension(self.n, o.n));
        }
        Ok(self.amps.iter().zip(&o.amps).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn expectation(&self, p: &PauliString) -> Result<f64, DenseError> {
        if !p.is_hermitian() {
            return Err(DenseError::NotHermitian);
        }
        Ok(self.inner(&self.apply(p)?)?.re)
    }

    /// `(1 + s·P)/2 |v⟩`, unnormalized.
    pub fn project(&self, p: &PauliString, s: i8) -> Result<StateVector, DenseError> {
        if !p.is_hermitian() {
            return Err(DenseError::NotHermitian);
        }
        let pv = self.apply(p)?;
        let f = s as f64;
        let amps = self.amps.iter().zip(&pv.amps).map(|(a, b)| (a + b * f) * 0.5).collect();
        Ok(StateVector { n: self.n, amps })
    }

    pub fn scaled(&self, c: C64) -> StateVector {
        StateVector { n: self.n, amps: self.amps.iter().map(|a| a * c).collect() }
    }

    pub fn add(&self, o: &StateVector) -> StateVector {
        StateVector { n: self.n, amps: self.amps.iter().zip(&o.amps).map(|(a, b)| a + b).collect() }
    }
}

/// Sequential projection `(1 + A_k)/2` from `|0…0⟩`, in plaquette order.
pub fn prepare_ground(lat: &TwistLattice) -> Result<StateVector, DenseError> {
    let mut v = StateVector::zero(lat.n_sites())?;
    for op in lat.operators() {
        v = v.project(op, 1)?;
        v.normalize()?;
    }
    Ok(v)
}

/// Born-rule measurement of a Hermitian Pauli.
pub fn measure_projective(v: &StateVector, p: &PauliString, rng: &mut SeedStream) -> Result<(i8, StateVector), DenseError> {
    let plus = v.project(p, 1)?;
    let pp = plus.norm().powi(2);
    let s: i8 = if rng.random::<f64>() < pp { 1 } else { -1 };
    let mut out = if s == 1 { plus } else { v.project(p, -1)? };
    out.normalize()?;
    Ok((s, out))
}

pub fn fidelity_up_to_phase(u: &StateVector, v: &StateVector) -> Result<f64, DenseError> {
    Ok(u.inner(v)?.norm())
}

/// Dense `2ⁿ × 2ⁿ` matrix of a Pauli string, same bit convention as [`StateVector`].
pub fn pauli_matrix(p: &PauliString, n: usize) -> DMatrix<C64> {
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        let col = StateVector::basis(n, i).unwrap().apply(p).unwrap();
        for (r, a) in col.amps.iter().enumerate() {
            m[(r, i)] = *a;
        }
    }
    m
}

/// Fock space of `m` Majorana modes on `m/2` qubits:
/// `γ_{2j+1} = Z…Z X_j`, `γ_{2j+2} = Z…Z Y_j` (modes 1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FockSpace {
    modes: usize,
}

impl FockSpace {
    pub fn new(modes: usize) -> Result<Self, DenseError> {
        if modes == 0 || modes % 2 == 1 || modes > MAX_MODES {
            return Err(DenseError::Modes(modes));
        }
        Ok(FockSpace { modes })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn qubits(&self) -> usize {
        self.modes / 2
    }

    pub fn majorana(&self, k: usize) -> PauliString {
        assert!((1..=self.modes).contains(&k), "mode {k} out of range");
        let j = (k - 1) / 2;
        let mut p = PauliString::from_letters((0..j).map(|q| (q, Letter::Z)));
        p = p.multiply(&PauliString::single(j, if k % 2 == 1 { Letter::X } else { Letter::Y }));
        p
    }

    /// `i γ_a γ_b`.
    pub fn bilinear(&self, a: usize, b: usize) -> PauliString {
        let p = self.majorana(a).multiply(&self.majorana(b));
        let ph = p.phase() * Phase::I;
        p.with_phase(ph)
    }

    /// Total fermion parity `∏_j Z_j`: `+1` on the vacuum.
    pub fn parity(&self) -> PauliString {
        PauliString::from_letters((0..self.qubits()).map(|q| (q, Letter::Z)))
    }

    pub fn vacuum(&self) -> StateVector {
        StateVector::zero(self.qubits()).unwrap()
    }

    /// `(1 + (2n−1)·iγ_aγ_b)/2 |v⟩`, unnormalized.
    pub fn project_pair(&self, v: &StateVector, a: usize, b: usize, n: u8) -> StateVector {
        v.project(&self.bilinear(a, b), if n == 1 { 1 } else { -1 }).unwrap()
    }

    /// Braid `(1 + γ_b γ_a)/√2` applied to `v`.
    pub fn braid(&self, v: &StateVector, a: usize, b: usize) -> StateVector {
        let g = self.majorana(b).multiply(&self.majorana(a));
        let r = std::f64::consts::FRAC_1_SQRT_2;
        v.add(&v.apply(&g).unwrap()).scaled(C64::new(r, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majoranas_anticommute() {
        let f = FockSpace::new(6).unwrap();
        for a in 1..=6 {
            let ga = pauli_matrix(&f.majorana(a), 3);
            assert!((&ga * &ga - DMatrix::identity(8, 8)).norm() < 1e-12);
            for b in a + 1..=6 {
                let gb = pauli_matrix(&f.majorana(b), 3);
                assert!((&ga * &gb + &gb * &ga).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn vacuum_has_n_zero() {
        let f = FockSpace::new(4).unwrap();
        let v = f.vacuum();
        assert!((v.expectation(&f.bilinear(1, 2)).unwrap() + 1.0).abs() < 1e-12);
        assert!((v.expectation(&f.parity()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_large_rejected() {
        assert_eq!(StateVector::zero(25), Err(DenseError::TooLarge(25)));
    }
}
