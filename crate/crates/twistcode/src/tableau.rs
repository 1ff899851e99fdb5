//! Aaronson-Gottesman stabilizer tableau with destabilizers.
//!
//! Rows store Hermitian Pauli strings as packed `x`/`z` words plus an exponent
//! `r` of `i` (always 0 or 2 for stabilizer rows). Rows `0..n` are
//! destabilizers, rows `n..2n` stabilizers.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::pauli::{PauliString, Phase};
use crate::SeedStream;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Row {
    x: Vec<u64>,
    z: Vec<u64>,
    r: u8,
}

impl Row {
    fn zeros(words: usize) -> Self {
        Row { x: vec![0; words], z: vec![0; words], r: 0 }
    }

    fn from_pauli(p: &PauliString, n: usize) -> Self {
        let (x, z) = p.to_bits(n);
        Row { x, z, r: p.phase().exponent() }
    }

    fn to_pauli(&self) -> PauliString {
        PauliString::from_bits(&self.x, &self.z, Phase::from_exponent(self.r as i64))
    }

    fn anticommutes(&self, o: &Row) -> bool {
        let mut c = 0u32;
        for i in 0..self.x.len() {
            c += ((self.x[i] & o.z[i]) ^ (self.z[i] & o.x[i])).count_ones();
        }
        c % 2 == 1
    }

    /// `self ← o · self`, keeping letters Hermitian and the phase exact.
    fn left_mul(&mut self, o: &Row) {
        let mut e: i64 = self.r as i64 + o.r as i64;
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (o.x[i], o.z[i], self.x[i], self.z[i]);
            e += (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64;
            e += 2 * (z1 & x2).count_ones() as i64;
            e -= ((x1 ^ x2) & (z1 ^ z2)).count_ones() as i64;
            self.x[i] = x1 ^ x2;
            self.z[i] = z1 ^ z2;
        }
        self.r = e.rem_euclid(4) as u8;
    }
}

/// Result of a Pauli measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub value: i8,
    pub deterministic: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("operator acts on qubit {0} outside the register")]
    OutOfRange(usize),
    #[error("forced outcome {0} has zero probability")]
    ImpossibleOutcome(i8),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tableau {
    n: usize,
    rows: Vec<Row>,
}

impl Tableau {
    /// `|0…0⟩` on `n` qubits.
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![Row::zeros(words); 2 * n];
        for q in 0..n {
            rows[q].x[q / 64] |= 1 << (q % 64);
            rows[n + q].z[q / 64] |= 1 << (q % 64);
        }
        Tableau { n, rows }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> Vec<PauliString> {
        self.rows[self.n..].iter().map(Row::to_pauli).collect()
    }

    pub fn destabilizers(&self) -> Vec<PauliString> {
        self.rows[..self.n].iter().map(Row::to_pauli).collect()
    }

    fn row_of(&self, p: &PauliString) -> Result<Row, TableauError> {
        if let Some(s) = p.max_site() {
            if s >= self.n {
                return Err(TableauError::OutOfRange(s));
            }
        }
        Ok(Row::from_pauli(p, self.n))
    }

    /// Conjugate the state by a Pauli operator.
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<(), TableauError> {
        let pr = self.row_of(p)?;
        for row in &mut self.rows {
            if row.anticommutes(&pr) {
                row.r = (row.r + 2) % 4;
            }
        }
        Ok(())
    }

    /// `Some(±1)` if `±p` is in the stabilizer group, else `None`.
    pub fn expectation(&self, p: &PauliString) -> Result<Option<i8>, TableauError> {
        if !p.is_hermitian() {
            return Err(TableauError::NotHermitian);
        }
        let pr = self.row_of(p)?;
        if self.rows[self.n..].iter().any(|s| s.anticommutes(&pr)) {
            return Ok(None);
        }
        let mut acc = Row::zeros(pr.x.len());
        for i in 0..self.n {
            if self.rows[i].anticommutes(&pr) {
                acc.left_mul(&self.rows[self.n + i]);
            }
        }
        debug_assert!(acc.x == pr.x && acc.z == pr.z);
        Ok(Some(if acc.r == pr.r { 1 } else { -1 }))
    }

    /// Projective measurement of a Hermitian Pauli; `forced` post-selects a
    /// random outcome and fails on a deterministic contradiction.
    pub fn measure(&mut self, p: &PauliString, rng: &mut SeedStream, forced: Option<i8>) -> Result<Outcome, TableauError> {
        if !p.is_hermitian() {
            return Err(TableauError::NotHermitian);
        }
        let pr = self.row_of(p)?;
        let n = self.n;
        let Some(k) = (n..2 * n).find(|&i| self.rows[i].anticommutes(&pr)) else {
            let v = self.expectation(p)?.expect("commuting operator has a definite value");
            if let Some(f) = forced {
                if f != v {
                    return Err(TableauError::ImpossibleOutcome(f));
                }
            }
            return Ok(Outcome { value: v, deterministic: true });
        };
        let pivot = self.rows[k].clone();
        for i in 0..2 * n {
            if i != k && self.rows[i].anticommutes(&pr) {
                self.rows[i].left_mul(&pivot);
            }
        }
        let value = forced.unwrap_or_else(|| if rng.random::<bool>() { 1 } else { -1 });
        self.rows[k - n] = pivot;
        let mut new = pr;
        if value == -1 {
            new.r = (new.r + 2) % 4;
        }
        self.rows[k] = new;
        self.debug_check();
        Ok(Outcome { value, deterministic: false })
    }

    /// Symplectic pairing: stabilizers commute, destabilizer `i` anticommutes
    /// only with stabilizer `i`.
    pub fn check_invariants(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if self.rows[n + i].anticommutes(&self.rows[n + j]) {
                    return false;
                }
                if self.rows[i].anticommutes(&self.rows[n + j]) != (i == j) {
                    return false;
                }
            }
            if self.rows[n + i].r % 2 == 1 {
                return false;
            }
        }
        true
    }

    fn debug_check(&self) {
        #[cfg(debug_assertions)]
        if self.n <= 24 {
            debug_assert!(self.check_invariants(), "tableau lost its symplectic structure");
        }
    }
}
