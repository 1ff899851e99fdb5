//! Ising anyons: fusion rules, F/R/B data and pair-basis states of 4 or 6
//! σ anyons.
//!
//! A pair basis is labelled by a signed ordering of the anyons. Pair `k`
//! occupies positions `2k, 2k+1` and its fusion label (`I ↦ 0`, `ψ ↦ 1`) is
//! bit `k` of a basis index. The exchange `σ_i` of positions `i, i+1`
//! (1-based) maps `(…, a, b, …)` to `(…, b, −a, …)`; the signs record the
//! Majorana orientation `γ_a ↦ γ_b, γ_b ↦ −γ_a` of the corresponding braid.
//! Every pairing is reached from `(1, 2, …, n)` by a fixed word of exchanges,
//! and basis changes are composed from the moves of those words.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64 as C64;
use rand::Rng;
use thiserror::Error;

use crate::dense::{FockSpace, StateVector};
use crate::SeedStream;

const EPS: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Charge {
    I,
    Sigma,
    Psi,
}

impl fmt::Display for Charge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Charge::I => "I",
            Charge::Sigma => "σ",
            Charge::Psi => "ψ",
        })
    }
}

/// Fusion outcomes of `a × b`.
pub fn fuse(a: Charge, b: Charge) -> Vec<Charge> {
    use Charge::*;
    match (a, b) {
        (I, x) | (x, I) => vec![x],
        (Sigma, Sigma) => vec![I, Psi],
        (Sigma, Psi) | (Psi, Sigma) => vec![Sigma],
        (Psi, Psi) => vec![I],
    }
}

fn allowed(a: Charge, b: Charge, c: Charge) -> bool {
    fuse(a, b).contains(&c)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnyonError {
    #[error("invalid pairing: {0}")]
    Pairing(String),
    #[error("pair ({0},{1}) is not a pair of the current basis")]
    NotPaired(usize, usize),
    #[error("outcome {0} has zero probability")]
    ZeroProbability(u8),
    #[error("state must have norm 1")]
    BadState,
}

/// The F, R and B data of the Ising model in the `{I, ψ}` basis.
#[derive(Clone, Debug, PartialEq)]
pub struct FrbSet {
    /// `F^σ_{σσσ}`.
    pub f: Matrix2<C64>,
    /// `R_{σσ}` (diagonal over the fusion channel).
    pub r: Matrix2<C64>,
    /// `B^σ_{σσσ} = F⁻¹ R F`.
    pub b: Matrix2<C64>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl FrbSet {
    pub fn ising() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let f = Matrix2::new(c(h, 0.0), c(h, 0.0), c(h, 0.0), c(-h, 0.0));
        let w = C64::from_polar(1.0, -std::f64::consts::PI / 8.0);
        let r = Matrix2::new(w, C64::new(0.0, 0.0), C64::new(0.0, 0.0), w * C64::i());
        let b = f.try_inverse().expect("F is unitary") * r * f;
        FrbSet { f, r, b }
    }

    /// Scalar `[F^d_{abc}]_{ef}` for blocks that are one-dimensional; the
    /// σσσ→σ block is [`Self::f`].
    pub fn f_scalar(&self, a: Charge, b: Charge, c: Charge, d: Charge, e: Charge, g: Charge) -> C64 {
        use Charge::*;
        if !(allowed(a, b, e) && allowed(e, c, d) && allowed(b, c, g) && allowed(a, g, d)) {
            return C64::new(0.0, 0.0);
        }
        if (a, b, c, d) == (Sigma, Sigma, Sigma, Sigma) {
            let i = |x: Charge| if x == I { 0 } else { 1 };
            return self.f[(i(e), i(g))];
        }
        if (a, b, c, d) == (Sigma, Psi, Sigma, Psi) || (a, b, c, d) == (Psi, Sigma, Psi, Sigma) {
            return C64::new(-1.0, 0.0);
        }
        C64::new(1.0, 0.0)
    }

    /// `R^c_{σσ}` for `c ∈ {I, ψ}`.
    pub fn r_channel(&self, label: u8) -> C64 {
        self.r[(label as usize, label as usize)]
    }
}

/// Sector of a four-anyon subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

/// A partition of anyons `1..=n` into pairs, each stored `(min, max)` and
/// sorted by first element.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pairing(Vec<(usize, usize)>);

impl Pairing {
    pub fn new(pairs: &[(usize, usize)]) -> Result<Self, AnyonError> {
        let mut v: Vec<(usize, usize)> = pairs.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        v.sort();
        let n = 2 * v.len();
        if n != 4 && n != 6 {
            return Err(AnyonError::Pairing(format!("{} anyons; expected 4 or 6", n)));
        }
        let mut seen = vec![false; n + 1];
        for &(a, b) in &v {
            for x in [a, b] {
                if x == 0 || x > n || seen[x] {
                    return Err(AnyonError::Pairing(format!("{pairs:?}")));
                }
                seen[x] = true;
            }
        }
        Ok(Pairing(v))
    }

    pub fn n_anyons(&self) -> usize {
        2 * self.0.len()
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn index_of(&self, a: usize, b: usize) -> Option<usize> {
        let key = (a.min(b), a.max(b));
        self.0.iter().position(|&p| p == key)
    }

    /// Pairing containing `(a, b)`: pairs avoiding `a` and `b` are kept and
    /// the two orphaned partners are paired with each other.
    pub fn with_pair(&self, a: usize, b: usize) -> Result<Pairing, AnyonError> {
        if self.index_of(a, b).is_some() {
            return Ok(self.clone());
        }
        let partner = |x: usize| {
            self.0.iter().find_map(|&(p, q)| if p == x { Some(q) } else if q == x { Some(p) } else { None })
        };
        let (pa, pb) = match (partner(a), partner(b)) {
            (Some(pa), Some(pb)) if a != b => (pa, pb),
            _ => return Err(AnyonError::Pairing(format!("({a},{b}) for {self}"))),
        };
        let mut v: Vec<(usize, usize)> = self.0.iter().copied().filter(|&(p, q)| ![a, b].contains(&p) && ![a, b].contains(&q)).collect();
        v.push((a, b));
        v.push((pa, pb));
        Pairing::new(&v)
    }

    /// Exchanges (1-based positions) reaching this pairing from the identity
    /// ordering, in application order, and the resulting signed ordering.
    pub fn canonical_word(&self) -> (Vec<usize>, Vec<i64>) {
        let n = self.n_anyons();
        let mut ord: Vec<i64> = (1..=n as i64).collect();
        let mut word = Vec::new();
        for (k, &(a, b)) in self.0.iter().enumerate() {
            debug_assert_eq!(ord[2 * k].unsigned_abs() as usize, a);
            let mut p = ord.iter().position(|&x| x.unsigned_abs() as usize == b).expect("anyon present");
            while p > 2 * k + 1 {
                let (x, y) = (ord[p - 1], ord[p]);
                ord[p - 1] = y;
                ord[p] = -x;
                word.push(p);
                p -= 1;
            }
        }
        (word, ord)
    }
}

impl fmt::Display for Pairing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(a, b)| format!("{a}{b}")).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for Pairing {
    type Err = AnyonError;

    /// `"12,34"`, `"(13,24)"` or `"12 35 46"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut pairs = Vec::new();
        for tok in s.split(|c: char| c == ',' || c.is_whitespace()).map(|t| t.trim_matches(|c| c == '(' || c == ')')) {
            if tok.is_empty() {
                continue;
            }
            let d: Vec<usize> = tok.chars().map(|c| c.to_digit(10).map(|d| d as usize)).collect::<Option<_>>().ok_or_else(|| AnyonError::Pairing(s.into()))?;
            if d.len() != 2 {
                return Err(AnyonError::Pairing(s.into()));
            }
            pairs.push((d[0], d[1]));
        }
        Pairing::new(&pairs)
    }
}

/// Matrix of the exchange `σ_pos` on pair-label space:
/// `new_basis[L'] = Σ_L S[L', L] · old_basis[L]`.
fn move_matrix(frb: &FrbSet, n_pairs: usize, pos: usize) -> DMatrix<C64> {
    let dim = 1 << n_pairs;
    let mut s = DMatrix::zeros(dim, dim);
    if pos % 2 == 1 {
        let k = (pos - 1) / 2;
        for l in 0..dim {
            s[(l, l)] = frb.r_channel((l >> k & 1) as u8);
        }
    } else {
        // Exchange across pairs k and k+1: F-move the two pairs into a
        // (σ(σσ)σ) tree, braid the middle σ's, move back. The outer F's
        // between Abelian channels are the scalars below.
        let k = pos / 2 - 1;
        let ch = |x: usize| if x == 0 { Charge::I } else { Charge::Psi };
        for l in 0..dim {
            let (a, b) = (l >> k & 1, l >> (k + 1) & 1);
            let total = a ^ b;
            for a2 in 0..2 {
                let b2 = a2 ^ total;
                let l2 = (l & !(0b11 << k)) | (a2 << k) | (b2 << (k + 1));
                let f_in = frb.f_scalar(ch(a), Charge::Sigma, Charge::Sigma, ch(total), Charge::Sigma, ch(b));
                let f_out = frb.f_scalar(ch(a2), Charge::Sigma, Charge::Sigma, ch(total), Charge::Sigma, ch(b2));
                s[(l2, l)] = f_out.conj() * frb.b[(a2, a)] * f_in;
            }
        }
    }
    s
}

/// Basis change from the identity ordering to `pairing`'s ordering.
fn word_matrix(frb: &FrbSet, pairing: &Pairing) -> DMatrix<C64> {
    let n_pairs = pairing.pairs().len();
    let (word, _) = pairing.canonical_word();
    word.iter().fold(DMatrix::identity(1 << n_pairs, 1 << n_pairs), |m, &p| move_matrix(frb, n_pairs, p) * m)
}

/// Full basis change `new_basis = U · old_basis` over all pair labels.
pub fn basis_change(from: &Pairing, to: &Pairing) -> Result<DMatrix<C64>, AnyonError> {
    if from.n_anyons() != to.n_anyons() {
        return Err(AnyonError::Pairing(format!("{from} vs {to}")));
    }
    let frb = FrbSet::ising();
    let uf = word_matrix(&frb, from);
    let ut = word_matrix(&frb, to);
    Ok(ut * uf.adjoint())
}

/// Sector indices ordered by the first pair's label.
fn sector(parity: Parity) -> [usize; 2] {
    match parity {
        Parity::Even => [0b00, 0b11],
        Parity::Odd => [0b10, 0b01],
    }
}

/// Four-anyon basis change `U_{to←from}` restricted to a parity sector.
pub fn pair_transform(parity: Parity, from: &Pairing, to: &Pairing) -> Result<Matrix2<C64>, AnyonError> {
    if from.n_anyons() != 4 || to.n_anyons() != 4 {
        return Err(AnyonError::Pairing("pair transforms act on four anyons".into()));
    }
    let u = basis_change(from, to)?;
    let idx = sector(parity);
    Ok(Matrix2::from_fn(|i, j| u[(idx[i], idx[j])]))
}

/// Amplitudes over the pair labels of a pairing.
#[derive(Clone, Debug, PartialEq)]
pub struct TopoState {
    pairing: Pairing,
    amps: Vec<C64>,
}

impl TopoState {
    pub fn new(pairing: Pairing, amps: Vec<C64>) -> Result<Self, AnyonError> {
        if amps.len() != 1 << pairing.pairs().len() {
            return Err(AnyonError::BadState);
        }
        let s = TopoState { pairing, amps };
        if (s.norm() - 1.0).abs() > 1e-9 {
            return Err(AnyonError::BadState);
        }
        Ok(s)
    }

    /// Definite labels.
    pub fn basis(pairing: Pairing, labels: usize) -> Result<Self, AnyonError> {
        let mut amps = vec![C64::new(0.0, 0.0); 1 << pairing.pairs().len()];
        amps[labels] = C64::new(1.0, 0.0);
        TopoState::new(pairing, amps)
    }

    pub fn pairing(&self) -> &Pairing {
        &self.pairing
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, labels: usize) -> C64 {
        self.amps[labels]
    }

    pub fn n_anyons(&self) -> usize {
        self.pairing.n_anyons()
    }

    pub fn ordering(&self) -> Vec<i64> {
        self.pairing.canonical_word().1
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Total fusion channel: `Even` ↔ `I`, `Odd` ↔ `ψ`. `None` for a
    /// superposition of both, whose total charge is carried by an
    /// implicit extra anyon; basis changes act on each sector separately.
    pub fn parity(&self) -> Option<Parity> {
        let mut seen = None;
        for (l, a) in self.amps.iter().enumerate() {
            if a.norm() > EPS {
                let p = if l.count_ones() % 2 == 0 { Parity::Even } else { Parity::Odd };
                if seen.is_some_and(|q| q != p) {
                    return None;
                }
                seen = Some(p);
            }
        }
        seen
    }

    pub fn transform(&self, to: &Pairing) -> Result<TopoState, AnyonError> {
        let u = basis_change(&self.pairing, to)?;
        let dim = self.amps.len();
        let amps = (0..dim).map(|i| (0..dim).map(|j| u[(i, j)].conj() * self.amps[j]).sum()).collect();
        Ok(TopoState { pairing: to.clone(), amps })
    }

    /// Born-rule sample of the fusion label of `(a, b)`; `forced` replays a
    /// given outcome.
    pub fn measure_pair(&self, a: usize, b: usize, rng: &mut SeedStream, forced: Option<u8>) -> Result<(u8, TopoState), AnyonError> {
        let k = self.pairing.index_of(a, b).ok_or(AnyonError::NotPaired(a, b))?;
        let p1: f64 = self.amps.iter().enumerate().filter(|(l, _)| l >> k & 1 == 1).map(|(_, x)| x.norm_sqr()).sum();
        let n = match forced {
            Some(n) => n,
            None => (rng.random::<f64>() < p1) as u8,
        };
        let p = if n == 1 { p1 } else { 1.0 - p1 };
        if p < EPS {
            return Err(AnyonError::ZeroProbability(n));
        }
        let s = p.sqrt();
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(l, x)| if (l >> k & 1) as u8 == n { x / s } else { C64::new(0.0, 0.0) })
            .collect();
        Ok((n, TopoState { pairing: self.pairing.clone(), amps }))
    }

    /// Whether the label of pair `(a, b)` reads opposite to the Fock number
    /// of `iγ_aγ_b` (`a < b`) in this ordering.
    pub fn fock_flip(&self, a: usize, b: usize) -> Result<bool, AnyonError> {
        let k = self.pairing.index_of(a, b).ok_or(AnyonError::NotPaired(a, b))?;
        let ord = self.ordering();
        let (l, r) = (ord[2 * k], ord[2 * k + 1]);
        Ok((l * r < 0) ^ (l.unsigned_abs() as usize != a.min(b)))
    }

    /// Image in the Fock space of `n` Majorana modes; the identity ordering's
    /// labels are occupation numbers of modes `(2k+1, 2k+2)`.
    pub fn to_fock(&self) -> StateVector {
        let fs = FockSpace::new(self.n_anyons()).expect("4 or 6 modes");
        let (word, _) = self.pairing.canonical_word();
        let mut out = StateVector::zero(fs.qubits()).unwrap().scaled(C64::new(0.0, 0.0));
        for (l, a) in self.amps.iter().enumerate() {
            if a.norm() < EPS {
                continue;
            }
            let mut v = StateVector::basis(fs.qubits(), l).unwrap();
            let mut ord: Vec<i64> = (1..=self.n_anyons() as i64).collect();
            for &p in &word {
                let (x, y) = (ord[p - 1], ord[p]);
                v = signed_braid(&fs, &v, x, y);
                ord[p - 1] = y;
                ord[p] = -x;
            }
            out = out.add(&v.scaled(*a));
        }
        out
    }
}

/// `(1 + (s_yγ_y)(s_xγ_x))/√2` for signed mode labels `x`, `y`.
fn signed_braid(fs: &FockSpace, v: &StateVector, x: i64, y: i64) -> StateVector {
    let sign = if x * y < 0 { -1.0 } else { 1.0 };
    let g = fs.majorana(y.unsigned_abs() as usize).multiply(&fs.majorana(x.unsigned_abs() as usize));
    let r = std::f64::consts::FRAC_1_SQRT_2;
    v.add(&v.apply(&g).unwrap().scaled(C64::new(sign, 0.0))).scaled(C64::new(r, 0.0))
}
