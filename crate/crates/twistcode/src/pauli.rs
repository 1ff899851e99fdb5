//! Phased Pauli strings with an exact Z4 phase.
//!
//! Convention: `Y = iXZ`, hence `X·Z = -i·Y`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An element of {+1, +i, -1, -i}, stored as the exponent of `i`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    /// Exponent `k` with `self = i^k`, in `0..4`.
    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn neg(self) -> Phase {
        Phase((self.0 + 2) % 4)
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        use num_complex::Complex64 as C;
        match self.0 {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        }
    }

    /// `+1` or `-1` for real phases, `None` otherwise.
    pub fn sign(self) -> Option<i8> {
        match self.0 {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    fn prefix(self) -> &'static str {
        ["", "i·", "-", "-i·"][self.0 as usize]
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    pub const ALL: [Letter; 3] = [Letter::X, Letter::Y, Letter::Z];

    /// Symplectic bits `(x, z)`.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Letter::X => (true, false),
            Letter::Y => (true, true),
            Letter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Option<Letter> {
        match (x, z) {
            (true, false) => Some(Letter::X),
            (true, true) => Some(Letter::Y),
            (false, true) => Some(Letter::Z),
            (false, false) => None,
        }
    }

    /// Single-site product `a·b` as (phase, letter or identity).
    pub fn product(a: Letter, b: Letter) -> (Phase, Option<Letter>) {
        use Letter::*;
        match (a, b) {
            (X, X) | (Y, Y) | (Z, Z) => (Phase::ONE, None),
            (X, Y) => (Phase::I, Some(Z)),
            (Y, X) => (Phase::MINUS_I, Some(Z)),
            (Y, Z) => (Phase::I, Some(X)),
            (Z, Y) => (Phase::MINUS_I, Some(X)),
            (Z, X) => (Phase::I, Some(Y)),
            (X, Z) => (Phase::MINUS_I, Some(Y)),
        }
    }

    fn as_char(self) -> char {
        match self {
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }
}

/// Phase times a tensor product of single-site Paulis; identity sites are absent.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliString {
    phase: Phase,
    support: BTreeMap<usize, Letter>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(site: usize, letter: Letter) -> Self {
        let mut support = BTreeMap::new();
        support.insert(site, letter);
        PauliString { phase: Phase::ONE, support }
    }

    /// Product of single-site letters on distinct sites. Panics on a repeated site.
    pub fn from_letters<I: IntoIterator<Item = (usize, Letter)>>(letters: I) -> Self {
        let mut support = BTreeMap::new();
        for (s, l) in letters {
            assert!(support.insert(s, l).is_none(), "site {s} repeated");
        }
        PauliString { phase: Phase::ONE, support }
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letter(&self, site: usize) -> Option<Letter> {
        self.support.get(&site).copied()
    }

    pub fn support(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        self.support.iter().map(|(&s, &l)| (s, l))
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.keys().copied()
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn is_identity(&self) -> bool {
        self.support.is_empty()
    }

    /// Hermitian iff the phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    pub fn max_site(&self) -> Option<usize> {
        self.support.keys().next_back().copied()
    }

    pub fn commutes(&self, other: &PauliString) -> bool {
        let (small, large) = if self.weight() <= other.weight() { (self, other) } else { (other, self) };
        let mut anti = false;
        for (s, l) in small.support() {
            if let Some(m) = large.letter(s) {
                if m != l {
                    anti = !anti;
                }
            }
        }
        !anti
    }

    pub fn multiply(&self, other: &PauliString) -> PauliString {
        let mut phase = self.phase * other.phase;
        let mut support = self.support.clone();
        for (s, l) in other.support() {
            match support.get(&s).copied() {
                None => {
                    support.insert(s, l);
                }
                Some(m) => {
                    let (ph, r) = Letter::product(m, l);
                    phase = phase * ph;
                    match r {
                        Some(r) => {
                            support.insert(s, r);
                        }
                        None => {
                            support.remove(&s);
                        }
                    }
                }
            }
        }
        PauliString { phase, support }
    }

    /// Same letters with the phase reset to `+1`.
    pub fn unsigned(&self) -> PauliString {
        PauliString { phase: Phase::ONE, support: self.support.clone() }
    }

    /// Restrict to `sites` (dropping the phase).
    pub fn restrict(&self, keep: impl Fn(usize) -> bool) -> PauliString {
        PauliString {
            phase: Phase::ONE,
            support: self.support.iter().filter(|(s, _)| keep(**s)).map(|(&s, &l)| (s, l)).collect(),
        }
    }

    /// Relabel sites through `f`. Panics if `f` is not injective on the support.
    pub fn map_sites(&self, f: impl Fn(usize) -> usize) -> PauliString {
        let mut out = PauliString::from_letters(self.support().map(|(s, l)| (f(s), l)));
        out.phase = self.phase;
        out
    }

    /// Packed `(x, z)` bit vectors over `n` sites; the phase is dropped.
    pub fn to_bits(&self, n: usize) -> (Vec<u64>, Vec<u64>) {
        let words = n.div_ceil(64);
        let mut x = vec![0u64; words];
        let mut z = vec![0u64; words];
        for (s, l) in self.support() {
            assert!(s < n, "site {s} outside 0..{n}");
            let (bx, bz) = l.bits();
            if bx {
                x[s / 64] |= 1 << (s % 64);
            }
            if bz {
                z[s / 64] |= 1 << (s % 64);
            }
        }
        (x, z)
    }

    pub fn from_bits(x: &[u64], z: &[u64], phase: Phase) -> PauliString {
        let mut support = BTreeMap::new();
        for w in 0..x.len().max(z.len()) {
            let xw = x.get(w).copied().unwrap_or(0);
            let zw = z.get(w).copied().unwrap_or(0);
            let mut any = xw | zw;
            while any != 0 {
                let b = any.trailing_zeros() as usize;
                any &= any - 1;
                let l = Letter::from_bits(xw >> b & 1 == 1, zw >> b & 1 == 1).unwrap();
                support.insert(w * 64 + b, l);
            }
        }
        PauliString { phase, support }
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs)
    }
}

impl Mul for PauliString {
    type Output = PauliString;
    fn mul(self, rhs: PauliString) -> PauliString {
        self.multiply(&rhs)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phase.prefix())?;
        if self.support.is_empty() {
            return f.write_str("I");
        }
        let mut first = true;
        for (s, l) in self.support() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}{}", l.as_char(), s)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("cannot parse Pauli string {0:?}")]
pub struct ParsePauliError(pub String);

impl FromStr for PauliString {
    type Err = ParsePauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePauliError(s.to_string());
        let t = s.trim();
        let (phase, rest) = if let Some(r) = t.strip_prefix("-i·") {
            (Phase::MINUS_I, r)
        } else if let Some(r) = t.strip_prefix("i·") {
            (Phase::I, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (Phase::MINUS_ONE, r)
        } else {
            (Phase::ONE, t)
        };
        let rest = rest.trim();
        if rest == "I" {
            return Ok(PauliString::identity().with_phase(phase));
        }
        let mut support = BTreeMap::new();
        for tok in rest.split_whitespace() {
            let mut chars = tok.chars();
            let l = match chars.next() {
                Some('X') => Letter::X,
                Some('Y') => Letter::Y,
                Some('Z') => Letter::Z,
                _ => return Err(err()),
            };
            let site: usize = chars.as_str().parse().map_err(|_| err())?;
            if support.insert(site, l).is_some() {
                return Err(err());
            }
        }
        if support.is_empty() {
            return Err(err());
        }
        Ok(PauliString { phase, support })
    }
}
