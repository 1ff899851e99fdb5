//! Two-dimensional Jordan-Wigner map along a serpentine path.
//!
//! Per site `j` with letters `(B, A)` (default `(X, Z)`):
//! `B_j = U_j γᵇ_j`, `A_j = U_j γᵃ_j`, `i B_j A_j = i γᵇ_j γᵃ_j`, where
//! `U_j = ∏_{j'<j} i γᵇ_{j'} γᵃ_{j'}` over earlier path positions.
//! A boundary substitution swaps the roles of two letters at one site.

use std::collections::BTreeSet;
use std::fmt;

use log::info;
use serde::{Deserialize, Serialize};

use crate::lattice::{LatticeError, TwistLattice};
use crate::pauli::{Letter, PauliString, Phase};

/// Largest candidate set searched exhaustively by [`reduce_by_stabilizers`].
pub const EXACT_REDUCTION_LIMIT: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    B,
    A,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::B => "b",
            Kind::A => "a",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Swap {
    /// `X ↔ Y`: letters become `B = Y`, `A = Z`, disorder letter `X`.
    XY,
    /// `Z ↔ Y`: letters become `B = X`, `A = Y`, disorder letter `Z`.
    ZY,
}

/// Ordered by path position, then kind (`b` before `a`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MajoranaMode {
    pub position: usize,
    pub kind: Kind,
    pub site: usize,
}

impl MajoranaMode {
    pub fn new(path: &JWPath, site: usize, kind: Kind) -> Self {
        MajoranaMode { position: path.position(site), kind, site }
    }
}

impl fmt::Display for MajoranaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "γ{}_{}", self.kind, self.site)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MajoranaMonomial {
    pub phase: Phase,
    pub factors: Vec<MajoranaMode>,
}

/// Number of inversions, by merge sort.
fn sort_count(v: &mut Vec<MajoranaMode>) -> usize {
    if v.len() < 2 {
        return 0;
    }
    let right = v.split_off(v.len() / 2);
    let mut left = std::mem::take(v);
    let mut right = right;
    let mut inv = sort_count(&mut left) + sort_count(&mut right);
    let (mut i, mut j) = (0, 0);
    v.reserve(left.len() + right.len());
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            inv += left.len() - i;
            v.push(right[j]);
            j += 1;
        } else {
            v.push(left[i]);
            i += 1;
        }
    }
    v.extend_from_slice(&left[i..]);
    v.extend_from_slice(&right[j..]);
    inv
}

impl MajoranaMonomial {
    pub fn one() -> Self {
        MajoranaMonomial { phase: Phase::ONE, factors: Vec::new() }
    }

    pub fn mode(path: &JWPath, site: usize, kind: Kind) -> Self {
        MajoranaMonomial { phase: Phase::ONE, factors: vec![MajoranaMode::new(path, site, kind)] }
    }

    /// `i γ_p γ_q`, canonicalized.
    pub fn bilinear(p: MajoranaMode, q: MajoranaMode) -> Self {
        Self::canonical(Phase::I, vec![p, q])
    }

    /// Sort factors with one sign per transposition and cancel `γ² = 1`.
    pub fn canonical(phase: Phase, mut factors: Vec<MajoranaMode>) -> Self {
        let inv = sort_count(&mut factors);
        let mut phase = phase;
        if inv % 2 == 1 {
            phase = phase.neg();
        }
        let mut out: Vec<MajoranaMode> = Vec::with_capacity(factors.len());
        for f in factors {
            if out.last() == Some(&f) {
                out.pop();
            } else {
                out.push(f);
            }
        }
        MajoranaMonomial { phase, factors: out }
    }

    pub fn multiply(&self, other: &MajoranaMonomial) -> MajoranaMonomial {
        // Both inputs are canonical: count crossings with a merge.
        let (a, b) = (&self.factors, &other.factors);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let mut inv = 0usize;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if b[j] < a[i] {
                inv += a.len() - i;
                out.push(b[j]);
                j += 1;
            } else if a[i] == b[j] {
                // γγ = 1 after moving b[j] past the a's beyond i.
                inv += a.len() - i - 1;
                i += 1;
                j += 1;
            } else {
                out.push(a[i]);
                i += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        let mut phase = self.phase * other.phase;
        if inv % 2 == 1 {
            phase = phase.neg();
        }
        MajoranaMonomial { phase, factors: out }
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    pub fn kinds(&self) -> BTreeSet<Kind> {
        self.factors.iter().map(|m| m.kind).collect()
    }

    /// For a degree-4 monomial, `sign · (iγ₁γ₂)(iγ₃γ₄)` with real `sign`.
    pub fn pair_terms(&self) -> Option<(i8, [(MajoranaMode, MajoranaMode); 2])> {
        if self.factors.len() != 4 {
            return None;
        }
        let sign = self.phase.neg().sign()?;
        let f = &self.factors;
        Some((sign, [(f[0], f[1]), (f[2], f[3])]))
    }
}

impl fmt::Display for MajoranaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["", "i·", "-", "-i·"][self.phase.exponent() as usize])?;
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.factors.iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Path order over all sites plus per-site letter substitutions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JWPath {
    width: usize,
    height: usize,
    order: Vec<usize>,
    position: Vec<usize>,
    swaps: Vec<Option<Swap>>,
}

struct Frame {
    b: Letter,
    a: Letter,
    /// `i·B·A = l_phase · l`.
    l: Letter,
    l_phase: Phase,
}

impl JWPath {
    /// Even rows left to right, odd rows right to left.
    pub fn boustrophedon(width: usize, height: usize) -> Self {
        let mut order = Vec::with_capacity(width * height);
        for y in 0..height {
            if y % 2 == 0 {
                order.extend((0..width).map(|x| y * width + x));
            } else {
                order.extend((0..width).rev().map(|x| y * width + x));
            }
        }
        Self::from_order(width, height, order).expect("serpentine order is a bijection")
    }

    pub fn from_order(width: usize, height: usize, order: Vec<usize>) -> Result<Self, LatticeError> {
        let n = width * height;
        if order.len() != n {
            return Err(LatticeError::InvalidPath(format!("{} positions for {n} sites", order.len())));
        }
        let mut position = vec![usize::MAX; n];
        for (i, &s) in order.iter().enumerate() {
            if s >= n || position[s] != usize::MAX {
                return Err(LatticeError::InvalidPath(format!("site {s} is out of range or repeated")));
            }
            position[s] = i;
        }
        Ok(JWPath { width, height, order, position, swaps: vec![None; n] })
    }

    /// Default serpentine path over `lat` without substitutions.
    pub fn plain(lat: &TwistLattice) -> Self {
        Self::boustrophedon(lat.width(), lat.height())
    }

    /// Serpentine path with a letter swap at every turn site, chosen so the
    /// disorder letter anticommutes with the one boundary face the turn site
    /// does not share with its partner: `X ↔ Y` then `Z ↔ Y` on left turns,
    /// the reverse on right turns.
    pub fn substituted(lat: &TwistLattice) -> Self {
        let mut p = Self::plain(lat);
        for (s, t) in p.turns() {
            let (first, second) = if s % p.width == 0 { (Swap::XY, Swap::ZY) } else { (Swap::ZY, Swap::XY) };
            p.swaps[s] = Some(first);
            p.swaps[t] = Some(second);
        }
        p
    }

    /// Consecutive path sites lying in different rows.
    pub fn turns(&self) -> Vec<(usize, usize)> {
        self.order
            .windows(2)
            .filter(|w| w[0] / self.width != w[1] / self.width)
            .map(|w| (w[0], w[1]))
            .collect()
    }

    pub fn with_swap(mut self, site: usize, swap: Swap) -> Result<Self, LatticeError> {
        let (x, y) = (site % self.width, site / self.width);
        if site >= self.order.len() {
            return Err(LatticeError::OffLattice(site));
        }
        if x != 0 && y != 0 && x + 1 != self.width && y + 1 != self.height {
            return Err(LatticeError::InvalidPath(format!("site {site} is not on the boundary")));
        }
        self.swaps[site] = Some(swap);
        Ok(self)
    }

    pub fn n_sites(&self) -> usize {
        self.order.len()
    }

    pub fn position(&self, site: usize) -> usize {
        self.position[site]
    }

    pub fn site_at(&self, position: usize) -> usize {
        self.order[position]
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn swap(&self, site: usize) -> Option<Swap> {
        self.swaps[site]
    }

    fn frame(&self, site: usize) -> Frame {
        let (b, a) = match self.swaps[site] {
            None => (Letter::X, Letter::Z),
            Some(Swap::XY) => (Letter::Y, Letter::Z),
            Some(Swap::ZY) => (Letter::X, Letter::Y),
        };
        let (ph, l) = Letter::product(b, a);
        Frame { b, a, l: l.expect("distinct letters"), l_phase: Phase::I * ph }
    }

    /// The disorder letter `i·B·A` at `site` as a phased Pauli.
    fn disorder(&self, site: usize) -> PauliString {
        let fr = self.frame(site);
        PauliString::single(site, fr.l).with_phase(fr.l_phase)
    }

    /// Spin form of the letter playing role `kind` at `site`.
    fn letter(&self, site: usize, kind: Kind) -> Letter {
        let fr = self.frame(site);
        match kind {
            Kind::B => fr.b,
            Kind::A => fr.a,
        }
    }
}

/// Exact Majorana image of `p`.
pub fn jw_map(p: &PauliString, path: &JWPath) -> Result<MajoranaMonomial, LatticeError> {
    if let Some(s) = p.max_site() {
        if s >= path.n_sites() {
            return Err(LatticeError::OffLattice(s));
        }
    }
    let mut letters: Vec<(usize, usize, Letter)> = p.support().map(|(s, l)| (path.position(s), s, l)).collect();
    letters.sort();
    let mut out = MajoranaMonomial { phase: p.phase(), factors: Vec::new() };
    for (pos, site, l) in letters {
        let fr = path.frame(site);
        let image = if l == fr.l {
            MajoranaMonomial {
                phase: fr.l_phase.conj() * Phase::I,
                factors: vec![MajoranaMode { position: pos, kind: Kind::B, site }, MajoranaMode {
                    position: pos,
                    kind: Kind::A,
                    site,
                }],
            }
        } else {
            let kind = if l == fr.b { Kind::B } else { Kind::A };
            let mut factors = Vec::with_capacity(2 * pos + 1);
            for q in 0..pos {
                let s = path.site_at(q);
                factors.push(MajoranaMode { position: q, kind: Kind::B, site: s });
                factors.push(MajoranaMode { position: q, kind: Kind::A, site: s });
            }
            factors.push(MajoranaMode { position: pos, kind, site });
            MajoranaMonomial { phase: Phase::from_exponent(pos as i64), factors }
        };
        out = out.multiply(&image);
    }
    Ok(out)
}

/// Spin form of a single Majorana mode: `U_j` times the mode's letter.
pub fn mode_to_spin(m: &MajoranaMode, path: &JWPath) -> PauliString {
    let mut out = PauliString::identity();
    for q in 0..m.position {
        out = out.multiply(&path.disorder(path.site_at(q)));
    }
    out.multiply(&PauliString::single(m.site, path.letter(m.site, m.kind)))
}

/// Inverse JW map of a monomial.
pub fn majorana_to_spin(m: &MajoranaMonomial, path: &JWPath) -> PauliString {
    let mut out = PauliString::identity().with_phase(m.phase);
    for f in &m.factors {
        out = out.multiply(&mode_to_spin(f, path));
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModeClassification {
    pub paired: BTreeSet<MajoranaMode>,
    /// Bulk modes that appear in no plaquette image.
    pub unpaired: BTreeSet<MajoranaMode>,
    /// Boundary modes that appear in no plaquette image.
    pub edge: BTreeSet<MajoranaMode>,
}

pub fn classify_modes(lat: &TwistLattice, path: &JWPath) -> Result<ModeClassification, LatticeError> {
    if path.n_sites() != lat.n_sites() {
        return Err(LatticeError::InvalidPath("path does not cover the lattice".into()));
    }
    let mut used = BTreeSet::new();
    for op in lat.operators() {
        used.extend(jw_map(op, path)?.factors);
    }
    let mut out = ModeClassification::default();
    for s in 0..lat.n_sites() {
        for kind in [Kind::B, Kind::A] {
            let m = MajoranaMode::new(path, s, kind);
            if used.contains(&m) {
                out.paired.insert(m);
            } else if lat.is_boundary(s) {
                out.edge.insert(m);
            } else {
                out.unpaired.insert(m);
            }
        }
    }
    Ok(out)
}

/// Kind of the unpaired mode at a twist site, read off the plaquettes that
/// contain it under the plain path.
pub fn twist_kind(lat: &TwistLattice, site: usize) -> Kind {
    let path = JWPath::plain(lat);
    let mut seen = BTreeSet::new();
    for &id in lat.plaquettes_at(site) {
        let m = jw_map(&lat.operators()[id], &path).expect("plaquette on lattice");
        seen.extend(m.factors.iter().filter(|f| f.site == site).map(|f| f.kind));
    }
    match (seen.contains(&Kind::B), seen.contains(&Kind::A)) {
        (false, true) => Kind::B,
        (true, false) => Kind::A,
        _ => panic!("site {site} does not host exactly one unpaired mode"),
    }
}

/// The pair's two unpaired modes, ordered along `path`.
pub fn twist_modes(lat: &TwistLattice, path: &JWPath, pair: usize) -> Result<(MajoranaMode, MajoranaMode), LatticeError> {
    let (t1, t2) = lat.pair_twists(pair)?;
    let m1 = MajoranaMode::new(path, t1.site, twist_kind(lat, t1.site));
    let m2 = MajoranaMode::new(path, t2.site, twist_kind(lat, t2.site));
    Ok(if m1 < m2 { (m1, m2) } else { (m2, m1) })
}

/// Spin form of `i γ_{t1} γ_{t2}` for the pair, `t1` first along the path.
pub fn parity_operator(lat: &TwistLattice, path: &JWPath, pair: usize) -> Result<PauliString, LatticeError> {
    let (m1, m2) = twist_modes(lat, path, pair)?;
    Ok(majorana_to_spin(&MajoranaMonomial::bilinear(m1, m2), path))
}

/// `true` if support `a` beats `b` in the sorted-site lexicographic order
/// (equal sizes assumed).
fn lex_less(a: &[u64], b: &[u64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        let d = x ^ y;
        if d != 0 {
            return x & (d & d.wrapping_neg()) != 0;
        }
    }
    false
}

struct Packed {
    x: Vec<u64>,
    z: Vec<u64>,
}

impl Packed {
    fn of(p: &PauliString, n: usize) -> Self {
        let (x, z) = p.to_bits(n);
        Packed { x, z }
    }

    fn xor(&mut self, o: &Packed) {
        for (a, b) in self.x.iter_mut().zip(&o.x) {
            *a ^= b;
        }
        for (a, b) in self.z.iter_mut().zip(&o.z) {
            *a ^= b;
        }
    }

    fn support(&self) -> Vec<u64> {
        self.x.iter().zip(&self.z).map(|(a, b)| a | b).collect()
    }

    fn weight(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(a, b)| (a | b).count_ones()).sum()
    }
}

/// Multiply `p` by plaquettes to minimize its weight.
///
/// Candidates are plaquettes touching the bounding box of `p`. Up to
/// [`EXACT_REDUCTION_LIMIT`] candidates are searched exhaustively in Gray-code
/// order; ties go to the lexicographically smallest sorted support, then the
/// smallest X pattern. Larger sets fall back to greedy descent.
pub fn reduce_by_stabilizers(p: &PauliString, lat: &TwistLattice) -> Result<PauliString, LatticeError> {
    lat.check_support(p)?;
    if !lat.commutes_with_all(p) {
        return Err(LatticeError::NotInCommutant(p.to_string()));
    }
    if p.is_identity() {
        return Ok(p.clone());
    }
    let n = lat.n_sites();
    let coords: Vec<_> = p.sites().map(|s| lat.coords(s)).collect();
    let (x0, x1) = (coords.iter().map(|c| c.0).min().unwrap(), coords.iter().map(|c| c.0).max().unwrap());
    let (y0, y1) = (coords.iter().map(|c| c.1).min().unwrap(), coords.iter().map(|c| c.1).max().unwrap());
    let cand: Vec<usize> = lat
        .plaquettes()
        .iter()
        .filter(|pl| {
            pl.sites.iter().any(|&s| {
                let (x, y) = lat.coords(s);
                (x0..=x1).contains(&x) && (y0..=y1).contains(&y)
            })
        })
        .map(|pl| pl.id)
        .collect();

    if cand.len() > EXACT_REDUCTION_LIMIT {
        info!("reduce_by_stabilizers: {} candidates, using greedy descent", cand.len());
        return Ok(greedy_reduce(p, lat));
    }

    let packed: Vec<Packed> = cand.iter().map(|&id| Packed::of(&lat.operators()[id], n)).collect();
    let mut cur = Packed::of(p, n);
    let mut mask = 0u32;
    let mut best = (cur.weight(), cur.support(), cur.x.clone(), 0u32);
    for g in 1u32..(1u32 << cand.len()) {
        let bit = g.trailing_zeros() as usize;
        cur.xor(&packed[bit]);
        mask ^= 1 << bit;
        let w = cur.weight();
        if w > best.0 {
            continue;
        }
        let sup = cur.support();
        let better = w < best.0
            || lex_less(&sup, &best.1)
            || (sup == best.1 && lex_less(&cur.x, &best.2));
        if better {
            best = (w, sup, cur.x.clone(), mask);
        }
    }
    let mut out = p.clone();
    for (i, &id) in cand.iter().enumerate() {
        if best.3 >> i & 1 == 1 {
            out = out.multiply(&lat.operators()[id]);
        }
    }
    Ok(out)
}

fn greedy_reduce(p: &PauliString, lat: &TwistLattice) -> PauliString {
    let mut cur = p.clone();
    loop {
        let touched: BTreeSet<usize> = cur.sites().flat_map(|s| lat.plaquettes_at(s).iter().copied()).collect();
        let mut best: Option<PauliString> = None;
        for id in touched {
            let q = cur.multiply(&lat.operators()[id]);
            if q.weight() < best.as_ref().map_or(cur.weight(), |b| b.weight()) {
                best = Some(q);
            }
        }
        match best {
            Some(q) => cur = q,
            None => return cur,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_lattice;

    #[test]
    fn y_maps_to_i_gb_ga() {
        let path = JWPath::boustrophedon(4, 4);
        let m = jw_map(&PauliString::single(5, Letter::Y), &path).unwrap();
        let p = path.position(5);
        assert_eq!(m.phase, Phase::I);
        assert_eq!(m.factors, vec![
            MajoranaMode { position: p, kind: Kind::B, site: 5 },
            MajoranaMode { position: p, kind: Kind::A, site: 5 }
        ]);
    }

    #[test]
    fn first_site_x_is_bare_gamma_b() {
        let path = JWPath::boustrophedon(4, 4);
        let m = jw_map(&PauliString::single(0, Letter::X), &path).unwrap();
        assert_eq!(m, MajoranaMonomial::mode(&path, 0, Kind::B));
    }

    #[test]
    fn round_trip_on_single_modes() {
        let lat = build_lattice(6, 4, &[]).unwrap();
        let path = JWPath::substituted(&lat);
        for s in 0..24 {
            for k in [Kind::B, Kind::A] {
                let m = MajoranaMonomial::mode(&path, s, k);
                assert_eq!(jw_map(&majorana_to_spin(&m, &path), &path).unwrap(), m);
            }
        }
    }

    #[test]
    fn greedy_never_grows() {
        let lat = build_lattice(8, 6, &[]).unwrap();
        let p = lat.operators()[3].multiply(&lat.operators()[10]);
        assert!(greedy_reduce(&p, &lat).is_identity());
    }
}
