//! Planar surface-code lattice with twist-defect pairs.
//!
//! Sites live on a `width × height` grid with id `y * width + x`. A face
//! `(x, y)` has corners BL `(x, y)`, BR `(x+1, y)`, TR `(x+1, y+1)` and
//! TL `(x, y+1)` and carries the operator `X_BL Z_BR X_TR Z_TL`.
//!
//! A dislocation segment `(row, c0, c1)` removes the faces `(c0..=c1, row)`
//! and re-stitches the strip with sheared parallelograms and two pentagons.
//! The pentagons host the twists at `(c0+1, row)` and `(c1, row+1)`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{symplectic, Rref};
use crate::jw::{self, JWPath};
use crate::pauli::{Letter, PauliString};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("lattice {width}x{height} is too small (need at least 4x4)")]
    Size { width: usize, height: usize },
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("unknown plaquette id {0}")]
    UnknownPlaquette(usize),
    #[error("unknown twist pair {0}")]
    UnknownPair(usize),
    #[error("site {0} is not on the lattice")]
    OffLattice(usize),
    #[error("malformed lattice description: {0}")]
    Parse(String),
    #[error("operator {0} does not commute with every plaquette")]
    NotInCommutant(String),
    #[error("invalid Jordan-Wigner path: {0}")]
    InvalidPath(String),
}

/// Horizontal dislocation between columns `col_start` and `col_end` of face row `row`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Segment {
    pub row: usize,
    pub col_start: usize,
    pub col_end: usize,
}

impl Segment {
    pub fn new(row: usize, col_start: usize, col_end: usize) -> Self {
        Segment { row, col_start, col_end }
    }
}

/// Structured lattice description; round-trips through TOML or JSON.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub width: usize,
    pub height: usize,
    #[serde(default)]
    pub segments: Vec<Segment>,
}

impl LatticeSpec {
    pub fn new(width: usize, height: usize, segments: Vec<Segment>) -> Self {
        LatticeSpec { width, height, segments }
    }

    pub fn from_toml_str(s: &str) -> Result<Self, LatticeError> {
        toml::from_str(s).map_err(|e| LatticeError::Parse(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("lattice spec serializes")
    }

    pub fn build(&self) -> Result<TwistLattice, LatticeError> {
        build_lattice(self.width, self.height, &self.segments)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PlaquetteKind {
    Square,
    Pentagon,
}

/// Which Majorana kind the plaquette pairs under the default path:
/// clockwise faces pair `b` modes, counterclockwise faces pair `a` modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChargeColor {
    Dark,
    Light,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaquette {
    pub id: usize,
    pub kind: PlaquetteKind,
    /// Corners in operator order: letters X, Z, X, Z and, for pentagons, Y last.
    pub sites: Vec<usize>,
    pub orientation: Orientation,
    /// Face coordinate for unmodified squares.
    pub face: Option<(usize, usize)>,
    /// Segment index for faces built by a dislocation.
    pub segment: Option<usize>,
}

impl Plaquette {
    pub fn letters(&self) -> impl Iterator<Item = (usize, Letter)> + '_ {
        const PAT: [Letter; 5] = [Letter::X, Letter::Z, Letter::X, Letter::Z, Letter::Y];
        self.sites.iter().copied().zip(PAT)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistDefect {
    pub id: usize,
    pub host: usize,
    pub site: usize,
    pub partner: usize,
    pub pair: usize,
}

#[derive(Clone, Debug)]
pub struct TwistLattice {
    spec: LatticeSpec,
    plaquettes: Vec<Plaquette>,
    operators: Vec<PauliString>,
    twists: Vec<TwistDefect>,
    coloring: BTreeMap<usize, ChargeColor>,
    by_site: Vec<Vec<usize>>,
}

fn check_segment(w: usize, h: usize, s: &Segment) -> Result<(), LatticeError> {
    if s.col_end < s.col_start + 2 {
        return Err(LatticeError::Geometry(format!(
            "segment {s:?} spans fewer than three faces"
        )));
    }
    if s.row < 1 || s.row + 3 > h || s.col_start < 1 || s.col_end + 3 > w {
        return Err(LatticeError::Geometry(format!("segment {s:?} touches the boundary")));
    }
    Ok(())
}

/// Build the lattice; see the module docs for the geometry.
pub fn build_lattice(width: usize, height: usize, segments: &[Segment]) -> Result<TwistLattice, LatticeError> {
    if width < 4 || height < 4 {
        return Err(LatticeError::Size { width, height });
    }
    let sid = |x: usize, y: usize| y * width + x;
    let mut removed = BTreeSet::new();
    let mut claimed: BTreeMap<usize, usize> = BTreeMap::new();
    for (k, s) in segments.iter().enumerate() {
        check_segment(width, height, s)?;
        for x in s.col_start..=s.col_end {
            removed.insert((x, s.row));
        }
        for y in s.row..=s.row + 1 {
            for x in s.col_start..=s.col_end + 1 {
                if let Some(j) = claimed.insert(sid(x, y), k) {
                    return Err(LatticeError::Geometry(format!("segments {j} and {k} overlap")));
                }
            }
        }
    }

    let orient = |y: usize| if y % 2 == 1 { Orientation::Clockwise } else { Orientation::CounterClockwise };
    let mut plaquettes = Vec::new();
    for y in 0..height - 1 {
        for x in 0..width - 1 {
            if removed.contains(&(x, y)) {
                continue;
            }
            plaquettes.push(Plaquette {
                id: plaquettes.len(),
                kind: PlaquetteKind::Square,
                sites: vec![sid(x, y), sid(x + 1, y), sid(x + 1, y + 1), sid(x, y + 1)],
                orientation: orient(y),
                face: Some((x, y)),
                segment: None,
            });
        }
    }

    let mut twists = Vec::new();
    for (k, s) in segments.iter().enumerate() {
        let (r, c0, c1) = (s.row, s.col_start, s.col_end);
        for x in c0 + 1..c1 - 1 {
            plaquettes.push(Plaquette {
                id: plaquettes.len(),
                kind: PlaquetteKind::Square,
                sites: vec![sid(x + 1, r), sid(x + 2, r), sid(x + 1, r + 1), sid(x, r + 1)],
                orientation: orient(r),
                face: None,
                segment: Some(k),
            });
        }
        let left = vec![sid(c0, r), sid(c0 + 2, r), sid(c0 + 1, r + 1), sid(c0, r + 1), sid(c0 + 1, r)];
        let right = vec![sid(c1, r), sid(c1 + 1, r), sid(c1 + 1, r + 1), sid(c1 - 1, r + 1), sid(c1, r + 1)];
        for sites in [left, right] {
            let id = plaquettes.len();
            let t = twists.len();
            twists.push(TwistDefect { id: t, host: id, site: sites[4], partner: t ^ 1, pair: k });
            plaquettes.push(Plaquette {
                id,
                kind: PlaquetteKind::Pentagon,
                sites,
                orientation: orient(r),
                face: None,
                segment: Some(k),
            });
        }
    }

    let operators: Vec<PauliString> = plaquettes.iter().map(|p| PauliString::from_letters(p.letters())).collect();
    let n = width * height;
    let mut by_site = vec![Vec::new(); n];
    for p in &plaquettes {
        for &s in &p.sites {
            by_site[s].push(p.id);
        }
    }
    for (i, a) in operators.iter().enumerate() {
        for b in &operators[i + 1..] {
            if !a.commutes(b) {
                return Err(LatticeError::Geometry(format!("plaquettes {a} and {b} anticommute")));
            }
        }
    }
    let gens: Vec<_> = operators.iter().map(|p| symplectic(p, n)).collect();
    if Rref::new(2 * n, &gens).rank() != gens.len() {
        return Err(LatticeError::Geometry("plaquette operators are dependent".into()));
    }

    let coloring = plaquettes
        .iter()
        .filter_map(|p| p.face.map(|(x, y)| (p.id, if (x + y) % 2 == 0 { ChargeColor::Dark } else { ChargeColor::Light })))
        .collect();

    Ok(TwistLattice {
        spec: LatticeSpec::new(width, height, segments.to_vec()),
        plaquettes,
        operators,
        twists,
        coloring,
        by_site,
    })
}

impl TwistLattice {
    pub fn spec(&self) -> &LatticeSpec {
        &self.spec
    }

    pub fn width(&self) -> usize {
        self.spec.width
    }

    pub fn height(&self) -> usize {
        self.spec.height
    }

    pub fn n_sites(&self) -> usize {
        self.spec.width * self.spec.height
    }

    pub fn site(&self, x: usize, y: usize) -> usize {
        assert!(x < self.width() && y < self.height());
        y * self.width() + x
    }

    pub fn coords(&self, site: usize) -> (usize, usize) {
        (site % self.width(), site / self.width())
    }

    pub fn is_boundary(&self, site: usize) -> bool {
        let (x, y) = self.coords(site);
        x == 0 || y == 0 || x + 1 == self.width() || y + 1 == self.height()
    }

    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    pub fn operators(&self) -> &[PauliString] {
        &self.operators
    }

    pub fn twists(&self) -> &[TwistDefect] {
        &self.twists
    }

    pub fn n_pairs(&self) -> usize {
        self.spec.segments.len()
    }

    /// The two twists of `pair`, in creation order.
    pub fn pair_twists(&self, pair: usize) -> Result<(&TwistDefect, &TwistDefect), LatticeError> {
        if pair >= self.n_pairs() {
            return Err(LatticeError::UnknownPair(pair));
        }
        Ok((&self.twists[2 * pair], &self.twists[2 * pair + 1]))
    }

    pub fn coloring(&self) -> &BTreeMap<usize, ChargeColor> {
        &self.coloring
    }

    pub fn plaquettes_at(&self, site: usize) -> &[usize] {
        &self.by_site[site]
    }

    /// Unmodified square at face `(x, y)`, if present.
    pub fn face_id(&self, x: usize, y: usize) -> Option<usize> {
        if x + 1 >= self.width() || y + 1 >= self.height() {
            return None;
        }
        let s = self.site(x, y);
        self.by_site[s].iter().copied().find(|&id| self.plaquettes[id].face == Some((x, y)))
    }

    pub fn plaquette_operator(&self, id: usize) -> Result<&PauliString, LatticeError> {
        self.operators.get(id).ok_or(LatticeError::UnknownPlaquette(id))
    }

    pub fn check_support(&self, p: &PauliString) -> Result<(), LatticeError> {
        match p.max_site() {
            Some(s) if s >= self.n_sites() => Err(LatticeError::OffLattice(s)),
            _ => Ok(()),
        }
    }

    /// Plaquettes whose operators anticommute with `error`.
    pub fn excitations_of(&self, error: &PauliString) -> Result<BTreeSet<usize>, LatticeError> {
        self.check_support(error)?;
        let touched: BTreeSet<usize> = error.sites().flat_map(|s| self.by_site[s].iter().copied()).collect();
        Ok(touched.into_iter().filter(|&id| !self.operators[id].commutes(error)).collect())
    }

    pub fn commutes_with_all(&self, p: &PauliString) -> bool {
        self.excitations_of(p).map(|e| e.is_empty()).unwrap_or(false)
    }

    /// GF(2) row-reduction of the plaquette set over `[x | z]` vectors.
    pub fn stabilizer_rref(&self) -> Rref {
        let n = self.n_sites();
        let gens: Vec<_> = self.operators.iter().map(|p| symplectic(p, n)).collect();
        Rref::new(2 * n, &gens)
    }

    pub fn in_stabilizer_group(&self, p: &PauliString) -> bool {
        self.stabilizer_rref().contains(&symplectic(p, self.n_sites()))
    }

    /// Number of encoded qubits, `sites - rank(plaquettes)`.
    pub fn logical_count(&self) -> usize {
        self.n_sites() - self.stabilizer_rref().rank()
    }

    /// `(Z_logical, X_logical)` of a twist pair. `Z_logical` is the reduced
    /// spin form of the pair's Majorana parity; `X_logical` the reduced spin
    /// form of the first twist's unpaired Majorana.
    pub fn twist_logicals(&self, pair: usize) -> Result<(PauliString, PauliString), LatticeError> {
        let (t1, _) = self.pair_twists(pair)?;
        let path = JWPath::substituted(self);
        let z = jw::parity_operator(self, &path, pair)?;
        let z = jw::reduce_by_stabilizers(&z, self).expect("parity commutes with the plaquettes");
        let kind = jw::twist_kind(self, t1.site);
        let x = jw::majorana_to_spin(&jw::MajoranaMonomial::mode(&path, t1.site, kind), &path);
        let x = jw::reduce_by_stabilizers(&x, self).expect("unpaired mode commutes with the plaquettes");
        Ok((z, x))
    }
}
