//! Four-Majorana-per-site oracle for the projective construction.
//!
//! Site `n` carries fermion modes `ψ_α = (γᵃ + iγᵈ)/2` on qubit `2n` and
//! `ψ_β = (γᶜ + iγᵇ)/2` on qubit `2n+1`, with Jordan-Wigner strings in
//! site-major order. Every Majorana monomial is therefore a phased Pauli
//! string on `2N` qubits, and operators are kept as sums of such strings.
//! The even-parity sector of a site is spanned by `|00⟩ = ⇑` and `|11⟩ = ⇓`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::dense::pauli_matrix;
use crate::jw::{majorana_to_spin, JWPath, Kind, MajoranaMonomial};
use crate::pauli::{Letter, PauliString, Phase};

pub const MAX_SITES: usize = 5;
const TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProjectionError {
    #[error("expected {expected} sites, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("{0} sites exceeds the oracle limit of {MAX_SITES}")]
    TooLarge(usize),
    #[error("operator leaves the even-parity subspace (commutator norm {0:.3e})")]
    LeavesEvenSector(f64),
    #[error("link chain does not connect the endpoints")]
    Disconnected,
    #[error("site {0} outside the cluster")]
    OffCluster(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    A,
    B,
    C,
    D,
}

/// Majorana `γ^f_n` on a cluster of `n_sites` sites.
pub fn majorana(n_sites: usize, site: usize, f: Flavor) -> PauliString {
    assert!(site < n_sites);
    let mut p = PauliString::from_letters((0..2 * site).map(|q| (q, Letter::Z)));
    let (a, b) = (2 * site, 2 * site + 1);
    let tail = match f {
        Flavor::A => PauliString::single(a, Letter::X),
        Flavor::D => PauliString::single(a, Letter::Y),
        Flavor::C => PauliString::from_letters([(a, Letter::Z), (b, Letter::X)]),
        Flavor::B => PauliString::from_letters([(a, Letter::Z), (b, Letter::Y)]),
    };
    p = p.multiply(&tail);
    p
}

/// `i γ^f_m γ^g_n`.
pub fn bilinear(n_sites: usize, (m, f): (usize, Flavor), (n, g): (usize, Flavor)) -> PauliString {
    let p = majorana(n_sites, m, f).multiply(&majorana(n_sites, n, g));
    let ph = p.phase() * Phase::I;
    p.with_phase(ph)
}

/// On-site parity `D_n = γᵃγᵇγᶜγᵈ`.
pub fn site_parity(n_sites: usize, n: usize) -> PauliString {
    [Flavor::A, Flavor::B, Flavor::C, Flavor::D]
        .iter()
        .fold(PauliString::identity(), |acc, &f| acc.multiply(&majorana(n_sites, n, f)))
}

/// A complex combination of Pauli strings on the `2N`-qubit occupation space.
#[derive(Clone, Debug, PartialEq)]
pub struct FockOperator {
    n_sites: usize,
    terms: BTreeMap<PauliString, C64>,
}

impl FockOperator {
    pub fn from_pauli(n_sites: usize, p: &PauliString) -> Result<Self, ProjectionError> {
        if n_sites > MAX_SITES {
            return Err(ProjectionError::TooLarge(n_sites));
        }
        let mut terms = BTreeMap::new();
        terms.insert(p.unsigned(), p.phase().to_complex());
        Ok(FockOperator { n_sites, terms })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n_sites)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PauliString, &C64)> {
        self.terms.iter()
    }

    fn insert(terms: &mut BTreeMap<PauliString, C64>, p: PauliString, c: C64) {
        let key = p.unsigned();
        let c = c * p.phase().to_complex();
        let e = terms.entry(key).or_insert(C64::new(0.0, 0.0));
        *e += c;
    }

    fn pruned(n_sites: usize, terms: BTreeMap<PauliString, C64>) -> Self {
        let terms = terms.into_iter().filter(|(_, c)| c.norm() > 1e-15).collect();
        FockOperator { n_sites, terms }
    }

    pub fn add(&self, o: &FockOperator) -> FockOperator {
        let mut terms = self.terms.clone();
        for (p, c) in &o.terms {
            Self::insert(&mut terms, p.clone(), *c);
        }
        Self::pruned(self.n_sites, terms)
    }

    pub fn scale(&self, s: C64) -> FockOperator {
        FockOperator { n_sites: self.n_sites, terms: self.terms.iter().map(|(p, c)| (p.clone(), c * s)).collect() }
    }

    pub fn multiply(&self, o: &FockOperator) -> FockOperator {
        let mut terms = BTreeMap::new();
        for (p, c) in &self.terms {
            for (q, d) in &o.terms {
                Self::insert(&mut terms, p.multiply(q), c * d);
            }
        }
        Self::pruned(self.n_sites, terms)
    }

    /// Normalized Frobenius norm of `[self, D_n]`, maximized over sites.
    pub fn parity_violation(&self) -> f64 {
        (0..self.n_sites)
            .map(|n| {
                let d = site_parity(self.n_sites, n);
                self.terms
                    .iter()
                    .filter(|(p, _)| !p.commutes(&d))
                    .map(|(_, c)| 4.0 * c.norm_sqr())
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Full `4^N × 4^N` matrix.
    pub fn to_dense(&self) -> DMatrix<C64> {
        let nq = 2 * self.n_sites;
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (p, c) in &self.terms {
            m += pauli_matrix(p, nq) * *c;
        }
        m
    }
}

/// Even-sector index `s` (bit `n` = spin of site `n`) to occupation index.
fn embed(n_sites: usize, s: usize) -> usize {
    (0..n_sites).filter(|n| s >> n & 1 == 1).map(|n| 0b11 << (2 * n)).sum()
}

/// Compression of `op` to the `D_n = +1` sector in the `⇑/⇓` basis.
pub fn project_to_spins(op: &FockOperator) -> Result<DMatrix<C64>, ProjectionError> {
    let v = op.parity_violation();
    if v > TOL {
        return Err(ProjectionError::LeavesEvenSector(v));
    }
    let n = op.n_sites;
    let dim = 1 << n;
    let mut index = BTreeMap::new();
    for s in 0..dim {
        index.insert(embed(n, s), s);
    }
    let mut m = DMatrix::zeros(dim, dim);
    for (p, c) in &op.terms {
        let (mut xm, mut zm, mut ny) = (0usize, 0usize, 0i64);
        for (q, l) in p.support() {
            let (x, z) = l.bits();
            xm |= (x as usize) << q;
            zm |= (z as usize) << q;
            ny += (x && z) as i64;
        }
        let ph = Phase::from_exponent(ny).to_complex() * c;
        for s in 0..dim {
            let i = embed(n, s);
            if let Some(&r) = index.get(&(i ^ xm)) {
                let sgn = if (i & zm).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                m[(r, s)] += ph * sgn;
            }
        }
    }
    Ok(m)
}

/// Spin plaquette `X Z X Z (Y)` on the listed cluster sites, as a dense matrix.
pub fn spin_plaquette(n_sites: usize, sites: &[usize]) -> DMatrix<C64> {
    const PAT: [Letter; 5] = [Letter::X, Letter::Z, Letter::X, Letter::Z, Letter::Y];
    pauli_matrix(&PauliString::from_letters(sites.iter().copied().zip(PAT)), n_sites)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaquetteShape {
    Square,
    Pentagon,
}

/// Majorana plaquette as a product of link terms. Sites run BL, TL, TR, BR
/// and, for the pentagon, the twist site between BR and BL.
pub fn build_majorana_plaquette(kind: PlaquetteShape, sites: &[usize]) -> Result<FockOperator, ProjectionError> {
    use Flavor::*;
    let expected = match kind {
        PlaquetteShape::Square => 4,
        PlaquetteShape::Pentagon => 5,
    };
    if sites.len() != expected {
        return Err(ProjectionError::Arity { expected, got: sites.len() });
    }
    let n = sites.iter().copied().max().unwrap() + 1;
    if n > MAX_SITES {
        return Err(ProjectionError::TooLarge(n));
    }
    let s = |k: usize| sites[k - 1];
    let mut links = vec![
        bilinear(n, (s(1), B), (s(2), D)),
        bilinear(n, (s(2), A), (s(3), C)),
        bilinear(n, (s(3), D), (s(4), B)),
    ];
    if kind == PlaquetteShape::Square {
        links.push(bilinear(n, (s(4), C), (s(1), A)));
    } else {
        links.push(bilinear(n, (s(4), C), (s(5), A)));
        links.push(bilinear(n, (s(5), C), (s(1), A)));
    }
    let p = links.iter().fold(PauliString::identity(), |acc, l| acc.multiply(l));
    FockOperator::from_pauli(n, &p)
}

/// Link operator: `u^{ac}_{mn} = iγᵃ_mγᶜ_n` or `u^{bd}_{mn} = iγᵇ_mγᵈ_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    Ac(usize, usize),
    Bd(usize, usize),
}

impl Link {
    pub fn ends(self) -> (usize, usize) {
        match self {
            Link::Ac(m, n) | Link::Bd(m, n) => (m, n),
        }
    }

    pub fn operator(self, n_sites: usize) -> PauliString {
        match self {
            Link::Ac(m, n) => bilinear(n_sites, (m, Flavor::A), (n, Flavor::C)),
            Link::Bd(m, n) => bilinear(n_sites, (m, Flavor::B), (n, Flavor::D)),
        }
    }
}

/// A rectangular mini-lattice of `width × height ≤ 5` sites, ids `y·width + x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub width: usize,
    pub height: usize,
}

impl Cluster {
    pub fn n_sites(&self) -> usize {
        self.width * self.height
    }
}

/// `P' = iγᵇ_s γᵈ_e ∏ links`.
pub fn string_parity(cluster: Cluster, chain: &[Link], (s, e): (usize, usize)) -> Result<FockOperator, ProjectionError> {
    let n = cluster.n_sites();
    if n > MAX_SITES {
        return Err(ProjectionError::TooLarge(n));
    }
    for l in chain {
        let (a, b) = l.ends();
        if a >= n || b >= n {
            return Err(ProjectionError::OffCluster(a.max(b)));
        }
    }
    let mut p = bilinear(n, (s, Flavor::B), (e, Flavor::D));
    for l in chain {
        p = p.multiply(&l.operator(n));
    }
    FockOperator::from_pauli(n, &p)
}

/// `true` iff the string-dressed parity is physical and projects onto the
/// Jordan-Wigner parity `iγᵃ_s γᵇ_e` of the cluster's serpentine path.
pub fn verify_string_parity(cluster: Cluster, chain: &[Link], (s, e): (usize, usize)) -> Result<bool, ProjectionError> {
    let n = cluster.n_sites();
    if s >= n || e >= n {
        return Err(ProjectionError::OffCluster(s.max(e)));
    }
    if chain.is_empty() {
        if s == e {
            return Err(ProjectionError::Disconnected);
        }
        return Ok(project_to_spins(&string_parity(cluster, chain, (s, e))?).is_ok());
    }
    let mut reach = vec![s];
    let mut frontier = vec![s];
    while let Some(v) = frontier.pop() {
        for l in chain {
            let (a, b) = l.ends();
            for (x, y) in [(a, b), (b, a)] {
                if x == v && !reach.contains(&y) {
                    reach.push(y);
                    frontier.push(y);
                }
            }
        }
    }
    if !reach.contains(&e) {
        return Err(ProjectionError::Disconnected);
    }
    let Ok(proj) = project_to_spins(&string_parity(cluster, chain, (s, e))?) else {
        return Ok(false);
    };
    let path = JWPath::boustrophedon(cluster.width, cluster.height);
    let (ks, ke) = if path.position(s) < path.position(e) { (Kind::A, Kind::B) } else { (Kind::B, Kind::A) };
    let m = MajoranaMonomial::bilinear(
        crate::jw::MajoranaMode::new(&path, s, ks),
        crate::jw::MajoranaMode::new(&path, e, ke),
    );
    let jw = pauli_matrix(&majorana_to_spin(&m, &path), n);
    Ok((proj - jw).norm() < TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Letter;

    #[test]
    fn square_and_pentagon_project_to_spin_plaquettes() {
        let sq = build_majorana_plaquette(PlaquetteShape::Square, &[0, 2, 3, 1]).unwrap();
        let m = project_to_spins(&sq).unwrap();
        assert!((m - spin_plaquette(4, &[0, 1, 3, 2])).norm() < 1e-12);
        let pe = build_majorana_plaquette(PlaquetteShape::Pentagon, &[0, 2, 3, 1, 4]).unwrap();
        let m = project_to_spins(&pe).unwrap();
        assert!((m - spin_plaquette(5, &[0, 1, 3, 2, 4])).norm() < 1e-12);
    }

    #[test]
    fn onsite_bilinear_is_minus_sigma_x() {
        let op = FockOperator::from_pauli(1, &bilinear(1, (0, Flavor::A), (0, Flavor::B))).unwrap();
        let m = project_to_spins(&op).unwrap();
        let x = pauli_matrix(&PauliString::single(0, Letter::X), 1);
        assert!((m + x).norm() < 1e-12);
    }

    #[test]
    fn single_majorana_leaves_sector() {
        let op = FockOperator::from_pauli(2, &majorana(2, 0, Flavor::C)).unwrap();
        assert!(matches!(project_to_spins(&op), Err(ProjectionError::LeavesEvenSector(_))));
    }

    #[test]
    fn straight_chain_matches_jw() {
        let c = Cluster { width: 5, height: 1 };
        let ch = [Link::Ac(0, 1), Link::Ac(1, 2), Link::Ac(2, 3)];
        assert_eq!(verify_string_parity(c, &ch, (0, 3)), Ok(true));
        assert_eq!(verify_string_parity(c, &ch[..2], (0, 3)), Err(ProjectionError::Disconnected));
        assert_eq!(verify_string_parity(c, &[], (0, 3)), Ok(false));
    }
}
