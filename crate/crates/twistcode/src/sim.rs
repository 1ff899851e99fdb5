//! Stabilizer simulation of a twisted code: ground-state preparation, Pauli
//! measurements and the two pair-parity schemes (single-site readout and hole
//! braiding).

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{pauli_from_symplectic, symplectic, symplectic_dual, BitRow, Rref};
use crate::jw::{self, JWPath, MajoranaMonomial};
use crate::lattice::{LatticeError, LatticeSpec, PlaquetteKind, TwistLattice};
use crate::pauli::{Letter, PauliString, Phase};
use crate::tableau::{Tableau, TableauError};
use crate::SeedStream;

pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Tableau(#[from] TableauError),
    #[error("operator {0} does not commute with the plaquettes")]
    NotLogical(String),
    #[error("invalid loop: {0}")]
    Loop(String),
    #[error("snapshot: {0}")]
    Snapshot(String),
}

/// Per-lattice data shared by every simulation instance.
#[derive(Debug)]
struct Code {
    lat: TwistLattice,
    /// Spin images of the unpaired twist Majoranas, in path order.
    majoranas: Vec<PauliString>,
    /// Twist ids in path order.
    twist_order: Vec<usize>,
    /// `E_k`: anticommutes with plaquette `k` only, commutes with every
    /// twist Majorana.
    pure_errors: Vec<PauliString>,
}

impl Code {
    fn new(lat: TwistLattice) -> Result<Self, SimError> {
        let n = lat.n_sites();
        let path = JWPath::substituted(&lat);
        let mut twist_order: Vec<usize> = (0..lat.twists().len()).collect();
        twist_order.sort_by_key(|&t| path.position(lat.twists()[t].site));
        let majoranas: Vec<PauliString> = twist_order
            .iter()
            .map(|&t| {
                let site = lat.twists()[t].site;
                let m = MajoranaMonomial::mode(&path, site, jw::twist_kind(&lat, site));
                jw::majorana_to_spin(&m, &path)
            })
            .collect();
        let rows: Vec<BitRow> = lat.operators().iter().chain(&majoranas).map(|p| symplectic_dual(p, n)).collect();
        let rref = Rref::new(2 * n, &rows);
        if rref.rank() != rows.len() {
            return Err(SimError::Lattice(LatticeError::Geometry("twist Majoranas depend on the plaquettes".into())));
        }
        let pure_errors = (0..lat.operators().len())
            .map(|k| pauli_from_symplectic(&rref.solve_dot(&BitRow::from_indices(rows.len(), [k])), n))
            .collect();
        Ok(Code { lat, majoranas, twist_order, pure_errors })
    }
}

/// Outcome of a single-site parity readout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectReport {
    pub outcome: i8,
    /// Plaquette signs before the readout (`-1` marks a pre-existing error).
    pub syndrome_before: BTreeMap<usize, i8>,
    /// Signs of the plaquettes left enforced during the readout, afterwards.
    pub syndrome_after: BTreeMap<usize, i8>,
    pub disabled: Vec<usize>,
    pub error_detected: bool,
}

/// Two disabled plaquettes forming a measurement qubit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HolePair {
    pub moving: usize,
    pub fixed: usize,
    /// Single-site operator joining the holes.
    pub z_logical: PauliString,
    /// The moving hole's disabled plaquette.
    pub x_logical: PauliString,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HoleReport {
    pub outcome: i8,
    pub holes: HolePair,
    pub z_before: i8,
    pub z_after: i8,
    pub hops: usize,
    pub encloses_pair: bool,
}

/// A stabilizer state on a [`TwistLattice`] with an active plaquette set and
/// its own random stream.
#[derive(Clone, Debug)]
pub struct CodeState {
    code: Arc<Code>,
    tab: Tableau,
    active: Vec<bool>,
    rng: SeedStream,
    measurements: usize,
}

#[derive(Serialize, Deserialize)]
struct Snapshot {
    version: u32,
    spec: LatticeSpec,
    tableau: Tableau,
    active: Vec<bool>,
    rng_seed: [u8; 32],
    rng_stream: u64,
    rng_word_pos: String,
    measurements: usize,
}

impl CodeState {
    /// Ground state with every plaquette at `+1`.
    pub fn init_ground(lat: &TwistLattice, seed: u64) -> Result<Self, SimError> {
        Self::init_ground_with(lat, crate::seed_stream(seed))
    }

    pub fn init_ground_with(lat: &TwistLattice, rng: SeedStream) -> Result<Self, SimError> {
        let code = Arc::new(Code::new(lat.clone())?);
        let mut st = CodeState {
            tab: Tableau::new(lat.n_sites()),
            active: vec![true; lat.operators().len()],
            code,
            rng,
            measurements: 0,
        };
        for k in 0..st.active.len() {
            st.enforce(k)?;
        }
        Ok(st)
    }

    /// Fresh state sharing this state's precomputed code data.
    pub fn reinit(&self, rng: SeedStream) -> Result<Self, SimError> {
        let mut st = CodeState {
            code: self.code.clone(),
            tab: Tableau::new(self.code.lat.n_sites()),
            active: vec![true; self.active.len()],
            rng,
            measurements: 0,
        };
        for k in 0..st.active.len() {
            st.enforce(k)?;
        }
        Ok(st)
    }

    /// Measure plaquette `k`, post-selecting `+1` when the outcome is random
    /// and correcting with its pure error otherwise.
    fn enforce(&mut self, k: usize) -> Result<(), SimError> {
        let op = self.code.lat.operators()[k].clone();
        let o = self.tab.measure(&op, &mut self.rng, if self.tab.expectation(&op)?.is_none() { Some(1) } else { None })?;
        if o.value == -1 {
            self.tab.apply_pauli(&self.code.pure_errors[k])?;
        }
        Ok(())
    }

    pub fn lattice(&self) -> &TwistLattice {
        &self.code.lat
    }

    pub fn tableau(&self) -> &Tableau {
        &self.tab
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn measurement_count(&self) -> usize {
        self.measurements
    }

    /// Spin images of the twist Majoranas, ordered along the path.
    pub fn twist_majoranas(&self) -> &[PauliString] {
        &self.code.majoranas
    }

    /// Twist ids in the same order as [`Self::twist_majoranas`].
    pub fn twist_order(&self) -> &[usize] {
        &self.code.twist_order
    }

    pub fn pure_error(&self, k: usize) -> Result<&PauliString, SimError> {
        self.code.pure_errors.get(k).ok_or(SimError::Lattice(LatticeError::UnknownPlaquette(k)))
    }

    /// `i γ_a γ_b` for twist Majoranas in path order, reduced by plaquettes.
    pub fn majorana_bilinear(&self, a: usize, b: usize) -> Result<PauliString, SimError> {
        let m = &self.code.majoranas;
        if a >= m.len() || b >= m.len() || a == b {
            return Err(SimError::Lattice(LatticeError::UnknownPair(a.max(b))));
        }
        let p = m[a].multiply(&m[b]);
        let ph = p.phase() * Phase::I;
        let p = p.with_phase(ph);
        Ok(jw::reduce_by_stabilizers(&p, &self.code.lat)?)
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<(), SimError> {
        self.code.lat.check_support(p)?;
        Ok(self.tab.apply_pauli(p)?)
    }

    /// `Some(±1)` when the state is an eigenstate of `p`.
    pub fn expectation(&self, p: &PauliString) -> Result<Option<i8>, SimError> {
        self.code.lat.check_support(p)?;
        Ok(self.tab.expectation(p)?)
    }

    pub fn measure_pauli(&mut self, p: &PauliString) -> Result<i8, SimError> {
        self.code.lat.check_support(p)?;
        self.measurements += 1;
        Ok(self.tab.measure(p, &mut self.rng, None)?.value)
    }

    /// Measurement with a requested outcome; fails if it has zero probability.
    pub fn measure_pauli_forced(&mut self, p: &PauliString, outcome: i8) -> Result<i8, SimError> {
        self.code.lat.check_support(p)?;
        self.measurements += 1;
        Ok(self.tab.measure(p, &mut self.rng, Some(outcome))?.value)
    }

    fn signs(&self, ids: impl IntoIterator<Item = usize>) -> Result<BTreeMap<usize, i8>, SimError> {
        let mut out = BTreeMap::new();
        for k in ids {
            let v = self.tab.expectation(&self.code.lat.operators()[k])?;
            out.insert(k, v.unwrap_or(0));
        }
        Ok(out)
    }

    /// Read out `r` by measuring each of its site factors, with the
    /// plaquettes they disturb switched off and then re-measured.
    pub fn measure_parity_direct(&mut self, r: &PauliString) -> Result<DirectReport, SimError> {
        self.measure_parity_direct_forced(r, None)
    }

    /// As [`Self::measure_parity_direct`], post-selecting the parity value
    /// `forced` before the site readout.
    pub fn measure_parity_direct_forced(&mut self, r: &PauliString, forced: Option<i8>) -> Result<DirectReport, SimError> {
        let lat = &self.code.lat;
        if !r.is_hermitian() {
            return Err(TableauError::NotHermitian.into());
        }
        if !lat.commutes_with_all(r) {
            return Err(SimError::NotLogical(r.to_string()));
        }
        let sign = r.phase().sign().expect("Hermitian");
        let enforced: Vec<usize> = (0..self.active.len()).filter(|&k| self.active[k]).collect();
        let before = self.signs(enforced.iter().copied())?;
        let mut disabled = BTreeSet::new();
        for (s, l) in r.support() {
            let single = PauliString::single(s, l);
            for &k in lat.plaquettes_at(s) {
                if self.active[k] && !lat.operators()[k].commutes(&single) {
                    disabled.insert(k);
                }
            }
        }
        for &k in &disabled {
            self.active[k] = false;
        }

        if let Some(f) = forced {
            self.tab.measure(r, &mut self.rng, Some(f))?;
        }
        let mut prod = sign;
        for (s, l) in r.support().collect::<Vec<_>>() {
            self.measurements += 1;
            prod *= self.tab.measure(&PauliString::single(s, l), &mut self.rng, None)?.value;
        }

        let disabled_list: Vec<usize> = disabled.iter().copied().collect();
        for &k in &disabled_list {
            self.active[k] = true;
        }
        self.remeasure(&disabled_list)?;
        let untouched: Vec<usize> = enforced.iter().copied().filter(|k| !disabled.contains(k)).collect();
        let after = self.signs(untouched.iter().copied())?;
        let error_detected = before.values().any(|&v| v != 1) || untouched.iter().any(|k| before[k] != after[k]);
        Ok(DirectReport {
            outcome: prod,
            syndrome_before: before,
            syndrome_after: after,
            disabled: disabled.into_iter().collect(),
            error_detected,
        })
    }

    /// Parity of `pair` measured by moving a hole around `loop_faces`.
    ///
    /// `loop_faces` lists unmodified square faces `(x, y)`; consecutive
    /// entries (cyclically) must be diagonal neighbours. The loop must
    /// enclose either both twists of `pair` or no twist at all.
    pub fn measure_parity_hole(&mut self, pair: usize, loop_faces: &[(usize, usize)]) -> Result<HoleReport, SimError> {
        let lat = self.code.lat.clone();
        let (ta, tb) = lat.pair_twists(pair)?;
        let geo = HoleGeometry::new(&lat, loop_faces)?;
        let inside: Vec<usize> = lat.twists().iter().filter(|t| geo.encloses(lat.coords(t.site))).map(|t| t.id).collect();
        let encloses_pair = match inside.as_slice() {
            [] => false,
            [a, b] if (*a, *b) == (ta.id, tb.id) => true,
            _ => return Err(SimError::Loop(format!("loop encloses twists {inside:?}, expected none or pair {pair}"))),
        };
        let parity = lat.twist_logicals(pair)?.0;
        let (h0, h2, sigma) = geo.hole_pair(&lat)?;

        // loop string = c · P^e · ∏ A over plaquettes other than the holes
        let loop_op = geo.hops.iter().fold(PauliString::identity(), |acc, (s, l)| acc.multiply(&PauliString::single(*s, *l)));
        let n = lat.n_sites();
        let gens: Vec<usize> = (0..lat.operators().len()).filter(|&k| k != h0 && k != h2).collect();
        let mut rows: Vec<BitRow> = gens.iter().map(|&k| symplectic(&lat.operators()[k], n)).collect();
        rows.push(symplectic(&parity, n));
        let combo = Rref::new(2 * n, &rows)
            .express(&symplectic(&loop_op, n))
            .ok_or_else(|| SimError::Loop("loop operator is not generated by plaquettes and the pair parity".into()))?;
        let mut rebuilt = PauliString::identity();
        for i in combo.ones() {
            if i == gens.len() {
                rebuilt = rebuilt.multiply(&parity);
            } else {
                rebuilt = rebuilt.multiply(&lat.operators()[gens[i]]);
            }
        }
        if combo.get(gens.len()) != encloses_pair {
            return Err(SimError::Loop("loop winding disagrees with the enclosed twists".into()));
        }
        let c = {
            let q = rebuilt.multiply(&loop_op);
            q.phase().sign().expect("loop decomposition has a real phase")
        };

        let holes = HolePair {
            moving: h0,
            fixed: h2,
            z_logical: sigma.clone(),
            x_logical: lat.operators()[h0].clone(),
        };
        self.active[h0] = false;
        self.active[h2] = false;
        let z_before = self.measure_pauli(&sigma)?;
        let mut prod: i8 = z_before;
        let m = geo.faces.len();
        for j in 0..m {
            let (s, l) = geo.hops[j];
            let from = geo.faces[j];
            let to = geo.faces[(j + 1) % m];
            self.active[to] = false;
            prod *= self.measure_pauli(&PauliString::single(s, l))?;
            self.active[from] = true;
            if self.measure_pauli(&lat.operators()[from].clone())? == -1 {
                self.tab.apply_pauli(&PauliString::single(s, l))?;
            }
        }
        let z_after = self.measure_pauli(&sigma)?;
        prod *= z_after;
        prod *= c;

        for k in [h0, h2] {
            self.active[k] = true;
        }
        self.remeasure(&[h0, h2])?;
        Ok(HoleReport { outcome: prod, holes, z_before, z_after, hops: m, encloses_pair })
    }

    /// Re-measure plaquettes `ks` and undo random `-1` outcomes with an
    /// element of the prior stabilizer group, so the state ends up as the
    /// projection of the prior state onto `A_k = +1`. Deterministic `-1`
    /// values (pre-existing errors) are left in place.
    fn remeasure(&mut self, ks: &[usize]) -> Result<(), SimError> {
        let before = self.tab.stabilizers();
        let mut prior = Vec::new();
        for &k in ks {
            prior.push(self.tab.expectation(&self.code.lat.operators()[k])?);
        }
        let mut flip = Vec::new();
        for (i, &k) in ks.iter().enumerate() {
            let op = self.code.lat.operators()[k].clone();
            self.measurements += 1;
            let o = self.tab.measure(&op, &mut self.rng, None)?;
            if o.value == -1 && prior[i] != Some(-1) {
                flip.push(i);
            }
        }
        if flip.is_empty() {
            return Ok(());
        }
        let ops: Vec<&PauliString> = ks.iter().map(|&k| &self.code.lat.operators()[k]).collect();
        let rows: Vec<BitRow> = before
            .iter()
            .map(|g| BitRow::from_indices(ks.len(), (0..ks.len()).filter(|&i| !g.commutes(ops[i]))))
            .collect();
        match Rref::new(ks.len(), &rows).express(&BitRow::from_indices(ks.len(), flip.iter().copied())) {
            Some(combo) => {
                let c = combo.ones().fold(PauliString::identity(), |acc, i| acc.multiply(&before[i]));
                self.tab.apply_pauli(&c.unsigned())?;
            }
            None => {
                log::debug!("gauge fix unavailable, falling back to pure errors");
                for i in flip {
                    self.tab.apply_pauli(&self.code.pure_errors[ks[i]])?;
                }
            }
        }
        Ok(())
    }

    pub fn to_snapshot(&self) -> String {
        let snap = Snapshot {
            version: SNAPSHOT_VERSION,
            spec: self.code.lat.spec().clone(),
            tableau: self.tab.clone(),
            active: self.active.clone(),
            rng_seed: self.rng.get_seed(),
            rng_stream: self.rng.get_stream(),
            rng_word_pos: self.rng.get_word_pos().to_string(),
            measurements: self.measurements,
        };
        serde_json::to_string(&snap).expect("snapshot serializes")
    }

    pub fn from_snapshot(s: &str) -> Result<Self, SimError> {
        let snap: Snapshot = serde_json::from_str(s).map_err(|e| SimError::Snapshot(e.to_string()))?;
        if snap.version != SNAPSHOT_VERSION {
            return Err(SimError::Snapshot(format!("unsupported version {}", snap.version)));
        }
        let lat = snap.spec.build()?;
        if snap.tableau.n_qubits() != lat.n_sites() || snap.active.len() != lat.operators().len() {
            return Err(SimError::Snapshot("shape does not match the lattice".into()));
        }
        let mut rng = SeedStream::from_seed(snap.rng_seed);
        rng.set_stream(snap.rng_stream);
        rng.set_word_pos(snap.rng_word_pos.parse().map_err(|_| SimError::Snapshot("bad rng position".into()))?);
        Ok(CodeState {
            code: Arc::new(Code::new(lat)?),
            tab: snap.tableau,
            active: snap.active,
            rng,
            measurements: snap.measurements,
        })
    }
}

/// Validated hole loop.
struct HoleGeometry {
    /// Plaquette ids along the loop.
    faces: Vec<usize>,
    coords: Vec<(usize, usize)>,
    /// `hops[j]`: site and letter moving the hole from `faces[j]` to `faces[j+1]`.
    hops: Vec<(usize, Letter)>,
}

/// The single-site letter that anticommutes with both diagonal faces sharing
/// `site`, provided all four plaquettes at `site` are plain squares.
fn hop_letter(lat: &TwistLattice, a: usize, b: usize, site: usize) -> Option<Letter> {
    let ps = lat.plaquettes_at(site);
    if ps.len() != 4 || ps.iter().any(|&k| lat.plaquettes()[k].kind != PlaquetteKind::Square || lat.plaquettes()[k].face.is_none()) {
        return None;
    }
    [Letter::X, Letter::Y, Letter::Z].into_iter().find(|&l| {
        let single = PauliString::single(site, l);
        ps.iter().all(|&k| lat.operators()[k].commutes(&single) != (k == a || k == b))
    })
}

fn shared_corner(a: (usize, usize), b: (usize, usize)) -> Option<(usize, usize)> {
    let dx = b.0 as i64 - a.0 as i64;
    let dy = b.1 as i64 - a.1 as i64;
    if dx.abs() != 1 || dy.abs() != 1 {
        return None;
    }
    Some(((a.0 as i64 + (dx + 1) / 2) as usize, (a.1 as i64 + (dy + 1) / 2) as usize))
}

impl HoleGeometry {
    fn new(lat: &TwistLattice, loop_faces: &[(usize, usize)]) -> Result<Self, SimError> {
        if loop_faces.len() < 4 {
            return Err(SimError::Loop("fewer than four faces".into()));
        }
        let distinct: BTreeSet<_> = loop_faces.iter().collect();
        if distinct.len() != loop_faces.len() {
            return Err(SimError::Loop("loop revisits a face".into()));
        }
        let mut faces = Vec::new();
        for &(x, y) in loop_faces {
            faces.push(lat.face_id(x, y).ok_or_else(|| SimError::Loop(format!("({x},{y}) is not a plain face")))?);
        }
        let m = loop_faces.len();
        let mut hops = Vec::new();
        for j in 0..m {
            let (a, b) = (loop_faces[j], loop_faces[(j + 1) % m]);
            let (sx, sy) = shared_corner(a, b).ok_or_else(|| SimError::Loop(format!("{a:?} and {b:?} are not diagonal neighbours")))?;
            let site = lat.site(sx, sy);
            let l = hop_letter(lat, faces[j], faces[(j + 1) % m], site)
                .ok_or_else(|| SimError::Loop(format!("corner ({sx},{sy}) is not a clean bulk site")))?;
            hops.push((site, l));
        }
        let sites: BTreeSet<_> = hops.iter().map(|h| h.0).collect();
        if sites.len() != m {
            return Err(SimError::Loop("loop crosses itself".into()));
        }
        Ok(HoleGeometry { faces, coords: loop_faces.to_vec(), hops })
    }

    /// Ray casting with face centres as polygon vertices.
    fn encloses_point(&self, px: f64, py: f64) -> bool {
        let v: Vec<(f64, f64)> = self.coords.iter().map(|&(x, y)| (x as f64 + 0.5, y as f64 + 0.5)).collect();
        let mut inside = false;
        let m = v.len();
        for i in 0..m {
            let (x1, y1) = v[i];
            let (x2, y2) = v[(i + 1) % m];
            if (y1 > py) != (y2 > py) {
                let xc = x1 + (py - y1) * (x2 - x1) / (y2 - y1);
                if px < xc {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn encloses(&self, (x, y): (usize, usize)) -> bool {
        self.encloses_point(x as f64, y as f64)
    }

    /// Fixed partner hole: a diagonal neighbour of the first loop face lying
    /// outside the loop, joined to it through a clean corner off the loop.
    fn hole_pair(&self, lat: &TwistLattice) -> Result<(usize, usize, PauliString), SimError> {
        let (x, y) = self.coords[0];
        let loop_sites: BTreeSet<usize> = self.hops.iter().map(|h| h.0).collect();
        for (dx, dy) in [(-1i64, -1i64), (1, -1), (-1, 1), (1, 1)] {
            let (nx, ny) = (x as i64 + dx, y as i64 + dy);
            if nx < 0 || ny < 0 {
                continue;
            }
            let nb = (nx as usize, ny as usize);
            if self.coords.contains(&nb) || self.encloses_point(nb.0 as f64 + 0.5, nb.1 as f64 + 0.5) {
                continue;
            }
            let Some(h2) = lat.face_id(nb.0, nb.1) else { continue };
            let (sx, sy) = shared_corner((x, y), nb).expect("diagonal");
            let site = lat.site(sx, sy);
            if loop_sites.contains(&site) {
                continue;
            }
            if let Some(l) = hop_letter(lat, self.faces[0], h2, site) {
                return Ok((self.faces[0], h2, PauliString::single(site, l)));
            }
        }
        Err(SimError::Loop("no room for the fixed hole next to the first loop face".into()))
    }
}

/// Diamond of diagonal hops with corner faces `(cx ± r, cy)` and `(cx, cy ± r)`,
/// starting at the left corner and running clockwise in lattice coordinates.
pub fn diamond_loop(cx: usize, cy: usize, r: usize) -> Vec<(usize, usize)> {
    assert!(r >= 1 && cx >= r && cy >= r);
    let (cx, cy, r) = (cx as i64, cy as i64, r as i64);
    let mut out = Vec::new();
    let (mut x, mut y) = (cx - r, cy);
    for (dx, dy) in [(1, 1), (1, -1), (-1, -1), (-1, 1)] {
        for _ in 0..r {
            out.push((x as usize, y as usize));
            x += dx;
            y += dy;
        }
    }
    out
}
