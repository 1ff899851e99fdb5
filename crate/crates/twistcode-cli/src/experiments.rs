use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};
use twistcode::anyon::{pair_transform, Pairing, Parity, TopoState};
use twistcode::dense::{FockSpace, StateVector};
use twistcode::jw::{classify_modes, jw_map, parity_operator, reduce_by_stabilizers, JWPath};
use twistcode::lattice::{PlaquetteKind, TwistLattice};
use twistcode::mbb::*;
use twistcode::oracle::{oracle_check, random_sequence};
use twistcode::projection::{
    build_majorana_plaquette, project_to_spins, spin_plaquette, verify_string_parity, Cluster, Link, PlaquetteShape,
};
use twistcode::sim::CodeState;
use twistcode::{build_lattice, shot_stream};

use crate::config::{BackendChoice, ReadoutChoice, Resolved};

pub type RunResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

/// Rows for CSV output.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug)]
pub struct Outcome {
    pub results: Value,
    /// Names of violated invariants.
    pub failures: Vec<String>,
    pub table: Table,
    pub text: Option<String>,
}

fn coords(lat: &TwistLattice, s: usize) -> String {
    let (x, y) = lat.coords(s);
    format!("({x},{y})")
}

#[derive(Serialize)]
struct PlaquetteRow {
    id: usize,
    kind: &'static str,
    spin: String,
    majorana: String,
}

#[derive(Serialize)]
struct PairRow {
    pair: usize,
    twists: [usize; 2],
    parity_plain: String,
    parity_substituted: String,
    reduced: String,
    reduced_weight: usize,
    x_logical: String,
}

pub fn derive(r: &Resolved) -> RunResult<Outcome> {
    let lat = r.lattice.build()?;
    let plain = JWPath::plain(&lat);
    let subst = JWPath::substituted(&lat);
    let mut failures = Vec::new();

    let mut plaquettes = Vec::new();
    let mut paired_ok = true;
    for (pl, op) in lat.plaquettes().iter().zip(lat.operators()) {
        let m = jw_map(op, &plain)?;
        paired_ok &= m.degree() == 4 && m.kinds().len() == 1;
        let kind = match pl.kind {
            PlaquetteKind::Square => "square",
            PlaquetteKind::Pentagon => "pentagon",
        };
        plaquettes.push(PlaquetteRow { id: pl.id, kind, spin: op.to_string(), majorana: m.to_string() });
    }
    if !paired_ok {
        failures.push("plaquette images are products of two same-kind pairs".into());
    }

    let cls = classify_modes(&lat, &plain)?;
    let unpaired_sites: BTreeSet<usize> = cls.unpaired.iter().map(|m| m.site).collect();
    let twist_sites: BTreeSet<usize> = lat.twists().iter().map(|t| t.site).collect();
    if cls.unpaired.len() != lat.twists().len() || unpaired_sites != twist_sites {
        failures.push("one unpaired mode per twist, at the twist site".into());
    }
    let unpaired: Vec<Value> = cls
        .unpaired
        .iter()
        .map(|m| json!({ "mode": m.to_string(), "site": m.site, "coords": coords(&lat, m.site) }))
        .collect();

    let mut pairs = Vec::new();
    for k in 0..lat.n_pairs() {
        let (t1, t2) = lat.pair_twists(k)?;
        let p_plain = parity_operator(&lat, &plain, k)?;
        let p_sub = parity_operator(&lat, &subst, k)?;
        let reduced = reduce_by_stabilizers(&p_sub, &lat)?;
        let (_, xl) = lat.twist_logicals(k)?;
        let logical = lat.commutes_with_all(&p_plain) && !lat.in_stabilizer_group(&p_plain);
        if !logical {
            failures.push(format!("parity operator of pair {k} is a logical"));
        }
        pairs.push(PairRow {
            pair: k,
            twists: [t1.site, t2.site],
            parity_plain: p_plain.to_string(),
            parity_substituted: p_sub.to_string(),
            reduced_weight: reduced.weight(),
            reduced: reduced.to_string(),
            x_logical: xl.to_string(),
        });
    }

    let mut table = Table { header: vec!["record", "id", "spin", "majorana"], rows: Vec::new() };
    for p in &plaquettes {
        table.rows.push(vec![format!("plaquette-{}", p.kind), p.id.to_string(), p.spin.clone(), p.majorana.clone()]);
    }
    for m in &cls.unpaired {
        table.rows.push(vec!["unpaired".into(), m.site.to_string(), String::new(), m.to_string()]);
    }
    for p in &pairs {
        let id = p.pair.to_string();
        table.rows.push(vec!["parity-plain".into(), id.clone(), p.parity_plain.clone(), String::new()]);
        table.rows.push(vec!["parity-substituted".into(), id.clone(), p.parity_substituted.clone(), String::new()]);
        table.rows.push(vec!["parity-reduced".into(), id.clone(), p.reduced.clone(), String::new()]);
        table.rows.push(vec!["x-logical".into(), id, p.x_logical.clone(), String::new()]);
    }

    let mut text = String::new();
    let spec = &r.lattice;
    let segs: Vec<String> = spec.segments.iter().map(|s| format!("({},{},{})", s.row, s.col_start, s.col_end)).collect();
    writeln!(text, "lattice {}x{} segments [{}]", spec.width, spec.height, segs.join(" "))?;
    writeln!(
        text,
        "sites {}  plaquettes {}  twists {}  logical qubits {}",
        lat.n_sites(),
        lat.operators().len(),
        lat.twists().len(),
        lat.logical_count()
    )?;
    writeln!(text, "\nplaquettes (plain path)")?;
    for p in &plaquettes {
        writeln!(text, "  {:>3} {:<8} {:<28} -> {}", p.id, p.kind, p.spin, p.majorana)?;
    }
    writeln!(text, "\nunpaired modes")?;
    for m in &cls.unpaired {
        writeln!(text, "  {} at {}", m, coords(&lat, m.site))?;
    }
    writeln!(text, "edge modes: {}", cls.edge.len())?;
    for p in &pairs {
        writeln!(
            text,
            "\npair {}: twists {} {} and {} {}",
            p.pair,
            p.twists[0],
            coords(&lat, p.twists[0]),
            p.twists[1],
            coords(&lat, p.twists[1])
        )?;
        writeln!(text, "  parity (plain path)        {}", p.parity_plain)?;
        writeln!(text, "  parity (substituted path)  {}", p.parity_substituted)?;
        writeln!(text, "  reduced                    {}", p.reduced)?;
        writeln!(text, "  x logical                  {}", p.x_logical)?;
    }

    let results = json!({
        "sites": lat.n_sites(),
        "logical_count": lat.logical_count(),
        "plaquettes": plaquettes,
        "unpaired": unpaired,
        "edge_modes": cls.edge.len(),
        "pairs": pairs,
    });
    Ok(Outcome { results, failures, table, text: Some(text) })
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn unitary_defect(m: &nalgebra::Matrix2<C64>) -> f64 {
    (m.adjoint() * m - nalgebra::Matrix2::identity()).norm()
}

fn random_qubit(rng: &mut impl Rng) -> (C64, C64) {
    let a = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let b = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / n, b / n)
}

/// `|0⟩₁₂ (α|0⟩₃₄ + β|1⟩₃₄)` on four modes.
fn fock_qubit(a: C64, b: C64) -> RunResult<StateVector> {
    let z = C64::new(0.0, 0.0);
    Ok(StateVector::from_amplitudes(vec![a, z, b, z])?)
}

fn anyon_qubit(a: C64, b: C64) -> RunResult<TopoState> {
    let z = C64::new(0.0, 0.0);
    Ok(TopoState::new(Pairing::new(&[(1, 2), (3, 4)])?, vec![a, z, b, z])?)
}

pub fn verify(r: &Resolved) -> RunResult<Outcome> {
    let lat = r.lattice.build()?;
    let mut checks = Vec::new();
    let mut check = |name: &'static str, passed: bool, detail: String| checks.push(Check { name, passed, detail });

    let ops = lat.operators();
    let commute = ops.iter().enumerate().all(|(i, p)| ops[i + 1..].iter().all(|q| p.commutes(q)));
    check("plaquettes-commute", commute, format!("{} plaquettes", ops.len()));
    let rank = lat.stabilizer_rref().rank();
    check("plaquettes-independent", rank == ops.len(), format!("rank {rank} of {}", ops.len()));

    let free = build_lattice(r.lattice.width, r.lattice.height, &[])?;
    let (lc, lf) = (lat.logical_count(), free.logical_count());
    check("logical-count-per-pair", lc == lf + lat.n_pairs(), format!("{lc} vs {lf} without twists, {} pairs", lat.n_pairs()));

    let plain = JWPath::plain(&lat);
    let cls = classify_modes(&lat, &plain)?;
    let sites: BTreeSet<usize> = cls.unpaired.iter().map(|m| m.site).collect();
    let twists: BTreeSet<usize> = lat.twists().iter().map(|t| t.site).collect();
    check("unpaired-modes-at-twists", sites == twists && cls.unpaired.len() == twists.len(), format!("{} unpaired", cls.unpaired.len()));

    let mut images = true;
    for op in ops {
        let m = jw_map(op, &plain)?;
        images &= m.degree() == 4 && m.kinds().len() == 1;
    }
    check("plaquette-images-paired", images, String::new());

    let subst = JWPath::substituted(&lat);
    let mut logical = true;
    let mut reduced_ok = true;
    for k in 0..lat.n_pairs() {
        for path in [&plain, &subst] {
            let p = parity_operator(&lat, path, k)?;
            logical &= lat.commutes_with_all(&p) && !lat.in_stabilizer_group(&p);
            let red = reduce_by_stabilizers(&p, &lat)?;
            reduced_ok &= red.weight() <= p.weight() && lat.in_stabilizer_group(&red.multiply(&p).unsigned());
        }
    }
    check("parity-operators-logical", logical, String::new());
    check("reduction-equivalent", reduced_ok, String::new());

    let sq = build_majorana_plaquette(PlaquetteShape::Square, &[0, 2, 3, 1])?;
    let dev_sq = (project_to_spins(&sq)? - spin_plaquette(4, &[0, 1, 3, 2])).norm();
    check("projection-square", dev_sq < 1e-12, format!("deviation {dev_sq:.1e}"));
    let pe = build_majorana_plaquette(PlaquetteShape::Pentagon, &[0, 2, 3, 1, 4])?;
    let dev_pe = (project_to_spins(&pe)? - spin_plaquette(5, &[0, 1, 3, 2, 4])).norm();
    check("projection-pentagon", dev_pe < 1e-12, format!("deviation {dev_pe:.1e}"));
    let c = Cluster { width: 2, height: 2 };
    let bare = verify_string_parity(c, &[], (0, 2))?;
    check("bare-parity-rejected", !bare, String::new());
    let chain = [Link::Ac(0, 1), Link::Ac(1, 3), Link::Ac(3, 2)];
    let dressed = verify_string_parity(c, &chain, (0, 2))?;
    check("string-parity-matches-jw", dressed, String::new());

    let names = [[(1, 2), (3, 4)], [(1, 3), (2, 4)], [(1, 4), (2, 3)]];
    let pairings: Vec<Pairing> = names.iter().map(|p| Pairing::new(p)).collect::<Result<_, _>>()?;
    let mut worst: f64 = 0.0;
    let mut compose: f64 = 0.0;
    for par in [Parity::Even, Parity::Odd] {
        for a in &pairings {
            for b in &pairings {
                worst = worst.max(unitary_defect(&pair_transform(par, a, b)?));
            }
        }
        let direct = pair_transform(par, &pairings[0], &pairings[1])?;
        let via = pair_transform(par, &pairings[2], &pairings[1])? * pair_transform(par, &pairings[0], &pairings[2])?;
        compose = compose.max((direct - via).norm());
    }
    check("pair-transforms-unitary", worst < 1e-12, format!("max defect {worst:.1e}"));
    check("pair-transforms-compose", compose < 1e-12, format!("max deviation {compose:.1e}"));

    let fs = FockSpace::new(4)?;
    let mut rng = shot_stream(r.seed, 0);
    let mut min_f: f64 = 1.0;
    for _ in 0..r.shots {
        let (a, b) = random_qubit(&mut rng);
        let init = fock_qubit(a, b)?;
        for n13 in 0..2 {
            for n14 in 0..2 {
                for n12 in 0..2 {
                    let mut fb = FockBackend::new(4, init.clone(), shot_stream(r.seed, 1))?;
                    let rec = run_cycle_forced(&mut fb, DEFAULT_ROLES, (n13, n14, n12))?;
                    apply_correction(&mut fb, correction_for(&rec), DEFAULT_ROLES)?;
                    min_f = min_f.min(verify_braid_equivalence(&init, &fb.fock_state()?, &fs, DEFAULT_ROLES)?);
                }
            }
        }
    }
    check("mbb-all-branches", (1.0 - min_f).abs() < 1e-10, format!("{} states x 8 branches, min fidelity {min_f:.12}", r.shots));

    let failures = checks.iter().filter(|c| !c.passed).map(|c| c.name.to_string()).collect();
    let table = Table {
        header: vec!["check", "passed", "detail"],
        rows: checks.iter().map(|c| vec![c.name.to_string(), c.passed.to_string(), c.detail.clone()]).collect(),
    };
    Ok(Outcome { results: json!({ "checks": checks }), failures, table, text: None })
}

#[derive(Serialize)]
struct TraceStep {
    step: &'static str,
    outcome: Option<u8>,
    /// Fusion basis and amplitudes, for the anyon backend.
    pairing: Option<String>,
    amplitudes: Option<Vec<[f64; 2]>>,
    fock: Vec<[f64; 2]>,
}

/// Rounded to 12 decimals so float noise below the test tolerance does not
/// leak into report bytes.
fn round(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn amps(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|c| [round(c.re), round(c.im)]).collect()
}

type BasisView<B> = fn(&B) -> Option<(String, Vec<C64>)>;

/// One fixed cycle plus correction, with the state after every step.
fn traced_cycle<B: Backend>(mut b: B, view: BasisView<B>) -> RunResult<(Vec<TraceStep>, MbbRecord, CorrectionOp, StateVector)> {
    let snap = |b: &B, step, outcome| -> RunResult<TraceStep> {
        let (pairing, amplitudes) = match view(b) {
            Some((p, a)) => (Some(p), Some(amps(&a))),
            None => (None, None),
        };
        Ok(TraceStep { step, outcome, pairing, amplitudes, fock: amps(b.fock_state()?.amplitudes()) })
    };
    let [r1, r2, r3, r4] = DEFAULT_ROLES;
    let mut steps = vec![snap(&b, "initial", None)?];
    let mut o = [0u8; 3];
    for (k, (step, (x, y))) in [("n13", (r1, r3)), ("n14", (r1, r4)), ("n12", (r1, r2))].into_iter().enumerate() {
        o[k] = b.measure_pair(x, y, None)?;
        steps.push(snap(&b, step, Some(o[k]))?);
    }
    let rec = MbbRecord {
        n12_initial: 0,
        n13: o[0],
        n14: o[1],
        n12_final: o[2],
        backend: b.tag(),
        measurements: b.measurement_count(),
        attempts: None,
    };
    let op = correction_for(&rec);
    apply_correction(&mut b, op, DEFAULT_ROLES)?;
    steps.push(snap(&b, "corrected", None)?);
    let fin = b.fock_state()?;
    Ok((steps, rec, op, fin))
}

pub fn mbb(r: &Resolved) -> RunResult<Outcome> {
    let mut rng = shot_stream(r.seed, 0);
    let (a, b) = random_qubit(&mut rng);
    let init = fock_qubit(a, b)?;
    let meas = shot_stream(r.seed, 1);
    let (steps, rec, op, fin) = match r.backend {
        BackendChoice::Anyon => traced_cycle(AnyonBackend::new(anyon_qubit(a, b)?, meas), |b| {
            Some((b.state().pairing().to_string(), b.state().amplitudes().to_vec()))
        })?,
        _ => traced_cycle(FockBackend::new(4, init.clone(), meas)?, |_| None)?,
    };
    let fs = FockSpace::new(4)?;
    let fidelity = verify_braid_equivalence(&init, &fin, &fs, DEFAULT_ROLES)?;
    let mut failures = Vec::new();
    if (fidelity - 1.0).abs() > 1e-10 {
        failures.push("corrected cycle equals the braid".into());
    }
    let table = Table {
        header: vec!["step", "outcome", "fock_amplitudes"],
        rows: steps
            .iter()
            .map(|s| {
                let a: Vec<String> = s.fock.iter().map(|[re, im]| format!("{re}{im:+}i")).collect();
                vec![s.step.to_string(), s.outcome.map_or(String::new(), |o| o.to_string()), a.join(" ")]
            })
            .collect(),
    };
    let results = json!({
        "alpha": [round(a.re), round(a.im)],
        "beta": [round(b.re), round(b.im)],
        "record": rec,
        "correction": op,
        "steps": steps,
        "fidelity": round(fidelity),
    });
    Ok(Outcome { results, failures, table, text: None })
}

#[derive(Serialize)]
struct StatsRow {
    #[serde(flatten)]
    result: StatsResult,
    expected: f64,
    sigma: f64,
    within_3sigma: bool,
}

pub fn stats(r: &Resolved) -> RunResult<Outcome> {
    let src = match r.backend {
        BackendChoice::Anyon => StatsBackend::Anyon,
        BackendChoice::Fock => StatsBackend::Fock,
        BackendChoice::Lattice => {
            let lat = r.lattice.build()?;
            let readout = match r.readout {
                ReadoutChoice::Direct => Readout::Direct,
                ReadoutChoice::Ideal => Readout::Ideal,
            };
            StatsBackend::Lattice(LatticeBackend::new(CodeState::init_ground(&lat, r.seed)?, readout)?)
        }
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for &n in &r.n_braids {
        let result = run_statistics(&src, n, r.shots, r.seed)?;
        let expected = [0.0, 0.5, 1.0, 0.5][n % 4];
        let sigma = (expected * (1.0 - expected) / r.shots as f64).sqrt();
        let within = (result.frequency - expected).abs() <= 3.0 * sigma;
        if !within {
            failures.push(format!("flip frequency for {n} braids within 3 sigma of {expected}"));
        }
        rows.push(StatsRow { result, expected, sigma, within_3sigma: within });
    }
    let table = Table {
        header: vec!["backend", "n_braids", "shots", "seed", "flips", "frequency", "ci95_low", "ci95_high", "expected", "within_3sigma"],
        rows: rows
            .iter()
            .map(|s| {
                let b = serde_json::to_value(s.result.backend).unwrap();
                vec![
                    b.as_str().unwrap_or_default().to_string(),
                    s.result.n_braids.to_string(),
                    s.result.shots.to_string(),
                    s.result.seed.to_string(),
                    s.result.flips.to_string(),
                    s.result.frequency.to_string(),
                    s.result.ci95.0.to_string(),
                    s.result.ci95.1.to_string(),
                    s.expected.to_string(),
                    s.within_3sigma.to_string(),
                ]
            })
            .collect(),
    };
    Ok(Outcome { results: json!({ "rows": rows }), failures, table, text: None })
}

pub fn oracle(r: &Resolved) -> RunResult<Outcome> {
    let lat = r.lattice.build()?;
    let seq = random_sequence(&lat, r.sequence_length, r.seed);
    let rep = oracle_check(&lat, &seq, r.shots, r.seed)?;
    let mut failures = Vec::new();
    if !rep.ground_agrees {
        failures.push("ground-state expectations agree".into());
    }
    if rep.per_seed_mismatches > 0 {
        failures.push(format!("per-seed outcome agreement ({} shots disagree)", rep.per_seed_mismatches));
    }
    for (i, s) in rep.steps.iter().enumerate() {
        if !s.within {
            failures.push(format!("step {i} distribution within 3 sigma"));
        }
    }
    let table = Table {
        header: vec!["step", "operator", "deterministic", "tableau_plus", "dense_plus", "tolerance", "within"],
        rows: rep
            .steps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                vec![
                    i.to_string(),
                    s.operator.clone(),
                    s.deterministic.to_string(),
                    s.tableau_plus.to_string(),
                    s.dense_plus.to_string(),
                    s.tolerance.to_string(),
                    s.within.to_string(),
                ]
            })
            .collect(),
    };
    Ok(Outcome { results: serde_json::to_value(&rep)?, failures, table, text: None })
}
