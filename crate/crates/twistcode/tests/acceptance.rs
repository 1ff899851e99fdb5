//! End-to-end acceptance checks. Prints one line per criterion and exits
//! nonzero if any of them fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use twistcode::anyon::{pair_transform, Pairing, Parity, TopoState};
use twistcode::dense::{fidelity_up_to_phase, FockSpace, StateVector};
use twistcode::jw::{classify_modes, jw_map, parity_operator, reduce_by_stabilizers, twist_modes, JWPath};
use twistcode::mbb::*;
use twistcode::oracle::{oracle_check, random_sequence};
use twistcode::projection::*;
use twistcode::sim::{diamond_loop, CodeState};
use twistcode::{build_lattice, seed_stream, shot_stream, Letter, PauliString, Phase, Segment, TwistLattice};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn fig1() -> TwistLattice {
    build_lattice(8, 6, &[Segment::new(1, 1, 5)]).unwrap()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_qubit(rng: &mut impl Rng) -> (C64, C64) {
    let a = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let b = c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let n = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / n, b / n)
}

/// `|0⟩₁₂ (α|0⟩₃₄ + β|1⟩₃₄)`.
fn fock_initial(a: C64, b: C64) -> StateVector {
    let z = c(0.0, 0.0);
    StateVector::from_amplitudes(vec![a, z, b, z]).unwrap()
}

fn c1_jw_structure() -> Check {
    let lat = fig1();
    let path = JWPath::plain(&lat);
    let cls = classify_modes(&lat, &path).map_err(|e| e.to_string())?;
    let sites: BTreeSet<usize> = cls.unpaired.iter().map(|m| m.site).collect();
    let twists: BTreeSet<usize> = lat.twists().iter().map(|t| t.site).collect();
    ensure(cls.unpaired.len() == 2, format!("{} unpaired modes", cls.unpaired.len()))?;
    ensure(sites == twists, format!("unpaired at {sites:?}, twists at {twists:?}"))?;
    for (op, pl) in lat.operators().iter().zip(lat.plaquettes()) {
        let m = jw_map(op, &path).map_err(|e| e.to_string())?;
        ensure(m.kinds().len() == 1 && m.pair_terms().is_some(), format!("plaquette {} image {m:?}", pl.id))?;
    }
    Ok(format!("2 unpaired modes at sites {sites:?}; {} plaquette images are same-kind pair products", lat.plaquettes().len()))
}

/// Letters of `p` along a nearest-neighbor chain from `start`.
fn chain_letters(lat: &TwistLattice, p: &PauliString, start: usize) -> Vec<Letter> {
    let mut left: BTreeSet<usize> = p.sites().collect();
    let mut cur = start;
    let mut out = Vec::new();
    while left.remove(&cur) {
        out.push(p.letter(cur).unwrap());
        let (x, y) = lat.coords(cur);
        match left.iter().copied().find(|&s| {
            let (u, v) = lat.coords(s);
            x.abs_diff(u) + y.abs_diff(v) == 1
        }) {
            Some(n) => cur = n,
            None => break,
        }
    }
    out
}

fn c2_parity_operator() -> Check {
    let lat = fig1();
    let path = JWPath::substituted(&lat);
    let p = parity_operator(&lat, &path, 0).map_err(|e| e.to_string())?;
    ensure(lat.commutes_with_all(&p), "parity operator anticommutes with a plaquette")?;
    let rank = lat.stabilizer_rref().rank();
    let mut gens: Vec<_> = lat.operators().iter().map(|o| twistcode::gf2::symplectic(o, lat.n_sites())).collect();
    gens.push(twistcode::gf2::symplectic(&p, lat.n_sites()));
    let extended = twistcode::gf2::Rref::new(2 * lat.n_sites(), &gens).rank();
    ensure(extended == rank + 1, format!("rank {rank} -> {extended} with the parity operator"))?;
    let r = reduce_by_stabilizers(&p, &lat).map_err(|e| e.to_string())?;
    let (m1, _) = twist_modes(&lat, &path, 0).map_err(|e| e.to_string())?;
    let letters = chain_letters(&lat, &r, m1.site);
    let want = [Letter::X, Letter::Y, Letter::Y, Letter::Z, Letter::X, Letter::Z];
    ensure(r.weight() == 6 && letters == want, format!("reduced {r}, chain letters {letters:?}"))?;
    ensure(r.phase() == Phase::from_exponent(1), format!("reduced {r}: letter pattern matches, phase is {} where i is required", r.phase().to_complex()))?;
    Ok(format!("reduced parity {r}"))
}

fn c3_degeneracy() -> Check {
    let free = build_lattice(8, 6, &[]).unwrap().logical_count();
    let one = fig1().logical_count();
    let two = build_lattice(8, 6, &[Segment::new(1, 1, 3), Segment::new(3, 2, 5)]).unwrap().logical_count();
    ensure(one == free + 1 && two == free + 2, format!("logical counts {free}, {one}, {two}"))?;
    Ok(format!("logical qubits 8x6: {free} free, {one} with 1 pair, {two} with 2 pairs"))
}

fn c4_projection() -> Check {
    let sq = build_majorana_plaquette(PlaquetteShape::Square, &[0, 2, 3, 1]).map_err(|e| e.to_string())?;
    let dev_sq = (project_to_spins(&sq).map_err(|e| e.to_string())? - spin_plaquette(4, &[0, 1, 3, 2])).norm();
    let pe = build_majorana_plaquette(PlaquetteShape::Pentagon, &[0, 2, 3, 1, 4]).map_err(|e| e.to_string())?;
    let dev_pe = (project_to_spins(&pe).map_err(|e| e.to_string())? - spin_plaquette(5, &[0, 1, 3, 2, 4])).norm();
    ensure(dev_sq < 1e-12 && dev_pe < 1e-12, format!("deviations {dev_sq:.1e}, {dev_pe:.1e}"))?;
    let bare = FockOperator::from_pauli(4, &bilinear(4, (0, Flavor::B), (2, Flavor::D))).map_err(|e| e.to_string())?;
    ensure(matches!(project_to_spins(&bare), Err(ProjectionError::LeavesEvenSector(_))), "bare parity was accepted")?;
    let sq_cluster = Cluster { width: 2, height: 2 };
    let chain = [Link::Ac(0, 1), Link::Ac(1, 3), Link::Ac(3, 2)];
    ensure(verify_string_parity(sq_cluster, &chain, (0, 2)) == Ok(true), "string-dressed parity does not match the JW parity")?;
    Ok(format!("square {dev_sq:.1e}, pentagon {dev_pe:.1e}; bare parity rejected, dressed parity matches"))
}

fn c5_frb() -> Check {
    let p = |s: &str| s.parse::<Pairing>().unwrap();
    let m = |phase: f64, e: [C64; 4]| Matrix2::new(e[0], e[1], e[2], e[3]) * C64::from_polar(std::f64::consts::FRAC_1_SQRT_2, phase);
    let (one, i) = (c(1., 0.), c(0., 1.));
    let pi8 = PI / 8.0;
    let cases = [
        (Parity::Even, "12,34", "13,24", m(pi8, [one, -i, -i, one])),
        (Parity::Even, "12,34", "14,23", m(0.0, [one, one, -i, i])),
        (Parity::Even, "14,23", "13,24", m(-pi8, [one, -one, one, one])),
        (Parity::Odd, "12,34", "13,24", m(pi8, [one, -i, -i, one])),
        (Parity::Odd, "12,34", "14,23", m(0.0, [i, -i, one, one])),
        (Parity::Odd, "14,23", "13,24", m(-pi8, [one, one, -one, one])),
    ];
    let mut worst = 0.0f64;
    for (par, from, to, want) in &cases {
        let u = pair_transform(*par, &p(from), &p(to)).map_err(|e| e.to_string())?;
        let d = (u - want).iter().map(|x| x.norm()).fold(0.0, f64::max);
        ensure(d < 1e-12, format!("{par:?} {from}->{to}: {u}"))?;
        let unit = (u.adjoint() * u - Matrix2::identity()).norm();
        ensure(unit < 1e-12, format!("{par:?} {from}->{to} not unitary"))?;
        worst = worst.max(d);
    }
    for par in [Parity::Even, Parity::Odd] {
        let direct = pair_transform(par, &p("12,34"), &p("13,24")).unwrap();
        let via = pair_transform(par, &p("14,23"), &p("13,24")).unwrap() * pair_transform(par, &p("12,34"), &p("14,23")).unwrap();
        ensure((direct - via).norm() < 1e-12, format!("{par:?} composition differs"))?;
    }
    Ok(format!("6 transforms match entrywise (max {worst:.1e}), unitary, compose"))
}

fn c6_mbb_exact() -> Check {
    let branches = [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1), (1, 0, 0), (1, 0, 1), (1, 1, 0), (1, 1, 1)];
    let fs = FockSpace::new(4).unwrap();
    let mut rng = seed_stream(2024);
    let mut min_f = 1.0f64;
    let states = 32;
    let z = c(0.0, 0.0);
    let i = C64::i();
    let cis = |t: f64| C64::from_polar(1.0, t);
    let close = |got: &[C64], want: &[C64]| got.iter().zip(want).all(|(g, w)| (g - w).norm() < 1e-12);
    for _ in 0..states {
        let (a, b) = random_qubit(&mut rng);
        let init = fock_initial(a, b);
        for br in branches {
            let mut fb = FockBackend::new(4, init.clone(), seed_stream(0)).map_err(|e| e.to_string())?;
            let rec = run_cycle_forced(&mut fb, DEFAULT_ROLES, br).map_err(|e| e.to_string())?;
            apply_correction(&mut fb, correction_for(&rec), DEFAULT_ROLES).map_err(|e| e.to_string())?;
            let f = verify_braid_equivalence(&init, &fb.fock_state().unwrap(), &fs, DEFAULT_ROLES).map_err(|e| e.to_string())?;
            min_f = min_f.min(f);
            ensure((f - 1.0).abs() < 1e-10, format!("branch {br:?}: fidelity {f}"))?;

            // Intermediate states in the fusion basis of the measured pairs.
            let (n13, n14, n12) = br;
            let mut ab = AnyonBackend::new(TopoState::new("12,34".parse().unwrap(), vec![a, z, b, z]).unwrap(), seed_stream(0));
            ab.measure_pair(1, 3, Some(n13)).map_err(|e| e.to_string())?;
            let p = cis(-PI / 8.0);
            let want = if n13 == 0 { [p * a, z, p * b, z] } else { [z, i * p * b, z, i * p * a] };
            ensure(close(ab.state().amplitudes(), &want), format!("after n13={n13}: {:?}", ab.state().amplitudes()))?;
            ab.measure_pair(1, 4, Some(n14)).map_err(|e| e.to_string())?;
            let q = cis(-PI / 4.0);
            let want = match (n13, n14) {
                (0, 0) => [q * a, z, q * b, z],
                (0, 1) => [z, q * b, z, -q * a],
                (1, 0) => [i * q * a, z, -i * q * b, z],
                _ => [z, i * q * b, z, i * q * a],
            };
            ensure(close(ab.state().amplitudes(), &want), format!("after n14={n14}: {:?}", ab.state().amplitudes()))?;
            ab.measure_pair(1, 2, Some(n12)).map_err(|e| e.to_string())?;
            let want = match (n13 == n14, n12) {
                (true, 0) => [a, z, i * b, z],
                (false, 0) => [a, z, -i * b, z],
                (true, _) => [z, b, z, i * a],
                (false, _) => [z, -b, z, i * a],
            };
            let overlap: C64 = ab.state().amplitudes().iter().zip(&want).map(|(g, w)| g.conj() * w).sum();
            ensure((overlap.norm() - 1.0).abs() < 1e-12, format!("final {br:?}: {:?}", ab.state().amplitudes()))?;
        }
    }
    Ok(format!("{states} states x 8 branches, min fidelity {min_f:.12}; intermediate amplitudes match"))
}

fn stats_line(src: &StatsBackend, shots: usize, seed: u64) -> Check {
    let mut freqs = Vec::new();
    for n in 0..4 {
        let r = run_statistics(src, n, shots, seed).map_err(|e| e.to_string())?;
        let p = [0.0, 0.5, 1.0, 0.5][n];
        let sigma = (p * (1.0 - p) / shots as f64).sqrt();
        ensure((r.frequency - p).abs() <= 3.0 * sigma, format!("n={n}: frequency {} vs {p} (3 sigma {:.4})", r.frequency, 3.0 * sigma))?;
        freqs.push(format!("{:.4}", r.frequency));
    }
    Ok(format!("{shots} shots, flip frequencies n=0..3: {}", freqs.join(", ")))
}

fn c7_statistics() -> Check {
    stats_line(&StatsBackend::Anyon, 10_000, 42)
}

fn c8_lattice() -> Check {
    let lat = build_lattice(14, 4, &[Segment::new(1, 1, 3), Segment::new(1, 5, 7), Segment::new(1, 9, 11)]).unwrap();
    let tmpl = LatticeBackend::new(CodeState::init_ground(&lat, 0).map_err(|e| e.to_string())?, Readout::Direct).map_err(|e| e.to_string())?;
    let stats = stats_line(&StatsBackend::Lattice(tmpl), 10_000, 42)?;
    let small = build_lattice(4, 4, &[]).unwrap();
    let seq = random_sequence(&small, 12, 5);
    let rep = oracle_check(&small, &seq, 1000, 17).map_err(|e| e.to_string())?;
    ensure(rep.ground_agrees, "ground-state expectations differ")?;
    ensure(rep.per_seed_mismatches == 0, format!("{} per-seed mismatches", rep.per_seed_mismatches))?;
    ensure(rep.steps.iter().all(|s| s.within), "a step distribution is outside 3 sigma")?;
    Ok(format!("{stats}; 4x4 oracle: {} steps agree over {} shots", rep.steps.len(), rep.shots))
}

fn c9_hole_cnot() -> Check {
    let lat = build_lattice(12, 12, &[Segment::new(5, 4, 6)]).unwrap();
    let base = CodeState::init_ground(&lat, 0).map_err(|e| e.to_string())?;
    let parity = lat.twist_logicals(0).map_err(|e| e.to_string())?.0;
    let around = diamond_loop(5, 5, 4);
    let trivial = diamond_loop(2, 9, 1);
    let shots = 1000;
    let mut minus = 0;
    for shot in 0..shots {
        let mut st = base.reinit(shot_stream(5, shot)).map_err(|e| e.to_string())?;
        let d = st.measure_parity_direct(&parity).map_err(|e| e.to_string())?.outcome;
        let h = st.measure_parity_hole(0, &around).map_err(|e| e.to_string())?;
        ensure(h.outcome == d, format!("shot {shot}: hole {} vs direct {d}", h.outcome))?;
        let t = st.measure_parity_hole(0, &trivial).map_err(|e| e.to_string())?;
        ensure(t.outcome == 1, format!("shot {shot}: trivial loop gave {}", t.outcome))?;
        minus += (d == -1) as usize;
    }
    Ok(format!("{shots} shots agree ({minus} with parity -1); trivial loop always +1"))
}

fn c10_forced() -> Check {
    let fs_shots = 10_000u64;
    let mut rng = seed_stream(99);
    let mut min_f = 1.0f64;
    // bins: 1..=8 attempts, then 9 or more
    let bins = 9;
    let mut counts = vec![vec![0usize; bins]; 3];
    for shot in 0..fs_shots {
        let (a, b) = random_qubit(&mut rng);
        let init = fock_initial(a, b);
        let mut forced = FockBackend::new(4, init.clone(), shot_stream(5, shot)).map_err(|e| e.to_string())?;
        let rec = run_forced(&mut forced, DEFAULT_ROLES, 256).map_err(|e| e.to_string())?;
        let mut fixed = FockBackend::new(4, init, shot_stream(6, shot)).map_err(|e| e.to_string())?;
        braid(&mut fixed, DEFAULT_ROLES).map_err(|e| e.to_string())?;
        let f = fidelity_up_to_phase(&forced.fock_state().unwrap(), &fixed.fock_state().unwrap()).map_err(|e| e.to_string())?;
        min_f = min_f.min(f);
        ensure((f - 1.0).abs() < 1e-10, format!("shot {shot}: fidelity {f}"))?;
        for (k, &n) in rec.attempts.unwrap().iter().enumerate() {
            counts[k][(n - 1).min(bins - 1)] += 1;
        }
    }
    let dist = ChiSquared::new((bins - 1) as f64).unwrap();
    let mut ps = Vec::new();
    for (k, row) in counts.iter().enumerate() {
        let chi2: f64 = row
            .iter()
            .enumerate()
            .map(|(j, &o)| {
                let p = if j + 1 < bins { 0.5f64.powi(j as i32 + 1) } else { 0.5f64.powi(bins as i32 - 1) };
                let e = p * fs_shots as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        let p = dist.sf(chi2);
        ensure(p > 0.01, format!("step {} attempts: chi2 {chi2:.2}, p {p:.4}", k + 1))?;
        ps.push(format!("{p:.3}"));
    }
    Ok(format!("{fs_shots} shots, min fidelity {min_f:.12}; geometric(1/2) fit p = {}", ps.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("1 jw structure", c1_jw_structure, Duration::from_secs(1)),
        ("2 parity operator", c2_parity_operator, Duration::from_secs(1)),
        ("3 degeneracy", c3_degeneracy, Duration::from_secs(1)),
        ("4 projection", c4_projection, Duration::from_secs(10)),
        ("5 F/R/B matrices", c5_frb, Duration::from_secs(10)),
        ("6 mbb exactness", c6_mbb_exact, Duration::from_secs(5)),
        ("7 braid statistics", c7_statistics, Duration::from_secs(60)),
        ("8 lattice realization", c8_lattice, Duration::from_secs(600)),
        ("9 hole-braiding readout", c9_hole_cnot, Duration::from_secs(60)),
        ("10 forced vs fixed cycle", c10_forced, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let t = Instant::now();
        let res = check();
        let dt = t.elapsed();
        let res = match res {
            Ok(m) if dt > budget => Err(format!("{m}; took {dt:.1?}, budget {budget:?}")),
            r => r,
        };
        match res {
            Ok(m) => println!("PASS criterion {name}: {m} [{dt:.1?}]"),
            Err(m) => {
                failed += 1;
                println!("FAIL criterion {name}: {m} [{dt:.1?}]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
