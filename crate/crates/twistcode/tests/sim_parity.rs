use twistcode::sim::{diamond_loop, CodeState};
use twistcode::{build_lattice, shot_stream, Letter, PauliString, Segment, TwistLattice};

fn hole_lattice() -> TwistLattice {
    build_lattice(12, 12, &[Segment::new(5, 4, 6)]).unwrap()
}

fn three_pairs() -> TwistLattice {
    build_lattice(14, 4, &[Segment::new(1, 1, 3), Segment::new(1, 5, 7), Segment::new(1, 9, 11)]).unwrap()
}

#[test]
fn direct_readout_is_repeatable() {
    let lat = three_pairs();
    let base = CodeState::init_ground(&lat, 0).unwrap();
    for shot in 0..50 {
        let mut st = base.reinit(shot_stream(3, shot)).unwrap();
        let r = st.majorana_bilinear(0, 2).unwrap();
        let a = st.measure_parity_direct(&r).unwrap();
        assert!(!a.error_detected);
        assert_eq!(st.expectation(&r).unwrap(), Some(a.outcome));
        let b = st.measure_parity_direct(&r).unwrap();
        assert_eq!(a.outcome, b.outcome);
        for op in lat.operators() {
            assert_eq!(st.expectation(op).unwrap(), Some(1));
        }
    }
}

#[test]
fn cross_pair_parity_is_unbiased() {
    let lat = three_pairs();
    let base = CodeState::init_ground(&lat, 0).unwrap();
    let shots = 2000;
    let mut plus = 0;
    for shot in 0..shots {
        let mut st = base.reinit(shot_stream(4, shot)).unwrap();
        let r = st.majorana_bilinear(0, 2).unwrap();
        plus += (st.measure_parity_direct(&r).unwrap().outcome == 1) as usize;
    }
    let f = plus as f64 / shots as f64;
    assert!((f - 0.5).abs() < 3.0 * (0.25 / shots as f64).sqrt(), "{f}");
}

#[test]
fn injected_error_is_flagged() {
    let lat = three_pairs();
    let mut st = CodeState::init_ground(&lat, 1).unwrap();
    let r = st.majorana_bilinear(0, 1).unwrap();
    let site = lat.site(6, 2);
    st.apply_pauli(&PauliString::single(site, Letter::X)).unwrap();
    let rep = st.measure_parity_direct(&r).unwrap();
    assert!(rep.error_detected);
    assert!(rep.syndrome_before.values().any(|&v| v == -1));
}

#[test]
fn snapshot_resumes_identically() {
    let lat = three_pairs();
    let mut st = CodeState::init_ground(&lat, 9).unwrap();
    let r01 = st.majorana_bilinear(0, 3).unwrap();
    st.measure_parity_direct(&r01).unwrap();
    let snap = st.to_snapshot();
    let mut back = CodeState::from_snapshot(&snap).unwrap();
    assert_eq!(back.tableau(), st.tableau());
    let probes: Vec<PauliString> = (1..6).map(|b| st.majorana_bilinear(0, b).unwrap()).collect();
    for p in &probes {
        assert_eq!(st.measure_parity_direct(p).unwrap().outcome, back.measure_parity_direct(p).unwrap().outcome);
    }
    assert!(CodeState::from_snapshot(&snap.replace("\"version\":1", "\"version\":99")).is_err());
}

#[test]
fn hole_and_direct_readouts_agree() {
    let lat = hole_lattice();
    let base = CodeState::init_ground(&lat, 0).unwrap();
    let parity = lat.twist_logicals(0).unwrap().0;
    let loop_faces = diamond_loop(5, 5, 4);
    let mut seen = [0usize; 2];
    for shot in 0..100 {
        let mut st = base.reinit(shot_stream(5, shot)).unwrap();
        let d = st.measure_parity_direct(&parity).unwrap().outcome;
        let h = st.measure_parity_hole(0, &loop_faces).unwrap();
        assert!(h.encloses_pair);
        assert_eq!(h.outcome, d, "shot {shot}");
        seen[(d == 1) as usize] += 1;
        let t = st.measure_parity_hole(0, &diamond_loop(2, 9, 1)).unwrap();
        assert!(!t.encloses_pair);
        assert_eq!(t.outcome, 1);
        for op in lat.operators() {
            assert_eq!(st.expectation(op).unwrap(), Some(1));
        }
    }
    assert!(seen.iter().all(|&c| c > 0) || seen[1] == 100 || seen[0] == 100);
}

#[test]
fn loop_around_one_twist_is_rejected() {
    let lat = hole_lattice();
    let mut st = CodeState::init_ground(&lat, 0).unwrap();
    let twist = lat.coords(lat.twists()[0].site);
    let res = st.measure_parity_hole(0, &diamond_loop(twist.0, twist.1 + 1, 2));
    assert!(res.is_err());
}
