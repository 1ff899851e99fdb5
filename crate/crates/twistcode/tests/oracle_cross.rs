use twistcode::build_lattice;
use twistcode::oracle::{oracle_check, random_sequence};

#[test]
fn tableau_matches_dense_on_sixteen_sites() {
    let lat = build_lattice(4, 4, &[]).unwrap();
    let seq = random_sequence(&lat, 12, 5);
    let rep = oracle_check(&lat, &seq, 1000, 17).unwrap();
    assert!(rep.ground_agrees);
    assert_eq!(rep.per_seed_mismatches, 0);
    assert!(rep.steps.iter().any(|s| s.deterministic));
    assert!(rep.steps.iter().any(|s| !s.deterministic));
    for s in &rep.steps {
        assert!(s.within, "{s:?}");
    }
}
