use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use twistcode::dense::pauli_matrix;
use twistcode::pauli::{Letter, PauliString, Phase};

const SITES: usize = 4;

fn letter() -> impl Strategy<Value = Option<Letter>> {
    prop_oneof![Just(None), Just(Some(Letter::X)), Just(Some(Letter::Y)), Just(Some(Letter::Z))]
}

fn pauli() -> impl Strategy<Value = PauliString> {
    (proptest::collection::vec(letter(), SITES), 0i64..4).prop_map(|(ls, k)| {
        PauliString::from_letters(ls.into_iter().enumerate().filter_map(|(s, l)| l.map(|l| (s, l))))
            .with_phase(Phase::from_exponent(k))
    })
}

/// Every string over `n` sites with phase +1.
fn all_strings(n: usize) -> Vec<PauliString> {
    (0..4usize.pow(n as u32))
        .map(|mut code| {
            let mut letters = Vec::new();
            for s in 0..n {
                if let Some(l) = [None, Some(Letter::X), Some(Letter::Y), Some(Letter::Z)][code % 4] {
                    letters.push((s, l));
                }
                code /= 4;
            }
            PauliString::from_letters(letters)
        })
        .collect()
}

fn matrix(p: &PauliString) -> DMatrix<C64> {
    pauli_matrix(p, SITES)
}

#[test]
fn commutes_matches_dense_commutator_exhaustively() {
    let all = all_strings(SITES);
    let mats: Vec<_> = all.iter().map(matrix).collect();
    for (i, p) in all.iter().enumerate() {
        for (j, q) in all.iter().enumerate().skip(i) {
            let pq = &mats[i] * &mats[j];
            let qp = &mats[j] * &mats[i];
            let dense = (pq - qp).norm() < 1e-12;
            assert_eq!(p.commutes(q), dense, "{p} vs {q}");
        }
    }
}

#[test]
fn spec_products() {
    let x1 = PauliString::single(1, Letter::X);
    let z1 = PauliString::single(1, Letter::Z);
    assert_eq!(x1.multiply(&z1), PauliString::single(1, Letter::Y).with_phase(Phase::MINUS_I));
    assert!(x1.multiply(&x1).is_identity());
    assert_eq!(x1.multiply(&x1).phase(), Phase::ONE);
    let a: PauliString = "X1 Z2".parse().unwrap();
    let b: PauliString = "Z1 X2".parse().unwrap();
    assert_eq!(a.multiply(&b), "Y1 Y2".parse().unwrap());
    assert!(!x1.commutes(&z1));
    assert!(x1.commutes(&PauliString::single(2, Letter::Z)));
}

#[test]
fn text_rendering() {
    let p: PauliString = "i·X12 Y11 Y10 Z9 X20 Z19".parse().unwrap();
    assert_eq!(p.phase(), Phase::I);
    assert_eq!(p.weight(), 6);
    assert_eq!(p.to_string(), "i·Z9 Y10 Y11 X12 Z19 X20");
    for s in ["", "i·", "-", "-i·"] {
        let q: PauliString = format!("{s}X0").parse().unwrap();
        assert_eq!(q.to_string(), format!("{s}X0"));
    }
}

proptest! {
    #[test]
    fn associative(p in pauli(), q in pauli(), r in pauli()) {
        prop_assert_eq!(p.multiply(&q).multiply(&r), p.multiply(&q.multiply(&r)));
    }

    #[test]
    fn commute_or_anticommute(p in pauli(), q in pauli()) {
        let pq = p.multiply(&q);
        let qp = q.multiply(&p);
        let anti = pq == qp.clone().with_phase(qp.phase().neg());
        prop_assert!(p.commutes(&q) != anti);
        prop_assert_eq!(p.commutes(&q), pq == qp);
    }

    #[test]
    fn square_has_empty_support(p in pauli()) {
        let sq = p.multiply(&p);
        prop_assert!(sq.is_identity());
        prop_assert!(sq.phase().is_real());
    }

    #[test]
    fn product_matches_matrix_product(p in pauli(), q in pauli()) {
        let lhs = matrix(&p.multiply(&q));
        let rhs = matrix(&p) * matrix(&q);
        prop_assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn display_parses_back(p in pauli()) {
        let q: PauliString = p.to_string().parse().unwrap();
        prop_assert_eq!(q, p);
    }
}
