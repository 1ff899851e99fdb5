use nalgebra::Matrix2;
use num_complex::Complex64 as C64;
use twistcode::anyon::{pair_transform, FrbSet, Pairing, Parity, TopoState};
use twistcode::dense::fidelity_up_to_phase;
use twistcode::seed_stream;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn close(a: &Matrix2<C64>, b: &Matrix2<C64>) -> bool {
    (a - b).iter().all(|x| x.norm() < 1e-12)
}

fn p(s: &str) -> Pairing {
    s.parse().unwrap()
}

fn scaled(phase: f64, m: [[C64; 2]; 2]) -> Matrix2<C64> {
    let f = C64::from_polar(std::f64::consts::FRAC_1_SQRT_2, phase);
    Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]) * f
}

const PI8: f64 = std::f64::consts::PI / 8.0;

#[test]
fn b_matrix_from_f_and_r() {
    let frb = FrbSet::ising();
    let want = scaled(PI8, [[c(1., 0.), c(0., -1.)], [c(0., -1.), c(1., 0.)]]);
    assert!(close(&frb.b, &want), "{}", frb.b);
}

#[test]
fn even_sector_transforms() {
    let u = pair_transform(Parity::Even, &p("12,34"), &p("13,24")).unwrap();
    assert!(close(&u, &scaled(PI8, [[c(1., 0.), c(0., -1.)], [c(0., -1.), c(1., 0.)]])), "{u}");
    let u = pair_transform(Parity::Even, &p("12,34"), &p("14,23")).unwrap();
    assert!(close(&u, &scaled(0.0, [[c(1., 0.), c(1., 0.)], [c(0., -1.), c(0., 1.)]])), "{u}");
    let u = pair_transform(Parity::Even, &p("14,23"), &p("13,24")).unwrap();
    assert!(close(&u, &scaled(-PI8, [[c(1., 0.), c(-1., 0.)], [c(1., 0.), c(1., 0.)]])), "{u}");
}

#[test]
fn odd_sector_transforms() {
    let u = pair_transform(Parity::Odd, &p("12,34"), &p("13,24")).unwrap();
    assert!(close(&u, &scaled(PI8, [[c(1., 0.), c(0., -1.)], [c(0., -1.), c(1., 0.)]])), "{u}");
    let u = pair_transform(Parity::Odd, &p("12,34"), &p("14,23")).unwrap();
    assert!(close(&u, &scaled(0.0, [[c(0., 1.), c(0., -1.)], [c(1., 0.), c(1., 0.)]])), "{u}");
    let u = pair_transform(Parity::Odd, &p("14,23"), &p("13,24")).unwrap();
    assert!(close(&u, &scaled(-PI8, [[c(1., 0.), c(1., 0.)], [c(-1., 0.), c(1., 0.)]])), "{u}");
}

#[test]
fn transforms_compose() {
    for par in [Parity::Even, Parity::Odd] {
        let a = pair_transform(par, &p("12,34"), &p("13,24")).unwrap();
        let b = pair_transform(par, &p("14,23"), &p("13,24")).unwrap() * pair_transform(par, &p("12,34"), &p("14,23")).unwrap();
        assert!(close(&a, &b));
    }
}

#[test]
fn fock_image_is_basis_independent() {
    let pairings = ["12,34", "13,24", "14,23"];
    let amps = vec![c(0.6, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.8)];
    let s = TopoState::new(p("12,34"), amps).unwrap();
    let v = s.to_fock();
    for q in pairings {
        let t = s.transform(&p(q)).unwrap();
        let f = fidelity_up_to_phase(&v, &t.to_fock()).unwrap();
        assert!((f - 1.0).abs() < 1e-12, "{q}: {f}");
    }
    let s6 = TopoState::basis(p("12,35,46"), 0).unwrap();
    let v6 = s6.to_fock();
    for q in ["12,34,56", "13,25,46", "16,23,45"] {
        let f = fidelity_up_to_phase(&v6, &s6.transform(&p(q)).unwrap().to_fock()).unwrap();
        assert!((f - 1.0).abs() < 1e-12, "{q}: {f}");
    }
}

#[test]
fn labels_match_fock_numbers() {
    use twistcode::dense::FockSpace;
    let fs = FockSpace::new(6).unwrap();
    let s = TopoState::basis(p("12,35,46"), 0).unwrap();
    let mut rng = seed_stream(3);
    for (a, b) in [(1, 3), (1, 4), (2, 6), (3, 4), (5, 6)] {
        let t = s.transform(&s.pairing().with_pair(a, b).unwrap()).unwrap();
        for forced in [0u8, 1] {
            let Ok((l, post)) = t.measure_pair(a, b, &mut rng, Some(forced)) else { continue };
            let n = l ^ post.fock_flip(a, b).unwrap() as u8;
            let e = post.to_fock().expectation(&fs.bilinear(a, b)).unwrap();
            assert!((e - (2.0 * n as f64 - 1.0)).abs() < 1e-12, "({a},{b}) label {l}: {e}");
        }
    }
}
