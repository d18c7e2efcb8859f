use dirac_spectra::evans::{
    evans_pair, h_indicator, h_spectrum_scan, refine_zero, scan_region, shoot_to, ParityClass, Rect,
};
use dirac_spectra::linops::{sqrt_p, OperatorKind};
use dirac_spectra::odeint::Options;
use dirac_spectra::soliton::{closed_form_profile, Grid, SolitonProfile};
use num_complex::Complex64 as C;
use proptest::prelude::*;

const R: f64 = 20.0;

fn profile(w: f64) -> SolitonProfile {
    closed_form_profile(w, Grid::new(R, 0.01).unwrap()).unwrap()
}

#[test]
fn parity_of_shooting_solutions() {
    let p = profile(0.4);
    let lam = C::new(0.2, 0.3);
    let opts = Options::with_tol(1e-12);
    let right = shoot_to(lam, &p, 8.0, &[], &opts).unwrap();
    let left = shoot_to(lam, &p, -8.0, &[], &opts).unwrap();
    let (a, b) = (right.reconstructed(right.x.len() - 1), left.reconstructed(left.x.len() - 1));
    for (col, class) in [(0, ParityClass::Xminus), (1, ParityClass::Xplus), (2, ParityClass::Xminus), (3, ParityClass::Xplus)] {
        let s = class.reflection();
        let scale = a.column(col).norm();
        for k in 0..4 {
            assert!((b[(k, col)] - a[(k, col)] * s[k]).norm() < 1e-8 * scale, "column {col}");
        }
    }
}

#[test]
fn growth_far_in_right_half_plane() {
    let w = 0.5;
    let p = profile(w);
    let lam = C::new(3.0, 0.5);
    // exp(i xi x) grows at |Im xi| = |Re sqrt(1 - (omega +- i lambda)^2)|.
    let rate = [1.0, -1.0]
        .iter()
        .map(|s| sqrt_p(1.0 - (C::new(w, 0.0) + C::i() * lam * *s).powi(2)).re.abs())
        .fold(0.0, f64::max);
    let t = shoot_to(lam, &p, 20.0, &[10.0], &Options::with_tol(1e-11)).unwrap();
    let i10 = t.x.iter().position(|&x| x == 10.0).unwrap();
    let last = t.x.len() - 1;
    for j in 0..4 {
        let ln = |i: usize| t.psi[i].column(j).norm().ln() + t.log_scale[i][j];
        let fit = (ln(last) - ln(i10)) / 10.0;
        assert!((fit / rate - 1.0).abs() < 0.02, "column {j}: {fit} vs {rate}");
    }
}

#[test]
fn known_eigenvalues_are_zeros() {
    let p = profile(0.5);
    let near = evans_pair(C::new(0.1, 1.1), &p, R).unwrap();
    let at_i = evans_pair(C::new(0.0, 1.0), &p, R).unwrap();
    assert!(at_i.e_minus.norm().min(at_i.e_plus.norm()) < 1e-6 * near.e_minus.norm().max(near.e_plus.norm()));
    let at_0 = evans_pair(C::new(0.0, 0.0), &p, R).unwrap();
    let near0 = evans_pair(C::new(0.1, 0.1), &p, R).unwrap();
    assert!(at_0.e_minus.norm() < 1e-6 * near0.e_minus.norm());
    assert!(at_0.e_plus.norm() < 1e-6 * near0.e_plus.norm());
}

#[test]
fn no_zero_at_trial_point() {
    let s = evans_pair(C::new(0.15, 0.8), &profile(0.2), R).unwrap();
    assert!(s.e_minus.norm() > 0.1 && s.e_plus.norm() > 0.1, "{s:?}");
}

#[test]
fn r_stability_away_from_spectrum() {
    for (w, lam) in [(0.2, C::new(0.15, 0.8)), (0.5, C::new(0.3, 0.2)), (0.8, C::new(0.4, -0.1))] {
        let p = profile(w);
        let (a, b) = (evans_pair(lam, &p, 15.0).unwrap(), evans_pair(lam, &p, 20.0).unwrap());
        for (x, y) in [(a.e_minus, b.e_minus), (a.e_plus, b.e_plus)] {
            assert!(((x.norm() - y.norm()) / y.norm()).abs() < 0.01, "omega {w}: {x} vs {y}");
        }
    }
}

#[test]
fn scan_finds_two_i_omega() {
    let p = profile(0.5);
    let map = scan_region(&p, Rect::new((-0.05, 0.05), (0.95, 1.05)), 5, 5, R).unwrap();
    let i = C::new(0.0, 1.0);
    assert!(map.candidates_plus.iter().chain(&map.candidates_minus).any(|c| c.rect.contains(i, 1e-12)));
}

#[test]
fn degenerate_rect_gives_empty_map() {
    let map = scan_region(&profile(0.5), Rect::new((0.1, 0.1), (0.2, 0.2)), 5, 5, R).unwrap();
    assert!(map.is_empty());
}

#[test]
fn scan_is_conjugation_symmetric() {
    let p = profile(0.5);
    let (n_re, n_im) = (5, 23);
    let map = scan_region(&p, Rect::new((-0.05, 0.05), (-1.1, 1.1)), n_re, n_im, R).unwrap();
    for class in [ParityClass::Xminus, ParityClass::Xplus] {
        let cells = map.candidates(class);
        for c in cells {
            let mirror = n_im - 2 - c.j;
            assert!(cells.iter().any(|d| d.i == c.i && d.j == mirror), "{class:?} cell {c:?}");
        }
    }
    assert!(!map.candidates_plus.is_empty());
}

#[test]
fn refine_examples() {
    let p = profile(0.5);
    let z = refine_zero(&p, C::new(0.02, 0.98), R).unwrap();
    assert!((z.lambda - C::new(0.0, 1.0)).norm() < 1e-6);
    let z0 = refine_zero(&p, C::new(0.01, 0.01), R).unwrap();
    assert!(z0.lambda.norm() < 1e-6);
    assert!(z0.multiplicity >= 2);
}

#[test]
fn refine_from_zero_free_point_is_flagged() {
    let p = profile(0.2);
    let start = C::new(0.15, 0.8);
    let cell = Rect::new((0.14, 0.16), (0.79, 0.81));
    match refine_zero(&p, start, R) {
        Err(_) => {}
        Ok(z) => assert!(!cell.contains(z.lambda, 0.0), "{z:?}"),
    }
}

#[test]
fn gap_spectra_at_half() {
    let p = profile(0.5);
    let hm = h_spectrum_scan(OperatorKind::Hminus, &p, (-2.0, 2.0), 0.01, R).unwrap();
    assert_eq!(hm.len(), 2, "{hm:?}");
    assert!((hm[0] + 1.0).abs() < 1e-6 && hm[1].abs() < 1e-6);
    let hp = h_spectrum_scan(OperatorKind::Hplus, &p, (-2.0, 2.0), 0.01, R).unwrap();
    for t in [-1.0, 0.0] {
        assert!(hp.iter().any(|e| (e - t).abs() < 1e-6), "{hp:?}");
    }
    for e in hp {
        assert!(e > -1.5 + 1e-3 && e < 0.5 - 1e-3);
    }
}

#[test]
fn indicator_is_finite_near_edges() {
    let p = profile(0.5);
    for lam in [0.5 - 1e-3, -1.5 + 1e-3] {
        for psi0 in [[1.0, 0.0], [0.0, 1.0]] {
            assert!(h_indicator(OperatorKind::Hplus, &p, lam, psi0, R).unwrap().is_finite());
        }
    }
}

#[test]
fn h_plus_eigenvalues_are_indicator_roots() {
    let p = profile(0.5);
    let hp = h_spectrum_scan(OperatorKind::Hplus, &p, (-2.0, 2.0), 0.01, R).unwrap();
    for e in hp {
        let flips = [[1.0, 0.0], [0.0, 1.0]].iter().any(|&psi0| {
            let f = |l: f64| h_indicator(OperatorKind::Hplus, &p, l, psi0, R).unwrap();
            f(e - 1e-6) * f(e + 1e-6) < 0.0
        });
        assert!(flips, "eigenvalue {e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn conjugate_lambda_gives_conjugate_evans(re in 0.05f64..0.6, im in -1.2f64..1.2, w in 0.2f64..0.9) {
        let p = closed_form_profile(w, Grid::new(R, 0.05).unwrap()).unwrap();
        let lam = C::new(re, im);
        let (a, b) = (evans_pair(lam, &p, R).unwrap(), evans_pair(lam.conj(), &p, R).unwrap());
        for (x, y) in [(a.e_minus, b.e_minus), (a.e_plus, b.e_plus)] {
            prop_assert!((x.norm() - y.norm()).abs() <= 1e-6 * x.norm().max(y.norm()), "{} vs {}", x, y);
        }
    }
}
