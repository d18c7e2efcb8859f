use approx::assert_abs_diff_eq;
use dirac_spectra::model::{ModelParams, Nonlinearity};
use dirac_spectra::soliton::{
    charge, closed_form_profile, effective_potential, quadrature_profile, Grid,
};
use proptest::prelude::*;

const OMEGAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

fn grid() -> Grid {
    Grid::new(20.0, 0.01).unwrap()
}

fn at(p: &dirac_spectra::SolitonProfile, x: f64) -> usize {
    p.x.iter().position(|&y| (y - x).abs() < 1e-9).unwrap()
}

#[test]
fn center_and_tails_at_half() {
    let p = closed_form_profile(0.5, grid()).unwrap();
    let i = at(&p, 0.0);
    assert_abs_diff_eq!(p.v[i], 1.0, epsilon = 1e-14);
    assert_abs_diff_eq!(p.u[i], 0.0, epsilon = 1e-14);
    for &end in &[0, p.len() - 1] {
        assert!(p.v[end].abs() < 1e-6 && p.u[end].abs() < 1e-6);
    }
}

#[test]
fn value_at_one_from_sech_tanh_chain() {
    let (k, mu) = (0.75f64.sqrt(), 1.0 / 3.0);
    let (s, t) = (1.0 / k.cosh(), k.tanh());
    let v = 1.0 * s / (1.0 - mu * t * t);
    let u = mu.sqrt() * t * v;
    let c = closed_form_profile(0.5, grid()).unwrap();
    let q = quadrature_profile(&Nonlinearity::gross_neveu(), 0.5, grid()).unwrap();
    let i = at(&c, 1.0);
    assert_abs_diff_eq!(c.v[i], v, epsilon = 1e-14);
    assert_abs_diff_eq!(c.u[i], u, epsilon = 1e-14);
    assert_abs_diff_eq!(q.v[i], v, epsilon = 1e-6);
    assert_abs_diff_eq!(q.u[i], u, epsilon = 1e-6);
}

#[test]
fn profile_identities_hold() {
    let nl = Nonlinearity::gross_neveu();
    for &w in &OMEGAS {
        let c = closed_form_profile(w, grid()).unwrap().residuals();
        let q = quadrature_profile(&nl, w, grid()).unwrap().residuals();
        for (r, tol) in [(c, 1e-8), (q, 1e-6)] {
            for v in [r.h, r.system, r.parity, r.y_relation, r.charge_relation, r.center] {
                assert!(v < tol, "omega {w}: {r:?}");
            }
        }
    }
}

#[test]
fn decay_rate_matches_kappa() {
    for &w in &OMEGAS {
        let p = closed_form_profile(w, grid()).unwrap();
        let (xs, ys): (Vec<f64>, Vec<f64>) = p
            .x
            .iter()
            .zip(&p.v)
            .filter(|(x, _)| (10.0..=20.0).contains(&x.abs()))
            .map(|(x, v)| (x.abs(), v.abs().ln()))
            .unzip();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        let rate = -sxy / sxx;
        assert!((rate / p.kappa() - 1.0).abs() < 0.02, "omega {w}: rate {rate}");
    }
}

#[test]
fn small_amplitude_structure() {
    let p = closed_form_profile(0.99, grid()).unwrap();
    let zmax = p.z.iter().cloned().fold(0.0, f64::max);
    let ymax = p.y.iter().map(|y| y.abs()).fold(0.0, f64::max);
    let dmax = p.big_x.iter().zip(&p.z).map(|(x, z)| (x - z).abs()).fold(0.0, f64::max);
    assert!(ymax <= 1.2 * p.mu().sqrt() * zmax);
    assert!(dmax <= 2.0 * p.mu() * zmax);
}

#[test]
fn quadrature_for_other_nonlinearity() {
    let nl = Nonlinearity::polynomial(&[0.0, 1.0, -0.3, -0.1]).unwrap();
    for &w in &[0.3, 0.7] {
        let p = quadrature_profile(&nl, w, grid()).unwrap();
        let c = at(&p, 0.0);
        assert_abs_diff_eq!(p.z[c], p.big_x[c], epsilon = 1e-12);
        for i in c + 1..p.len() {
            assert!(p.big_x[i] <= p.big_x[i - 1] + 1e-14);
        }
        assert!(p.residuals().system < 1e-6);
    }
}

#[test]
fn effective_potential_values() {
    let nl = Nonlinearity::gross_neveu();
    let w = 0.4;
    assert_eq!(effective_potential(&nl, w, 0.0), 0.0);
    assert_abs_diff_eq!(effective_potential(&nl, w, 2.0 * (1.0 - w)), 0.0, epsilon = 1e-14);
    let d = 1e-4;
    let u = |x| effective_potential(&nl, w, x);
    assert_abs_diff_eq!((u(d) - u(-d)) / (2.0 * d), 0.0, epsilon = 1e-7);
    assert_abs_diff_eq!((u(d) - 2.0 * u(0.0) + u(-d)) / (d * d), 4.0 * (w * w - 1.0), epsilon = 1e-5);
}

// Q = int Z dx = 2 sqrt(1 - w^2) / w for Gross-Neveu.
fn charge_oracle(w: f64) -> f64 {
    2.0 * (1.0 - w * w).sqrt() / w
}

#[test]
fn charge_values() {
    let p = closed_form_profile(0.6, grid()).unwrap();
    assert_abs_diff_eq!(charge(&p), 8.0 / 3.0, epsilon = 1e-6);
    let near_one = closed_form_profile(0.999, Grid::new(60.0, 0.01).unwrap()).unwrap();
    assert!(charge(&near_one) < 0.1);
    let fine = closed_form_profile(0.6, Grid::new(20.0, 0.005).unwrap()).unwrap();
    assert_abs_diff_eq!(charge(&p), charge(&fine), epsilon = 1e-6);
}

#[test]
fn eval_interpolates_between_nodes() {
    let p = quadrature_profile(&Nonlinearity::gross_neveu(), 0.5, grid()).unwrap();
    let params = ModelParams::new(1.0, 0.5).unwrap();
    for &x in &[0.005, 1.2345, -3.3333, 7.77] {
        let (v, u) = p.eval(x);
        let (cv, cu, _, _) = dirac_spectra::soliton::closed_form_point(&params, x);
        assert_abs_diff_eq!(v, cv, epsilon = 1e-6);
        assert_abs_diff_eq!(u, cu, epsilon = 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn charge_matches_oracle(w in 0.2f64..0.95) {
        let p = closed_form_profile(w, Grid::new(40.0, 0.01).unwrap()).unwrap();
        prop_assert!((charge(&p) - charge_oracle(w)).abs() < 1e-6);
    }

    #[test]
    fn quadrature_agrees_with_closed_form(w in 0.1f64..0.95) {
        let g = Grid::new(20.0, 0.02).unwrap();
        let c = closed_form_profile(w, g).unwrap();
        let q = quadrature_profile(&Nonlinearity::gross_neveu(), w, g).unwrap();
        let sup = (0..c.len()).map(|i| (c.v[i] - q.v[i]).abs().max((c.u[i] - q.u[i]).abs())).fold(0.0, f64::max);
        prop_assert!(sup < 1e-6, "sup {}", sup);
    }

    #[test]
    fn parity(w in 0.05f64..0.99) {
        let p = closed_form_profile(w, Grid::new(10.0, 0.05).unwrap()).unwrap();
        let n = p.len();
        for i in 0..n {
            prop_assert!((p.v[i] - p.v[n - 1 - i]).abs() < 1e-15);
            prop_assert!((p.u[i] + p.u[n - 1 - i]).abs() < 1e-15);
        }
    }
}
