use std::f64::consts::PI;

use dirac_spectra::model::Nonlinearity;
use dirac_spectra::resonance::{
    exact_threshold_phase, resonance_crossings, resonance_phase, small_amplitude_phase, threshold_profile,
    wkb_phase, wkb_toy_check, Crossing, ThresholdTag,
};

const R: f64 = 20.0;
const H: f64 = 0.01;

fn gn() -> Nonlinearity {
    Nonlinearity::gross_neveu()
}

fn exact(tag: ThresholdTag, w: f64, r: f64) -> f64 {
    let p = threshold_profile(&gn(), w, r, H).unwrap();
    exact_threshold_phase(tag, &p, p.r()).unwrap()
}

fn wkb(tag: ThresholdTag, w: f64) -> f64 {
    wkb_phase(tag, &threshold_profile(&gn(), w, R, H).unwrap()).unwrap()
}

fn interior(c: Crossing) -> f64 {
    match c {
        Crossing::Interior { omega } => omega,
        other => panic!("expected an interior crossing, got {other:?}"),
    }
}

#[test]
fn tags_round_trip() {
    for t in ThresholdTag::ALL {
        assert_eq!(ThresholdTag::parse(t.as_str()).unwrap(), t);
    }
    assert!(ThresholdTag::parse("hp-zero").is_err());
}

#[test]
fn toy_potential() {
    let t = wkb_toy_check().unwrap();
    assert!((t.exact_phase - PI).abs() < 1e-3);
    assert!((t.wkb_phase - 2f64.sqrt() * PI).abs() < 1e-8);
    assert!((t.relative_error - (2f64.sqrt() - 1.0)).abs() < 1e-3);
    // -tanh x = -1 + 2 e^{2x} + ...; the WKB amplitude tail is not compared against a reference.
    assert!((t.exact_tail_coefficient - 2.0).abs() < 1e-3);
}

#[test]
fn phases_near_listed_frequencies() {
    let tag = ThresholdTag::HplusMminus;
    assert!((exact(tag, 0.367, R) / PI - 3.0).abs() < 0.05);
    assert!((exact(tag, 0.205, R) / PI - 4.0).abs() < 0.05);
    assert!((exact(tag, 0.99, R) - 2.0 * PI).abs() < 0.1);
}

#[test]
fn crossings() {
    let tag = ThresholdTag::HplusMminus;
    let w3 = interior(resonance_crossings(&gn(), tag, 3, (0.25, 0.5), R).unwrap());
    let w4 = interior(resonance_crossings(&gn(), tag, 4, (0.1, 0.3), R).unwrap());
    assert!((w3 - 0.367).abs() < 0.02, "{w3}");
    assert!((w4 - 0.205).abs() < 0.02, "{w4}");
    match resonance_crossings(&gn(), tag, 2, (0.9, 0.99), R).unwrap() {
        Crossing::Boundary { omega, deviation_at_bracket_end } => {
            assert_eq!(omega, 1.0);
            assert!(deviation_at_bracket_end.abs() < 0.1);
        }
        other => panic!("{other:?}"),
    }
    assert!(resonance_crossings(&gn(), tag, 7, (0.3, 0.6), R).is_err());
}

#[test]
fn crossings_are_stable_in_r() {
    let tag = ThresholdTag::HplusMminus;
    for (n, bracket) in [(3, (0.25, 0.5)), (4, (0.1, 0.3))] {
        let a = interior(resonance_crossings(&gn(), tag, n, bracket, 20.0).unwrap());
        let b = interior(resonance_crossings(&gn(), tag, n, bracket, 30.0).unwrap());
        assert!((a - b).abs() < 2e-3, "n = {n}: {a} vs {b}");
    }
}

#[test]
fn exact_phase_is_monotone() {
    let tag = ThresholdTag::HplusMminus;
    let phases: Vec<f64> = (0..=16).map(|k| exact(tag, 0.15 + 0.05 * k as f64, R)).collect();
    for w in phases.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "{phases:?}");
    }
}

#[test]
fn exact_phase_is_r_independent() {
    let tag = ThresholdTag::HplusMminus;
    for w in [0.3, 0.5, 0.7] {
        let (a, b) = (exact(tag, w, 20.0), exact(tag, w, 30.0));
        assert!((a - b).abs() < 1e-3, "omega {w}: R=20 {a}, R=30 {b}");
    }
}

#[test]
fn wkb_phase_decreases_in_omega() {
    let tag = ThresholdTag::HplusMminus;
    let ws: Vec<f64> = (1..20).map(|k| 0.05 * k as f64).collect();
    let phases: Vec<f64> = ws.iter().map(|&w| wkb(tag, w)).collect();
    for (i, p) in phases.windows(2).enumerate() {
        assert!(p[1] < p[0], "wkb phase rises from omega {} to {}: {phases:?}", ws[i], ws[i + 1]);
    }
}

#[test]
fn wkb_agreement_improves_towards_one() {
    let tag = ThresholdTag::HplusMminus;
    let rel = |w| {
        let ph = resonance_phase(&gn(), tag, w, R).unwrap();
        (ph.wkb_phase - ph.exact_phase).abs() / ph.exact_phase
    };
    let (lo, hi) = (rel(0.4), rel(0.95));
    assert!(hi < lo, "relative gap at 0.95 = {hi}, at 0.4 = {lo}");
}

#[test]
fn phases_are_nonnegative_with_finite_limits() {
    for tag in ThresholdTag::ALL {
        for w in [0.2, 0.5, 0.9, 0.99, 0.999] {
            let ph = resonance_phase(&gn(), tag, w, R).unwrap();
            assert!(ph.exact_phase > 0.0 && ph.exact_phase.is_finite(), "{tag:?} {w}: {ph:?}");
            assert!(ph.wkb_phase > 0.0 && ph.wkb_phase.is_finite(), "{tag:?} {w}: {ph:?}");
        }
    }
}

#[test]
fn outer_threshold_forms_share_small_amplitude_limit() {
    let p = threshold_profile(&gn(), 0.99, R, H).unwrap();
    let base = small_amplitude_phase(&p).unwrap() / 3f64.sqrt();
    for tag in [ThresholdTag::HplusMplus, ThresholdTag::LImplus] {
        let v = wkb_phase(tag, &p).unwrap();
        assert!((v / base - 1.0).abs() < 0.01, "{tag:?}: {v} vs {base}");
    }
}

#[test]
fn other_nonlinearity_has_phases() {
    let nl = Nonlinearity::polynomial(&[0.0, 1.0, -0.3, -0.1]).unwrap();
    let ph = resonance_phase(&nl, ThresholdTag::HplusMminus, 0.5, R).unwrap();
    assert!(ph.exact_phase > 0.0 && ph.wkb_phase > 0.0);
}
