//! Threshold resonances: bounded solutions at the edges of the continuous spectrum.
//!
//! At a threshold the spectral equation is integrated across the wave from a bounded
//! far-field solution on the left. The total rotation of the solution vector measures
//! how far the threshold is from a resonance, which occurs when it equals `n pi`.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::linops::{LinearOperatorField, OperatorKind};
use crate::model::{ModelParams, Nonlinearity};
use crate::odeint::{integrate, quad, Options};
use crate::soliton::{closed_form_profile, quadrature_profile, Grid, SolitonProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ThresholdTag {
    /// `H+` at `lambda = m-`.
    HplusMminus,
    /// `H+` at `lambda = -m+`.
    HplusMplus,
    /// `L` at `lambda = i m+`, reduced to `Gamma'' + 2 m X Gamma = 0`.
    LImplus,
}

impl ThresholdTag {
    pub const ALL: [ThresholdTag; 3] =
        [ThresholdTag::HplusMminus, ThresholdTag::HplusMplus, ThresholdTag::LImplus];

    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdTag::HplusMminus => "hp-mminus",
            ThresholdTag::HplusMplus => "hp-mplus",
            ThresholdTag::LImplus => "l-implus",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown threshold tag {s:?}")))
    }
}

/// The 2x2 threshold system and its bounded data at `x = -infinity`.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdSystem<'a> {
    pub tag: ThresholdTag,
    pub profile: &'a SolitonProfile,
}

impl<'a> ThresholdSystem<'a> {
    pub fn matrix(&self, x: f64) -> Matrix2<f64> {
        let p = &self.profile.params;
        match self.tag {
            ThresholdTag::HplusMminus => self.field().h_matrix(x, p.m_minus),
            ThresholdTag::HplusMplus => self.field().h_matrix(x, -p.m_plus),
            ThresholdTag::LImplus => {
                let (v, u) = self.profile.eval(x);
                Matrix2::new(0.0, 1.0, -2.0 * p.m * (v * v - u * u), 0.0)
            }
        }
    }

    /// Bounded far-field solution on the left.
    pub fn start(&self) -> Vector2<f64> {
        match self.tag {
            ThresholdTag::HplusMminus | ThresholdTag::LImplus => Vector2::new(1.0, 0.0),
            ThresholdTag::HplusMplus => Vector2::new(0.0, 1.0),
        }
    }

    fn field(&self) -> LinearOperatorField<'a> {
        LinearOperatorField { kind: OperatorKind::Hplus, profile: self.profile }
    }
}

/// Smallest `R` with `v(R)^2` below `1e-6`, never less than `r`.
pub fn effective_radius(params: &ModelParams, r: f64) -> f64 {
    let tail = (8.0 * (1.0 - params.omega / params.m) * 1e6).max(1.0).ln() / (2.0 * params.kappa);
    r.max(tail)
}

const PHASE_SAMPLE: f64 = 0.05;

/// Total rotation `|theta(R) - theta(-R)|` of the solution vector of the threshold
/// system started from its bounded data at `x = -R`. Beyond the grid the profile
/// decays exponentially.
pub fn exact_threshold_phase(tag: ThresholdTag, profile: &SolitonProfile, r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidConfig(format!("R = {r} must be positive")));
    }
    let sys = ThresholdSystem { tag, profile };
    let n = (2.0 * r / PHASE_SAMPLE).ceil() as usize;
    let samples: Vec<f64> = (1..n).map(|k| -r + 2.0 * r * k as f64 / n as f64).collect();
    let traj = integrate(|x| sys.matrix(x), sys.start(), -r, r, &samples, &Options::with_tol(1e-11))?;
    let mut total = 0.0;
    let mut prev = sys.start()[1].atan2(sys.start()[0]);
    for psi in &traj.psi[1..] {
        let th = psi[1].atan2(psi[0]);
        let mut d = th - prev;
        d -= (2.0 * PI) * ((d + PI) / (2.0 * PI)).floor();
        total += d;
        prev = th;
    }
    Ok(total.abs())
}

/// WKB phase integral and the fraction of grid points where its radicand was negative.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WkbPhase {
    pub value: f64,
    pub clamped_fraction: f64,
}

fn wkb_radicand(tag: ThresholdTag, m: f64, v: f64, u: f64) -> f64 {
    let v2 = v * v;
    match tag {
        ThresholdTag::HplusMminus => (2.0 - v2) * 3.0 * v2,
        ThresholdTag::HplusMplus => (2.0 - 3.0 * v2) * v2,
        ThresholdTag::LImplus => 2.0 * m * (v2 - u * u),
    }
}

/// `hp-mminus`: integral of `sqrt((2 - v^2) 3 v^2)`; `hp-mplus`: of `sqrt((2 - 3v^2) v^2)`;
/// `l-implus`: of `sqrt(2 m X)`. Negative radicands contribute zero.
pub fn wkb_phase_detailed(tag: ThresholdTag, profile: &SolitonProfile) -> Result<WkbPhase> {
    let m = profile.nl.m();
    let f = |x: f64| {
        let (v, u) = profile.eval(x);
        wkb_radicand(tag, m, v, u).max(0.0).sqrt()
    };
    // Integrands are even; split at the turning points of the clamped region.
    let mut breaks = vec![0.0];
    let n = profile.len();
    let mut clamped = 0usize;
    for i in 0..n {
        let neg = wkb_radicand(tag, m, profile.v[i], profile.u[i]) < 0.0;
        clamped += neg as usize;
        if i > profile.grid.n && i + 1 < n {
            let next = wkb_radicand(tag, m, profile.v[i + 1], profile.u[i + 1]) < 0.0;
            if neg != next {
                breaks.push(profile.x[i]);
            }
        }
    }
    let clamped_fraction = clamped as f64 / n as f64;
    if clamped > 0 {
        log::info!(
            "{}: radicand clamped at {:.2}% of grid points (omega = {})",
            tag.as_str(),
            100.0 * clamped_fraction,
            profile.omega()
        );
    }
    breaks.push(f64::INFINITY);
    let mut half = 0.0;
    for w in breaks.windows(2) {
        half += quad(f, w[0], w[1], 1e-12)?;
    }
    Ok(WkbPhase { value: 2.0 * half, clamped_fraction })
}

pub fn wkb_phase(tag: ThresholdTag, profile: &SolitonProfile) -> Result<f64> {
    Ok(wkb_phase_detailed(tag, profile)?.value)
}

/// `sqrt(6) * integral of sqrt(X)`, the small-amplitude form of the `hp-mminus` phase.
pub fn small_amplitude_phase(profile: &SolitonProfile) -> Result<f64> {
    let f = |x: f64| {
        let (v, u) = profile.eval(x);
        (v * v - u * u).max(0.0).sqrt()
    };
    Ok(6f64.sqrt() * 2.0 * quad(f, 0.0, f64::INFINITY, 1e-13)?)
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ResonancePhase {
    pub omega: f64,
    pub exact_phase: f64,
    pub wkb_phase: f64,
    pub n_nearest: i64,
}

/// Profile used for threshold computations: closed form for Gross-Neveu, quadrature
/// otherwise, on `[-R_eff, R_eff]` with step `h`.
pub fn threshold_profile(nl: &Nonlinearity, omega: f64, r: f64, h: f64) -> Result<SolitonProfile> {
    let params = ModelParams::for_model(nl, omega)?;
    let grid = Grid::new(effective_radius(&params, r), h)?;
    if nl.is_gross_neveu() {
        closed_form_profile(omega, grid)
    } else {
        quadrature_profile(nl, omega, grid)
    }
}

pub const DEFAULT_R: f64 = 20.0;
pub const DEFAULT_H: f64 = 0.01;

pub fn resonance_phase(nl: &Nonlinearity, tag: ThresholdTag, omega: f64, r: f64) -> Result<ResonancePhase> {
    let profile = threshold_profile(nl, omega, r, DEFAULT_H)?;
    let r_eff = profile.r();
    let exact = exact_threshold_phase(tag, &profile, r_eff)?;
    let wkb = wkb_phase(tag, &profile)?;
    Ok(ResonancePhase { omega, exact_phase: exact, wkb_phase: wkb, n_nearest: (exact / PI).round() as i64 })
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Crossing {
    /// The phase equals `n pi` at `omega` (bisection width below `1e-4`).
    Interior { omega: f64 },
    /// The phase tends to `n pi` at the end `omega = m` of the admissible range.
    Boundary { omega: f64, deviation_at_bracket_end: f64 },
}

const CROSSING_TOL: f64 = 1e-4;
const BOUNDARY_PHASE_TOL: f64 = 0.1;
const BOUNDARY_OMEGA_TOL: f64 = 0.05;

/// `omega` in `bracket` where the exact threshold phase crosses `n pi`.
pub fn resonance_crossings(
    nl: &Nonlinearity,
    tag: ThresholdTag,
    n: i64,
    bracket: (f64, f64),
    r: f64,
) -> Result<Crossing> {
    let (mut a, mut b) = bracket;
    if !(a < b) {
        return Err(Error::InvalidConfig(format!("bracket ({a}, {b}) must be increasing")));
    }
    let target = n as f64 * PI;
    let f = |w: f64| -> Result<f64> {
        let p = threshold_profile(nl, w, r, DEFAULT_H)?;
        Ok(exact_threshold_phase(tag, &p, p.r())? - target)
    };
    let (fa, fb) = (f(a)?, f(b)?);
    if fa * fb > 0.0 {
        let m = nl.m();
        if b >= m - BOUNDARY_OMEGA_TOL && fb.abs() < BOUNDARY_PHASE_TOL && fb.abs() < fa.abs() {
            return Ok(Crossing::Boundary { omega: m, deviation_at_bracket_end: fb });
        }
        return Err(Error::NoCrossing(format!(
            "phase - {n} pi is {fa:.4} at omega = {a} and {fb:.4} at omega = {b}"
        )));
    }
    if fa == 0.0 {
        return Ok(Crossing::Interior { omega: a });
    }
    let mut fa = fa;
    while b - a > CROSSING_TOL {
        let c = 0.5 * (a + b);
        let fc = f(c)?;
        if fc == 0.0 {
            return Ok(Crossing::Interior { omega: c });
        }
        if fa * fc < 0.0 {
            b = c;
        } else {
            a = c;
            fa = fc;
        }
    }
    Ok(Crossing::Interior { omega: 0.5 * (a + b) })
}

/// Comparison of the exact and WKB phases for `Z'' = -2 sech^2(x) Z`, whose bounded
/// solution is `Z = -tanh x`, and of their left tails `1 - c e^{2x}`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ToyReport {
    pub exact_phase: f64,
    pub wkb_phase: f64,
    pub relative_error: f64,
    pub exact_tail_coefficient: f64,
    pub wkb_tail_coefficient: f64,
}

pub fn wkb_toy_check() -> Result<ToyReport> {
    let l: f64 = 20.0;
    let x_tail = -8.0;
    let a = |x: f64| Matrix2::new(0.0, 1.0, -2.0 / x.cosh().powi(2), 0.0);
    let start = Vector2::new(l.tanh(), -1.0 / l.cosh().powi(2));
    let n = (2.0 * l / PHASE_SAMPLE).ceil() as usize;
    let mut samples: Vec<f64> = (1..n).map(|k| -l + 2.0 * l * k as f64 / n as f64).collect();
    samples.push(x_tail);
    let traj = integrate(a, start, -l, l, &samples, &Options::with_tol(1e-13))?;
    let mut total = 0.0;
    let mut prev = start[1].atan2(start[0]);
    let mut z_tail = f64::NAN;
    for (x, psi) in traj.x.iter().zip(&traj.psi).skip(1) {
        let th = psi[1].atan2(psi[0]);
        let mut d = th - prev;
        d -= (2.0 * PI) * ((d + PI) / (2.0 * PI)).floor();
        total += d;
        prev = th;
        if *x == x_tail {
            let i = traj.x.iter().position(|y| y == x).unwrap();
            z_tail = traj.reconstructed(i)[0];
        }
    }
    let exact_phase = total.abs();
    let k = |y: f64| 2f64.sqrt() / y.cosh();
    let wkb_phase = quad(k, f64::NEG_INFINITY, f64::INFINITY, 1e-13)?;
    let phi_tail = quad(k, f64::NEG_INFINITY, x_tail, 1e-16)?;
    let e2 = (2.0 * x_tail).exp();
    Ok(ToyReport {
        exact_phase,
        wkb_phase,
        relative_error: (wkb_phase - exact_phase) / exact_phase,
        exact_tail_coefficient: (1.0 - z_tail) / e2,
        wkb_tail_coefficient: 2.0 * (0.5 * phi_tail).sin().powi(2) / e2,
    })
}
