//! Scalar self-interaction `G(X)` with `X = v^2 - u^2`, and the frequency-dependent
//! constants shared by the rest of the crate.

use crate::error::{Error, Result};

const AMPLITUDE_EPS: f64 = 1e-12;
const DEFAULT_X_MAX: f64 = 1e3;
const SCAN_POINTS: usize = 4000;
const INEQUALITY_SAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    GrossNeveu,
    /// Coefficients of `G` in increasing powers, constant term zero.
    Polynomial(Vec<f64>),
}

/// The nonlinearity: `g`, its derivative, and the antiderivative `G` with `G(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Nonlinearity {
    kind: Kind,
    x_max: f64,
}

impl Nonlinearity {
    /// `G(X) = X - X^2/2`, so `g = 1 - X`, `g' = -1`, `m = 1`.
    pub fn gross_neveu() -> Self {
        Self { kind: Kind::GrossNeveu, x_max: DEFAULT_X_MAX }
    }

    /// `G(X) = sum_k c_k X^k`. The constant term is forced to zero; `c_1 = g(0)` must be positive.
    pub fn polynomial(coeffs: &[f64]) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidConfig("G_coeffs needs at least a linear term".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidConfig("G_coeffs must be finite".into()));
        }
        let mut c = coeffs.to_vec();
        if c[0] != 0.0 {
            log::warn!("G_coeffs constant term {} replaced by 0", c[0]);
            c[0] = 0.0;
        }
        while c.len() > 2 && *c.last().unwrap() == 0.0 {
            c.pop();
        }
        if c[1] <= 0.0 {
            return Err(Error::InvalidConfig(format!("m = g(0) = {} must be positive", c[1])));
        }
        Ok(Self { kind: Kind::Polynomial(c), x_max: DEFAULT_X_MAX })
    }

    /// Upper end of the bracket searched by [`amplitude`].
    pub fn with_x_max(mut self, x_max: f64) -> Self {
        self.x_max = x_max;
        self
    }

    pub fn is_gross_neveu(&self) -> bool {
        matches!(self.kind, Kind::GrossNeveu)
    }

    /// Stable textual form: `gross-neveu` or `poly:c0,c1,...`.
    pub fn name(&self) -> String {
        match &self.kind {
            Kind::GrossNeveu => "gross-neveu".into(),
            Kind::Polynomial(c) => {
                let parts: Vec<String> = c.iter().map(|x| format!("{x:e}")).collect();
                format!("poly:{}", parts.join(","))
            }
        }
    }

    pub fn m(&self) -> f64 {
        self.g(0.0)
    }

    pub fn big_g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::GrossNeveu => x - 0.5 * x * x,
            Kind::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
        }
    }

    pub fn g(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::GrossNeveu => 1.0 - x,
            Kind::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * x + k as f64 * ck),
        }
    }

    pub fn gprime(&self, x: f64) -> f64 {
        match &self.kind {
            Kind::GrossNeveu => -1.0,
            Kind::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, &ck)| acc * x + (k * (k - 1)) as f64 * ck),
        }
    }
}

/// Frequency and the derived constants `m_-`, `m_+`, `kappa`, `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub m: f64,
    pub omega: f64,
    pub m_minus: f64,
    pub m_plus: f64,
    pub kappa: f64,
    pub mu: f64,
}

impl ModelParams {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega < m) {
            return Err(Error::Domain(format!("omega outside (0, m): omega = {omega}, m = {m}")));
        }
        Ok(Self {
            m,
            omega,
            m_minus: m - omega,
            m_plus: m + omega,
            kappa: ((m - omega) * (m + omega)).sqrt(),
            mu: (m - omega) / (m + omega),
        })
    }

    pub fn for_model(nl: &Nonlinearity, omega: f64) -> Result<Self> {
        Self::new(nl.m(), omega)
    }
}

/// `X_omega`: the first positive root of `omega X = G(X)`.
pub fn amplitude(nl: &Nonlinearity, omega: f64) -> Result<f64> {
    ModelParams::for_model(nl, omega)?;
    if nl.is_gross_neveu() {
        return Ok(2.0 * (1.0 - omega));
    }
    let f = |x: f64| nl.big_g(x) - omega * x;

    let ratio = (nl.x_max / AMPLITUDE_EPS).powf(1.0 / SCAN_POINTS as f64);
    let mut lo = AMPLITUDE_EPS;
    let mut bracket = None;
    for _ in 0..SCAN_POINTS {
        let hi = lo * ratio;
        if f(hi) <= 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
    }
    let (mut a, mut b) = bracket.ok_or_else(|| {
        Error::NoSolitaryWave(format!(
            "omega X < G(X) on (0, {}] for omega = {omega}",
            nl.x_max
        ))
    })?;
    for _ in 0..200 {
        let c = 0.5 * (a + b);
        if c <= a || c >= b {
            break;
        }
        if f(c) > 0.0 {
            a = c;
        } else {
            b = c;
        }
    }
    let x_omega = if f(a).abs() < f(b).abs() { a } else { b };

    if (nl.g(x_omega) - omega).abs() < 1e-9 {
        return Err(Error::NoSolitaryWave(format!(
            "omega = g(X_omega) at X_omega = {x_omega}: degenerate root"
        )));
    }
    for k in 1..INEQUALITY_SAMPLES {
        let x = x_omega * k as f64 / INEQUALITY_SAMPLES as f64;
        if f(x) <= 0.0 {
            return Err(Error::NoSolitaryWave(format!(
                "omega X >= G(X) at X = {x} inside (0, X_omega)"
            )));
        }
    }
    Ok(x_omega)
}
