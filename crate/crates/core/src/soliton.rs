//! Solitary-wave profiles `phi(x) = (v(x), u(x))`, `v` even and `u` odd.

use crate::error::{Error, Result};
use crate::model::{amplitude, ModelParams, Nonlinearity};

/// RK4 substeps per grid interval in the quadrature path.
const SUBSTEPS: usize = 8;
const RADICAND_TOL: f64 = 1e-10;

/// Uniform grid on `[-r, r]` with `2n + 1` points, symmetric to the last bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub r: f64,
    pub n: usize,
}

impl Grid {
    /// Step is rounded down so that `r` is hit exactly.
    pub fn new(r: f64, h: f64) -> Result<Self> {
        if !(r > 0.0 && h > 0.0 && r.is_finite() && h <= r) {
            return Err(Error::InvalidConfig(format!("bad grid: R = {r}, h = {h}")));
        }
        let n = (r / h - 1e-9).ceil() as usize;
        Ok(Self { r, n })
    }

    pub fn h(&self) -> f64 {
        self.r / self.n as f64
    }

    pub fn len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn point(&self, i: usize) -> f64 {
        let k = i as f64 - self.n as f64;
        self.r * k / self.n as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    ClosedForm,
    Quadrature,
}

/// Sampled profile with derived fields `X = v^2 - u^2`, `Y = v u`, `Z = v^2 + u^2`.
#[derive(Debug, Clone)]
pub struct SolitonProfile {
    pub nl: Nonlinearity,
    pub params: ModelParams,
    pub x_omega: f64,
    pub grid: Grid,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub vprime: Vec<f64>,
    pub uprime: Vec<f64>,
    pub big_x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    pub source: Source,
}

/// `(v, u, v', u')` of the Gross-Neveu solitary wave at `x`.
pub fn closed_form_point(p: &ModelParams, x: f64) -> (f64, f64, f64, f64) {
    // tan(Theta) = -sqrt(mu) tanh(kappa x) reduces to
    // v = sqrt(2(1-omega)) sech / (1 - mu tanh^2), u = sqrt(mu) tanh v.
    let a = (2.0 * (1.0 - p.omega)).sqrt();
    let sm = p.mu.sqrt();
    let t = (p.kappa * x).tanh();
    let s = 1.0 / (p.kappa * x).cosh();
    let d = 1.0 - p.mu * t * t;
    let v = a * s / d;
    let vp = a * p.kappa * s * t * (2.0 * p.mu * s * s - d) / (d * d);
    let u = sm * t * v;
    let up = sm * (p.kappa * s * s * v + t * vp);
    (v, u, vp, up)
}

pub fn closed_form_profile(omega: f64, grid: Grid) -> Result<SolitonProfile> {
    let nl = Nonlinearity::gross_neveu();
    let params = ModelParams::for_model(&nl, omega)?;
    let x_omega = amplitude(&nl, omega)?;
    let x = grid.points();
    let n = x.len();
    let (mut v, mut u, mut vp, mut up) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for i in 0..n {
        (v[i], u[i], vp[i], up[i]) = closed_form_point(&params, x[i]);
    }
    Ok(SolitonProfile::assemble(nl, params, x_omega, grid, x, v, u, vp, up, Source::ClosedForm))
}

/// Profile of a general nonlinearity by integrating the first-order `X` equation.
///
/// Near the turning point `X = X_omega` the pair `X' = -4 omega Y`,
/// `Y' = omega X - g(X) G(X) / omega` is smooth and is integrated instead;
/// once `X < X_omega / 2` the stepper switches to `L = ln X`,
/// `L' = -2 sqrt((G/X)^2 - omega^2)`, which stays well scaled in the tail.
pub fn quadrature_profile(nl: &Nonlinearity, omega: f64, grid: Grid) -> Result<SolitonProfile> {
    let params = ModelParams::for_model(nl, omega)?;
    let x_omega = amplitude(nl, omega)?;
    let h = grid.h();
    let dt = h / SUBSTEPS as f64;
    let half = grid.n;

    let m = nl.m();
    let g_over_x = |xx: f64| if xx > 1e-250 { nl.big_g(xx) / xx } else { m };
    let rhs_xy = |s: [f64; 2]| -> [f64; 2] {
        let (xx, yy) = (s[0], s[1]);
        [-4.0 * omega * yy, omega * xx - nl.g(xx) * nl.big_g(xx) / omega]
    };

    // Samples for x >= 0.
    let mut xs = Vec::with_capacity(half + 1);
    let mut ys = Vec::with_capacity(half + 1);
    xs.push(x_omega);
    ys.push(0.0);

    let mut state = [x_omega, 0.0];
    let mut i = 0;
    while i < half && state[0] >= 0.5 * x_omega {
        for _ in 0..SUBSTEPS {
            state = rk4(&rhs_xy, state, dt);
        }
        i += 1;
        xs.push(state[0]);
        ys.push(state[1]);
    }

    if i < half {
        let mut l = state[0].ln();
        let mut x_pos = i as f64 * h;
        let rhs_l = |l: f64, x_pos: f64| -> Result<f64> {
            let r = g_over_x(l.exp()).powi(2) - omega * omega;
            if r < -RADICAND_TOL {
                return Err(Error::NegativeRadicand { x: x_pos, value: r });
            }
            Ok(-2.0 * r.max(0.0).sqrt())
        };
        while i < half {
            for _ in 0..SUBSTEPS {
                let k1 = rhs_l(l, x_pos)?;
                let k2 = rhs_l(l + 0.5 * dt * k1, x_pos)?;
                let k3 = rhs_l(l + 0.5 * dt * k2, x_pos)?;
                let k4 = rhs_l(l + dt * k3, x_pos)?;
                l += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                x_pos += dt;
            }
            i += 1;
            let xx = l.exp();
            let r = (nl.big_g(xx).powi(2) - (omega * xx).powi(2)).max(0.0);
            xs.push(xx);
            ys.push(r.sqrt() / (2.0 * omega));
        }
    }

    let n = grid.len();
    let (mut v, mut u, mut vp, mut up) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    for k in 0..=half {
        let (xx, yy) = (xs[k], ys[k]);
        let zz = nl.big_g(xx) / omega;
        let vk = (0.5 * (zz + xx)).max(0.0).sqrt();
        let uk = if vk > 1e-150 {
            yy / vk
        } else {
            yy.signum() * (0.5 * (zz - xx)).max(0.0).sqrt()
        };
        let gk = nl.g(xx);
        let upk = (omega - gk) * vk;
        let vpk = -(omega + gk) * uk;
        let (ip, im) = (half + k, half - k);
        (v[ip], u[ip], vp[ip], up[ip]) = (vk, uk, vpk, upk);
        (v[im], u[im], vp[im], up[im]) = (vk, -uk, -vpk, upk);
    }
    Ok(SolitonProfile::assemble(
        nl.clone(),
        params,
        x_omega,
        grid,
        grid.points(),
        v,
        u,
        vp,
        up,
        Source::Quadrature,
    ))
}

fn rk4<F: Fn([f64; 2]) -> [f64; 2]>(f: &F, s: [f64; 2], dt: f64) -> [f64; 2] {
    let add = |a: [f64; 2], b: [f64; 2], c: f64| [a[0] + c * b[0], a[1] + c * b[1]];
    let k1 = f(s);
    let k2 = f(add(s, k1, 0.5 * dt));
    let k3 = f(add(s, k2, 0.5 * dt));
    let k4 = f(add(s, k3, dt));
    [
        s[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        s[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ]
}

/// `U_omega(X) = -2 G(X)^2 + 2 omega^2 X^2`.
pub fn effective_potential(nl: &Nonlinearity, omega: f64, x: f64) -> f64 {
    -2.0 * nl.big_g(x).powi(2) + 2.0 * omega * omega * x * x
}

/// Maximum pointwise residuals of the profile identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    /// `h(v, u) = -(omega/2) Z + G(X)/2`.
    pub h: f64,
    /// `omega v - u' - g v` and `omega u + v' + g u`.
    pub system: f64,
    /// `v(-x) - v(x)`, `u(-x) + u(x)`.
    pub parity: f64,
    /// `Y + X'/(4 omega)`.
    pub y_relation: f64,
    /// `omega Z - G(X)`.
    pub charge_relation: f64,
    /// `|X(0) - X_omega|` and `|u(0)|`.
    pub center: f64,
}

impl SolitonProfile {
    #[allow(clippy::too_many_arguments)]
    fn assemble(
        nl: Nonlinearity,
        params: ModelParams,
        x_omega: f64,
        grid: Grid,
        x: Vec<f64>,
        v: Vec<f64>,
        u: Vec<f64>,
        vprime: Vec<f64>,
        uprime: Vec<f64>,
        source: Source,
    ) -> Self {
        let big_x = v.iter().zip(&u).map(|(a, b)| a * a - b * b).collect();
        let y = v.iter().zip(&u).map(|(a, b)| a * b).collect();
        let z = v.iter().zip(&u).map(|(a, b)| a * a + b * b).collect();
        Self { nl, params, x_omega, grid, x, v, u, vprime, uprime, big_x, y, z, source }
    }

    pub fn omega(&self) -> f64 {
        self.params.omega
    }

    pub fn kappa(&self) -> f64 {
        self.params.kappa
    }

    pub fn mu(&self) -> f64 {
        self.params.mu
    }

    pub fn r(&self) -> f64 {
        self.grid.r
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn residual_h(&self, i: usize) -> f64 {
        -0.5 * self.omega() * self.z[i] + 0.5 * self.nl.big_g(self.big_x[i])
    }

    /// `(v, u)` at any `x`. Exact for the closed form; otherwise cubic Hermite between
    /// samples and exponential decay at rate `kappa` beyond `|x| = R`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        if self.source == Source::ClosedForm {
            let (v, u, _, _) = closed_form_point(&self.params, x);
            return (v, u);
        }
        let r = self.grid.r;
        if x.abs() > r {
            let f = (-self.kappa() * (x.abs() - r)).exp();
            let (vr, ur) = self.eval(r);
            return (vr * f, x.signum() * ur * f);
        }
        let h = self.grid.h();
        let s = (x + r) / h;
        let i = (s.floor() as usize).min(self.len() - 2);
        let t = s - i as f64;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        let herm = |f: &[f64], df: &[f64]| {
            h00 * f[i] + h10 * h * df[i] + h01 * f[i + 1] + h11 * h * df[i + 1]
        };
        (herm(&self.v, &self.vprime), herm(&self.u, &self.uprime))
    }

    pub fn residuals(&self) -> Residuals {
        let w = self.omega();
        let n = self.len();
        let mut res = Residuals {
            h: 0.0,
            system: 0.0,
            parity: 0.0,
            y_relation: 0.0,
            charge_relation: 0.0,
            center: 0.0,
        };
        for i in 0..n {
            let (v, u, vp, up) = (self.v[i], self.u[i], self.vprime[i], self.uprime[i]);
            let g = self.nl.g(self.big_x[i]);
            res.h = res.h.max(self.residual_h(i).abs());
            res.system = res
                .system
                .max((w * v - up - g * v).abs())
                .max((w * u + vp + g * u).abs());
            let j = n - 1 - i;
            res.parity = res
                .parity
                .max((self.v[j] - v).abs())
                .max((self.u[j] + u).abs());
            let xp = 2.0 * (v * vp - u * up);
            res.y_relation = res.y_relation.max((self.y[i] + xp / (4.0 * w)).abs());
            res.charge_relation = res
                .charge_relation
                .max((w * self.z[i] - self.nl.big_g(self.big_x[i])).abs());
        }
        let c = self.grid.n;
        res.center = (self.big_x[c] - self.x_omega).abs().max(self.u[c].abs());
        res
    }
}

/// `Q = integral of v^2 + u^2`, trapezoid on the grid plus the exponential tails.
pub fn charge(p: &SolitonProfile) -> f64 {
    let h = p.grid.h();
    let n = p.len();
    let inner: f64 = p.z[1..n - 1].iter().sum::<f64>() + 0.5 * (p.z[0] + p.z[n - 1]);
    let tails = (p.z[0] + p.z[n - 1]) / (2.0 * p.kappa());
    inner * h + tails
}
