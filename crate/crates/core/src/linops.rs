//! Linearization at a solitary wave.
//!
//! With `g`, `g'` evaluated at `X(x)`:
//!
//! ```text
//! H- = [[g - w, d/dx], [-d/dx, -g - w]]
//! H+ = [[2g'v^2 + g - w, d/dx - 2g'vu], [-d/dx - 2g'vu, 2g'u^2 - g - w]]
//! L  = [[0, H-], [-H+, 0]]      acting on (rho1, rho2, s1, s2)
//! ```
//!
//! Spectral problems are reduced to first order, `psi' = A(x; lambda) psi`.

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::soliton::SolitonProfile;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    Hminus,
    Hplus,
    L,
}

impl OperatorKind {
    pub fn dim(self) -> usize {
        match self {
            OperatorKind::L => 4,
            _ => 2,
        }
    }
}

/// Principal square root, `Re >= 0`; a negative real argument (either sign of zero
/// imaginary part) maps to `+i sqrt|z|`.
pub fn sqrt_p(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        return Complex64::new(0.0, (-z.re).sqrt());
    }
    z.sqrt()
}

/// x-dependent coefficients of one of the three operators.
#[derive(Debug, Clone, Copy)]
pub struct LinearOperatorField<'a> {
    pub kind: OperatorKind,
    pub profile: &'a SolitonProfile,
}

/// Local coefficients `(g, g' v^2, g' v u, g' u^2)` at a point.
#[derive(Debug, Clone, Copy)]
struct Local {
    g: f64,
    gvv: f64,
    gvu: f64,
    guu: f64,
}

impl<'a> LinearOperatorField<'a> {
    fn local(&self, x: f64) -> Local {
        let (v, u) = self.profile.eval(x);
        local_from(self.profile, v, u)
    }

    pub fn omega(&self) -> f64 {
        self.profile.omega()
    }

    /// Reduction of `(H - lambda) psi = 0` for `H` = `H-` or `H+`.
    pub fn h_matrix(&self, x: f64, lambda: f64) -> Matrix2<f64> {
        h_matrix_from(self.kind, self.omega(), self.local(x), lambda)
    }

    /// Reduction of `(L - lambda) Psi = 0`.
    pub fn l_matrix(&self, x: f64, lambda: Complex64) -> Matrix4<Complex64> {
        l_matrix_from(self.omega(), self.local(x), lambda)
    }

    /// Limits of the coefficient matrices as `|x| -> infinity` (`v, u -> 0`, `g -> m`).
    pub fn h_matrix_inf(&self, lambda: f64) -> Matrix2<f64> {
        h_matrix_from(self.kind, self.omega(), self.at_infinity(), lambda)
    }

    pub fn l_matrix_inf(&self, lambda: Complex64) -> Matrix4<Complex64> {
        l_matrix_from(self.omega(), self.at_infinity(), lambda)
    }

    fn at_infinity(&self) -> Local {
        Local { g: self.profile.nl.m(), gvv: 0.0, gvu: 0.0, guu: 0.0 }
    }

    /// `(Op - lambda) psi` on sampled components, fourth-order central differences.
    /// The result has the grid's length; the two points next to each end are zero.
    pub fn apply_minus_lambda(&self, psi: &[Vec<Complex64>], lambda: Complex64) -> Vec<Vec<Complex64>> {
        let p = self.profile;
        let n = p.len();
        let d = self.kind.dim();
        assert_eq!(psi.len(), d, "expected {d} components");
        let h = p.grid.h();
        let w = p.omega();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; d];
        let deriv = |f: &[Complex64], i: usize| {
            (f[i - 2] - f[i - 1] * 8.0 + f[i + 1] * 8.0 - f[i + 2]) / (12.0 * h)
        };
        for i in 2..n - 2 {
            let c = local_from(p, p.v[i], p.u[i]);
            let hm = |a: Complex64, b: Complex64, db: Complex64, da: Complex64| {
                ((c.g - w) * a + db, -da - (c.g + w) * b)
            };
            let hp = |a: Complex64, b: Complex64, db: Complex64, da: Complex64| {
                (
                    (2.0 * c.gvv + c.g - w) * a + db - 2.0 * c.gvu * b,
                    -da - 2.0 * c.gvu * a + (2.0 * c.guu - c.g - w) * b,
                )
            };
            match self.kind {
                OperatorKind::Hminus | OperatorKind::Hplus => {
                    let (a, b) = (psi[0][i], psi[1][i]);
                    let (da, db) = (deriv(&psi[0], i), deriv(&psi[1], i));
                    let (r0, r1) =
                        if self.kind == OperatorKind::Hminus { hm(a, b, db, da) } else { hp(a, b, db, da) };
                    out[0][i] = r0 - lambda * a;
                    out[1][i] = r1 - lambda * b;
                }
                OperatorKind::L => {
                    let (r1, r2, s1, s2) = (psi[0][i], psi[1][i], psi[2][i], psi[3][i]);
                    let (dr1, dr2) = (deriv(&psi[0], i), deriv(&psi[1], i));
                    let (ds1, ds2) = (deriv(&psi[2], i), deriv(&psi[3], i));
                    let (m0, m1) = hm(s1, s2, ds2, ds1);
                    let (p0, p1) = hp(r1, r2, dr2, dr1);
                    out[0][i] = m0 - lambda * r1;
                    out[1][i] = m1 - lambda * r2;
                    out[2][i] = -p0 - lambda * s1;
                    out[3][i] = -p1 - lambda * s2;
                }
            }
        }
        out
    }

    /// `max |(Op - lambda) psi| / max |psi|` over the interior of the grid.
    pub fn relative_residual(&self, psi: &[Vec<Complex64>], lambda: Complex64) -> f64 {
        let r = self.apply_minus_lambda(psi, lambda);
        let sup = |f: &[Vec<Complex64>]| {
            f.iter().flat_map(|c| c.iter()).fold(0.0f64, |m, z| m.max(z.norm()))
        };
        sup(&r) / sup(psi)
    }
}

fn local_from(p: &SolitonProfile, v: f64, u: f64) -> Local {
    let xx = v * v - u * u;
    let gp = p.nl.gprime(xx);
    Local { g: p.nl.g(xx), gvv: gp * v * v, gvu: gp * v * u, guu: gp * u * u }
}

fn h_matrix_from(kind: OperatorKind, w: f64, c: Local, lambda: f64) -> Matrix2<f64> {
    match kind {
        OperatorKind::Hminus => Matrix2::new(0.0, -(c.g + w + lambda), lambda - c.g + w, 0.0),
        OperatorKind::Hplus => Matrix2::new(
            -2.0 * c.gvu,
            2.0 * c.guu - c.g - w - lambda,
            lambda - 2.0 * c.gvv - c.g + w,
            2.0 * c.gvu,
        ),
        OperatorKind::L => panic!("h_matrix is defined for H- and H+ only"),
    }
}

fn l_matrix_from(w: f64, c: Local, lambda: Complex64) -> Matrix4<Complex64> {
    let r = |x: f64| Complex64::new(x, 0.0);
    let z = r(0.0);
    Matrix4::new(
        r(-2.0 * c.gvu), r(2.0 * c.guu - c.g - w), z, lambda,
        r(-(2.0 * c.gvv + c.g - w)), r(2.0 * c.gvu), -lambda, z,
        z, -lambda, z, r(-(c.g + w)),
        lambda, z, r(-(c.g - w)), z,
    )
}

/// An eigenvalue with its sampled eigenfunction, one `Vec` per component.
#[derive(Debug, Clone)]
pub struct Eigenpair {
    pub lambda: Complex64,
    pub psi: Vec<Vec<Complex64>>,
}

/// Eigenpairs that follow from the symmetries of the equation.
pub fn known_eigenpairs(kind: OperatorKind, p: &SolitonProfile) -> Vec<Eigenpair> {
    let c = |f: &[f64]| f.iter().map(|&x| Complex64::new(x, 0.0)).collect::<Vec<_>>();
    let ci = |f: &[f64], s: f64| f.iter().map(|&x| Complex64::new(0.0, s * x)).collect::<Vec<_>>();
    let zero = vec![Complex64::new(0.0, 0.0); p.len()];
    let w = p.omega();
    let re = |x: f64| Complex64::new(x, 0.0);
    match kind {
        OperatorKind::Hminus => vec![
            Eigenpair { lambda: re(0.0), psi: vec![c(&p.v), c(&p.u)] },
            Eigenpair { lambda: re(-2.0 * w), psi: vec![c(&p.u), c(&p.v)] },
        ],
        OperatorKind::Hplus => vec![
            Eigenpair { lambda: re(0.0), psi: vec![c(&p.vprime), c(&p.uprime)] },
            Eigenpair { lambda: re(-2.0 * w), psi: vec![c(&p.u), c(&p.v)] },
        ],
        OperatorKind::L => vec![
            Eigenpair {
                lambda: re(0.0),
                psi: vec![c(&p.vprime), c(&p.uprime), zero.clone(), zero.clone()],
            },
            Eigenpair { lambda: re(0.0), psi: vec![zero.clone(), zero, c(&p.v), c(&p.u)] },
            Eigenpair {
                lambda: Complex64::new(0.0, -2.0 * w),
                psi: vec![c(&p.u), c(&p.v), ci(&p.u, 1.0), ci(&p.v, 1.0)],
            },
            Eigenpair {
                lambda: Complex64::new(0.0, 2.0 * w),
                psi: vec![c(&p.u), c(&p.v), ci(&p.u, -1.0), ci(&p.v, -1.0)],
            },
        ],
    }
}

/// Essential spectrum.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ContinuousSpectrum {
    /// The real axis minus the open gap `(lo, hi)`.
    RealOutsideGap { lo: f64, hi: f64 },
    /// `{ i t : |t| >= edge }`.
    ImaginaryRays { edge: f64 },
}

impl ContinuousSpectrum {
    pub fn contains(&self, lambda: Complex64) -> bool {
        match *self {
            ContinuousSpectrum::RealOutsideGap { lo, hi } => {
                lambda.im == 0.0 && (lambda.re <= lo || lambda.re >= hi)
            }
            ContinuousSpectrum::ImaginaryRays { edge } => lambda.re == 0.0 && lambda.im.abs() >= edge,
        }
    }
}

pub fn continuous_spectrum(kind: OperatorKind, params: &ModelParams) -> ContinuousSpectrum {
    match kind {
        OperatorKind::Hminus | OperatorKind::Hplus => {
            ContinuousSpectrum::RealOutsideGap { lo: -params.m_plus, hi: params.m_minus }
        }
        OperatorKind::L => ContinuousSpectrum::ImaginaryRays { edge: params.m_minus },
    }
}

/// The four roots `xi[o][i] = s_o sqrt_p((omega + s_i i lambda)^2 - m^2)` with
/// index 0 for sign `+` and 1 for `-`. Solutions behave like `exp(i xi x)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct XiBranches {
    pub lambda: Complex64,
    pub xi: [[Complex64; 2]; 2],
    /// `Im xi > 0`: decays as `x -> +infinity`.
    pub decays_right: [[bool; 2]; 2],
    /// `Im xi < 0`: decays as `x -> -infinity`.
    pub decays_left: [[bool; 2]; 2],
    /// Radicand on the negative real axis.
    pub on_cut: [[bool; 2]; 2],
}

pub const SIGNS: [f64; 2] = [1.0, -1.0];

pub fn xi_branches(lambda: Complex64, params: &ModelParams) -> XiBranches {
    let i = Complex64::i();
    let mut out = XiBranches {
        lambda,
        xi: [[Complex64::new(0.0, 0.0); 2]; 2],
        decays_right: [[false; 2]; 2],
        decays_left: [[false; 2]; 2],
        on_cut: [[false; 2]; 2],
    };
    for (ii, si) in SIGNS.iter().enumerate() {
        let w = params.omega + si * i * lambda;
        let rad = w * w - params.m * params.m;
        let root = sqrt_p(rad);
        for (oo, so) in SIGNS.iter().enumerate() {
            let xi = root * *so;
            out.xi[oo][ii] = xi;
            out.decays_right[oo][ii] = xi.im > 0.0;
            out.decays_left[oo][ii] = xi.im < 0.0;
            out.on_cut[oo][ii] = rad.im == 0.0 && rad.re < 0.0;
        }
    }
    out
}

/// The two null-vector constructions for one root `xi`:
/// `r1 = [2 i w xi, m-^2 + xi^2 + lambda^2]`, `r2 = [m+^2 + xi^2 + lambda^2, -2 i w xi]`,
/// each lifted to `(lambda r, -H r)` with `H = [[m-, i xi], [-i xi, -m+]]`.
pub fn eigenvector_candidates(
    lambda: Complex64,
    xi: Complex64,
    params: &ModelParams,
) -> (Vector4<Complex64>, Vector4<Complex64>) {
    let i = Complex64::i();
    let (mm, mp, w) = (params.m_minus, params.m_plus, params.omega);
    let lift = |r0: Complex64, r1: Complex64| {
        let h0 = mm * r0 + i * xi * r1;
        let h1 = -i * xi * r0 - mp * r1;
        Vector4::new(lambda * r0, lambda * r1, -h0, -h1)
    };
    let two_iwxi = 2.0 * i * w * xi;
    let v1 = lift(two_iwxi, mm * mm + xi * xi + lambda * lambda);
    let v2 = lift(mp * mp + xi * xi + lambda * lambda, -two_iwxi);
    (v1, v2)
}

/// `Xi[o][i]`: eigenvectors of the asymptotic matrix of `L` for `xi[o][i]`.
/// The first construction is used unless the second is larger, which happens near
/// `lambda = +-i m-` where the first one vanishes.
pub fn asymptotic_eigenvectors(
    lambda: Complex64,
    params: &ModelParams,
) -> Result<[[Vector4<Complex64>; 2]; 2]> {
    let br = xi_branches(lambda, params);
    let mut out = [[Vector4::zeros(); 2]; 2];
    let scale = 1.0 + lambda.norm() + params.m_plus;
    for oo in 0..2 {
        for ii in 0..2 {
            let xi = br.xi[oo][ii];
            let (v1, v2) = eigenvector_candidates(lambda, xi, params);
            let v = if v1.norm() >= v2.norm() { v1 } else { v2 };
            let tiny = 1e-12 * scale.powi(3);
            if v.norm() <= tiny {
                return Err(Error::DegenerateDirection { re: lambda.re, im: lambda.im });
            }
            out[oo][ii] = v;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::{closed_form_profile, Grid};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sqrt_branch() {
        assert_eq!(sqrt_p(c(-4.0, 0.0)), c(0.0, 2.0));
        assert_eq!(sqrt_p(c(-4.0, -0.0)), c(0.0, 2.0));
        assert!(sqrt_p(c(-4.0, -1e-3)).re >= 0.0);
        assert_eq!(sqrt_p(c(9.0, 0.0)), c(3.0, 0.0));
    }

    #[test]
    fn xi_examples() {
        let p = ModelParams::new(1.0, 0.5).unwrap();
        let b = xi_branches(c(0.0, p.m_plus), &p);
        assert!(b.xi[0][0].norm() < 1e-15);
        assert_relative_eq!(b.xi[0][1].re, 3f64.sqrt(), epsilon = 1e-14);
        assert!(b.xi[0][1].im.abs() < 1e-15);
        let b = xi_branches(c(0.0, 0.0), &p);
        assert_relative_eq!(b.xi[0][0].im, p.kappa, epsilon = 1e-15);
        assert_relative_eq!(b.xi[1][0].im, -p.kappa, epsilon = 1e-15);
        assert!(b.on_cut[0][0]);
        assert!(b.decays_right[0][0] && b.decays_left[1][0]);
    }

    #[test]
    fn continuous_spectra() {
        let p = ModelParams::new(1.0, 0.5).unwrap();
        assert_eq!(
            continuous_spectrum(OperatorKind::Hplus, &p),
            ContinuousSpectrum::RealOutsideGap { lo: -1.5, hi: 0.5 }
        );
        let l = continuous_spectrum(OperatorKind::L, &p);
        assert!(l.contains(c(0.0, 0.5)) && l.contains(c(0.0, -3.0)));
        assert!(!l.contains(c(0.0, 0.4)) && !l.contains(c(0.1, 1.0)));
    }

    #[test]
    fn eigenvector_residual() {
        let p = ModelParams::new(1.0, 0.2).unwrap();
        let profile = closed_form_profile(0.2, Grid::new(5.0, 0.1).unwrap()).unwrap();
        let field = LinearOperatorField { kind: OperatorKind::L, profile: &profile };
        let lambda = c(0.15, 0.8);
        let a = field.l_matrix_inf(lambda);
        let br = xi_branches(lambda, &p);
        let xis = asymptotic_eigenvectors(lambda, &p).unwrap();
        for oo in 0..2 {
            for ii in 0..2 {
                let v = xis[oo][ii];
                let r = a * v - v * (Complex64::i() * br.xi[oo][ii]);
                assert!(r.norm() / v.norm() < 1e-12, "{oo}{ii}: {}", r.norm() / v.norm());
            }
        }
    }

    #[test]
    fn first_construction_vanishes_at_threshold() {
        let p = ModelParams::new(1.0, 0.3).unwrap();
        let lambda = c(0.0, p.m_minus);
        let br = xi_branches(lambda, &p);
        let (v1, v2) = eigenvector_candidates(lambda, br.xi[0][1], &p);
        assert!(v1.norm() < 1e-14);
        assert!(v2.norm() > 0.1);
        assert!(asymptotic_eigenvectors(lambda, &p).is_ok());
    }

    #[test]
    fn degenerate_at_zero() {
        let p = ModelParams::new(1.0, 0.3).unwrap();
        assert!(matches!(
            asymptotic_eigenvectors(c(0.0, 0.0), &p),
            Err(Error::DegenerateDirection { .. })
        ));
    }
}
