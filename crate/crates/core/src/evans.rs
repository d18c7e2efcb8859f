//! Evans-function shooting for `L` in the parity classes, and real shooting for the
//! gap spectra of `H-` and `H+`.
//!
//! Solutions are started at `x = 0` with canonical data and matched at `x = R`
//! against the two solutions that decay as `x -> +infinity`. Far from the wave,
//! `w = rho + i s` and `z = rho - i s` decouple:
//!
//! ```text
//! w1' = -(m+ + i lambda) w2,  w2' = -(m- - i lambda) w1,   mu_w^2 = m^2 - (omega + i lambda)^2
//! z1' = -(m+ - i lambda) z2,  z2' = -(m- + i lambda) z1,   mu_z^2 = m^2 - (omega - i lambda)^2
//! ```
//!
//! and the decaying channels `exp(mu x)` use `Re mu <= 0`. The determinant is
//! evaluated on the exterior square of `C^4`: `Psi1 ^ Psi3` (class `X-`) and
//! `Psi2 ^ Psi4` (class `X+`) are integrated directly as 6-vectors, so no
//! cancellation between nearly parallel growing columns occurs.

use nalgebra::{Matrix4, SMatrix, Vector2, Vector4};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linops::{sqrt_p, LinearOperatorField, OperatorKind};
use crate::odeint::{integrate, integrate_on_mesh, Options, Trajectory};
use crate::soliton::SolitonProfile;

pub const DEFAULT_R: f64 = 20.0;
const EVANS_TOL: f64 = 1e-11;

type C = Complex64;
type Mat6 = SMatrix<C, 6, 6>;
type Wedge2 = SMatrix<C, 6, 2>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum ParityClass {
    /// Components (even, odd, even, odd).
    Xminus,
    /// Components (odd, even, odd, even).
    Xplus,
}

impl ParityClass {
    /// Sign each component picks up under `x -> -x`.
    pub fn reflection(self) -> [f64; 4] {
        match self {
            ParityClass::Xminus => [1.0, -1.0, 1.0, -1.0],
            ParityClass::Xplus => [-1.0, 1.0, -1.0, 1.0],
        }
    }
}

/// One evaluation of the pair of Evans functions.
///
/// `e_minus`, `e_plus` are the determinants divided by `exp((-(mu_w + mu_z)) R)` and by
/// the renormalization factors of the integration. Removing the complex exponent
/// (rather than only its real part) keeps `E` holomorphic in `lambda`.
/// `scale = -Re(mu_w + mu_z) R` is the real part of the removed exponent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EvansSample {
    pub lambda: C,
    pub r: f64,
    pub e_minus: C,
    pub e_plus: C,
    pub scale: f64,
}

impl EvansSample {
    pub fn get(&self, class: ParityClass) -> C {
        match class {
            ParityClass::Xminus => self.e_minus,
            ParityClass::Xplus => self.e_plus,
        }
    }
}

/// Decaying exponent `-sqrt(r)`. On the cut (negative real `r`) the side is the limit
/// from `Re lambda > 0`; `dr` is `dr/dlambda`.
fn decay_exponent(r: C, dr: C) -> C {
    if r.im == 0.0 && r.re < 0.0 {
        let s = (-r.re).sqrt();
        let s = if dr.im >= 0.0 { s } else { -s };
        return -C::new(0.0, s);
    }
    -sqrt_p(r)
}

/// Decaying channel data at `lambda`: `(mu_w, mu_z, Xi_w, Xi_z)`.
pub fn decaying_channels(lambda: C, omega: f64, m: f64) -> (C, C, Vector4<C>, Vector4<C>) {
    let i = C::i();
    let (mp, mm) = (m + omega, m - omega);
    let a_w = omega + i * lambda;
    let a_z = omega - i * lambda;
    let mu_w = decay_exponent(m * m - a_w * a_w, -2.0 * i * a_w);
    let mu_z = decay_exponent(m * m - a_z * a_z, 2.0 * i * a_z);
    let w = Vector2::new(mp + i * lambda - mu_w, mm - i * lambda - mu_w);
    let z = Vector2::new(mp - i * lambda - mu_z, mm + i * lambda - mu_z);
    let xi_w = Vector4::new(w[0], w[1], -i * w[0], -i * w[1]);
    let xi_z = Vector4::new(z[0], z[1], i * z[0], i * z[1]);
    (mu_w, mu_z, xi_w, xi_z)
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
/// `COMPLEMENT[p]` and the sign of the permutation `(pair, complement)`.
const COMPLEMENT: [(usize, f64); 6] = [(5, 1.0), (4, -1.0), (3, 1.0), (2, 1.0), (1, -1.0), (0, 1.0)];

fn pair_index(i: usize, j: usize) -> usize {
    PAIRS.iter().position(|&p| p == (i, j)).unwrap()
}

/// Induced action of `A` on the exterior square.
pub fn compound(a: &Matrix4<C>) -> Mat6 {
    let mut out = Mat6::zeros();
    for (col, &(k, l)) in PAIRS.iter().enumerate() {
        for p in 0..4 {
            // A e_k ^ e_l
            if p != l {
                let (s, idx) = if p < l { (1.0, pair_index(p, l)) } else { (-1.0, pair_index(l, p)) };
                out[(idx, col)] += a[(p, k)] * s;
            }
            // e_k ^ A e_l
            if p != k {
                let (s, idx) = if k < p { (1.0, pair_index(k, p)) } else { (-1.0, pair_index(p, k)) };
                out[(idx, col)] += a[(p, l)] * s;
            }
        }
    }
    out
}

pub fn wedge(a: &Vector4<C>, b: &Vector4<C>) -> SMatrix<C, 6, 1> {
    let mut out = SMatrix::<C, 6, 1>::zeros();
    for (idx, &(i, j)) in PAIRS.iter().enumerate() {
        out[idx] = a[i] * b[j] - a[j] * b[i];
    }
    out
}

/// `det[a, b, c, d]` from `a ^ b` and `c ^ d`.
pub fn wedge_det(ab: &[C], cd: &[C]) -> C {
    (0..6).map(|p| ab[p] * cd[COMPLEMENT[p].0] * COMPLEMENT[p].1).sum()
}

fn initial_wedges() -> Wedge2 {
    let mut w = Wedge2::zeros();
    w[(pair_index(0, 2), 0)] = C::new(1.0, 0.0);
    w[(pair_index(1, 3), 1)] = C::new(1.0, 0.0);
    w
}

fn assemble_sample(
    lambda: C,
    r: f64,
    omega: f64,
    m: f64,
    state: &Wedge2,
    log_scale: &[f64; 2],
) -> EvansSample {
    let (mu_w, mu_z, xi_w, xi_z) = decaying_channels(lambda, omega, m);
    let tail = wedge(&xi_w, &xi_z);
    let expo = (mu_w + mu_z) * r;
    let e = |j: usize| {
        let col: Vec<C> = state.column(j).iter().copied().collect();
        wedge_det(&col, tail.as_slice()) * (expo + log_scale[j]).exp()
    };
    EvansSample { lambda, r, e_minus: e(0), e_plus: e(1), scale: -expo.re }
}

fn check_r(profile: &SolitonProfile, r: f64) -> Result<()> {
    if !(r > 0.0 && r <= profile.r() * (1.0 + 1e-12)) {
        return Err(Error::InvalidConfig(format!(
            "R = {r} must lie in (0, {}] (profile extent)",
            profile.r()
        )));
    }
    Ok(())
}

/// `Psi_1..Psi_4` (columns) from `e_1..e_4` at `x = 0` to `x_end` (either sign).
pub fn shoot_to(
    lambda: C,
    profile: &SolitonProfile,
    x_end: f64,
    samples: &[f64],
    opts: &Options,
) -> Result<Trajectory<C, 4, 4>> {
    check_r(profile, x_end.abs())?;
    let field = LinearOperatorField { kind: OperatorKind::L, profile };
    integrate(|x| field.l_matrix(x, lambda), Matrix4::identity(), 0.0, x_end, samples, opts)
}

/// `Psi_1..Psi_4` on `[0, R]`. `Psi_1, Psi_3` lie in `X-`, `Psi_2, Psi_4` in `X+`.
pub fn shoot(lambda: C, profile: &SolitonProfile, r: f64) -> Result<Trajectory<C, 4, 4>> {
    shoot_to(lambda, profile, r, &[], &Options::with_tol(EVANS_TOL))
}

/// `E-(lambda, R)` and `E+(lambda, R)`.
pub fn evans_pair(lambda: C, profile: &SolitonProfile, r: f64) -> Result<EvansSample> {
    Ok(FrozenEvans::new(profile, lambda, r)?.sample_at_origin)
}

/// Evans evaluator whose integration mesh is fixed by an adaptive run at `lambda0`,
/// so that `E` is a smooth function of `lambda` nearby.
#[derive(Debug, Clone)]
pub struct FrozenEvans<'a> {
    profile: &'a SolitonProfile,
    r: f64,
    mesh: Vec<f64>,
    renorm: f64,
    sample_at_origin: EvansSample,
}

impl<'a> FrozenEvans<'a> {
    pub fn new(profile: &'a SolitonProfile, lambda0: C, r: f64) -> Result<Self> {
        Self::with_options(profile, lambda0, r, &Options::with_tol(EVANS_TOL))
    }

    pub fn with_options(profile: &'a SolitonProfile, lambda0: C, r: f64, opts: &Options) -> Result<Self> {
        check_r(profile, r)?;
        let field = LinearOperatorField { kind: OperatorKind::L, profile };
        let traj = integrate(
            |x| compound(&field.l_matrix(x, lambda0)),
            initial_wedges(),
            0.0,
            r,
            &[],
            opts,
        )?;
        let (state, ls) = traj.last();
        let m = profile.nl.m();
        let sample = assemble_sample(lambda0, r, profile.omega(), m, state, ls);
        Ok(Self { profile, r, mesh: traj.mesh, renorm: opts.renorm, sample_at_origin: sample })
    }

    pub fn origin(&self) -> &EvansSample {
        &self.sample_at_origin
    }

    pub fn eval(&self, lambda: C) -> EvansSample {
        let field = LinearOperatorField { kind: OperatorKind::L, profile: self.profile };
        let (state, ls) = integrate_on_mesh(
            |x| compound(&field.l_matrix(x, lambda)),
            initial_wedges(),
            &self.mesh,
            self.renorm,
        );
        assemble_sample(lambda, self.r, self.profile.omega(), self.profile.nl.m(), &state, &ls)
    }
}

/// Closed rectangle `[re.0, re.1] x i[im.0, im.1]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Rect {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Rect {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        Self { re, im }
    }

    pub fn contains(&self, z: C, margin: f64) -> bool {
        z.re >= self.re.0 - margin
            && z.re <= self.re.1 + margin
            && z.im >= self.im.0 - margin
            && z.im <= self.im.1 + margin
    }
}

/// Grid cell `(i, j)` with corners at nodes `(i..=i+1, j..=j+1)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
    pub rect: Rect,
}

impl Cell {
    pub fn center(&self) -> C {
        C::new(0.5 * (self.rect.re.0 + self.rect.re.1), 0.5 * (self.rect.im.0 + self.rect.im.1))
    }
}

/// Evans samples on an `n_re x n_im` node grid, stored with the real index fastest.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RegionMap {
    pub rect: Rect,
    pub n_re: usize,
    pub n_im: usize,
    pub r: f64,
    pub samples: Vec<EvansSample>,
    pub candidates_minus: Vec<Cell>,
    pub candidates_plus: Vec<Cell>,
}

impl RegionMap {
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn node(&self, i: usize, j: usize) -> &EvansSample {
        &self.samples[j * self.n_re + i]
    }

    pub fn candidates(&self, class: ParityClass) -> &[Cell] {
        match class {
            ParityClass::Xminus => &self.candidates_minus,
            ParityClass::Xplus => &self.candidates_plus,
        }
    }
}

/// Relative smallness below which a node counts as a zero.
pub const ZERO_THRESHOLD: f64 = 1e-6;

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect()
}

/// Signs of `Re E`, `Im E` on the grid and the cells where both change sign.
pub fn scan_region(
    profile: &SolitonProfile,
    rect: Rect,
    n_re: usize,
    n_im: usize,
    r: f64,
) -> Result<RegionMap> {
    if n_re < 2 || n_im < 2 {
        return Err(Error::InvalidConfig(format!("grid {n_re}x{n_im} must be at least 2x2")));
    }
    let mut map = RegionMap {
        rect,
        n_re,
        n_im,
        r,
        samples: vec![],
        candidates_minus: vec![],
        candidates_plus: vec![],
    };
    if rect.re.0 == rect.re.1 || rect.im.0 == rect.im.1 {
        return Ok(map);
    }
    check_r(profile, r)?;
    let res = linspace(rect.re.0, rect.re.1, n_re);
    let ims = linspace(rect.im.0, rect.im.1, n_im);
    let nodes: Vec<C> = (0..n_re * n_im).map(|k| C::new(res[k % n_re], ims[k / n_re])).collect();
    map.samples = nodes.par_iter().map(|&l| evans_pair(l, profile, r)).collect::<Result<Vec<_>>>()?;

    for class in [ParityClass::Xminus, ParityClass::Xplus] {
        let vals: Vec<C> = map.samples.iter().map(|s| s.get(class)).collect();
        let mut mags: Vec<f64> = vals.iter().map(|z| z.norm()).collect();
        mags.sort_by(f64::total_cmp);
        let median = mags[mags.len() / 2];
        let tiny = |k: usize| vals[k].norm() < ZERO_THRESHOLD * median;
        let mut cells = vec![];
        for j in 0..n_im - 1 {
            for i in 0..n_re - 1 {
                let ks = [j * n_re + i, j * n_re + i + 1, (j + 1) * n_re + i, (j + 1) * n_re + i + 1];
                let changes = |f: &dyn Fn(C) -> f64| {
                    let pos = ks.iter().any(|&k| f(vals[k]) > 0.0);
                    let neg = ks.iter().any(|&k| f(vals[k]) < 0.0);
                    pos && neg
                };
                let both = changes(&|z: C| z.re) && changes(&|z: C| z.im);
                if both || ks.iter().any(|&k| tiny(k)) {
                    cells.push(Cell {
                        i,
                        j,
                        rect: Rect::new((res[i], res[i + 1]), (ims[j], ims[j + 1])),
                    });
                }
            }
        }
        match class {
            ParityClass::Xminus => map.candidates_minus = cells,
            ParityClass::Xplus => map.candidates_plus = cells,
        }
    }
    Ok(map)
}

/// A refined zero of one Evans function.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Zero {
    pub lambda: C,
    pub class: ParityClass,
    pub multiplicity: usize,
    pub abs_e: f64,
    pub iterations: usize,
}

const MAX_ITER: usize = 100;
const E_TOL: f64 = 1e-10;
const STEP_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-4;

/// Zero of whichever of `E-`, `E+` is smaller at `lambda0`, by complex secant with a
/// Muller fallback. For a multiple zero (estimated from `E/E'`) the cluster centre is
/// then located as the zero of the `(k-1)`-th derivative.
pub fn refine_zero(profile: &SolitonProfile, lambda0: C, r: f64) -> Result<Zero> {
    let fe = FrozenEvans::new(profile, lambda0, r)?;
    let s0 = *fe.origin();
    let class =
        if s0.e_minus.norm() <= s0.e_plus.norm() { ParityClass::Xminus } else { ParityClass::Xplus };
    let m_minus = profile.params.m_minus;
    let project = |l: C| {
        // Left of the cut along the imaginary axis E belongs to another sheet.
        if l.re < 0.0 && l.im.abs() >= m_minus {
            C::new(0.0, l.im)
        } else {
            l
        }
    };
    let f = |l: C| fe.eval(l).get(class);

    let (l1, f1, iters) = secant(&f, &project, lambda0, s0.get(class))?;

    let d = |l: C| (f(l + FD_STEP) - f(l - FD_STEP)) / (2.0 * FD_STEP);
    let q = |l: C| {
        let dv = d(l);
        if dv.norm() == 0.0 {
            C::new(0.0, 0.0)
        } else {
            f(l) / dv
        }
    };
    let dq = (q(l1 + FD_STEP) - q(l1 - FD_STEP)) / (2.0 * FD_STEP);
    let inv = 1.0 / dq.re;
    let mult = if inv.is_finite() && inv > 1.5 { (inv.round() as usize).min(3) } else { 1 };

    if mult == 1 {
        return Ok(Zero { lambda: l1, class, multiplicity: 1, abs_e: f1.norm(), iterations: iters });
    }
    let deriv = |l: C| -> C {
        if mult == 2 {
            d(l)
        } else {
            let h = 10.0 * FD_STEP;
            (f(l + h) - f(l) * 2.0 + f(l - h)) / (h * h)
        }
    };
    let (l2, _, it2) = secant(&deriv, &project, l1, deriv(l1))?;
    Ok(Zero { lambda: l2, class, multiplicity: mult, abs_e: f(l2).norm(), iterations: iters + it2 })
}

fn secant<F, P>(f: &F, project: &P, l0: C, f0: C) -> Result<(C, C, usize)>
where
    F: Fn(C) -> C,
    P: Fn(C) -> C,
{
    let delta = C::new(1e-4, 1e-4) * (1.0 + l0.norm());
    let mut pts = vec![(l0, f0)];
    let lb = project(l0 + delta);
    pts.push((lb, f(lb)));
    if pts[1].1.norm() > pts[0].1.norm() {
        pts.swap(0, 1);
    }
    for it in 0..MAX_ITER {
        let (lc, fc) = pts[pts.len() - 1];
        if fc.norm() < E_TOL {
            return Ok((lc, fc, it));
        }
        let (lp, fp) = pts[pts.len() - 2];
        let mut next = lc - fc * (lc - lp) / (fc - fp);
        if !next.re.is_finite() || !next.im.is_finite() {
            next = lc + delta;
        }
        next = project(next);
        let mut fn_ = f(next);
        if fn_.norm() >= fc.norm() && pts.len() >= 3 {
            if let Some(lm) = muller_step(&pts[pts.len() - 3..]) {
                let lm = project(lm);
                let fm = f(lm);
                if fm.norm() < fn_.norm() {
                    next = lm;
                    fn_ = fm;
                }
            }
        }
        if fn_.norm() >= 4.0 * fc.norm() {
            // Damp: halve the step towards the current best point.
            let mut h = next - lc;
            for _ in 0..20 {
                h *= 0.5;
                let trial = project(lc + h);
                let ft = f(trial);
                if ft.norm() < fc.norm() {
                    next = trial;
                    fn_ = ft;
                    break;
                }
            }
        }
        let step = (next - lc).norm();
        pts.push((next, fn_));
        if step < STEP_TOL {
            return Ok((next, fn_, it + 1));
        }
    }
    let (l, fl) = pts[pts.len() - 1];
    Err(Error::NonConvergence(format!(
        "refine_zero: {MAX_ITER} iterations from {l0}, last lambda = {l}, |E| = {:e}",
        fl.norm()
    )))
}

fn muller_step(p: &[(C, C)]) -> Option<C> {
    let ((x0, f0), (x1, f1), (x2, f2)) = (p[0], p[1], p[2]);
    let h1 = x1 - x0;
    let h2 = x2 - x1;
    let d1 = (f1 - f0) / h1;
    let d2 = (f2 - f1) / h2;
    let a = (d2 - d1) / (h2 + h1);
    let b = a * h2 + d2;
    let disc = (b * b - a * f2 * 4.0).sqrt();
    let den = if (b + disc).norm() > (b - disc).norm() { b + disc } else { b - disc };
    if den.norm() == 0.0 {
        return None;
    }
    let next = x2 - f2 * 2.0 / den;
    (next.re.is_finite() && next.im.is_finite()).then_some(next)
}

/// Smallest distance from the gap edges at which the real shooting indicator is used.
pub const GAP_GUARD: f64 = 1e-3;

/// Coefficient of the growing mode at `x = R` for the solution of
/// `(H - lambda) psi = 0` started at `x = 0` from `psi0`.
pub fn h_indicator(kind: OperatorKind, profile: &SolitonProfile, lambda: f64, psi0: [f64; 2], r: f64) -> Result<f64> {
    let field = LinearOperatorField { kind, profile };
    let p = &profile.params;
    let traj = integrate(
        |x| field.h_matrix(x, lambda),
        Vector2::new(psi0[0], psi0[1]),
        0.0,
        r,
        &[],
        &Options::with_tol(1e-11),
    )?;
    let (psi, _) = traj.last();
    let a = p.m_plus + lambda;
    let k = (a * (p.m_minus - lambda)).sqrt();
    // psi = alpha (a, -k) + beta (a, k)
    Ok((psi[0] * k - psi[1] * a) / (2.0 * k * a))
}

/// Eigenvalues of `H-` or `H+` in `interval`, clipped to the gap minus a guard band.
pub fn h_spectrum_scan(
    kind: OperatorKind,
    profile: &SolitonProfile,
    interval: (f64, f64),
    step: f64,
    r: f64,
) -> Result<Vec<f64>> {
    if kind == OperatorKind::L {
        return Err(Error::InvalidConfig("h_spectrum_scan needs H- or H+".into()));
    }
    if !(step > 0.0) {
        return Err(Error::InvalidConfig(format!("step must be positive, got {step}")));
    }
    check_r(profile, r)?;
    let p = &profile.params;
    let lo = interval.0.max(-p.m_plus + GAP_GUARD);
    let hi = interval.1.min(p.m_minus - GAP_GUARD);
    if lo >= hi {
        return Ok(vec![]);
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let grid = linspace(lo, hi, n + 1);
    let mut found = vec![];
    for psi0 in [[1.0, 0.0], [0.0, 1.0]] {
        let ind = |l: f64| h_indicator(kind, profile, l, psi0, r);
        let vals = grid.par_iter().map(|&l| ind(l)).collect::<Result<Vec<_>>>()?;
        for k in 0..grid.len() {
            if vals[k] == 0.0 {
                found.push(grid[k]);
                continue;
            }
            if k + 1 < grid.len() && vals[k] * vals[k + 1] < 0.0 {
                let (mut a, mut b, mut fa) = (grid[k], grid[k + 1], vals[k]);
                while b - a > 1e-12 {
                    let c = 0.5 * (a + b);
                    let fc = ind(c)?;
                    if fc == 0.0 {
                        a = c;
                        b = c;
                        break;
                    }
                    if fa * fc < 0.0 {
                        b = c;
                    } else {
                        a = c;
                        fa = fc;
                    }
                }
                found.push(0.5 * (a + b));
            }
        }
    }
    found.sort_by(f64::total_cmp);
    found.dedup_by(|a, b| (*a - *b).abs() < 1e-8);
    Ok(found)
}
