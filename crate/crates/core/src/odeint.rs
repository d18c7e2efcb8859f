//! Linear ODE integration `psi' = A(x) psi` for several columns at once, with
//! per-column renormalization, plus adaptive Gauss-Kronrod quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use nalgebra::{ComplexField, SMatrix};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real or complex entries of the integrated state.
pub trait Scalar: ComplexField<RealField = f64> + Copy {}
impl Scalar for f64 {}
impl Scalar for Complex64 {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Local error tolerance, relative to each column's norm.
    pub tol: f64,
    /// Renormalize a column once its norm leaves `[1/renorm, renorm]`.
    pub renorm: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { tol: 1e-10, renorm: 1e6, h_min: 1e-14, max_steps: 1_000_000 }
    }
}

impl Options {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Samples of the solution; the true value at `x[i]` is column `j` of `psi[i]`
/// times `exp(log_scale[i][j])`.
#[derive(Debug, Clone)]
pub struct Trajectory<T: Scalar, const N: usize, const K: usize> {
    pub x: Vec<f64>,
    pub psi: Vec<SMatrix<T, N, K>>,
    pub log_scale: Vec<[f64; K]>,
    /// Accepted step points, usable with [`integrate_on_mesh`].
    pub mesh: Vec<f64>,
}

impl<T: Scalar, const N: usize, const K: usize> Trajectory<T, N, K> {
    pub fn last(&self) -> (&SMatrix<T, N, K>, &[f64; K]) {
        (self.psi.last().unwrap(), self.log_scale.last().unwrap())
    }

    /// Column `j` at sample `i`, scale restored. Overflows for large `log_scale`.
    pub fn reconstructed(&self, i: usize) -> SMatrix<T, N, K> {
        let mut m = self.psi[i];
        for j in 0..K {
            m.column_mut(j).scale_mut(self.log_scale[i][j].exp());
        }
        m
    }
}

// Dormand-Prince 5(4).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type Mat<T, const N: usize, const K: usize> = SMatrix<T, N, K>;

fn lin<T: Scalar, const N: usize, const K: usize>(
    y: &Mat<T, N, K>,
    h: f64,
    coeffs: &[f64],
    ks: &[Mat<T, N, K>],
) -> Mat<T, N, K> {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks) {
        if *c != 0.0 {
            out += k * T::from_real(h * c);
        }
    }
    out
}

/// One Dormand-Prince step; returns the fifth-order solution and the error estimate.
fn dopri_step<T: Scalar, const N: usize, const K: usize, F>(
    a: &F,
    x: f64,
    y: &Mat<T, N, K>,
    h: f64,
) -> (Mat<T, N, K>, Mat<T, N, K>)
where
    F: Fn(f64) -> SMatrix<T, N, N>,
{
    let mut k: [Mat<T, N, K>; 7] = [Mat::<T, N, K>::zeros(); 7];
    k[0] = a(x) * y;
    k[1] = a(x + C[1] * h) * lin(y, h, &A2, &k[..1]);
    k[2] = a(x + C[2] * h) * lin(y, h, &A3, &k[..2]);
    k[3] = a(x + C[3] * h) * lin(y, h, &A4, &k[..3]);
    k[4] = a(x + C[4] * h) * lin(y, h, &A5, &k[..4]);
    k[5] = a(x + h) * lin(y, h, &A6, &k[..5]);
    let y5 = lin(y, h, &B5[..6], &k[..6]);
    k[6] = a(x + h) * y5;
    let mut err = Mat::<T, N, K>::zeros();
    for i in 0..7 {
        let d = B5[i] - B4[i];
        if d != 0.0 {
            err += k[i] * T::from_real(h * d);
        }
    }
    (y5, err)
}

fn renormalize<T: Scalar, const N: usize, const K: usize>(
    y: &mut Mat<T, N, K>,
    log_scale: &mut [f64; K],
    s: f64,
) {
    for j in 0..K {
        let n = y.column(j).norm();
        if n > 0.0 && (n > s || n < 1.0 / s) {
            y.column_mut(j).unscale_mut(n);
            log_scale[j] += n.ln();
        }
    }
}

/// Adaptive integration from `x0` to `x1` (either direction). The trajectory holds
/// `x0`, every point of `samples` lying in the interval, and `x1`.
pub fn integrate<T, const N: usize, const K: usize, F>(
    a: F,
    psi0: Mat<T, N, K>,
    x0: f64,
    x1: f64,
    samples: &[f64],
    opts: &Options,
) -> Result<Trajectory<T, N, K>>
where
    T: Scalar,
    F: Fn(f64) -> SMatrix<T, N, N>,
{
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be positive, got {}", opts.tol)));
    }
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let mut targets: Vec<f64> = samples
        .iter()
        .copied()
        .filter(|&s| (s - x0) * dir > 0.0 && (x1 - s) * dir > 0.0)
        .collect();
    targets.sort_by(|p, q| (dir * p).partial_cmp(&(dir * q)).unwrap_or(Ordering::Equal));
    targets.dedup();
    targets.push(x1);

    let mut traj = Trajectory {
        x: vec![x0],
        psi: vec![psi0],
        log_scale: vec![[0.0; K]],
        mesh: vec![x0],
    };
    if x0 == x1 {
        return Ok(traj);
    }

    let mut y = psi0;
    let mut ls = [0.0; K];
    renormalize(&mut y, &mut ls, opts.renorm);
    let mut x = x0;
    let span = (x1 - x0).abs();
    let anorm = a(x0).norm();
    let mut h = (0.01 * span).min(0.1 / (1.0 + anorm)).max(10.0 * opts.h_min);
    let mut steps = 0usize;

    for &target in &targets {
        while (target - x) * dir > 0.0 {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::NonConvergence(format!("more than {} steps", opts.max_steps)));
            }
            let remaining = (target - x).abs();
            let last = h >= remaining;
            let hs = if last { remaining } else { h };
            let (y_new, err) = dopri_step(&a, x, &y, dir * hs);
            let mut e = 0.0f64;
            for j in 0..K {
                let scale = y.column(j).norm().max(y_new.column(j).norm());
                if scale > 0.0 {
                    e = e.max(err.column(j).norm() / (opts.tol * scale));
                }
            }
            if !e.is_finite() {
                e = 1e10;
            }
            if e <= 1.0 {
                x = if last { target } else { x + dir * hs };
                y = y_new;
                renormalize(&mut y, &mut ls, opts.renorm);
                traj.mesh.push(x);
                let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
                // Landing on a sample should not shrink the next step.
                h = if last { h.max(hs * fac) } else { hs * fac };
            } else {
                h = hs * (0.9 * e.powf(-0.2)).clamp(0.1, 0.9);
                if h < opts.h_min {
                    return Err(Error::StepUnderflow { x, h });
                }
            }
        }
        traj.x.push(target);
        traj.psi.push(y);
        traj.log_scale.push(ls);
    }
    Ok(traj)
}

/// Fixed-mesh Dormand-Prince steps along `mesh`. Returns the final state and its log scales.
/// Evaluating on a frozen mesh makes the result a smooth function of parameters in `a`.
pub fn integrate_on_mesh<T, const N: usize, const K: usize, F>(
    a: F,
    psi0: Mat<T, N, K>,
    mesh: &[f64],
    renorm: f64,
) -> (Mat<T, N, K>, [f64; K])
where
    T: Scalar,
    F: Fn(f64) -> SMatrix<T, N, N>,
{
    let mut y = psi0;
    let mut ls = [0.0; K];
    renormalize(&mut y, &mut ls, renorm);
    for w in mesh.windows(2) {
        let (y_new, _) = dopri_step(&a, w[0], &y, w[1] - w[0]);
        y = y_new;
        renormalize(&mut y, &mut ls, renorm);
    }
    (y, ls)
}

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

const MAX_SUBDIVISIONS: usize = 5000;

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let hl = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = hl * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * hl, ((kron - gauss) * hl).abs())
}

struct Segment {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Segment {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (val, err) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, val, err });
    let (mut total, mut total_err) = (val, err);
    let mut n = 1;
    while total_err > tol.max(1e-15 * total.abs()) {
        if n >= MAX_SUBDIVISIONS {
            return Err(Error::NonConvergence(format!(
                "quad: error {total_err:e} above {tol:e} after {n} subdivisions"
            )));
        }
        let s = heap.pop().unwrap();
        let m = 0.5 * (s.a + s.b);
        let (v1, e1) = gk15(f, s.a, m);
        let (v2, e2) = gk15(f, m, s.b);
        total += v1 + v2 - s.val;
        total_err += e1 + e2 - s.err;
        heap.push(Segment { a: s.a, b: m, val: v1, err: e1 });
        heap.push(Segment { a: m, b: s.b, val: v2, err: e2 });
        n += 1;
        if n % 64 == 0 {
            // Refresh the running sums against cancellation drift.
            total = heap.iter().map(|s| s.val).sum();
            total_err = heap.iter().map(|s| s.err).sum();
        }
    }
    Ok(heap.iter().map(|s| s.val).sum())
}

/// Adaptive Gauss-Kronrod estimate of the integral of `f` over `[a, b]`, either end
/// possibly infinite. Half-lines are mapped onto `(0, 1]` with `x = a + (1 - t)/t`.
pub fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    quad_dyn(&f, a, b, tol)
}

fn quad_dyn(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tol must be positive, got {tol}")));
    }
    if a.is_nan() || b.is_nan() {
        return Err(Error::InvalidConfig("NaN integration bound".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return quad_dyn(f, b, a, tol).map(|v| -v);
    }
    match (a.is_infinite(), b.is_infinite()) {
        (false, false) => adaptive(&f, a, b, tol),
        (false, true) => {
            let g = |t: f64| f(a + (1.0 - t) / t) / (t * t);
            adaptive(&g, 0.0, 1.0, tol)
        }
        (true, false) => {
            let g = |t: f64| f(b - (1.0 - t) / t) / (t * t);
            adaptive(&g, 0.0, 1.0, tol)
        }
        (true, true) => Ok(quad_dyn(f, f64::NEG_INFINITY, 0.0, 0.5 * tol)?
            + quad_dyn(f, 0.0, f64::INFINITY, 0.5 * tol)?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{Matrix2, Vector2};
    use std::f64::consts::PI;

    #[test]
    fn zero_field_is_identity() {
        let psi0 = Vector2::new(Complex64::new(0.3, -1.0), Complex64::new(2.0, 0.5));
        let t = integrate(|_| Matrix2::zeros(), psi0, 0.0, 5.0, &[], &Options::default()).unwrap();
        assert_eq!(t.reconstructed(t.x.len() - 1), psi0);
    }

    #[test]
    fn harmonic_oscillator_lands_on_samples() {
        let a = |_x: f64| Matrix2::new(0.0, 1.0, -1.0, 0.0);
        let samples = [1.0, 2.5, -3.0, 7.0];
        let t = integrate(a, Vector2::new(1.0, 0.0), 0.0, 4.0, &samples, &Options::default())
            .unwrap();
        assert_eq!(t.x, vec![0.0, 1.0, 2.5, 4.0]);
        for (i, &x) in t.x.iter().enumerate() {
            let y = t.reconstructed(i);
            assert_relative_eq!(y[0], x.cos(), epsilon = 1e-9);
            assert_relative_eq!(y[1], -x.sin(), epsilon = 1e-9);
        }
    }

    #[test]
    fn backwards_and_growth() {
        let a = |_x: f64| Matrix2::new(0.0, 1.0, 1.0, 0.0);
        let t = integrate(a, Vector2::new(1.0, 1.0), 0.0, -50.0, &[], &Options::default()).unwrap();
        let (y, ls) = t.last();
        // (1,1) e^{x} decays going left.
        assert_relative_eq!(ls[0] + y.norm().ln(), -50.0 + 2f64.sqrt().ln(), epsilon = 1e-7);
        let t = integrate(a, Vector2::new(1.0, 1.0), 0.0, 50.0, &[], &Options::default()).unwrap();
        let (y, ls) = t.last();
        assert!(y.norm() <= 1e6 && y.norm() >= 1e-6);
        assert_relative_eq!(ls[0] + y.norm().ln(), 50.0 + 2f64.sqrt().ln(), epsilon = 1e-7);
    }

    #[test]
    fn singular_field_underflows() {
        let a = |x: f64| Matrix2::new(1.0 / (1.0 - x).powi(3), 0.0, 0.0, 0.0);
        let r = integrate(a, Vector2::new(1.0, 0.0), 0.0, 2.0, &[], &Options::default());
        assert!(matches!(r, Err(Error::StepUnderflow { .. }) | Err(Error::NonConvergence(_))));
    }

    #[test]
    fn quad_basics() {
        assert_relative_eq!(quad(|x| x, 0.0, 1.0, 1e-12).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(quad(|x| x, 1.0, 0.0, 1e-12).unwrap(), -0.5, epsilon = 1e-14);
        let sech = |x: f64| 1.0 / x.cosh();
        assert_relative_eq!(
            quad(sech, f64::NEG_INFINITY, f64::INFINITY, 1e-12).unwrap(),
            PI,
            epsilon = 1e-10
        );
        let s2 = |y: f64| 2f64.sqrt() / y.cosh();
        assert_relative_eq!(
            quad(s2, f64::NEG_INFINITY, f64::INFINITY, 1e-12).unwrap(),
            2f64.sqrt() * PI,
            epsilon = 1e-10
        );
        assert_relative_eq!(
            quad(|x| (-x).exp(), 0.0, f64::INFINITY, 1e-12).unwrap(),
            1.0,
            epsilon = 1e-11
        );
    }

    #[test]
    fn quad_nonconvergence() {
        let r = quad(|x| (1.0 / x).sin() / x, 1e-300, 1.0, 1e-14);
        assert!(matches!(r, Err(Error::NonConvergence(_))));
    }
}
