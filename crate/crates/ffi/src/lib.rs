//! C ABI over `dirac-spectra`.
//!
//! Every function returns a [`DsStatus`]; on failure the message is available from
//! [`ds_last_error_message`] on the same thread. Profiles are opaque handles owned by
//! the caller and released with [`ds_profile_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dirac_spectra::evans::{evans_pair, h_spectrum_scan, refine_zero, ParityClass};
use dirac_spectra::linops::OperatorKind;
use dirac_spectra::model::Nonlinearity;
use dirac_spectra::resonance::{exact_threshold_phase, wkb_phase, ThresholdTag};
use dirac_spectra::soliton::{closed_form_profile, quadrature_profile, Grid};
use dirac_spectra::{Error, SolitonProfile};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    NoSolitaryWave = 4,
    NegativeRadicand = 5,
    StepUnderflow = 6,
    NonConvergence = 7,
    DegenerateDirection = 8,
    NoCrossing = 9,
    Io = 10,
    Panic = 11,
}

/// Opaque sampled solitary wave.
pub struct DsProfile(SolitonProfile);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DsPoint {
    pub x: f64,
    pub v: f64,
    pub u: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DsEvans {
    pub e_minus_re: f64,
    pub e_minus_im: f64,
    pub e_plus_re: f64,
    pub e_plus_im: f64,
    pub scale: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DsZero {
    pub re: f64,
    pub im: f64,
    /// 0 for the `X-` Evans function, 1 for `X+`.
    pub parity_class: u32,
    pub multiplicity: u32,
    pub abs_e: f64,
}

/// `tag` values for the threshold-phase functions.
pub const DS_TAG_HP_MMINUS: u32 = 0;
pub const DS_TAG_HP_MPLUS: u32 = 1;
pub const DS_TAG_L_IMPLUS: u32 = 2;
/// `kind` values for [`ds_h_spectrum`].
pub const DS_KIND_H_MINUS: u32 = 0;
pub const DS_KIND_H_PLUS: u32 = 1;

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> DsStatus {
    match e {
        Error::Domain(_) => DsStatus::Domain,
        Error::NoSolitaryWave(_) => DsStatus::NoSolitaryWave,
        Error::NegativeRadicand { .. } => DsStatus::NegativeRadicand,
        Error::StepUnderflow { .. } => DsStatus::StepUnderflow,
        Error::NonConvergence(_) => DsStatus::NonConvergence,
        Error::DegenerateDirection { .. } => DsStatus::DegenerateDirection,
        Error::NoCrossing(_) => DsStatus::NoCrossing,
        Error::InvalidConfig(_) => DsStatus::InvalidArgument,
        Error::Io(_) => DsStatus::Io,
    }
}

struct Fail(DsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(DsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: String) -> Fail {
    Fail(DsStatus::InvalidArgument, msg)
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> DsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            DsStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside dirac-spectra");
            DsStatus::Panic
        }
    }
}

unsafe fn profile<'a>(p: *const DsProfile) -> Result<&'a SolitonProfile, Fail> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| null("profile"))
}

unsafe fn slot<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

fn tag(t: u32) -> Result<ThresholdTag, Fail> {
    match t {
        DS_TAG_HP_MMINUS => Ok(ThresholdTag::HplusMminus),
        DS_TAG_HP_MPLUS => Ok(ThresholdTag::HplusMplus),
        DS_TAG_L_IMPLUS => Ok(ThresholdTag::LImplus),
        _ => Err(invalid(format!("unknown threshold tag {t}"))),
    }
}

/// Message for the last failing call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Closed-form Gross-Neveu wave on `[-r, r]` with spacing `h`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_profile_closed_form(omega: f64, r: f64, h: f64, out: *mut *mut DsProfile) -> DsStatus {
    guard(|| {
        let out = slot(out, "out")?;
        let p = closed_form_profile(omega, Grid::new(r, h)?)?;
        *out = Box::into_raw(Box::new(DsProfile(p)));
        Ok(())
    })
}

/// Wave of `G(X) = c[1] X + c[2] X^2 + ...` by quadrature; `n_coeffs = 0` selects
/// Gross-Neveu. `coeffs[0]` must be zero.
///
/// # Safety
/// `coeffs` must point to `n_coeffs` doubles (or be null when `n_coeffs` is 0);
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn ds_profile_quadrature(
    coeffs: *const f64,
    n_coeffs: usize,
    omega: f64,
    r: f64,
    h: f64,
    out: *mut *mut DsProfile,
) -> DsStatus {
    guard(|| {
        let out = slot(out, "out")?;
        let nl = if n_coeffs == 0 {
            Nonlinearity::gross_neveu()
        } else {
            if coeffs.is_null() {
                return Err(null("coeffs"));
            }
            Nonlinearity::polynomial(std::slice::from_raw_parts(coeffs, n_coeffs))?
        };
        let p = quadrature_profile(&nl, omega, Grid::new(r, h)?)?;
        *out = Box::into_raw(Box::new(DsProfile(p)));
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn ds_profile_free(p: *mut DsProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Number of grid points, 0 for a null handle.
///
/// # Safety
/// `p` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ds_profile_len(p: *const DsProfile) -> usize {
    p.as_ref().map_or(0, |p| p.0.len())
}

/// # Safety
/// `p` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ds_profile_sample(p: *const DsProfile, i: usize, out: *mut DsPoint) -> DsStatus {
    guard(|| {
        let p = profile(p)?;
        let out = slot(out, "out")?;
        if i >= p.len() {
            return Err(invalid(format!("index {i} out of range 0..{}", p.len())));
        }
        *out = DsPoint { x: p.x[i], v: p.v[i], u: p.u[i] };
        Ok(())
    })
}

/// `E-` and `E+` at `re + i im` with matching radius `r`.
///
/// # Safety
/// `p` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ds_evans_pair(p: *const DsProfile, re: f64, im: f64, r: f64, out: *mut DsEvans) -> DsStatus {
    guard(|| {
        let p = profile(p)?;
        let out = slot(out, "out")?;
        let s = evans_pair(Complex64::new(re, im), p, r)?;
        *out = DsEvans {
            e_minus_re: s.e_minus.re,
            e_minus_im: s.e_minus.im,
            e_plus_re: s.e_plus.re,
            e_plus_im: s.e_plus.im,
            scale: s.scale,
        };
        Ok(())
    })
}

/// Zero of the Evans functions near `re + i im`.
///
/// # Safety
/// `p` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ds_refine_zero(p: *const DsProfile, re: f64, im: f64, r: f64, out: *mut DsZero) -> DsStatus {
    guard(|| {
        let p = profile(p)?;
        let out = slot(out, "out")?;
        let z = refine_zero(p, Complex64::new(re, im), r)?;
        *out = DsZero {
            re: z.lambda.re,
            im: z.lambda.im,
            parity_class: match z.class {
                ParityClass::Xminus => 0,
                ParityClass::Xplus => 1,
            },
            multiplicity: z.multiplicity as u32,
            abs_e: z.abs_e,
        };
        Ok(())
    })
}

/// Eigenvalues of `H-` or `H+` in `[lo, hi]`. At most `cap` values are written to
/// `out`; `count` receives the total, so a second call with a larger buffer can follow.
///
/// # Safety
/// `p` must be null or a live handle; `out` must hold `cap` doubles (may be null if
/// `cap` is 0); `count` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ds_h_spectrum(
    p: *const DsProfile,
    kind: u32,
    lo: f64,
    hi: f64,
    step: f64,
    r: f64,
    out: *mut f64,
    cap: usize,
    count: *mut usize,
) -> DsStatus {
    guard(|| {
        let p = profile(p)?;
        let count = slot(count, "count")?;
        let kind = match kind {
            DS_KIND_H_MINUS => OperatorKind::Hminus,
            DS_KIND_H_PLUS => OperatorKind::Hplus,
            _ => return Err(invalid(format!("unknown operator kind {kind}"))),
        };
        if cap > 0 && out.is_null() {
            return Err(null("out"));
        }
        let eig = h_spectrum_scan(kind, p, (lo, hi), step, r)?;
        for (k, e) in eig.iter().take(cap).enumerate() {
            *out.add(k) = *e;
        }
        *count = eig.len();
        Ok(())
    })
}

/// Unwrapped phase of the threshold solution, integrated to `r`.
///
/// # Safety
/// `p` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ds_threshold_phase(p: *const DsProfile, tag_id: u32, r: f64, out: *mut f64) -> DsStatus {
    guard(|| {
        let p = profile(p)?;
        let out = slot(out, "out")?;
        *out = exact_threshold_phase(tag(tag_id)?, p, r)?;
        Ok(())
    })
}

/// WKB approximation of the threshold phase.
///
/// # Safety
/// `p` must be null or a live handle; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn ds_wkb_phase(p: *const DsProfile, tag_id: u32, out: *mut f64) -> DsStatus {
    guard(|| {
        let p = profile(p)?;
        let out = slot(out, "out")?;
        *out = wkb_phase(tag(tag_id)?, p)?;
        Ok(())
    })
}
