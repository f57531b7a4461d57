//! C ABI over `blowup-lab`.
//!
//! Every function returns a [`BlStatus`]; results go through out-pointers.
//! Objects are opaque handles created by `*_new`/producer functions and
//! released with the matching `*_free`. The message of the last error on
//! the calling thread is available through [`bl_last_error`].

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use blowup_lab::evolution::{self, BlowupTimeOptions, EvolutionError, ShiftedBlowup};
use blowup_lab::exactmath::Certificate;
use blowup_lab::geometry;
use blowup_lab::profile::{self, ProfileError, ProfileParams};
use blowup_lab::spectral::{self, Operator, Region, SearchOptions, SearchReport, SpectralError};
use num_complex::Complex64;

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    /// Argument outside the domain of the profile or the evolution grid.
    Domain = 3,
    NoConvergence = 4,
    /// Evolution exceeded its abort threshold.
    Diverged = 5,
    /// Output buffer too small; the required size was written.
    BufferTooSmall = 6,
    /// A Rust panic was caught at the boundary.
    Panic = 7,
}

/// Which linear problem a spectral call refers to.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlOperator {
    Eigen = 0,
    Susy = 1,
}

impl From<BlOperator> for Operator {
    fn from(op: BlOperator) -> Self {
        match op {
            BlOperator::Eigen => Operator::Eigen,
            BlOperator::Susy => Operator::Susy,
        }
    }
}

/// Opaque profile parameters for one dimension.
pub struct BlProfile(ProfileParams);

/// Opaque certificate.
pub struct BlCertificate(Certificate);

/// Opaque eigenvalue search result.
pub struct BlSpectrum(SearchReport);

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn fail(status: BlStatus, msg: impl Into<String>) -> BlStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
    status
}

fn from_profile(e: ProfileError) -> BlStatus {
    let status = match e {
        ProfileError::OutsideDomain { .. } | ProfileError::SingularInLightcone { .. } => {
            BlStatus::Domain
        }
        _ => BlStatus::InvalidInput,
    };
    fail(status, e.to_string())
}

fn from_spectral(e: SpectralError) -> BlStatus {
    let status = match e {
        SpectralError::InvalidInput(_) => BlStatus::InvalidInput,
        SpectralError::NoConvergence(_) => BlStatus::NoConvergence,
    };
    fail(status, e.to_string())
}

fn from_evolution(e: EvolutionError) -> BlStatus {
    let status = match e {
        EvolutionError::InvalidInput(_) => BlStatus::InvalidInput,
        EvolutionError::Domain(_) => BlStatus::Domain,
        EvolutionError::Diverged { .. } => BlStatus::Diverged,
        EvolutionError::NoConvergence(_) => BlStatus::NoConvergence,
    };
    fail(status, e.to_string())
}

fn guard(f: impl FnOnce() -> BlStatus) -> BlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(BlStatus::Panic, msg)
        }
    }
}

macro_rules! non_null {
    ($($p:expr),+) => {
        $(if $p.is_null() {
            return fail(BlStatus::NullPointer, concat!("null pointer: ", stringify!($p)));
        })+
    };
}

/// Copy `s` with a trailing NUL into `buf`. `needed` receives the size
/// including the NUL; with `buf` null only the size is reported.
unsafe fn write_str(s: &str, buf: *mut c_char, len: usize, needed: *mut usize) -> BlStatus {
    let n = s.len() + 1;
    if !needed.is_null() {
        *needed = n;
    }
    if buf.is_null() {
        return BlStatus::Ok;
    }
    if len < n {
        return fail(
            BlStatus::BufferTooSmall,
            format!("buffer of {len} bytes, need {n}"),
        );
    }
    ptr::copy_nonoverlapping(s.as_ptr(), buf.cast::<u8>(), s.len());
    *buf.add(s.len()) = 0;
    BlStatus::Ok
}

/// Last error message of the calling thread (empty if none).
///
/// # Safety
/// `buf` must be null or valid for `len` bytes; `needed` null or writable.
#[no_mangle]
pub unsafe extern "C" fn bl_last_error(
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> BlStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    write_str(&msg, buf, len, needed)
}

/// Profile parameters for dimension `d`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_new(d: i64, out: *mut *mut BlProfile) -> BlStatus {
    guard(|| {
        non_null!(out);
        match profile::profile_params(d) {
            Ok(p) => {
                *out = Box::into_raw(Box::new(BlProfile(p)));
                BlStatus::Ok
            }
            Err(e) => from_profile(e),
        }
    })
}

/// # Safety
/// `p` must come from [`bl_profile_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_free(p: *mut BlProfile) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `a` and `b` of `φ₀(ρ) = aρ/√(b − ρ²)`.
///
/// # Safety
/// `p` must be a live handle; `a`, `b` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_params(
    p: *const BlProfile,
    a: *mut f64,
    b: *mut f64,
) -> BlStatus {
    guard(|| {
        non_null!(p, a, b);
        *a = (*p).0.a;
        *b = (*p).0.b;
        BlStatus::Ok
    })
}

/// `φ₀(ρ)` and `φ₀′(ρ)`; fails with `Domain` unless `ρ² < b`.
///
/// # Safety
/// `p` must be a live handle; `phi`, `dphi` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_eval(
    p: *const BlProfile,
    rho: f64,
    phi: *mut f64,
    dphi: *mut f64,
) -> BlStatus {
    guard(|| {
        non_null!(p, phi, dphi);
        match (*p).0.phi0_derivs(rho) {
            Ok(d) => {
                *phi = d[0];
                *dphi = d[1];
                BlStatus::Ok
            }
            Err(e) => from_profile(e),
        }
    })
}

/// Maximum profile ODE residual on the uniform grid `j/n`, `j = 1..=n`.
///
/// # Safety
/// `p` must be a live handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_profile_residual(
    p: *const BlProfile,
    n: usize,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        non_null!(p, out);
        if n == 0 {
            return fail(BlStatus::InvalidInput, "grid size must be positive");
        }
        match (*p).0.ode_residual(&profile::uniform_grid(n)) {
            Ok(r) => {
                *out = r;
                BlStatus::Ok
            }
            Err(e) => from_profile(e),
        }
    })
}

unsafe fn emit_cert(c: Certificate, out: *mut *mut BlCertificate) -> BlStatus {
    *out = Box::into_raw(Box::new(BlCertificate(c)));
    BlStatus::Ok
}

/// Exact certificate for `|δ₇| ≤ 1/3` on the imaginary axis.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_certify_delta7(out: *mut *mut BlCertificate) -> BlStatus {
    guard(|| {
        non_null!(out);
        emit_cert(spectral::certify_delta7(), out)
    })
}

/// Negative-curvature certificate for dimension `d`, or for all `d ≥ 8`
/// when `d` is 0.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_certify_curvature(d: i64, out: *mut *mut BlCertificate) -> BlStatus {
    guard(|| {
        non_null!(out);
        let c = if d == 0 {
            geometry::certify_negative_curvature_symbolic()
        } else {
            geometry::certify_negative_curvature(d)
        };
        emit_cert(c, out)
    })
}

/// # Safety
/// `c` must be a live handle; `passed` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_certificate_passed(
    c: *const BlCertificate,
    passed: *mut bool,
) -> BlStatus {
    guard(|| {
        non_null!(c, passed);
        *passed = (*c).0.passed();
        BlStatus::Ok
    })
}

/// Certificate as a NUL-terminated JSON document.
///
/// # Safety
/// `c` must be a live handle; see [`bl_last_error`] for the buffer contract.
#[no_mangle]
pub unsafe extern "C" fn bl_certificate_json(
    c: *const BlCertificate,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> BlStatus {
    guard(|| {
        non_null!(c);
        write_str(&(*c).0.to_json(), buf, len, needed)
    })
}

/// # Safety
/// `c` must come from a certificate producer and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bl_certificate_free(c: *mut BlCertificate) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Connection determinant `D(λ)`; zero exactly at eigenvalues.
///
/// # Safety
/// `out_re`, `out_im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_determinant(
    op: BlOperator,
    re: f64,
    im: f64,
    out_re: *mut f64,
    out_im: *mut f64,
) -> BlStatus {
    guard(|| {
        non_null!(out_re, out_im);
        let guard_terms = spectral::shooting::guard_for(re);
        match spectral::determinant(op.into(), Complex64::new(re, im), guard_terms) {
            Ok(d) => {
                *out_re = d.re;
                *out_im = d.im;
                BlStatus::Ok
            }
            Err(e) => from_spectral(e),
        }
    })
}

/// All eigenvalues in `[re_lo, re_hi] × [im_lo, im_hi]`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_search(
    op: BlOperator,
    re_lo: f64,
    re_hi: f64,
    im_lo: f64,
    im_hi: f64,
    tol: f64,
    out: *mut *mut BlSpectrum,
) -> BlStatus {
    guard(|| {
        non_null!(out);
        let region = match Region::new((re_lo, re_hi), (im_lo, im_hi)) {
            Ok(r) => r,
            Err(e) => return from_spectral(e),
        };
        let opts = SearchOptions {
            operator: op.into(),
            tol,
            ..Default::default()
        };
        match spectral::eigenvalue_search(region, &opts) {
            Ok(r) => {
                *out = Box::into_raw(Box::new(BlSpectrum(r)));
                BlStatus::Ok
            }
            Err(e) => from_spectral(e),
        }
    })
}

/// Number of eigenvalues found.
///
/// # Safety
/// `s` must be a live handle; `len` writable.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_len(s: *const BlSpectrum, len: *mut usize) -> BlStatus {
    guard(|| {
        non_null!(s, len);
        *len = (*s).0.eigenvalues.len();
        BlStatus::Ok
    })
}

/// Eigenvalue `i` (ordered by decreasing real part) and its residual.
///
/// # Safety
/// `s` must be a live handle; the out-pointers writable.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_get(
    s: *const BlSpectrum,
    i: usize,
    re: *mut f64,
    im: *mut f64,
    residual: *mut f64,
) -> BlStatus {
    guard(|| {
        non_null!(s, re, im, residual);
        match (&(*s).0).eigenvalues.get(i) {
            Some(e) => {
                *re = e.re;
                *im = e.im;
                *residual = e.residual;
                BlStatus::Ok
            }
            None => fail(BlStatus::InvalidInput, format!("index {i} out of range")),
        }
    })
}

/// # Safety
/// `s` must come from [`bl_spectrum_search`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn bl_spectrum_free(s: *mut BlSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Blowup time recovered from the data of the self-similar solution that
/// blows up at `t_prime`, viewed as a perturbation of the one at `t0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bl_find_blowup_time(
    t_prime: f64,
    t0: f64,
    n: usize,
    out: *mut f64,
) -> BlStatus {
    guard(|| {
        non_null!(out);
        let v = match ShiftedBlowup::new(t_prime, t0) {
            Ok(v) => v,
            Err(e) => return from_evolution(e),
        };
        let opts = BlowupTimeOptions {
            n,
            ..Default::default()
        };
        match evolution::find_blowup_time(&v, t0, &opts) {
            Ok(r) => {
                *out = r.t;
                BlStatus::Ok
            }
            Err(e) => from_evolution(e),
        }
    })
}
