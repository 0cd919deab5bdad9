//! C ABI for `orbivol`.
//!
//! Every fallible function returns an [`OrbivolStatus`] and writes its result
//! through an out-pointer. Out-pointers are left untouched on failure. A
//! human-readable description of the most recent failure on the calling
//! thread is available from [`orbivol_last_error_message`].
//!
//! Bounds and matrices are opaque handles created by `orbivol_bound_compute`
//! and the `orbivol_matrix_*` constructors, and released with the matching
//! `*_free`. Passing NULL to a `*_free` function is a no-op.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use orbivol::bounds::{
    compute_bound, group_order_bound_ln, log_ball_volume, log_kappa, BoundQuery, BoundResult,
    GroupOrderBound,
};
use orbivol::elliptic::{c_k, fixed_set_distance, jorgensen_tau, norm_lower_bound, sample_elliptic};
use orbivol::lorentz::{operator_norm, random_isometry, LorentzMatrix, Matrix};
use orbivol::verify::{run_all, SuiteConfig};
use orbivol::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbivolStatus {
    Ok = 0,
    /// Arguments outside the operation's domain.
    Usage = 1,
    /// An input matrix fails a structural check (e.g. is not Lorentz).
    InvariantViolation = 2,
    /// An iterative routine did not converge.
    Numerical = 3,
    Overflow = 4,
    NullPointer = 5,
    /// The caller's buffer is shorter than the data to copy.
    BufferTooSmall = 6,
    /// Internal error; the library caught a panic.
    Panic = 7,
}

/// Result of a bound computation.
pub struct OrbivolBound(BoundResult);

/// An isometry of hyperbolic `n`-space as an `(n+1)×(n+1)` Lorentz matrix.
pub struct OrbivolMatrix(LorentzMatrix);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn status_of(err: &Error) -> OrbivolStatus {
    match err {
        Error::Usage(_) => OrbivolStatus::Usage,
        Error::InvariantViolation(_) => OrbivolStatus::InvariantViolation,
        Error::Numerical { .. } => OrbivolStatus::Numerical,
        Error::Overflow(_) => OrbivolStatus::Overflow,
    }
}

/// Runs `f`, converting library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), OrbivolStatus>) -> OrbivolStatus {
    set_last_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OrbivolStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_last_error("internal panic");
            OrbivolStatus::Panic
        }
    }
}

fn lib<T>(r: orbivol::Result<T>) -> Result<T, OrbivolStatus> {
    r.map_err(|e| {
        set_last_error(&e.to_string());
        status_of(&e)
    })
}

fn null() -> OrbivolStatus {
    set_last_error("null pointer argument");
    OrbivolStatus::NullPointer
}

/// Writes `value` through `out`, failing on NULL.
///
/// # Safety
/// `out` must be NULL or valid for writes.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), OrbivolStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

/// Static description of a status code. Never NULL; never freed.
#[no_mangle]
pub extern "C" fn orbivol_status_message(status: OrbivolStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        OrbivolStatus::Ok => b"ok\0",
        OrbivolStatus::Usage => b"usage error\0",
        OrbivolStatus::InvariantViolation => b"invariant violation\0",
        OrbivolStatus::Numerical => b"numerical failure\0",
        OrbivolStatus::Overflow => b"overflow\0",
        OrbivolStatus::NullPointer => b"null pointer\0",
        OrbivolStatus::BufferTooSmall => b"buffer too small\0",
        OrbivolStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Detail of the last failure on this thread, or "" after a success. The
/// pointer stays valid until the next call into this library on the same
/// thread.
#[no_mangle]
pub extern "C" fn orbivol_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// The library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn orbivol_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// The positive root of `2τ(1+τ)² = 1`.
#[no_mangle]
pub extern "C" fn orbivol_jorgensen_tau() -> f64 {
    jorgensen_tau()
}

/// `c_k = 2 sin²(π/k) e⁻²` for `k ≥ 2`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_c_k(k: u32, out: *mut f64) -> OrbivolStatus {
    guard(|| write(out, lib(c_k(k))?))
}

/// Lower bound on `‖A - I‖` for an elliptic `A` of order at most `k` whose
/// fixed set lies at distance `delta` from the basepoint.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_norm_lower_bound(k: u32, delta: f64, out: *mut f64) -> OrbivolStatus {
    guard(|| write(out, lib(norm_lower_bound(k, delta))?))
}

/// `ln κ(r)` for `r > 0`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_log_kappa(r: f64, out: *mut f64) -> OrbivolStatus {
    guard(|| write(out, lib(log_kappa(r))?))
}

/// Natural log of the volume of a radius-`r` ball in hyperbolic `n`-space.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_log_ball_volume(n: usize, r: f64, out: *mut f64) -> OrbivolStatus {
    guard(|| write(out, lib(log_ball_volume(n, r))?))
}

/// Computes `𝒜(n,k)`. On success `*out` owns a handle to release with
/// [`orbivol_bound_free`].
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_bound_compute(
    n: usize,
    k: u32,
    out: *mut *mut OrbivolBound,
) -> OrbivolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let bound = lib(BoundQuery::new(n, k).and_then(compute_bound))?;
        write(out, Box::into_raw(Box::new(OrbivolBound(bound))))
    })
}

unsafe fn bound_field(bound: *const OrbivolBound, f: impl Fn(&BoundResult) -> f64) -> f64 {
    match bound.as_ref() {
        Some(b) => f(&b.0),
        None => f64::NAN,
    }
}

/// `ln 𝒜(n,k)`; NaN for a NULL handle.
///
/// # Safety
/// `bound` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbivol_bound_log_a(bound: *const OrbivolBound) -> f64 {
    bound_field(bound, |b| b.log_a)
}

/// `log₁₀ 𝒜(n,k)`; NaN for a NULL handle.
///
/// # Safety
/// `bound` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbivol_bound_log10_a(bound: *const OrbivolBound) -> f64 {
    bound_field(bound, BoundResult::log10_a)
}

/// The maximizing radius; NaN for a NULL handle.
///
/// # Safety
/// `bound` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbivol_bound_r_star(bound: *const OrbivolBound) -> f64 {
    bound_field(bound, |b| b.r_star)
}

/// `ln Vol B(r*)`; NaN for a NULL handle.
///
/// # Safety
/// `bound` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbivol_bound_log_ball_volume(bound: *const OrbivolBound) -> f64 {
    bound_field(bound, |b| b.log_ball_volume)
}

/// `ln H(n,k,r*)`; NaN for a NULL handle.
///
/// # Safety
/// `bound` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbivol_bound_log_packing_count(bound: *const OrbivolBound) -> f64 {
    bound_field(bound, |b| b.log_packing_count)
}

/// Releases a bound handle.
///
/// # Safety
/// `bound` must be NULL or a handle from [`orbivol_bound_compute`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn orbivol_bound_free(bound: *mut OrbivolBound) {
    if !bound.is_null() {
        drop(Box::from_raw(bound));
    }
}

/// Group-order bound `⌊factor · V / 𝒜(n,k)⌋` with `factor = 2` when
/// `out_variant` is set. The volume is passed as `log₁₀ V` so volumes below
/// the smallest double are usable. When the bound does not fit below `2⁶³`,
/// `*saturated` is set and `*bound` is `INT64_MAX`.
///
/// # Safety
/// `bound` and `saturated` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_hurwitz(
    log10_volume: f64,
    n: usize,
    k: u32,
    out_variant: bool,
    bound: *mut u64,
    saturated: *mut bool,
) -> OrbivolStatus {
    guard(|| {
        if bound.is_null() || saturated.is_null() {
            return Err(null());
        }
        let a = lib(BoundQuery::new(n, k).and_then(compute_bound))?;
        let factor = if out_variant { 2 } else { 1 };
        let result = lib(group_order_bound_ln(
            log10_volume * std::f64::consts::LN_10,
            a.log_a,
            factor,
        ))?;
        let (value, sat) = match result {
            GroupOrderBound::Count(c) => (c, false),
            GroupOrderBound::ExceedsTwoPow63 => (i64::MAX as u64, true),
        };
        write(bound, value)?;
        write(saturated, sat)
    })
}

unsafe fn emit_matrix(m: LorentzMatrix, out: *mut *mut OrbivolMatrix) -> Result<(), OrbivolStatus> {
    write(out, Box::into_raw(Box::new(OrbivolMatrix(m))))
}

/// The boost by `delta` along the first spatial axis of hyperbolic `n`-space.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_boost(
    n: usize,
    delta: f64,
    out: *mut *mut OrbivolMatrix,
) -> OrbivolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        emit_matrix(lib(LorentzMatrix::boost(n, delta))?, out)
    })
}

/// A seeded random isometry moving the basepoint by at most `max_translation`.
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_random_isometry(
    n: usize,
    max_translation: f64,
    seed: u64,
    out: *mut *mut OrbivolMatrix,
) -> OrbivolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        emit_matrix(lib(random_isometry(n, max_translation, seed))?, out)
    })
}

/// A seeded random elliptic isometry of exact order `k` whose fixed set lies
/// at distance `delta` from the basepoint. The measured distance is written
/// to `*measured_delta` when that pointer is not NULL.
///
/// # Safety
/// `out` must be NULL or valid for writes; `measured_delta` must be NULL or
/// valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_sample_elliptic(
    n: usize,
    k: u32,
    delta: f64,
    seed: u64,
    out: *mut *mut OrbivolMatrix,
    measured_delta: *mut f64,
) -> OrbivolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let e = lib(sample_elliptic(n, k, delta, seed))?;
        if !measured_delta.is_null() {
            measured_delta.write(e.delta);
        }
        emit_matrix(e.matrix, out)
    })
}

/// Wraps `(n+1)²` row-major entries as a Lorentz matrix after checking
/// `AᵀJA = J` and `a₁₁ ≥ 1`.
///
/// # Safety
/// `entries` must be NULL or point to `(n+1)²` readable doubles; `out` must
/// be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_from_entries(
    n: usize,
    entries: *const f64,
    out: *mut *mut OrbivolMatrix,
) -> OrbivolStatus {
    guard(|| {
        if entries.is_null() || out.is_null() {
            return Err(null());
        }
        if !(2..=1 << 12).contains(&n) {
            set_last_error(&format!("dimension n = {n} must be in 2..=4096"));
            return Err(OrbivolStatus::Usage);
        }
        let size = n + 1;
        let data = std::slice::from_raw_parts(entries, size * size);
        let m = Matrix::from_row_slice(size, size, data);
        emit_matrix(lib(LorentzMatrix::from_matrix(m))?, out)
    })
}

/// The hyperbolic dimension `n` of a matrix handle, so the matrix is
/// `(n+1)×(n+1)`; 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_dim(m: *const OrbivolMatrix) -> usize {
    m.as_ref().map_or(0, |m| m.0.dim())
}

/// Copies the entries in row-major order into `buf`, which must hold at least
/// `(n+1)²` doubles; `len` is its capacity.
///
/// # Safety
/// `m` must be NULL or a live handle; `buf` must be NULL or valid for `len`
/// writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_copy_entries(
    m: *const OrbivolMatrix,
    buf: *mut f64,
    len: usize,
) -> OrbivolStatus {
    guard(|| {
        let (Some(m), false) = (m.as_ref(), buf.is_null()) else {
            return Err(null());
        };
        let a = m.0.as_matrix();
        let size = a.nrows();
        if len < size * size {
            set_last_error(&format!("buffer holds {len} doubles, need {}", size * size));
            return Err(OrbivolStatus::BufferTooSmall);
        }
        let out = std::slice::from_raw_parts_mut(buf, size * size);
        for i in 0..size {
            for j in 0..size {
                out[i * size + j] = a[(i, j)];
            }
        }
        Ok(())
    })
}

/// Spectral norm `‖A‖`.
///
/// # Safety
/// `m` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_operator_norm(
    m: *const OrbivolMatrix,
    out: *mut f64,
) -> OrbivolStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(null)?;
        write(out, lib(operator_norm(m.0.as_matrix()))?)
    })
}

/// Spectral norm `‖A - I‖`.
///
/// # Safety
/// `m` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_distance_to_identity(
    m: *const OrbivolMatrix,
    out: *mut f64,
) -> OrbivolStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(null)?;
        write(out, lib(operator_norm(&m.0.minus_identity()))?)
    })
}

/// Distance from the basepoint to the fixed set of `A` in hyperbolic space.
///
/// # Safety
/// `m` must be NULL or a live handle; `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_fixed_set_distance(
    m: *const OrbivolMatrix,
    out: *mut f64,
) -> OrbivolStatus {
    guard(|| {
        let m = m.as_ref().ok_or_else(null)?;
        write(out, lib(fixed_set_distance(&m.0))?)
    })
}

/// Releases a matrix handle.
///
/// # Safety
/// `m` must be NULL or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn orbivol_matrix_free(m: *mut OrbivolMatrix) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Runs the default verification suite with `trials` trials per case.
/// Writes whether every case passed and the total number of violations.
///
/// # Safety
/// `passed` and `violations` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_verify_run_all(
    trials: u64,
    seed: u64,
    passed: *mut bool,
    violations: *mut u64,
) -> OrbivolStatus {
    guard(|| {
        if passed.is_null() || violations.is_null() {
            return Err(null());
        }
        let outcome = lib(run_all(&SuiteConfig::with_trials(trials, seed)))?;
        write(passed, outcome.passed)?;
        write(violations, outcome.reports.iter().map(|r| r.violations).sum())
    })
}

/// Like [`orbivol_verify_run_all`], returning the per-case reports as a JSON
/// array in a newly allocated string to release with [`orbivol_string_free`].
///
/// # Safety
/// `out` must be NULL or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn orbivol_verify_report_json(
    trials: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> OrbivolStatus {
    guard(|| {
        if out.is_null() {
            return Err(null());
        }
        let outcome = lib(run_all(&SuiteConfig::with_trials(trials, seed)))?;
        let json = serde_json::to_string(&outcome.reports).map_err(|e| {
            set_last_error(&e.to_string());
            OrbivolStatus::Panic
        })?;
        let c = CString::new(json).map_err(|_| OrbivolStatus::Panic)?;
        write(out, c.into_raw())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be NULL or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn orbivol_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
