//! C ABI over `dgz_core`.
//!
//! Every fallible function returns a [`DgzStatus`]; on failure the message is available from
//! [`dgz_last_error`] on the same thread. Handles are opaque and must be released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dgz_core::census::{count_points, extension};
use dgz_core::curve::DgzCurve;
use dgz_core::plane::ProjPoint;
use dgz_core::report::{suite_checks, Suite};
use dgz_core::Error;

/// Result codes shared by all functions.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DgzStatus {
    Ok = 0,
    /// A required pointer was null or a string was not UTF-8.
    NullOrInvalid = 1,
    InvalidQ = 2,
    ScaleExceeded = 3,
    Parse = 4,
    /// The computation ran and a check failed.
    CheckFailed = 5,
    /// Any other library error.
    Error = 6,
    Panic = 7,
}

/// A built curve `F = D1/D2` over `F_q`.
pub struct DgzCurveHandle {
    curve: DgzCurve,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> DgzStatus {
    match e {
        Error::InvalidQ(_) | Error::NonPrime(_) => DgzStatus::InvalidQ,
        Error::ScaleExceeded(_) | Error::DegreeTooLarge(_) | Error::FieldTooLarge { .. } => DgzStatus::ScaleExceeded,
        Error::Parse(_) | Error::UnknownSuite(_) | Error::UnknownName(_) => DgzStatus::Parse,
        _ => DgzStatus::Error,
    }
}

fn guard(f: impl FnOnce() -> Result<(), DgzStatus>) -> DgzStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DgzStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            DgzStatus::Panic
        }
    }
}

fn fail(e: Error) -> DgzStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> DgzStatus {
    set_error(format!("{what} is null"));
    DgzStatus::NullOrInvalid
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, DgzStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        DgzStatus::NullOrInvalid
    })
}

unsafe fn curve_arg<'a>(h: *const DgzCurveHandle) -> Result<&'a DgzCurve, DgzStatus> {
    h.as_ref().map(|h| &h.curve).ok_or_else(|| null("curve handle"))
}

/// Message for the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn dgz_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds the curve for `q`. On success `*out` owns a handle for [`dgz_curve_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn dgz_curve_build(q: u64, out: *mut *mut DgzCurveHandle) -> DgzStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let curve = DgzCurve::build(q).map_err(fail)?;
        *out = Box::into_raw(Box::new(DgzCurveHandle { curve }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from [`dgz_curve_build`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dgz_curve_free(h: *mut DgzCurveHandle) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// `q` and the degree `q^3 - q^2` of `F`, and its number of terms.
///
/// # Safety
/// `h` must be a live handle; output pointers may be null to skip them.
#[no_mangle]
pub unsafe extern "C" fn dgz_curve_info(
    h: *const DgzCurveHandle,
    q: *mut u64,
    degree: *mut u64,
    terms: *mut u64,
) -> DgzStatus {
    guard(|| {
        let c = curve_arg(h)?;
        if !q.is_null() {
            *q = c.q();
        }
        if !degree.is_null() {
            *degree = c.degree();
        }
        if !terms.is_null() {
            *terms = c.f.num_terms() as u64;
        }
        Ok(())
    })
}

/// Number of points of the curve in `PG(2, F_{q^ext})`.
///
/// # Safety
/// `h` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dgz_count_points(h: *const DgzCurveHandle, ext: u32, out: *mut u64) -> DgzStatus {
    guard(|| {
        let c = curve_arg(h)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = count_points(c, ext).map_err(fail)?;
        Ok(())
    })
}

/// Whether the point written like `"(1:0,1:0)"` over `F_{q^ext}` lies on the curve.
///
/// # Safety
/// `h` must be a live handle, `point` a nul-terminated string, and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dgz_point_on_curve(
    h: *const DgzCurveHandle,
    ext: u32,
    point: *const c_char,
    out: *mut bool,
) -> DgzStatus {
    guard(|| {
        let c = curve_arg(h)?;
        let s = str_arg(point, "point")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (f, e) = extension(c, ext).map_err(fail)?;
        let p = ProjPoint::parse(&f, s).map_err(fail)?;
        *out = c.f.evaluate(&p, &e).map_err(fail)?.is_zero();
        Ok(())
    })
}

/// Runs one named suite. Returns [`DgzStatus::CheckFailed`] when a check fails,
/// [`DgzStatus::ScaleExceeded`] when the suite does not run at this `q`.
///
/// # Safety
/// `h` must be a live handle and `suite` a nul-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dgz_run_suite(h: *const DgzCurveHandle, suite: *const c_char, seed: u64) -> DgzStatus {
    guard(|| {
        let c = curve_arg(h)?;
        let s: Suite = str_arg(suite, "suite")?.parse().map_err(fail)?;
        let checks = suite_checks(s, c, seed).map_err(fail)?;
        if let Some(bad) = checks.iter().find(|x| !x.passed) {
            set_error(format!("{}: {}", bad.name, bad.detail));
            return Err(DgzStatus::CheckFailed);
        }
        Ok(())
    })
}

/// `F` in the text exchange format. Free the string with [`dgz_string_free`].
///
/// # Safety
/// `h` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn dgz_curve_to_text(h: *const DgzCurveHandle, out: *mut *mut c_char) -> DgzStatus {
    guard(|| {
        let c = curve_arg(h)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = CString::new(c.f.to_text()).expect("no interior nul").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dgz_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
