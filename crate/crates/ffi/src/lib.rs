//! C ABI over the acceptset library.
//!
//! Numbers cross the boundary as decimal or fraction strings (`"0.99"`,
//! `"3/4"`) and come back as an exact fraction string together with a
//! `double` approximation. Every function returns an [`AcceptsetStatus`];
//! on failure `acceptset_last_error_message` describes the error.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use acceptset::acceptance::member;
use acceptset::characterize::alpha_prime;
use acceptset::cli::config::{parse_measure, parse_set};
use acceptset::distribution::{FiniteDistribution, Law};
use acceptset::num::{parse_rational, Extended, Rational, Scalar};
use acceptset::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptsetStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    InvalidArgument = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AcceptsetQuantileSide {
    Left = 0,
    Right = 1,
}

/// Opaque handle to a finitely supported distribution.
pub struct AcceptsetDistribution {
    inner: FiniteDistribution,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
    Ok(v) => v,
    Err(_) => panic!("version string"),
};

struct Failure(AcceptsetStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse(_) => AcceptsetStatus::Parse,
            _ => AcceptsetStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(message));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> AcceptsetStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            AcceptsetStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AcceptsetStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(AcceptsetStatus::NullPointer, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(AcceptsetStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

unsafe fn handle<'a>(d: *const AcceptsetDistribution) -> Result<&'a FiniteDistribution, Failure> {
    d.as_ref().map(|h| &h.inner).ok_or_else(|| Failure(AcceptsetStatus::NullPointer, "distribution is null".into()))
}

fn list(s: &str) -> Result<Vec<Rational>, Failure> {
    s.split(',').filter(|p| !p.trim().is_empty()).map(|p| parse_rational(p).map_err(Failure::from)).collect()
}

/// Write `value` as an owned string and its `double` approximation.
unsafe fn emit(value: &Extended<Rational>, exact: *mut *mut c_char, approx: *mut f64) -> Result<(), Failure> {
    if exact.is_null() && approx.is_null() {
        return Err(Failure(AcceptsetStatus::NullPointer, "both outputs are null".into()));
    }
    if !approx.is_null() {
        *approx = match value {
            Extended::NegInf => f64::NEG_INFINITY,
            Extended::Finite(v) => v.to_f64(),
            Extended::PosInf => f64::INFINITY,
        };
    }
    if !exact.is_null() {
        *exact = CString::new(value.to_string()).expect("no interior nul").into_raw();
    }
    Ok(())
}

/// Build a distribution from comma-separated values and probabilities.
/// A null or empty `probabilities` gives equal weights.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acceptset_distribution_new(
    values: *const c_char,
    probabilities: *const c_char,
    out: *mut *mut AcceptsetDistribution,
) -> AcceptsetStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(AcceptsetStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let values = list(text(values, "values")?)?;
        let probabilities =
            if probabilities.is_null() { Vec::new() } else { list(text(probabilities, "probabilities")?)? };
        let weights = if probabilities.is_empty() {
            let n = values.len().max(1);
            vec![Rational::new(1.into(), (n as u64).into()); values.len()]
        } else if probabilities.len() == values.len() {
            probabilities
        } else {
            return Err(Error::DimensionMismatch(values.len(), probabilities.len()).into());
        };
        let inner = FiniteDistribution::new(values.into_iter().zip(weights))?;
        *out = Box::into_raw(Box::new(AcceptsetDistribution { inner }));
        Ok(())
    })
}

/// # Safety
/// `d` must be null or a handle from `acceptset_distribution_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acceptset_distribution_free(d: *mut AcceptsetDistribution) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of distinct atoms.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn acceptset_distribution_len(
    d: *const AcceptsetDistribution,
    out: *mut usize,
) -> AcceptsetStatus {
    guard(|| {
        let d = handle(d)?;
        if out.is_null() {
            return Err(Failure(AcceptsetStatus::NullPointer, "out is null".into()));
        }
        *out = d.len();
        Ok(())
    })
}

/// `P(X <= x)`.
///
/// # Safety
/// `d` must be a live handle; `x` NUL-terminated; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn acceptset_cdf(
    d: *const AcceptsetDistribution,
    x: *const c_char,
    exact: *mut *mut c_char,
    approx: *mut f64,
) -> AcceptsetStatus {
    guard(|| {
        let d = handle(d)?;
        let x = parse_rational(text(x, "x")?)?;
        emit(&Extended::Finite(d.cdf(&x)), exact, approx)
    })
}

/// Left or right quantile at `level` in [0,1]; may be infinite at the ends.
///
/// # Safety
/// `d` must be a live handle; `level` NUL-terminated; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn acceptset_quantile(
    d: *const AcceptsetDistribution,
    level: *const c_char,
    side: AcceptsetQuantileSide,
    exact: *mut *mut c_char,
    approx: *mut f64,
) -> AcceptsetStatus {
    guard(|| {
        let d = handle(d)?;
        let t = parse_rational(text(level, "level")?)?;
        if t < Rational::from_integer(0.into()) || t > Rational::from_integer(1.into()) {
            return Err(Error::LevelOutOfRange(t).into());
        }
        let q = match side {
            AcceptsetQuantileSide::Left => d.quantile_left(&t),
            AcceptsetQuantileSide::Right => d.quantile_right(&t),
        };
        emit(&q, exact, approx)
    })
}

/// Evaluate a risk measure such as `"VaRLower:0.99"`, `"VaRUpper:1/2"`,
/// `"ES:0.975"`, `"Distortion:0:0,1/2:1,1:1"` or `"Mean"`.
///
/// # Safety
/// `d` must be a live handle; `measure` NUL-terminated; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn acceptset_risk_measure(
    d: *const AcceptsetDistribution,
    measure: *const c_char,
    exact: *mut *mut c_char,
    approx: *mut f64,
) -> AcceptsetStatus {
    guard(|| {
        let d = handle(d)?;
        let m = parse_measure(text(measure, "measure")?)?;
        emit(&m.evaluate(d)?, exact, approx)
    })
}

/// Decide membership in an acceptance set such as `"APlus:0.99"`,
/// `"AMinus:1/2"`, `"AZero:0.9"` or `"ESInduced:0.5"`.
///
/// # Safety
/// `d` must be a live handle; `set` NUL-terminated; `accepted` writable.
#[no_mangle]
pub unsafe extern "C" fn acceptset_member(
    d: *const AcceptsetDistribution,
    set: *const c_char,
    accepted: *mut bool,
) -> AcceptsetStatus {
    guard(|| {
        let d = handle(d)?;
        let set = parse_set(text(set, "set")?)?;
        if accepted.is_null() {
            return Err(Failure(AcceptsetStatus::NullPointer, "accepted is null".into()));
        }
        *accepted = member(&set, d)?.accepted;
        Ok(())
    })
}

/// Smallest level whose closed set matches the strict set at `alpha` on
/// `n` equally likely states.
///
/// # Safety
/// `alpha` NUL-terminated; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn acceptset_alpha_prime(
    n: u64,
    alpha: *const c_char,
    exact: *mut *mut c_char,
    approx: *mut f64,
) -> AcceptsetStatus {
    guard(|| {
        let a = parse_rational(text(alpha, "alpha")?)?;
        emit(&Extended::Finite(alpha_prime(n, &a)?), exact, approx)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn acceptset_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn acceptset_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |m| m.as_ptr()))
}

#[no_mangle]
pub extern "C" fn acceptset_version() -> *const c_char {
    VERSION.as_ptr()
}
