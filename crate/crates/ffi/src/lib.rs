//! C ABI over the `diwed` library.
//!
//! Every fallible function returns a [`DiwedStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be read with [`diwed_last_error_message`]. Expressions are opaque handles
//! released with [`diwed_expression_free`]; strings returned by the library
//! are released with [`diwed_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use diwed::bellexpr::{local_bound, BellExpression};
use diwed::graphwit::catalog;
use diwed::seesaw::{full_seesaw, kproducible_lower_bound, SeesawConfig};
use diwed::witness_gamma::{build_expression, optimal_quantum_bound, GammaWitness};
use diwed::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiwedStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotFound = 3,
    Numerical = 4,
    Panic = 5,
}

/// A Bell expression owned by the library.
pub struct DiwedExpression {
    inner: BellExpression,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    let c = CString::new(text).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> DiwedStatus {
    match err {
        Error::UnknownName(_) => DiwedStatus::NotFound,
        e if e.is_numerical() => DiwedStatus::Numerical,
        _ => DiwedStatus::InvalidArgument,
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), (DiwedStatus, String)>) -> DiwedStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DiwedStatus::Ok,
        Ok(Err((status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside diwed");
            DiwedStatus::Panic
        }
    }
}

fn lib<T>(r: diwed::Result<T>) -> Result<T, (DiwedStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (DiwedStatus, String) {
    (DiwedStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (DiwedStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (DiwedStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), (DiwedStatus, String)> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn expr_ref<'a>(e: *const DiwedExpression) -> Result<&'a BellExpression, (DiwedStatus, String)> {
    e.as_ref().map(|h| &h.inner).ok_or_else(|| null("expression"))
}

fn boxed(inner: BellExpression) -> *mut DiwedExpression {
    Box::into_raw(Box::new(DiwedExpression { inner }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn diwed_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn diwed_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn diwed_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Looks up a catalog inequality such as `RG4` or `RG3_full`.
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diwed_catalog_new(name: *const c_char, out: *mut *mut DiwedExpression) -> DiwedStatus {
    guard(|| {
        let name = read_str(name, "name")?;
        let expr = lib(catalog(name))?.expression;
        write_out(out, boxed(expr), "out")
    })
}

/// The γ-witness `S_{n,γ}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diwed_gamma_witness_new(n: usize, gamma: f64, out: *mut *mut DiwedExpression) -> DiwedStatus {
    guard(|| {
        let expr = lib(GammaWitness::new(n, gamma).and_then(build_expression))?;
        write_out(out, boxed(expr), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diwed_expression_from_json(json: *const c_char, out: *mut *mut DiwedExpression) -> DiwedStatus {
    guard(|| {
        let text = read_str(json, "json")?;
        let expr = lib(BellExpression::from_json(text))?;
        write_out(out, boxed(expr), "out")
    })
}

/// Serializes the expression; free the result with [`diwed_string_free`].
///
/// # Safety
/// `expr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diwed_expression_to_json(expr: *const DiwedExpression, out: *mut *mut c_char) -> DiwedStatus {
    guard(|| {
        let json = lib(expr_ref(expr)?.to_json())?;
        let c = CString::new(json).map_err(|e| (DiwedStatus::InvalidArgument, e.to_string()))?;
        write_out(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `expr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diwed_expression_party_count(expr: *const DiwedExpression, out: *mut usize) -> DiwedStatus {
    guard(|| write_out(out, expr_ref(expr)?.n(), "out"))
}

/// # Safety
/// `expr` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn diwed_expression_free(expr: *mut DiwedExpression) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Exact local bound.
///
/// # Safety
/// `expr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diwed_local_bound(expr: *const DiwedExpression, out: *mut f64) -> DiwedStatus {
    guard(|| {
        let lb = lib(local_bound(expr_ref(expr)?))?;
        write_out(out, lb.value, "out")
    })
}

/// Optimal GHZ value of `S_{n,γ}` and the angle achieving it.
///
/// # Safety
/// `out_phi` and `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diwed_quantum_bound(n: usize, gamma: f64, out_phi: *mut f64, out_value: *mut f64) -> DiwedStatus {
    guard(|| {
        if out_phi.is_null() || out_value.is_null() {
            return Err(null("output"));
        }
        let b = lib(optimal_quantum_bound(n, gamma))?;
        write_out(out_phi, b.phi, "out_phi")?;
        write_out(out_value, b.value, "out_value")
    })
}

/// See-saw lower bound over qubit strategies. `k = 0` or `k ≥ n` leaves the
/// state unrestricted; otherwise the state is k-producible.
///
/// # Safety
/// `expr` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn diwed_seesaw(
    expr: *const DiwedExpression,
    k: usize,
    restarts: usize,
    seed: u64,
    out: *mut f64,
) -> DiwedStatus {
    guard(|| {
        let e = expr_ref(expr)?;
        let cfg = SeesawConfig::default().with_seed(seed).with_restarts(restarts);
        let dims = vec![2; e.n()];
        let r = if k == 0 || k >= e.n() {
            full_seesaw(e, &dims, &cfg)
        } else {
            kproducible_lower_bound(e, k, &dims, &cfg)
        };
        write_out(out, lib(r)?.value, "out")
    })
}
