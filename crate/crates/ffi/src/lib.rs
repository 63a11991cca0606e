//! C ABI for jetcalc.
//!
//! Rationals cross the boundary as `"p/q"` strings and structured data as JSON.
//! Every function returns a [`JetcalcStatus`]; on failure the message is
//! available from [`jetcalc_last_error`] on the same thread. Strings returned
//! through `char **` out-parameters are owned by the caller and released with
//! [`jetcalc_string_free`]. Handles are released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use jetcalc::arrow::{arrow_coefficient_indices, compose_arrows, invert_arrow, Arrow};
use jetcalc::cli::scenario::{parse_scenario, AlgebraSpec};
use jetcalc::cli::{run_scenario, CliError};
use jetcalc::liealg::{nilpotency_analysis, FiniteLieAlgebra};
use jetcalc::scalar::{format, parse};
use jetcalc::spencer::jet_group_algebra;
use jetcalc::{JetError, Scalar};

/// Result codes shared by all entry points.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JetcalcStatus {
    Ok = 0,
    /// A scenario ran and at least one check failed.
    CheckFailed = 1,
    /// Malformed JSON, unknown fields or an unsupported schema version.
    Schema = 2,
    /// A computation exceeded its configured bound.
    ResourceBound = 3,
    NullPointer = 4,
    InvalidUtf8 = 5,
    /// Mathematically invalid input, such as a singular arrow.
    InvalidInput = 6,
    /// An internal panic was caught at the boundary.
    Internal = 7,
}

/// Opaque jet arrow.
pub struct JetcalcArrow(Arrow);

/// Opaque finite-dimensional Lie algebra.
pub struct JetcalcLieAlgebra(FiniteLieAlgebra);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("no interior nul"));
}

type Outcome<T> = Result<T, (JetcalcStatus, String)>;

fn jet(e: JetError) -> (JetcalcStatus, String) {
    let status = match e {
        JetError::ResourceBound(_) => JetcalcStatus::ResourceBound,
        JetError::Parse(_) => JetcalcStatus::Schema,
        _ => JetcalcStatus::InvalidInput,
    };
    (status, e.to_string())
}

fn guard(f: impl FnOnce() -> Outcome<JetcalcStatus>) -> JetcalcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            JetcalcStatus::Internal
        }
    }
}

fn null() -> (JetcalcStatus, String) {
    (JetcalcStatus::NullPointer, "null pointer argument".into())
}

unsafe fn text<'a>(p: *const c_char) -> Outcome<&'a str> {
    if p.is_null() {
        return Err(null());
    }
    CStr::from_ptr(p).to_str().map_err(|e| (JetcalcStatus::InvalidUtf8, e.to_string()))
}

unsafe fn rationals(p: *const *const c_char, len: usize) -> Outcome<Vec<Scalar>> {
    if len == 0 {
        return Ok(vec![]);
    }
    if p.is_null() {
        return Err(null());
    }
    std::slice::from_raw_parts(p, len).iter().map(|&s| parse(text(s)?).map_err(jet)).collect()
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Outcome<()> {
    if out.is_null() {
        return Err(null());
    }
    *out = CString::new(s).map_err(|e| (JetcalcStatus::Internal, e.to_string()))?.into_raw();
    Ok(())
}

unsafe fn put<T>(out: *mut *mut T, v: T) -> Outcome<()> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(v));
    Ok(())
}

unsafe fn get<'a, T>(p: *const T) -> Outcome<&'a T> {
    p.as_ref().ok_or_else(null)
}

/// Message of the last failure on this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn jetcalc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jetcalc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from a `char **` out-parameter of this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and runs a scenario, writing the JSON report to `report_out`.
///
/// Returns `Ok` when all checks pass and `CheckFailed` when the report records
/// a failure; the report is written in both cases.
///
/// # Safety
/// `scenario_json` must be a NUL-terminated string and `report_out` writable.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_run_scenario(
    scenario_json: *const c_char,
    seed: u64,
    report_out: *mut *mut c_char,
) -> JetcalcStatus {
    guard(|| {
        let sc = parse_scenario(text(scenario_json)?).map_err(|e| (JetcalcStatus::Schema, e.to_string()))?;
        let report = run_scenario(sc, seed).map_err(|e| {
            let status = match e {
                CliError::Resource(_) => JetcalcStatus::ResourceBound,
                _ => JetcalcStatus::InvalidInput,
            };
            (status, e.to_string())
        })?;
        let passed = report.passed;
        put_string(report_out, report.to_json())?;
        Ok(if passed { JetcalcStatus::Ok } else { JetcalcStatus::CheckFailed })
    })
}

/// Number of coefficients per component of an order-`order` arrow in `n` variables.
#[no_mangle]
pub extern "C" fn jetcalc_arrow_coefficient_count(n: usize, order: usize) -> usize {
    arrow_coefficient_indices(n, order).len()
}

/// Builds an arrow from its source, target and derivative values.
///
/// `coeffs` holds `n * jetcalc_arrow_coefficient_count(n, order)` rationals,
/// row `i` listing `∂^α g^i` over multi-indices of order `1..=order` in graded order.
///
/// # Safety
/// The arrays must have the stated lengths and hold NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_arrow_new(
    n: usize,
    order: usize,
    source: *const *const c_char,
    target: *const *const c_char,
    coeffs: *const *const c_char,
    coeffs_len: usize,
    out: *mut *mut JetcalcArrow,
) -> JetcalcStatus {
    guard(|| {
        let per = arrow_coefficient_indices(n, order).len();
        if coeffs_len != n * per {
            return Err((JetcalcStatus::InvalidInput, format!("expected {} coefficients, got {coeffs_len}", n * per)));
        }
        let flat = rationals(coeffs, coeffs_len)?;
        let rows = if per == 0 { vec![vec![]; n] } else { flat.chunks(per).map(|c| c.to_vec()).collect() };
        let a = Arrow::new(rationals(source, n)?, rationals(target, n)?, order, rows).map_err(jet)?;
        put(out, JetcalcArrow(a))?;
        Ok(JetcalcStatus::Ok)
    })
}

/// The identity arrow of order `order` at `point`.
///
/// # Safety
/// `point` must hold `n` NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_arrow_identity(
    n: usize,
    order: usize,
    point: *const *const c_char,
    out: *mut *mut JetcalcArrow,
) -> JetcalcStatus {
    guard(|| {
        put(out, JetcalcArrow(Arrow::identity(rationals(point, n)?, order).map_err(jet)?))?;
        Ok(JetcalcStatus::Ok)
    })
}

/// `second ∘ first`; the target of `first` must be the source of `second`.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_arrow_compose(
    second: *const JetcalcArrow,
    first: *const JetcalcArrow,
    out: *mut *mut JetcalcArrow,
) -> JetcalcStatus {
    guard(|| {
        let c = compose_arrows(&get(second)?.0, &get(first)?.0).map_err(jet)?;
        put(out, JetcalcArrow(c))?;
        Ok(JetcalcStatus::Ok)
    })
}

/// # Safety
/// `a` must be live.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_arrow_invert(a: *const JetcalcArrow, out: *mut *mut JetcalcArrow) -> JetcalcStatus {
    guard(|| {
        put(out, JetcalcArrow(invert_arrow(&get(a)?.0).map_err(jet)?))?;
        Ok(JetcalcStatus::Ok)
    })
}

/// Truncation to a lower order.
///
/// # Safety
/// `a` must be live.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_arrow_project(
    a: *const JetcalcArrow,
    order: usize,
    out: *mut *mut JetcalcArrow,
) -> JetcalcStatus {
    guard(|| {
        put(out, JetcalcArrow(get(a)?.0.project(order).map_err(jet)?))?;
        Ok(JetcalcStatus::Ok)
    })
}

/// Writes `1` to `equal` when the arrows coincide, else `0`.
///
/// # Safety
/// Both handles must be live.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_arrow_equal(a: *const JetcalcArrow, b: *const JetcalcArrow, equal: *mut i32) -> JetcalcStatus {
    guard(|| {
        let eq = get(a)?.0 == get(b)?.0;
        *equal.as_mut().ok_or_else(null)? = i32::from(eq);
        Ok(JetcalcStatus::Ok)
    })
}

/// JSON `{"order", "source", "target", "coeffs"}` with rationals as strings.
///
/// # Safety
/// `a` must be live and `json_out` writable.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_arrow_to_json(a: *const JetcalcArrow, json_out: *mut *mut c_char) -> JetcalcStatus {
    guard(|| {
        let a = &get(a)?.0;
        let idx = arrow_coefficient_indices(a.dim(), a.order());
        let coeffs: Vec<Vec<String>> =
            (0..a.dim()).map(|i| idx.iter().map(|al| format(a.coeff(i, al))).collect()).collect();
        let v = serde_json::json!({
            "order": a.order(),
            "source": a.source().iter().map(format).collect::<Vec<_>>(),
            "target": a.target().iter().map(format).collect::<Vec<_>>(),
            "coeffs": coeffs,
        });
        put_string(json_out, v.to_string())?;
        Ok(JetcalcStatus::Ok)
    })
}

/// # Safety
/// `a` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_arrow_free(a: *mut JetcalcArrow) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Builds a Lie algebra from the scenario algebra encoding
/// `{"dim": d, "brackets": [{"i", "j", "result": [{"index", "value"}]}]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_lie_algebra_from_json(
    json: *const c_char,
    out: *mut *mut JetcalcLieAlgebra,
) -> JetcalcStatus {
    guard(|| {
        let spec: AlgebraSpec =
            serde_json::from_str(text(json)?).map_err(|e| (JetcalcStatus::Schema, e.to_string()))?;
        put(out, JetcalcLieAlgebra(spec.build().map_err(jet)?))?;
        Ok(JetcalcStatus::Ok)
    })
}

/// Lie algebra of the order-`k` jet group in `n` variables.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_lie_algebra_jet_group(n: usize, k: usize, out: *mut *mut JetcalcLieAlgebra) -> JetcalcStatus {
    guard(|| {
        put(out, JetcalcLieAlgebra(jet_group_algebra(n, k).map_err(jet)?.algebra))?;
        Ok(JetcalcStatus::Ok)
    })
}

/// # Safety
/// `g` must be live and `dim` writable.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_lie_algebra_dim(g: *const JetcalcLieAlgebra, dim: *mut usize) -> JetcalcStatus {
    guard(|| {
        *dim.as_mut().ok_or_else(null)? = get(g)?.0.dim();
        Ok(JetcalcStatus::Ok)
    })
}

/// JSON `{"lower_central_series", "nilpotent", "abelian"}`.
///
/// # Safety
/// `g` must be live and `json_out` writable.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_lie_algebra_nilpotency(
    g: *const JetcalcLieAlgebra,
    json_out: *mut *mut c_char,
) -> JetcalcStatus {
    guard(|| {
        let r = nilpotency_analysis(&get(g)?.0);
        put_string(json_out, serde_json::to_string(&r).map_err(|e| (JetcalcStatus::Internal, e.to_string()))?)?;
        Ok(JetcalcStatus::Ok)
    })
}

/// # Safety
/// `g` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn jetcalc_lie_algebra_free(g: *mut JetcalcLieAlgebra) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    fn cs(s: &str) -> CString {
        CString::new(s).unwrap()
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(jetcalc_last_error()) }.to_string_lossy().into_owned()
    }

    #[test]
    fn null_arguments_are_reported() {
        let mut out = ptr::null_mut();
        let s = unsafe { jetcalc_run_scenario(ptr::null(), 0, &mut out) };
        assert_eq!(s, JetcalcStatus::NullPointer);
        assert!(last_error().contains("null"));
    }

    #[test]
    fn bad_rational_is_schema_error() {
        let one = cs("1");
        let bad = cs("x");
        let src = [one.as_ptr()];
        let coeffs = [bad.as_ptr()];
        let mut out = ptr::null_mut();
        let s = unsafe { jetcalc_arrow_new(1, 1, src.as_ptr(), src.as_ptr(), coeffs.as_ptr(), 1, &mut out) };
        assert_eq!(s, JetcalcStatus::Schema);
        assert!(out.is_null());
    }
}
