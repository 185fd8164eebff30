//! C interface to the solver.
//!
//! Instances and reports are opaque handles owned by the caller and released
//! with their `_free` function. Every fallible call returns an
//! [`AafreStatus`]; on failure a description is available from
//! [`aafre_last_error_message`] on the same thread. Selections are 1-based,
//! as in the JSON reports.

use aafre::io::{emit_report, parse_instance, Mode, ReportRef};
use aafre::{solve, FreError, Instance, OptimizationReport, SolveOptions, TNormParam};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AafreStatus {
    Ok = 0,
    /// The system has no solution, so the requested value does not exist.
    Infeasible = 1,
    InvalidInput = 2,
    SizeLimit = 3,
    NullPointer = 4,
    BufferTooSmall = 5,
    Internal = 6,
}

/// Opaque instance handle.
pub struct AafreInstance(Instance);

/// Opaque optimization report handle.
pub struct AafreReport(OptimizationReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct AafreSolveOptions {
    pub prune: bool,
    pub all_optima: bool,
    /// 0 for no limit.
    pub max_candidates: u64,
    /// 0 for the default thread pool.
    pub workers: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &FreError) -> AafreStatus {
    match err {
        FreError::Infeasible => AafreStatus::Infeasible,
        FreError::Size { .. } => AafreStatus::SizeLimit,
        _ => AafreStatus::InvalidInput,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (AafreStatus, String)>) -> AafreStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => AafreStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            AafreStatus::Internal
        }
    }
}

fn fre(err: FreError) -> (AafreStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(what: &str) -> (AafreStatus, String) {
    (AafreStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a, T>(
    p: *const T,
    len: usize,
    what: &str,
) -> Result<&'a [T], (AafreStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn copy_out<T: Copy>(
    src: &[T],
    buf: *mut T,
    len: usize,
) -> Result<(), (AafreStatus, String)> {
    if len < src.len() {
        return Err((
            AafreStatus::BufferTooSmall,
            format!("buffer holds {len}, need {}", src.len()),
        ));
    }
    if !src.is_empty() {
        if buf.is_null() {
            return Err(null("buffer"));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
    }
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn aafre_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON instance document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aafre_instance_from_json(
    json: *const c_char,
    out: *mut *mut AafreInstance,
) -> AafreStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (AafreStatus::InvalidInput, format!("json is not UTF-8: {e}")))?;
        let inst = parse_instance(text).map_err(fre)?;
        *out = Box::into_raw(Box::new(AafreInstance(inst)));
        Ok(())
    })
}

/// Builds an instance from a row-major `m x n` matrix `a`, `b` of length
/// `m` and `c` of length `n`. A negative `tol` selects the default.
///
/// # Safety
/// The arrays must hold the stated number of elements and `out` must be a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn aafre_instance_new(
    a: *const f64,
    m: usize,
    n: usize,
    b: *const f64,
    c: *const f64,
    lambda: f64,
    tol: f64,
    out: *mut *mut AafreInstance,
) -> AafreStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = m
            .checked_mul(n)
            .ok_or((AafreStatus::InvalidInput, "m * n overflows".to_string()))?;
        let a = slice(a, len, "a")?;
        let rows = if n == 0 {
            vec![Vec::new(); m]
        } else {
            a.chunks(n).map(<[f64]>::to_vec).collect()
        };
        let b = slice(b, m, "b")?.to_vec();
        let c = slice(c, n, "c")?.to_vec();
        let param = TNormParam::new(lambda).map_err(fre)?;
        let tol = if tol < 0.0 { aafre::DEFAULT_TOL } else { tol };
        let inst = Instance::new(rows, b, c, param, tol).map_err(fre)?;
        *out = Box::into_raw(Box::new(AafreInstance(inst)));
        Ok(())
    })
}

/// # Safety
/// `inst` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aafre_instance_free(inst: *mut AafreInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// # Safety
/// `inst` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn aafre_instance_dims(
    inst: *const AafreInstance,
    m: *mut usize,
    n: *mut usize,
) -> AafreStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        if m.is_null() || n.is_null() {
            return Err(null("m or n"));
        }
        *m = inst.0.m();
        *n = inst.0.n();
        Ok(())
    })
}

/// Solves the instance. An infeasible system still yields a report, with
/// `aafre_report_feasible` false. `opts` may be null for defaults.
///
/// # Safety
/// `inst` must be a live handle, `opts` null or valid, `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aafre_solve(
    inst: *const AafreInstance,
    opts: *const AafreSolveOptions,
    out: *mut *mut AafreReport,
) -> AafreStatus {
    guard(|| {
        let inst = inst.as_ref().ok_or_else(|| null("instance"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let o = opts.as_ref().copied().unwrap_or_default();
        let options = SolveOptions {
            prune: o.prune,
            all_optima: o.all_optima,
            max_candidates: (o.max_candidates > 0).then_some(o.max_candidates),
            workers: (o.workers > 0).then_some(o.workers),
        };
        let report = solve(&inst.0, options).map_err(fre)?;
        *out = Box::into_raw(Box::new(AafreReport(report)));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aafre_report_free(report: *mut AafreReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// False for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aafre_report_feasible(report: *const AafreReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.feasible)
}

/// # Safety
/// `report` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn aafre_report_z_star(
    report: *const AafreReport,
    out: *mut f64,
) -> AafreStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out =
            r.0.z_star
                .ok_or((AafreStatus::Infeasible, "no optimum".to_string()))?;
        Ok(())
    })
}

/// Copies the optimal point into `buf`, which must hold `n` values.
///
/// # Safety
/// `report` must be a live handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn aafre_report_x_star(
    report: *const AafreReport,
    buf: *mut f64,
    len: usize,
) -> AafreStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let x =
            r.0.x_star
                .as_ref()
                .ok_or((AafreStatus::Infeasible, "no optimum".to_string()))?;
        copy_out(x, buf, len)
    })
}

/// Copies the greatest solution (or its candidate when infeasible) into
/// `buf`, which must hold `n` values.
///
/// # Safety
/// `report` must be a live handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn aafre_report_xbar(
    report: *const AafreReport,
    buf: *mut f64,
    len: usize,
) -> AafreStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        copy_out(&r.0.xbar, buf, len)
    })
}

/// Copies the 1-based optimal selection into `buf`, which must hold `m`
/// values.
///
/// # Safety
/// `report` must be a live handle and `buf` must hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn aafre_report_e_star(
    report: *const AafreReport,
    buf: *mut usize,
    len: usize,
) -> AafreStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let e =
            r.0.e_star
                .as_ref()
                .ok_or((AafreStatus::Infeasible, "no optimum".to_string()))?;
        copy_out(&e.one_based(), buf, len)
    })
}

/// The report as a JSON document, or null on failure. Release with
/// `aafre_string_free`.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn aafre_report_to_json(report: *const AafreReport) -> *mut c_char {
    let mut out = ptr::null_mut();
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let text = emit_report(ReportRef::Optimization(&r.0), Mode::Machine);
        out = CString::new(text)
            .map_err(|e| (AafreStatus::Internal, e.to_string()))?
            .into_raw();
        Ok(())
    });
    out
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn aafre_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `T(a, x)` for the given exponent.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aafre_tnorm_eval(
    a: f64,
    x: f64,
    lambda: f64,
    out: *mut f64,
) -> AafreStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = TNormParam::new(lambda).map_err(fre)?;
        for v in [a, x] {
            aafre::UnitValue::new(v).map_err(fre)?;
        }
        *out = aafre::tnorm_eval(a, x, p);
        Ok(())
    })
}

/// The `x` with `T(a, x) = b`, for `a >= b > 0`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn aafre_tnorm_residual(
    a: f64,
    b: f64,
    lambda: f64,
    out: *mut f64,
) -> AafreStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let p = TNormParam::new(lambda).map_err(fre)?;
        *out = aafre::tnorm_residual(a, b, p).map_err(fre)?;
        Ok(())
    })
}
