//! C ABI over the compliance engine.
//!
//! Models, obligation frameworks and reports are opaque handles created by
//! `*_parse` / `stem_check` / `stem_oracle` and released with the matching
//! `*_free`. Every fallible call returns a `StemStatus`; on failure the
//! message is available from `stem_last_error` until the next failing call
//! on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use stemcheck::engine::{check_full_compliance, EngineOptions};
use stemcheck::io::{self, DocumentError, ReportDocument};
use stemcheck::model::ModelError;
use stemcheck::oracle::classify_process_compliance;
use stemcheck::{ConditionalObligation, ProcessModel};

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StemStatus {
    Ok = 0,
    NullPointer = 1,
    Syntax = 2,
    InvalidModel = 3,
    BudgetExceeded = 4,
    Engine = 5,
    Panic = 6,
}

pub struct StemModel(ProcessModel);

pub struct StemObligations(Vec<ConditionalObligation>);

pub struct StemReport(ReportDocument);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg).unwrap_or_else(|e| {
        let mut bytes = e.into_vec();
        bytes.retain(|&b| b != 0);
        CString::new(bytes).expect("nul bytes removed")
    });
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(StemStatus, String);

impl From<DocumentError> for Failure {
    fn from(e: DocumentError) -> Self {
        match e {
            DocumentError::Syntax { .. } => Failure(StemStatus::Syntax, e.to_string()),
            DocumentError::Model(m) => m.into(),
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        let status = match e {
            ModelError::ExecutionBudgetExceeded(_) => StemStatus::BudgetExceeded,
            _ => StemStatus::InvalidModel,
        };
        Failure(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> StemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => StemStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside stemcheck".into());
            StemStatus::Panic
        }
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a [u8], Failure> {
    if s.is_null() {
        return Err(Failure(StemStatus::NullPointer, "null string".into()));
    }
    Ok(CStr::from_ptr(s).to_bytes())
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(StemStatus::NullPointer, format!("null {what} handle")))
}

fn out_slot<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err(Failure(
            StemStatus::NullPointer,
            "null output pointer".into(),
        ))
    } else {
        Ok(())
    }
}

/// Message of the last failing call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn stem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a model document (UTF-8 JSON, nul-terminated).
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stem_model_parse(
    json: *const c_char,
    out: *mut *mut StemModel,
) -> StemStatus {
    guard(|| {
        out_slot(out)?;
        let m = io::parse_model_file(text(json)?)?;
        *out = Box::into_raw(Box::new(StemModel(m)));
        Ok(())
    })
}

/// Number of tasks in the model, start and end included; 0 for null.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stem_model_task_count(model: *const StemModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.tasks().len())
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stem_model_free(model: *mut StemModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Parses an obligation framework (JSON array).
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stem_obligations_parse(
    json: *const c_char,
    out: *mut *mut StemObligations,
) -> StemStatus {
    guard(|| {
        out_slot(out)?;
        let obs = io::parse_obligations_file(text(json)?)?;
        *out = Box::into_raw(Box::new(StemObligations(obs)));
        Ok(())
    })
}

/// # Safety
/// `obs` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stem_obligations_len(obs: *const StemObligations) -> usize {
    obs.as_ref().map_or(0, |o| o.0.len())
}

/// # Safety
/// `obs` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stem_obligations_free(obs: *mut StemObligations) {
    if !obs.is_null() {
        drop(Box::from_raw(obs));
    }
}

/// Decides full compliance with the stem engine.
///
/// # Safety
/// `model` and `obs` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stem_check(
    model: *const StemModel,
    obs: *const StemObligations,
    early_exit: bool,
    out: *mut *mut StemReport,
) -> StemStatus {
    guard(|| {
        out_slot(out)?;
        let m = &handle(model, "model")?.0;
        let obs = &handle(obs, "obligations")?.0;
        let r = check_full_compliance(m, obs, EngineOptions { early_exit })
            .map_err(|e| Failure(StemStatus::Engine, e.to_string()))?;
        *out = Box::into_raw(Box::new(StemReport(ReportDocument::new(
            "engine",
            m,
            obs,
            Some(&r),
            None,
        ))));
        Ok(())
    })
}

/// Classifies compliance by enumerating at most `budget` executions.
///
/// # Safety
/// `model` and `obs` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn stem_oracle(
    model: *const StemModel,
    obs: *const StemObligations,
    budget: usize,
    out: *mut *mut StemReport,
) -> StemStatus {
    guard(|| {
        out_slot(out)?;
        let m = &handle(model, "model")?.0;
        let obs = &handle(obs, "obligations")?.0;
        let v = classify_process_compliance(m, obs, budget)?;
        *out = Box::into_raw(Box::new(StemReport(ReportDocument::new(
            "oracle",
            m,
            obs,
            None,
            Some(&v),
        ))));
        Ok(())
    })
}

/// 1 when fully compliant, 0 when not, -1 for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stem_report_fully_compliant(report: *const StemReport) -> i32 {
    report
        .as_ref()
        .map_or(-1, |r| i32::from(r.0.is_fully_compliant()))
}

/// The report as a JSON document. Release with `stem_string_free`.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn stem_report_json(report: *const StemReport) -> *mut c_char {
    match report.as_ref() {
        Some(r) => CString::new(r.0.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stem_report_free(report: *mut StemReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn stem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
