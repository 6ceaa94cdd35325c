//! C ABI over the fairclust toolkit. Datasets travel as opaque handles;
//! results come back as JSON strings the caller must free with
//! fc_string_free. Every entry point catches panics and reports through
//! status codes; fc_last_error gives the message for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use fairclust::harness::{self, ExperimentConfig};
use fairclust::types::{max_additive_violation, Objective};
use fairclust::{Dataset, Error};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FcStatus {
    FcOk = 0,
    /// Bad argument or malformed input data.
    FcErrInput = 1,
    /// Internal precondition violated.
    FcErrContract = 2,
    /// Fairness bounds admit no assignment.
    FcErrInfeasible = 3,
    /// LP / flow solver failure.
    FcErrSolver = 4,
    /// Exact oracle refused (instance too large).
    FcErrRefused = 5,
    /// Filesystem / serialization problem.
    FcErrIo = 6,
    /// Null pointer or invalid UTF-8 argument.
    FcErrNull = 7,
    /// Panic caught at the boundary.
    FcErrPanic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', "?")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(err: &Error) -> FcStatus {
    match err {
        Error::Input(_) => FcStatus::FcErrInput,
        Error::Contract(_) => FcStatus::FcErrContract,
        Error::FairnessInfeasible(_) => FcStatus::FcErrInfeasible,
        Error::Solver(_) => FcStatus::FcErrSolver,
        Error::OracleRefused(_) => FcStatus::FcErrRefused,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => FcStatus::FcErrIo,
    }
}

/// Opaque dataset handle.
pub struct FcDataset {
    inner: Dataset,
}

unsafe fn cstr<'a>(p: *const c_char) -> Option<&'a str> {
    if p.is_null() {
        return None;
    }
    CStr::from_ptr(p).to_str().ok()
}

fn guard<F: FnOnce() -> Result<(), (FcStatus, String)>>(f: F) -> FcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => FcStatus::FcOk,
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic caught at the C boundary");
            FcStatus::FcErrPanic
        }
    }
}

fn fail(e: Error) -> (FcStatus, String) {
    (status_of(&e), e.to_string())
}

/// Message for the most recent error on this thread. Borrowed pointer:
/// valid until the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn fc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Load a dataset from a schema JSON file and a CSV file. On success writes
/// a handle to `out`; free it with fc_dataset_free.
///
/// # Safety
/// `schema_path` and `csv_path` must be valid NUL-terminated strings and
/// `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_load(
    schema_path: *const c_char,
    csv_path: *const c_char,
    out: *mut *mut FcDataset,
) -> FcStatus {
    guard(|| {
        let (schema_path, csv_path) = match (cstr(schema_path), cstr(csv_path)) {
            (Some(a), Some(b)) if !out.is_null() => (a, b),
            _ => return Err((FcStatus::FcErrNull, "null or non-UTF-8 argument".into())),
        };
        let schema = harness::load_schema(Path::new(schema_path)).map_err(fail)?;
        let ds = harness::load_dataset(&schema, Path::new(csv_path)).map_err(fail)?;
        *out = Box::into_raw(Box::new(FcDataset { inner: ds }));
        Ok(())
    })
}

/// Deterministic bank-marketing-like synthetic dataset (two colors).
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_synth_bank(
    n: usize,
    seed: u64,
    out: *mut *mut FcDataset,
) -> FcStatus {
    guard(|| {
        if out.is_null() {
            return Err((FcStatus::FcErrNull, "null output pointer".into()));
        }
        let ds = harness::synth_bank_like(n, seed).map_err(fail)?;
        *out = Box::into_raw(Box::new(FcDataset { inner: ds }));
        Ok(())
    })
}

/// Number of points in the dataset; 0 for a null handle.
///
/// # Safety
/// `ds` must be a handle from this library or null.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_len(ds: *const FcDataset) -> usize {
    if ds.is_null() {
        0
    } else {
        (*ds).inner.n()
    }
}

/// # Safety
/// `ds` must be a handle from this library (or null, a no-op); it must not
/// be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fc_dataset_free(ds: *mut FcDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

fn objective_from(code: u32) -> Option<Objective> {
    match code {
        0 => Some(Objective::KCenter),
        1 => Some(Objective::KMedian),
        2 => Some(Objective::KMeans),
        _ => None,
    }
}

/// Run the two-step fair pipeline (color-blind centers, fair LP, rounding)
/// on a dataset. `objective`: 0 = k-center, 1 = k-median, 2 = k-means.
/// `p_acc` < 0 means "leave labels alone"; otherwise the two-color labels
/// are perturbed to that accuracy first. Bounds come from the dataset
/// proportions at the given `delta`. On success `out_json` receives a JSON
/// object with costs, violation, and the assignment; free with
/// fc_string_free.
///
/// # Safety
/// `ds` must be a live handle and `out_json` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_run_pipeline(
    ds: *const FcDataset,
    objective: u32,
    k: usize,
    delta: f64,
    p_acc: f64,
    seed: u64,
    out_json: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        if ds.is_null() || out_json.is_null() {
            return Err((FcStatus::FcErrNull, "null handle or output pointer".into()));
        }
        let objective = objective_from(objective)
            .ok_or((FcStatus::FcErrInput, format!("unknown objective code {objective}")))?;
        let mut data = (*ds).inner.clone();
        if p_acc >= 0.0 {
            data = harness::perturb_labels(&data, p_acc).map_err(fail)?;
        }
        let spec = harness::derive_bounds(&data, delta).map_err(fail)?;
        let run = harness::run_pipeline(&data, objective, k, &spec, seed).map_err(fail)?;
        let violation = max_additive_violation(&data, &run.fair, &spec).map_err(fail)?;
        let payload = serde_json::json!({
            "colorblind_cost": run.colorblind_cost,
            "fair_cost": run.fair_cost,
            "pof": run.fair_cost / run.colorblind_cost,
            "gamma": violation.gamma,
            "normalized_gamma": violation.normalized_gamma,
            "centers": run.fair.centers,
            "assignment": run.fair.assignment,
        });
        let s = CString::new(payload.to_string())
            .map_err(|e| (FcStatus::FcErrIo, e.to_string()))?;
        *out_json = s.into_raw();
        Ok(())
    })
}

/// Run a full experiment sweep from an ExperimentConfig JSON string (same
/// format as the CLI's --config file). `out_json` receives the report rows
/// as a JSON array; free with fc_string_free.
///
/// # Safety
/// `config_json` must be a valid NUL-terminated string and `out_json` a
/// valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fc_run_experiment_json(
    config_json: *const c_char,
    out_json: *mut *mut c_char,
) -> FcStatus {
    guard(|| {
        let text = match cstr(config_json) {
            Some(t) if !out_json.is_null() => t,
            _ => return Err((FcStatus::FcErrNull, "null or non-UTF-8 argument".into())),
        };
        let config: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| (FcStatus::FcErrInput, format!("bad config: {e}")))?;
        let rows = harness::run_experiment(&config).map_err(fail)?;
        let body = serde_json::to_string(&rows).map_err(|e| (FcStatus::FcErrIo, e.to_string()))?;
        let s = CString::new(body).map_err(|e| (FcStatus::FcErrIo, e.to_string()))?;
        *out_json = s.into_raw();
        Ok(())
    })
}

/// Free a string returned by this library. Null is a no-op.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn fc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ptr;

    #[test]
    fn synth_pipeline_roundtrip() {
        unsafe {
            let mut ds: *mut FcDataset = ptr::null_mut();
            assert_eq!(fc_dataset_synth_bank(120, 3, &mut ds), FcStatus::FcOk);
            assert_eq!(fc_dataset_len(ds), 120);
            let mut out: *mut c_char = ptr::null_mut();
            let st = fc_run_pipeline(ds, 2, 3, 0.2, 0.8, 1, &mut out);
            assert_eq!(st, FcStatus::FcOk, "{:?}", CStr::from_ptr(fc_last_error()));
            let text = CStr::from_ptr(out).to_str().unwrap();
            let v: serde_json::Value = serde_json::from_str(text).unwrap();
            assert!(v["pof"].as_f64().unwrap() >= 1.0 - 1e-9);
            assert_eq!(v["assignment"].as_array().unwrap().len(), 120);
            fc_string_free(out);
            fc_dataset_free(ds);
        }
    }

    #[test]
    fn errors_surface_through_codes() {
        unsafe {
            let mut ds: *mut FcDataset = ptr::null_mut();
            assert_eq!(fc_dataset_synth_bank(100, 1, &mut ds), FcStatus::FcOk);
            let mut out: *mut c_char = ptr::null_mut();
            // Bad objective code.
            assert_eq!(
                fc_run_pipeline(ds, 9, 3, 0.2, 0.8, 1, &mut out),
                FcStatus::FcErrInput
            );
            // p_acc outside [0.5, 1].
            assert_eq!(
                fc_run_pipeline(ds, 2, 3, 0.2, 0.2, 1, &mut out),
                FcStatus::FcErrInput
            );
            assert!(!CStr::from_ptr(fc_last_error()).to_str().unwrap().is_empty());
            // Null handling.
            assert_eq!(
                fc_run_pipeline(ptr::null(), 2, 3, 0.2, 0.8, 1, &mut out),
                FcStatus::FcErrNull
            );
            assert_eq!(fc_dataset_len(ptr::null()), 0);
            fc_dataset_free(ds);
        }
    }

    #[test]
    fn experiment_from_json_config() {
        unsafe {
            let config = r#"{
                "name": "capi-smoke",
                "dataset": {"bank_like": {"n": 100, "seed": 2}},
                "objective": "kmeans",
                "k_min": 2, "k_max": 2,
                "delta": 0.2, "p_acc": 0.8,
                "trials": 1, "seed": 0
            }"#;
            let cfg = CString::new(config).unwrap();
            let mut out: *mut c_char = ptr::null_mut();
            let st = fc_run_experiment_json(cfg.as_ptr(), &mut out);
            assert_eq!(st, FcStatus::FcOk, "{:?}", CStr::from_ptr(fc_last_error()));
            let rows: serde_json::Value =
                serde_json::from_str(CStr::from_ptr(out).to_str().unwrap()).unwrap();
            assert_eq!(rows.as_array().unwrap().len(), 1);
            assert!(rows[0]["error"].is_null());
            fc_string_free(out);
            // Malformed config.
            let bad = CString::new("{not json").unwrap();
            assert_eq!(
                fc_run_experiment_json(bad.as_ptr(), &mut out),
                FcStatus::FcErrInput
            );
        }
    }
}
