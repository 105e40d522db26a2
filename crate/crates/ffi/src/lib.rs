//! C ABI for the walking simulator.
//!
//! Conventions:
//! - Opaque handles (`DwScenario`, `DwTrace`) created and freed here; never
//!   dereference them from C.
//! - Every fallible call returns a `DwStatus`; `dw_last_error` returns a
//!   thread-local message for the most recent failure on this thread.
//! - `dw_run` reports divergence as `DW_STATUS_DIVERGED` while still
//!   handing back the partial trace collected up to the failure instant.
//!
//! The header `include/deckwalker.h` is generated by cbindgen at build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::ptr;

use deckwalker::error::Error;
use deckwalker::metrics::compute_metrics;
use deckwalker::scenario::Scenario;
use deckwalker::sim::{run_simulation, Controller, SimTrace};

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|c| *c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).unwrap());
}

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DwStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Scenario text could not be parsed or validated.
    Scenario = 2,
    /// Run configuration was inconsistent.
    Config = 3,
    /// The simulation diverged; a partial trace is still returned.
    Diverged = 4,
    Io = 5,
    /// An argument was out of range (unknown column, short buffer).
    Range = 6,
    /// A string argument was not valid UTF-8.
    Utf8 = 7,
}

/// Opaque scenario handle.
pub struct DwScenario {
    inner: Scenario,
}

/// Opaque trace handle.
pub struct DwTrace {
    inner: SimTrace,
}

/// Per-run evaluation metrics over the fixed [5 s, 15 s] interval.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DwMetrics {
    pub rmse: f64,
    pub peak: f64,
    pub rmse_pi: f64,
    pub peak_pi: f64,
    pub trq: f64,
    pub fit_slope: f64,
}

/// Trace column selector for `dw_trace_column`; the order matches the CSV
/// layout. `Touchdown` yields 0.0/1.0 flags.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DwColumn {
    T = 0,
    XPos = 1,
    XVel = 2,
    XdPos = 3,
    XdVel = 4,
    XcPos = 5,
    XcVel = 6,
    EPos = 7,
    EVel = 8,
    EcPos = 9,
    EcVel = 10,
    TauCmd = 11,
    TauApplied = 12,
    V = 13,
    Zeta = 14,
    Epsilon = 15,
    ThetaNorm = 16,
    PEigMin = 17,
    PEigMax = 18,
    StepU = 19,
    SupportOffset = 20,
    Xs0c = 21,
    Touchdown = 22,
}

/// Message for the most recent failure on the calling thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn dw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, DwStatus> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(DwStatus::NullArgument);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        DwStatus::Utf8
    })
}

/// Parse a scenario from TOML text.
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dw_scenario_from_toml(
    text: *const c_char,
    out: *mut *mut DwScenario,
) -> DwStatus {
    if out.is_null() {
        set_error("null output pointer");
        return DwStatus::NullArgument;
    }
    let text = match read_str(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match Scenario::from_toml(text) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(DwScenario { inner }));
            DwStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            *out = ptr::null_mut();
            DwStatus::Scenario
        }
    }
}

/// Builtin benchmark scenario from a case id ("case1".."case3") and a
/// controller id ("pd_ff", "adaptive", "ankle_off").
///
/// # Safety
/// Both strings must be valid NUL-terminated strings; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn dw_scenario_builtin(
    case_id: *const c_char,
    controller: *const c_char,
    out: *mut *mut DwScenario,
) -> DwStatus {
    if out.is_null() {
        set_error("null output pointer");
        return DwStatus::NullArgument;
    }
    let case_id = match read_str(case_id) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let controller = match read_str(controller) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let Some(ctl) = Controller::from_id(controller) else {
        set_error(&format!("unknown controller id {controller:?}"));
        *out = ptr::null_mut();
        return DwStatus::Scenario;
    };
    match Scenario::builtin(case_id, ctl) {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(DwScenario { inner }));
            DwStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            *out = ptr::null_mut();
            DwStatus::Scenario
        }
    }
}

/// # Safety
/// `scenario` must come from a `dw_scenario_*` constructor and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dw_scenario_free(scenario: *mut DwScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Run a scenario. On `DW_STATUS_DIVERGED` the partial trace is still
/// stored in `out` and must be freed.
///
/// # Safety
/// `scenario` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dw_run(scenario: *const DwScenario, out: *mut *mut DwTrace) -> DwStatus {
    if scenario.is_null() || out.is_null() {
        set_error("null argument");
        return DwStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let built = match (*scenario).inner.build() {
        Ok(b) => b,
        Err(e) => {
            set_error(&e.to_string());
            return DwStatus::Config;
        }
    };
    match run_simulation(&built.sim, &built.spec, &built.planner, &built.pd, &built.adaptive) {
        Ok(trace) => {
            *out = Box::into_raw(Box::new(DwTrace { inner: trace }));
            DwStatus::Ok
        }
        Err(Error::Diverged { t, trace }) => {
            set_error(&format!("diverged at t = {t} s"));
            *out = Box::into_raw(Box::new(DwTrace { inner: *trace }));
            DwStatus::Diverged
        }
        Err(e) => {
            set_error(&e.to_string());
            DwStatus::Config
        }
    }
}

/// # Safety
/// `trace` must come from `dw_run` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn dw_trace_free(trace: *mut DwTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of uniformly sampled rows in the trace.
///
/// # Safety
/// `trace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dw_trace_samples(trace: *const DwTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    (*trace).inner.rows.len()
}

/// Number of touchdown events recorded in the trace.
///
/// # Safety
/// `trace` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dw_trace_touchdowns(trace: *const DwTrace) -> usize {
    if trace.is_null() {
        return 0;
    }
    (*trace).inner.touchdowns.len()
}

/// Evaluation metrics of a completed trace.
///
/// # Safety
/// `trace` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dw_trace_metrics(trace: *const DwTrace, out: *mut DwMetrics) -> DwStatus {
    if trace.is_null() || out.is_null() {
        set_error("null argument");
        return DwStatus::NullArgument;
    }
    match compute_metrics(&(*trace).inner) {
        Ok(m) => {
            *out = DwMetrics {
                rmse: m.rmse,
                peak: m.peak,
                rmse_pi: m.rmse_pi,
                peak_pi: m.peak_pi,
                trq: m.trq,
                fit_slope: m.fit_slope,
            };
            DwStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            DwStatus::Range
        }
    }
}

/// Copy one signal column into `buf` (capacity `len` doubles). Returns the
/// status; the trace length is available via `dw_trace_samples`.
///
/// # Safety
/// `trace` must be a live handle and `buf` must point to at least `len`
/// writable doubles.
#[no_mangle]
pub unsafe extern "C" fn dw_trace_column(
    trace: *const DwTrace,
    column: DwColumn,
    buf: *mut f64,
    len: usize,
) -> DwStatus {
    if trace.is_null() || buf.is_null() {
        set_error("null argument");
        return DwStatus::NullArgument;
    }
    let rows = &(*trace).inner.rows;
    if len < rows.len() {
        set_error(&format!("buffer holds {len} values; trace has {}", rows.len()));
        return DwStatus::Range;
    }
    let out = std::slice::from_raw_parts_mut(buf, rows.len());
    for (dst, r) in out.iter_mut().zip(rows) {
        *dst = match column {
            DwColumn::T => r.t,
            DwColumn::XPos => r.plant.pos,
            DwColumn::XVel => r.plant.vel,
            DwColumn::XdPos => r.desired.pos,
            DwColumn::XdVel => r.desired.vel,
            DwColumn::XcPos => r.commanded.pos,
            DwColumn::XcVel => r.commanded.vel,
            DwColumn::EPos => r.error.pos,
            DwColumn::EVel => r.error.vel,
            DwColumn::EcPos => r.profile_error.pos,
            DwColumn::EcVel => r.profile_error.vel,
            DwColumn::TauCmd => r.tau_commanded,
            DwColumn::TauApplied => r.tau_applied,
            DwColumn::V => r.v,
            DwColumn::Zeta => r.zeta,
            DwColumn::Epsilon => r.epsilon,
            DwColumn::ThetaNorm => r.theta_norm,
            DwColumn::PEigMin => r.p_eig_min,
            DwColumn::PEigMax => r.p_eig_max,
            DwColumn::StepU => r.step_length,
            DwColumn::SupportOffset => r.support_offset,
            DwColumn::Xs0c => r.xs0c,
            DwColumn::Touchdown => f64::from(u8::from(r.touchdown)),
        };
    }
    DwStatus::Ok
}

/// Write the trace CSV to `path`.
///
/// # Safety
/// `trace` must be a live handle and `path` a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn dw_trace_write_csv(
    trace: *const DwTrace,
    path: *const c_char,
) -> DwStatus {
    if trace.is_null() {
        set_error("null trace");
        return DwStatus::NullArgument;
    }
    let path = match read_str(path) {
        Ok(p) => p,
        Err(s) => return s,
    };
    match (*trace).inner.save_csv(Path::new(path)) {
        Ok(()) => DwStatus::Ok,
        Err(e) => {
            set_error(&e.to_string());
            DwStatus::Io
        }
    }
}
