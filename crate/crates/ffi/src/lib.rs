//! C ABI over `ofdma-alloc`.
//!
//! Objects cross the boundary as opaque handles created and released by this
//! library. Every fallible function returns an [`OfdmaStatus`]; on failure the
//! message is kept per thread and read with [`ofdma_last_error`].
//!
//! # Safety
//!
//! Pointer arguments must be null or valid for the access the function
//! documents: handles must come from this library and not be used after they
//! are freed, strings must be NUL-terminated, and arrays must hold `len`
//! elements. Null pointers are reported as [`OfdmaStatus::NullPointer`].
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use ofdma_alloc::harness::{emit_results, run_scenario, ScenarioConfig};
use ofdma_alloc::metrics::{PowerMode, SummaryRow};
use ofdma_alloc::power::delta_power;
use ofdma_alloc::solvers::{approximation_ratio, Algorithm};
use ofdma_alloc::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfdmaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Domain = 4,
    Contract = 5,
    OracleCap = 6,
    Io = 7,
    Parse = 8,
    Csv = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfdmaAlgorithm {
    Mwdg = 0,
    Rg = 1,
    Meg = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OfdmaPowerMode {
    Uniform = 0,
    Dpra = 1,
}

/// One summary row. Interval half-widths and η fields are NaN when undefined.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmaRow {
    pub algorithm: OfdmaAlgorithm,
    pub power_mode: OfdmaPowerMode,
    pub max_prbs: usize,
    pub users_per_cell: usize,
    pub ipp_iterations: usize,
    pub drops: usize,
    pub mean_dropped: f64,
    pub ci_dropped: f64,
    pub mean_eta: f64,
    pub ci_eta: f64,
    pub mean_total_power_w: f64,
}

/// Scenario configuration handle.
pub struct OfdmaConfig(ScenarioConfig);

/// Summary table handle.
pub struct OfdmaResults(Vec<SummaryRow>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> OfdmaStatus {
    match e {
        Error::Config(_) => OfdmaStatus::Config,
        Error::Domain(_) => OfdmaStatus::Domain,
        Error::Contract(_) => OfdmaStatus::Contract,
        Error::OracleCap { .. } => OfdmaStatus::OracleCap,
        Error::Io { .. } => OfdmaStatus::Io,
        Error::Parse { .. } => OfdmaStatus::Parse,
        Error::Csv(_) => OfdmaStatus::Csv,
    }
}

struct Failure(OfdmaStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(OfdmaStatus::InvalidArgument, message.into())
}

fn null(what: &str) -> Failure {
    Failure(OfdmaStatus::NullPointer, format!("`{what}` is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OfdmaStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OfdmaStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            OfdmaStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("`{what}` is not valid UTF-8")))
}

unsafe fn config_mut<'a>(config: *mut OfdmaConfig) -> Result<&'a mut ScenarioConfig, Failure> {
    config.as_mut().map(|c| &mut c.0).ok_or_else(|| null("config"))
}

unsafe fn slice_arg<'a>(p: *const usize, len: usize, what: &str) -> Result<&'a [usize], Failure> {
    if len == 0 {
        return Err(invalid(format!("`{what}` is empty")));
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

fn parse_list<T: std::str::FromStr<Err = Error>>(text: &str) -> Result<Vec<T>, Failure> {
    let items = text.split(',').map(str::parse).collect::<Result<Vec<T>, _>>()?;
    if items.is_empty() {
        return Err(invalid("empty list"));
    }
    Ok(items)
}

fn give<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    unsafe { *out = Box::into_raw(Box::new(value)) };
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ofdma_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Reference-parameter configuration.
#[no_mangle]
pub unsafe extern "C" fn ofdma_config_default(out: *mut *mut OfdmaConfig) -> OfdmaStatus {
    guard(|| give(out, OfdmaConfig(ScenarioConfig::default())))
}

/// Configuration parsed from a TOML file.
#[no_mangle]
pub unsafe extern "C" fn ofdma_config_from_file(path: *const c_char, out: *mut *mut OfdmaConfig) -> OfdmaStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        give(out, OfdmaConfig(ScenarioConfig::from_file(Path::new(path))?))
    })
}

/// Configuration parsed from TOML text.
#[no_mangle]
pub unsafe extern "C" fn ofdma_config_from_toml(text: *const c_char, out: *mut *mut OfdmaConfig) -> OfdmaStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let config = ScenarioConfig::from_toml_str(text).map_err(|m| Failure(OfdmaStatus::Parse, m))?;
        give(out, OfdmaConfig(config))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofdma_config_free(config: *mut OfdmaConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

#[no_mangle]
pub unsafe extern "C" fn ofdma_config_set_seed(config: *mut OfdmaConfig, seed: u64) -> OfdmaStatus {
    guard(|| {
        config_mut(config)?.master_seed = seed;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofdma_config_set_drops(config: *mut OfdmaConfig, drops: usize) -> OfdmaStatus {
    guard(|| {
        config_mut(config)?.num_drops = drops;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofdma_config_set_max_prbs(config: *mut OfdmaConfig, max_prbs: usize) -> OfdmaStatus {
    guard(|| {
        config_mut(config)?.max_prbs = max_prbs;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofdma_config_set_users(config: *mut OfdmaConfig, users: *const usize, len: usize) -> OfdmaStatus {
    guard(|| {
        let users = slice_arg(users, len, "users")?.to_vec();
        config_mut(config)?.users_per_cell = users;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofdma_config_set_ipp(config: *mut OfdmaConfig, depths: *const usize, len: usize) -> OfdmaStatus {
    guard(|| {
        let depths = slice_arg(depths, len, "depths")?.to_vec();
        config_mut(config)?.ipp_iterations = depths;
        Ok(())
    })
}

/// Comma-separated list of `mwdg`, `rg`, `meg`.
#[no_mangle]
pub unsafe extern "C" fn ofdma_config_set_algorithms(config: *mut OfdmaConfig, names: *const c_char) -> OfdmaStatus {
    guard(|| {
        let list: Vec<Algorithm> = parse_list(str_arg(names, "names")?)?;
        config_mut(config)?.algorithm = list;
        Ok(())
    })
}

/// Comma-separated list of `uniform`, `dpra`.
#[no_mangle]
pub unsafe extern "C" fn ofdma_config_set_power_modes(config: *mut OfdmaConfig, names: *const c_char) -> OfdmaStatus {
    guard(|| {
        let list: Vec<PowerMode> = parse_list(str_arg(names, "names")?)?;
        config_mut(config)?.power_mode = list;
        Ok(())
    })
}

/// Checks the configuration without running it.
#[no_mangle]
pub unsafe extern "C" fn ofdma_config_validate(config: *const OfdmaConfig) -> OfdmaStatus {
    guard(|| {
        let config = config.as_ref().ok_or_else(|| null("config"))?;
        config.0.validate()?;
        Ok(())
    })
}

/// Runs the scenario; the caller owns `*out`.
#[no_mangle]
pub unsafe extern "C" fn ofdma_run(config: *const OfdmaConfig, out: *mut *mut OfdmaResults) -> OfdmaStatus {
    guard(|| {
        let config = config.as_ref().ok_or_else(|| null("config"))?;
        let rows = run_scenario(&config.0)?;
        give(out, OfdmaResults(rows))
    })
}

#[no_mangle]
pub unsafe extern "C" fn ofdma_results_free(results: *mut OfdmaResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// Number of rows, 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn ofdma_results_len(results: *const OfdmaResults) -> usize {
    results.as_ref().map_or(0, |r| r.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn ofdma_results_row(results: *const OfdmaResults, index: usize, out: *mut OfdmaRow) -> OfdmaStatus {
    guard(|| {
        let results = results.as_ref().ok_or_else(|| null("results"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let row = results.0.get(index).ok_or_else(|| invalid(format!("row {index} out of range ({} rows)", results.0.len())))?;
        *out = OfdmaRow {
            algorithm: match row.key.algorithm {
                Algorithm::Mwdg => OfdmaAlgorithm::Mwdg,
                Algorithm::Rg => OfdmaAlgorithm::Rg,
                Algorithm::Meg => OfdmaAlgorithm::Meg,
            },
            power_mode: match row.key.power_mode {
                PowerMode::Uniform => OfdmaPowerMode::Uniform,
                PowerMode::Dpra => OfdmaPowerMode::Dpra,
            },
            max_prbs: row.key.max_prbs,
            users_per_cell: row.key.users_per_cell,
            ipp_iterations: row.key.ipp_iterations,
            drops: row.drops,
            mean_dropped: row.dropped.mean,
            ci_dropped: row.dropped.ci95.unwrap_or(f64::NAN),
            mean_eta: row.eta.map_or(f64::NAN, |e| e.mean),
            ci_eta: row.eta.and_then(|e| e.ci95).unwrap_or(f64::NAN),
            mean_total_power_w: row.total_power_w,
        };
        Ok(())
    })
}

/// Writes the table as CSV, in the same format as the CLI.
#[no_mangle]
pub unsafe extern "C" fn ofdma_results_write_csv(results: *const OfdmaResults, path: *const c_char) -> OfdmaStatus {
    guard(|| {
        let results = results.as_ref().ok_or_else(|| null("results"))?;
        let path = str_arg(path, "path")?;
        emit_results(&results.0, Path::new(path))?;
        Ok(())
    })
}

/// Worst-case MWDG approximation ratio for per-user cap `max_prbs`.
#[no_mangle]
pub unsafe extern "C" fn ofdma_approximation_ratio(max_prbs: usize, num_prbs: usize, out: *mut f64) -> OfdmaStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = approximation_ratio(max_prbs, num_prbs)?;
        Ok(())
    })
}

/// Power reduction that lowers a PRB's rate by `excess_rate` under fixed
/// interference.
#[no_mangle]
pub unsafe extern "C" fn ofdma_delta_power(
    rate: f64,
    excess_rate: f64,
    interference: f64,
    noise: f64,
    gain: f64,
    bandwidth: f64,
    out: *mut f64,
) -> OfdmaStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = delta_power(rate, excess_rate, interference, noise, gain, bandwidth)?;
        Ok(())
    })
}
