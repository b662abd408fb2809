//! C ABI over `perclab`.
//!
//! Every fallible function returns a [`PlStatus`]; on failure the message is
//! kept per thread and can be fetched with [`pl_last_error`]. Handles are
//! opaque and must be released with their `_free` function. Strings returned
//! to the caller are owned and released with [`pl_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use perclab::bound;
use perclab::count::{self, PathCountRow};
use perclab::lattice::LatticeVariant;
use perclab::sim::{self, BisectParams, Event, OriginRule, SimConfig};
use perclab::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Overflow = 4,
    OutOfRange = 5,
    NotBracketing = 6,
    Internal = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlVariant {
    Z2 = 0,
    TriUp = 1,
    TriRight = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlEvent {
    OneArm = 0,
    TwoArm = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlOriginRule {
    ConditionedOpen = 0,
    Sampled = 1,
}

impl From<PlVariant> for LatticeVariant {
    fn from(v: PlVariant) -> Self {
        match v {
            PlVariant::Z2 => LatticeVariant::Z2,
            PlVariant::TriUp => LatticeVariant::TriUp,
            PlVariant::TriRight => LatticeVariant::TriRight,
        }
    }
}

impl From<PlEvent> for Event {
    fn from(e: PlEvent) -> Self {
        match e {
            PlEvent::OneArm => Event::OneArm,
            PlEvent::TwoArm => Event::TwoArm,
        }
    }
}

impl From<PlOriginRule> for OriginRule {
    fn from(o: PlOriginRule) -> Self {
        match o {
            PlOriginRule::ConditionedOpen => OriginRule::ConditionedOpen,
            PlOriginRule::Sampled => OriginRule::Sampled,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlBoundPoint {
    pub k: u64,
    pub mid: u64,
    pub log_count: f64,
    pub b_k: f64,
    pub b_k_displayed: f64,
    pub abs_err_vs_limit: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlEstimate {
    pub hits: u64,
    pub trials: u64,
    pub phat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Exact path-count row for one generation.
pub struct PlCountRow {
    row: PathCountRow,
}

/// Simulation parameters; the probability can be changed between estimates.
pub struct PlSimulation {
    config: SimConfig,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> PlStatus {
    match e {
        Error::UnsupportedVariant(_) => PlStatus::Unsupported,
        Error::Overflow(_) => PlStatus::Overflow,
        Error::IndexOutOfRange { .. } | Error::OutOfBall(_) | Error::BruteforceBudget { .. } => {
            PlStatus::OutOfRange
        }
        Error::NotBracketing { .. } => PlStatus::NotBracketing,
        Error::Io(_) | Error::Json(_) => PlStatus::Internal,
        _ => PlStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), PlStatus>) -> PlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PlStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside perclab".into());
            PlStatus::Panic
        }
    }
}

fn check<T>(r: perclab::Result<T>) -> Result<T, PlStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), PlStatus> {
    if p.is_null() {
        set_error(format!("{name} is null"));
        Err(PlStatus::NullPointer)
    } else {
        Ok(())
    }
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s)
        .map(CString::into_raw)
        .unwrap_or(ptr::null_mut())
}

/// Copy of the last error message on this thread, or null if none.
#[no_mangle]
pub extern "C" fn pl_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |m| m.clone().into_raw())
    })
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn pl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Static version string.
#[no_mangle]
pub extern "C" fn pl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn pl_count_row_new(k: u64, out: *mut *mut PlCountRow) -> PlStatus {
    guard(|| {
        non_null(out, "out")?;
        let row = check(count::count_row(k))?;
        *out = Box::into_raw(Box::new(PlCountRow { row }));
        Ok(())
    })
}

/// # Safety
/// `row` must come from [`pl_count_row_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn pl_count_row_free(row: *mut PlCountRow) {
    if !row.is_null() {
        drop(Box::from_raw(row));
    }
}

/// Number of entries, `k + 1`; zero for a null handle.
///
/// # Safety
/// `row` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pl_count_row_len(row: *const PlCountRow) -> usize {
    row.as_ref().map_or(0, |r| r.row.counts.len())
}

/// Entry `i` as a decimal string.
///
/// # Safety
/// `row` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_count_row_get(
    row: *const PlCountRow,
    i: u64,
    out: *mut *mut c_char,
) -> PlStatus {
    guard(|| {
        non_null(row, "row")?;
        non_null(out, "out")?;
        let r = &(*row).row;
        let count = check(
            r.counts
                .get(i as usize)
                .ok_or(Error::IndexOutOfRange { k: r.k, i }),
        )?;
        *out = owned_string(count.to_string());
        Ok(())
    })
}

/// Row total (`3^k`) as a decimal string.
///
/// # Safety
/// `row` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_count_row_total(
    row: *const PlCountRow,
    out: *mut *mut c_char,
) -> PlStatus {
    guard(|| {
        non_null(row, "row")?;
        non_null(out, "out")?;
        *out = owned_string((*row).row.total.to_string());
        Ok(())
    })
}

/// Compare the closed form with full enumeration.
///
/// # Safety
/// `matches` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_count_verify(k: u64, matches: *mut bool) -> PlStatus {
    guard(|| {
        non_null(matches, "matches")?;
        *matches = check(count::verify_row(k))?;
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_log_binomial(k: u64, i: u64, out: *mut f64) -> PlStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = check(bound::log_binomial(k, i))?;
        Ok(())
    })
}

/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_bound_at(k: u64, out: *mut PlBoundPoint) -> PlStatus {
    guard(|| {
        non_null(out, "out")?;
        let b = check(bound::bound_at(k))?;
        *out = PlBoundPoint {
            k: b.k,
            mid: b.mid,
            log_count: b.log_count,
            b_k: b.b_k,
            b_k_displayed: b.b_k_displayed,
            abs_err_vs_limit: b.abs_err_vs_limit(),
        };
        Ok(())
    })
}

/// Limit of the threshold sequence.
#[no_mangle]
pub extern "C" fn pl_bound_limit() -> f64 {
    bound::LIMIT
}

/// # Safety
/// `out` must be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn pl_simulation_new(
    variant: PlVariant,
    k: u64,
    p: f64,
    trials: u64,
    seed: u64,
    origin_rule: PlOriginRule,
    out: *mut *mut PlSimulation,
) -> PlStatus {
    guard(|| {
        non_null(out, "out")?;
        let config =
            SimConfig::new(variant.into(), k, p, trials, seed).with_origin_rule(origin_rule.into());
        check(config.validate())?;
        *out = Box::into_raw(Box::new(PlSimulation { config }));
        Ok(())
    })
}

/// # Safety
/// `sim` must come from [`pl_simulation_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn pl_simulation_free(sim: *mut PlSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pl_simulation_set_p(sim: *mut PlSimulation, p: f64) -> PlStatus {
    guard(|| {
        non_null(sim, "sim")?;
        let updated = (*sim).config.with_p(p);
        check(updated.validate())?;
        (*sim).config = updated;
        Ok(())
    })
}

/// Crossing estimate; `threads == 0` uses the global pool.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_simulation_estimate(
    sim: *const PlSimulation,
    event: PlEvent,
    threads: usize,
    out: *mut PlEstimate,
) -> PlStatus {
    guard(|| {
        non_null(sim, "sim")?;
        non_null(out, "out")?;
        let threads = (threads > 0).then_some(threads);
        let e = check(sim::estimate_with_threads(
            &(*sim).config,
            event.into(),
            threads,
        ))?;
        *out = PlEstimate {
            hits: e.hits,
            trials: e.config.trials,
            phat: e.phat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
        };
        Ok(())
    })
}

/// Bisect for the two-arm crossing probability 1/2 on `[0, 1]`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pl_pc_bisect(
    variant: PlVariant,
    k: u64,
    trials: u64,
    seed: u64,
    tol: f64,
    out: *mut f64,
) -> PlStatus {
    guard(|| {
        non_null(out, "out")?;
        let mut params = BisectParams::new(variant.into(), k, trials, seed);
        params.tol = tol;
        *out = check(sim::pc_bisect(&params, None))?.p;
        Ok(())
    })
}
