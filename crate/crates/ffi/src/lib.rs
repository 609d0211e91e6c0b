//! C interface. Handles are opaque boxes released with their `_free` function;
//! every fallible call returns `CONDORCET_OK` or a library error code and
//! leaves a message readable through `condorcet_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use condorcet::arborescence::parse_arborescence_instance;
use condorcet::instance::{instance_to_json, parse_instance, parse_matching, parse_matching_set, set_to_json};
use condorcet::popularity::{verify_pareto_optimal, verify_popular};
use condorcet::solvers::{solve_arborescence, solve_auto};
use condorcet::{Error, MatchingInstance, MatchingSet};

pub const CONDORCET_OK: i32 = 0;
/// A required pointer argument was null.
pub const CONDORCET_ERR_NULL: i32 = 1;
/// A string argument was not valid UTF-8.
pub const CONDORCET_ERR_UTF8: i32 = 2;
/// The library panicked; this is a bug.
pub const CONDORCET_ERR_PANIC: i32 = 3;

/// Opaque matching instance.
pub struct CondorcetInstance(MatchingInstance);

/// Opaque set of matchings tied to the instance it was built for.
pub struct CondorcetSet(MatchingSet);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

enum Fail {
    Code(i32, String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> i32 {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CONDORCET_OK,
        Ok(Err(Fail::Code(code, msg))) => {
            set_error(msg);
            code
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            e.code()
        }
        Err(_) => {
            set_error("internal panic".into());
            CONDORCET_ERR_PANIC
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail::Code(CONDORCET_ERR_NULL, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail::Code(CONDORCET_ERR_UTF8, format!("{what} is not UTF-8")))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail::Code(CONDORCET_ERR_NULL, format!("{what} is null")))
}

fn out_ptr<T>(out: *mut T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        Err(Fail::Code(CONDORCET_ERR_NULL, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn owned(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn condorcet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn condorcet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an instance from JSON.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn condorcet_instance_parse(json: *const c_char, out: *mut *mut CondorcetInstance) -> i32 {
    guard(|| {
        out_ptr(out, "out")?;
        let inst = parse_instance(text(json, "json")?)?;
        *out = Box::into_raw(Box::new(CondorcetInstance(inst)));
        Ok(())
    })
}

/// # Safety
/// `inst` must come from `condorcet_instance_parse` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn condorcet_instance_free(inst: *mut CondorcetInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of agents, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn condorcet_instance_n_agents(inst: *const CondorcetInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n_agents())
}

/// Canonical JSON of the instance; free with `condorcet_string_free`.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn condorcet_instance_to_json(inst: *const CondorcetInstance, out: *mut *mut c_char) -> i32 {
    guard(|| {
        out_ptr(out, "out")?;
        *out = owned(instance_to_json(&deref(inst, "inst")?.0));
        Ok(())
    })
}

/// Runs the solver suited to the instance's preferences and constraint.
///
/// # Safety
/// `inst` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn condorcet_solve(inst: *const CondorcetInstance, out: *mut *mut CondorcetSet) -> i32 {
    guard(|| {
        out_ptr(out, "out")?;
        let report = solve_auto(&deref(inst, "inst")?.0, None)?;
        *out = Box::into_raw(Box::new(CondorcetSet(report.set)));
        Ok(())
    })
}

/// Parses a JSON list of agent-to-object maps against `inst`.
///
/// # Safety
/// `inst` must be a live handle, `json` nul-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn condorcet_set_parse(
    inst: *const CondorcetInstance,
    json: *const c_char,
    out: *mut *mut CondorcetSet,
) -> i32 {
    guard(|| {
        out_ptr(out, "out")?;
        let set = parse_matching_set(&deref(inst, "inst")?.0, text(json, "json")?)?;
        *out = Box::into_raw(Box::new(CondorcetSet(set)));
        Ok(())
    })
}

/// # Safety
/// `set` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn condorcet_set_free(set: *mut CondorcetSet) {
    if !set.is_null() {
        drop(Box::from_raw(set));
    }
}

/// Number of matchings, or 0 for a null handle.
///
/// # Safety
/// `set` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn condorcet_set_len(set: *const CondorcetSet) -> usize {
    set.as_ref().map_or(0, |s| s.0.len())
}

/// JSON list of agent-to-object maps; free with `condorcet_string_free`.
///
/// # Safety
/// Both handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn condorcet_set_to_json(
    inst: *const CondorcetInstance,
    set: *const CondorcetSet,
    out: *mut *mut c_char,
) -> i32 {
    guard(|| {
        out_ptr(out, "out")?;
        let inst = &deref(inst, "inst")?.0;
        let set = &deref(set, "set")?.0;
        inst.check_set(set)?;
        *out = owned(set_to_json(inst, set).to_string());
        Ok(())
    })
}

/// Writes 1 to `popular` if no alternative beats the set, else 0.
///
/// # Safety
/// Both handles must be live and `popular` writable.
#[no_mangle]
pub unsafe extern "C" fn condorcet_verify_popular(
    inst: *const CondorcetInstance,
    set: *const CondorcetSet,
    popular: *mut i32,
) -> i32 {
    guard(|| {
        out_ptr(popular, "popular")?;
        let verdict = verify_popular(&deref(inst, "inst")?.0, &deref(set, "set")?.0)?;
        *popular = verdict.is_popular() as i32;
        Ok(())
    })
}

/// Writes 1 to `optimal` if the JSON matching is Pareto-optimal, else 0.
///
/// # Safety
/// `inst` must be live, `matching` nul-terminated, `optimal` writable.
#[no_mangle]
pub unsafe extern "C" fn condorcet_verify_pareto(
    inst: *const CondorcetInstance,
    matching: *const c_char,
    optimal: *mut i32,
) -> i32 {
    guard(|| {
        out_ptr(optimal, "optimal")?;
        let inst = &deref(inst, "inst")?.0;
        let m = parse_matching(inst, text(matching, "matching")?)?;
        *optimal = verify_pareto_optimal(inst, &m)?.is_optimal() as i32;
        Ok(())
    })
}

/// Solves an arborescence instance given as JSON and returns the pair as JSON.
///
/// # Safety
/// `json` must be nul-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn condorcet_arborescence_solve(json: *const c_char, out: *mut *mut c_char) -> i32 {
    guard(|| {
        out_ptr(out, "out")?;
        let inst = parse_arborescence_instance(text(json, "json")?)?;
        let pair = solve_arborescence(&inst)?;
        let named = |t: &[usize]| -> Vec<[String; 2]> {
            t.iter()
                .map(|&e| {
                    let (u, v) = inst.arcs()[e];
                    [inst.nodes()[u].clone(), inst.nodes()[v].clone()]
                })
                .collect()
        };
        let doc = serde_json::json!({"first": named(&pair.first), "second": named(&pair.second)});
        *out = owned(doc.to_string());
        Ok(())
    })
}
