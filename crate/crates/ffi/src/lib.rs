//! C ABI for the `pmmsnp` library.
//!
//! Structures and hypergraphs cross the boundary as opaque handles created
//! from JSON and released with the matching `_free` function. Every fallible
//! call returns a [`PmmsnpStatus`]; the message of the most recent failure on
//! the calling thread is available from [`pmmsnp_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pmmsnp::aip::{solve_tractable_pcsp, Hypergraph};
use pmmsnp::connectivity::{is_bklm_connected, is_reconfigurable};
use pmmsnp::mmsnp::{classify, Verdict};
use pmmsnp::reduce::girth_exceeds;
use pmmsnp::structure::NamedRelation;
use pmmsnp::{Error, RelStructure};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmmsnpStatus {
    Ok = 0,
    PromiseViolation = 1,
    NoContainment = 2,
    InvalidArgument = 3,
    BudgetExceeded = 4,
    ParseError = 5,
    NullPointer = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PmmsnpVerdict {
    NoContainment = 0,
    TractableAip = 1,
    HardUnderRich2to1 = 2,
}

/// Opaque relational structure.
pub struct PmmsnpStructure(RelStructure);

/// Opaque uniform hypergraph.
pub struct PmmsnpHypergraph(Hypergraph);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior nuls removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PmmsnpStatus {
    match err {
        Error::PromiseViolation(_) => PmmsnpStatus::PromiseViolation,
        Error::MissingContainment { .. } => PmmsnpStatus::NoContainment,
        Error::BudgetExceeded { .. } => PmmsnpStatus::BudgetExceeded,
        Error::Json(_) => PmmsnpStatus::ParseError,
        _ => PmmsnpStatus::InvalidArgument,
    }
}

fn guard(body: impl FnOnce() -> Result<(), (PmmsnpStatus, String)>) -> PmmsnpStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PmmsnpStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PmmsnpStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (PmmsnpStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (PmmsnpStatus, String) {
    (PmmsnpStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (PmmsnpStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s).to_str().map_err(|_| (PmmsnpStatus::ParseError, format!("{what} is not UTF-8")))
}

/// Message of the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pmmsnp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Classifies `(c, d, k, l)`. `out_boundary` (may be null) receives `c(k−1)`.
///
/// # Safety
/// `out_verdict` must be a valid pointer; `out_boundary` must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_classify(
    c: usize,
    d: usize,
    k: usize,
    l: usize,
    out_verdict: *mut PmmsnpVerdict,
    out_boundary: *mut usize,
) -> PmmsnpStatus {
    guard(|| {
        if out_verdict.is_null() {
            return Err(null("out_verdict"));
        }
        let v = classify(c, d, k, l).map_err(lib_err)?;
        *out_verdict = match v.verdict {
            Verdict::NoContainment => PmmsnpVerdict::NoContainment,
            Verdict::TractableAip => PmmsnpVerdict::TractableAip,
            Verdict::HardUnderRich2to1 => PmmsnpVerdict::HardUnderRich2to1,
        };
        if !out_boundary.is_null() {
            *out_boundary = v.boundary;
        }
        Ok(())
    })
}

/// Parses a structure from JSON `{"domain": n, "relations": {...}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_structure_from_json(json: *const c_char, out: *mut *mut PmmsnpStructure) -> PmmsnpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let s: RelStructure = serde_json::from_str(text).map_err(|e| (PmmsnpStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(PmmsnpStructure(s)));
        Ok(())
    })
}

/// # Safety
/// `s` must come from [`pmmsnp_structure_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_structure_free(s: *mut PmmsnpStructure) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// # Safety
/// `s` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_structure_domain_size(s: *const PmmsnpStructure) -> usize {
    s.as_ref().map_or(0, |s| s.0.domain_size())
}

/// Serializes a structure to a newly allocated JSON string, released with
/// [`pmmsnp_string_free`]. Returns null on a null handle.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_structure_to_json(s: *const PmmsnpStructure) -> *mut c_char {
    match s.as_ref().and_then(|s| serde_json::to_string(&s.0).ok()) {
        Some(text) => CString::new(text).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Sets `out` to whether every set of at most `bound` tuples spans more
/// elements than the sum of their arities minus one.
///
/// # Safety
/// `s` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_girth_exceeds(s: *const PmmsnpStructure, bound: usize, out: *mut bool) -> PmmsnpStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("structure"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = girth_exceeds(&s.0, bound).verdict;
        Ok(())
    })
}

/// Reconfigurability and all-splits BKLM-connectedness of a named relation
/// such as `"nae:2:3"`. Either output pointer may be null.
///
/// # Safety
/// `spec` must be a NUL-terminated string; outputs must be valid or null.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_relation_connectivity(
    spec: *const c_char,
    out_reconfigurable: *mut bool,
    out_bklm: *mut bool,
) -> PmmsnpStatus {
    guard(|| {
        let spec = read_str(spec, "spec")?;
        let rel = spec.parse::<NamedRelation>().and_then(NamedRelation::relation).map_err(lib_err)?;
        if !out_reconfigurable.is_null() {
            *out_reconfigurable = is_reconfigurable(&rel);
        }
        if !out_bklm.is_null() {
            *out_bklm = is_bklm_connected(&rel).map_err(lib_err)?.connected;
        }
        Ok(())
    })
}

/// Parses a hypergraph from JSON `{"variables": n, "arity": r, "edges": [...]}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_hypergraph_from_json(json: *const c_char, out: *mut *mut PmmsnpHypergraph) -> PmmsnpStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let text = read_str(json, "json")?;
        let h: Hypergraph = serde_json::from_str(text).map_err(|e| (PmmsnpStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(PmmsnpHypergraph(h)));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`pmmsnp_hypergraph_from_json`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_hypergraph_free(h: *mut PmmsnpHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_hypergraph_variables(h: *const PmmsnpHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.0.variables())
}

/// Solves a tractable instance, writing one colour per variable into
/// `out_colours`, which must hold `out_len ≥ variables` entries.
///
/// # Safety
/// `h` must be a live handle; `out_colours` must point to `out_len` writable
/// entries.
#[no_mangle]
pub unsafe extern "C" fn pmmsnp_solve_tractable(
    h: *const PmmsnpHypergraph,
    c: usize,
    d: usize,
    k: usize,
    l: usize,
    out_colours: *mut usize,
    out_len: usize,
) -> PmmsnpStatus {
    guard(|| {
        let h = h.as_ref().ok_or_else(|| null("hypergraph"))?;
        if out_colours.is_null() {
            return Err(null("out_colours"));
        }
        if out_len < h.0.variables() {
            return Err((
                PmmsnpStatus::InvalidArgument,
                format!("output buffer holds {out_len} entries, {} needed", h.0.variables()),
            ));
        }
        let colouring = solve_tractable_pcsp(&h.0, c, d, k, l).map_err(lib_err)?;
        std::slice::from_raw_parts_mut(out_colours, colouring.len()).copy_from_slice(&colouring);
        Ok(())
    })
}
