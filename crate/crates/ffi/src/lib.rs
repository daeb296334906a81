//! C ABI over `hgctrl`.
//!
//! Objects cross the boundary as opaque handles that the caller frees with
//! the matching `*_free` function. Every fallible call returns an
//! [`HgStatus`]; on failure [`hg_last_error`] describes the problem until the
//! next call on the same thread. Node ids are 1-based on this side too.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hgctrl::gen::{generate, GenConfig, Topology};
use hgctrl::hgraph::{parse_hypergraph, read_hypergraph, render_hypergraph};
use hgctrl::oracle::cross_validate;
use hgctrl::{
    matching_lower_bound, select, verify_structural_controllability, DirectedHypergraph, Error, Method, NodeId,
    SelectionResult,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Validation = 3,
    Capacity = 4,
    Parse = 5,
    Io = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgMethod {
    Matching = 0,
    Greedy = 1,
    Mag = 2,
    Optimal = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HgTopology {
    Uniform = 0,
    ScaleFree = 1,
    Clustered = 2,
    SmallWorld = 3,
}

/// Opaque hypergraph handle.
pub struct HgHypergraph(DirectedHypergraph);

/// Opaque selection result.
pub struct HgSelection {
    result: SelectionResult,
    labels: Vec<u32>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: HgStatus, msg: impl Into<String>) -> HgStatus {
    set_error(msg.into());
    status
}

fn status_of(e: &Error) -> HgStatus {
    match e {
        Error::Validation(_) => HgStatus::Validation,
        Error::Capacity { .. } => HgStatus::Capacity,
        Error::Parse { .. } => HgStatus::Parse,
        Error::Io(_) | Error::Csv(_) => HgStatus::Io,
    }
}

struct Failure(HgStatus, String);

type Outcome = Result<(), Failure>;

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Outcome) -> HgStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HgStatus::Ok,
        Ok(Err(Failure(status, msg))) => fail(status, msg),
        Err(_) => fail(HgStatus::Panic, "internal panic"),
    }
}

fn null(what: &str) -> Failure {
    Failure(HgStatus::NullArgument, format!("{what} is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(HgStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn graph_arg<'a>(h: *const HgHypergraph) -> Result<&'a DirectedHypergraph, Failure> {
    h.as_ref().map(|h| &h.0).ok_or_else(|| null("hypergraph"))
}

unsafe fn drivers_arg(ids: *const u32, len: usize) -> Result<Vec<NodeId>, Failure> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if ids.is_null() {
        return Err(null("driver array"));
    }
    std::slice::from_raw_parts(ids, len)
        .iter()
        .map(|&l| NodeId::from_one_based(l as usize).map_err(Into::into))
        .collect()
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Outcome {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses the JSON interchange format.
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_hypergraph_from_json(json: *const c_char, out: *mut *mut HgHypergraph) -> HgStatus {
    guard(|| {
        let text = str_arg(json, "json")?;
        let (h, _) = parse_hypergraph(text)?;
        write_out(out, Box::into_raw(Box::new(HgHypergraph(h))))
    })
}

/// # Safety
/// `path` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_hypergraph_read(path: *const c_char, out: *mut *mut HgHypergraph) -> HgStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let h = read_hypergraph(path)?;
        write_out(out, Box::into_raw(Box::new(HgHypergraph(h))))
    })
}

/// # Safety
/// `h` must come from this library and not be used afterwards. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn hg_hypergraph_free(h: *mut HgHypergraph) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Canonical JSON text; release it with [`hg_string_free`].
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_hypergraph_to_json(h: *const HgHypergraph, out: *mut *mut c_char) -> HgStatus {
    guard(|| {
        let h = graph_arg(h)?;
        let text = CString::new(render_hypergraph(h, None)).expect("JSON has no nul bytes");
        write_out(out, text.into_raw())
    })
}

/// # Safety
/// `s` must come from this library. Null is a no-op.
#[no_mangle]
pub unsafe extern "C" fn hg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of state nodes, or 0 for null.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hg_hypergraph_num_nodes(h: *const HgHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.0.n())
}

/// Number of state hyperedges, or 0 for null.
///
/// # Safety
/// `h` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hg_hypergraph_num_edges(h: *const HgHypergraph) -> usize {
    h.as_ref().map_or(0, |h| h.0.num_state_edges())
}

/// Random hypergraph with default topology parameters.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_generate(
    topology: HgTopology,
    n: usize,
    k: usize,
    alpha: f64,
    seed: u64,
    out: *mut *mut HgHypergraph,
) -> HgStatus {
    guard(|| {
        let t = match topology {
            HgTopology::Uniform => Topology::Uniform,
            HgTopology::ScaleFree => Topology::ScaleFree,
            HgTopology::Clustered => Topology::Clustered,
            HgTopology::SmallWorld => Topology::SmallWorld,
        };
        let (h, _) = generate(&GenConfig::new(t, n, k, alpha, seed))?;
        write_out(out, Box::into_raw(Box::new(HgHypergraph(h))))
    })
}

/// Structural controllability of `h` with the given 1-based drivers.
///
/// # Safety
/// `h` must be a live handle, `drivers` must hold `len` values (or be null
/// when `len` is 0), and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_verify(
    h: *const HgHypergraph,
    drivers: *const u32,
    len: usize,
    out: *mut bool,
) -> HgStatus {
    guard(|| {
        let h = graph_arg(h)?;
        let d = drivers_arg(drivers, len)?;
        let r = verify_structural_controllability(h, &d)?;
        write_out(out, r.controllable)
    })
}

/// Matching lower bound on the number of drivers.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_lower_bound(h: *const HgHypergraph, out: *mut usize) -> HgStatus {
    guard(|| {
        let h = graph_arg(h)?;
        write_out(out, matching_lower_bound(h)?.count)
    })
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_select(h: *const HgHypergraph, method: HgMethod, out: *mut *mut HgSelection) -> HgStatus {
    guard(|| {
        let h = graph_arg(h)?;
        let m = match method {
            HgMethod::Matching => Method::Matching,
            HgMethod::Greedy => Method::Greedy,
            HgMethod::Mag => Method::Mag,
            HgMethod::Optimal => Method::Optimal,
        };
        let result = select(h, m)?;
        let labels = result.drivers.iter().map(|d| d.one_based() as u32).collect();
        write_out(out, Box::into_raw(Box::new(HgSelection { result, labels })))
    })
}

/// 1-based driver ids, ascending. The array lives as long as `s`.
///
/// # Safety
/// `s` must be a live handle; `len` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_selection_drivers(s: *const HgSelection, len: *mut usize) -> *const u32 {
    match (s.as_ref(), len.is_null()) {
        (Some(s), false) => {
            len.write(s.labels.len());
            s.labels.as_ptr()
        }
        _ => ptr::null(),
    }
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hg_selection_controllable(s: *const HgSelection) -> bool {
    s.as_ref().is_some_and(|s| s.result.controllable)
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hg_selection_lower_bound(s: *const HgSelection) -> usize {
    s.as_ref().map_or(0, |s| s.result.lower_bound)
}

/// # Safety
/// `s` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hg_selection_runtime_ms(s: *const HgSelection) -> f64 {
    s.as_ref().map_or(0.0, |s| s.result.runtime.as_secs_f64() * 1e3)
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn hg_selection_free(s: *mut HgSelection) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Fraction of `trials` random realizations reaching full controllability
/// rank. Writes NaN when `trials` is 0.
///
/// # Safety
/// As for [`hg_verify`].
#[no_mangle]
pub unsafe extern "C" fn hg_oracle_fraction(
    h: *const HgHypergraph,
    drivers: *const u32,
    len: usize,
    trials: usize,
    seed: u64,
    out: *mut f64,
) -> HgStatus {
    guard(|| {
        let h = graph_arg(h)?;
        let d = drivers_arg(drivers, len)?;
        h.check_state_nodes(&d, "driver")?;
        let r = cross_validate(&h.to_pattern(), &d, trials, seed)?;
        write_out(out, r.fraction_full_rank.unwrap_or(f64::NAN))
    })
}
