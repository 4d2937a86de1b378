//! C interface. Every fallible call returns a `BpnetStatus`; on failure the
//! message is available from `bpnet_last_error` until the next call on the
//! same thread. Handles are owned by the caller and released with the
//! matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bpnet::equiv::{compare, default_shared};
use bpnet::models::{Model, ModelError, ModelRef};
use bpnet::statespace::{reduce_helper, Format, Guards, Lts, StateSpaceError};
use bpnet::PetriNet;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpnetStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    GuardExceeded = 4,
    InvalidModel = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BpnetFormat {
    Dot = 0,
    Json = 1,
}

/// Opaque model handle.
pub struct BpnetModel {
    model: Model,
}

/// Opaque state-graph handle.
pub struct BpnetLts {
    lts: Lts,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

type Failure = (BpnetStatus, String);

fn guarded(f: impl FnOnce() -> Result<(), Failure>) -> BpnetStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => BpnetStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            BpnetStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err((BpnetStatus::NullArgument, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| (BpnetStatus::InvalidUtf8, e.to_string()))
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or((BpnetStatus::NullArgument, "null handle".into()))
}

fn out_ptr<T>(out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        Err((BpnetStatus::NullArgument, "null output pointer".into()))
    } else {
        Ok(())
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("no interior nul").into_raw()
}

/// Message of the last failed call on this thread, or null. Borrowed; do not free.
#[no_mangle]
pub extern "C" fn bpnet_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a model from a reference such as `lc:bp:original:2,faults`.
///
/// # Safety
/// `reference` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bpnet_model_from_ref(reference: *const c_char, out: *mut *mut BpnetModel) -> BpnetStatus {
    guarded(|| {
        out_ptr(out)?;
        let r: ModelRef = text(reference)?.parse().map_err(|e: ModelError| (BpnetStatus::ParseError, e.to_string()))?;
        let model = r.build().map_err(|e| (BpnetStatus::InvalidModel, e.to_string()))?;
        *out = Box::into_raw(Box::new(BpnetModel { model }));
        Ok(())
    })
}

/// Parses a net from its JSON form.
///
/// # Safety
/// `json` must be a valid C string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bpnet_model_from_pn_json(json: *const c_char, out: *mut *mut BpnetModel) -> BpnetStatus {
    guarded(|| {
        out_ptr(out)?;
        let net = PetriNet::from_json(text(json)?).map_err(|e| (BpnetStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(BpnetModel { model: Model::Pn(net) }));
        Ok(())
    })
}

/// # Safety
/// `model` must come from a `bpnet_model_from_*` call, or be null.
#[no_mangle]
pub unsafe extern "C" fn bpnet_model_free(model: *mut BpnetModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Explores the reachable state graph. Zero limits select the defaults.
///
/// # Safety
/// `model` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bpnet_model_build_lts(
    model: *const BpnetModel,
    max_states: u64,
    max_tokens: u64,
    out: *mut *mut BpnetLts,
) -> BpnetStatus {
    guarded(|| {
        out_ptr(out)?;
        let m = handle(model)?;
        let d = Guards::default();
        let guards = Guards {
            max_states: if max_states == 0 { d.max_states } else { max_states },
            max_tokens: if max_tokens == 0 { d.max_tokens } else { max_tokens },
        };
        let lts = m.model.lts(guards).map_err(|e| {
            let status = match e {
                StateSpaceError::GuardExceeded { .. } => BpnetStatus::GuardExceeded,
                _ => BpnetStatus::InvalidModel,
            };
            (status, e.to_string())
        })?;
        *out = Box::into_raw(Box::new(BpnetLts { lts }));
        Ok(())
    })
}

/// Removes the model's helper events from `lts`, producing a new graph.
///
/// # Safety
/// `model` and `lts` must be live handles and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bpnet_lts_reduce_helper(
    model: *const BpnetModel,
    lts: *const BpnetLts,
    out: *mut *mut BpnetLts,
) -> BpnetStatus {
    guarded(|| {
        out_ptr(out)?;
        let (m, l) = (handle(model)?, handle(lts)?);
        let lts = reduce_helper(&l.lts, &m.model.helpers()).map_err(|e| (BpnetStatus::InvalidModel, e.to_string()))?;
        *out = Box::into_raw(Box::new(BpnetLts { lts }));
        Ok(())
    })
}

/// # Safety
/// `lts` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn bpnet_lts_num_states(lts: *const BpnetLts) -> usize {
    lts.as_ref().map_or(0, |l| l.lts.num_states())
}

/// # Safety
/// `lts` must be a live handle or null (which yields 0).
#[no_mangle]
pub unsafe extern "C" fn bpnet_lts_num_transitions(lts: *const BpnetLts) -> usize {
    lts.as_ref().map_or(0, |l| l.lts.num_edges())
}

/// Renders the graph; release the string with `bpnet_string_free`.
///
/// # Safety
/// `lts` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bpnet_lts_export(lts: *const BpnetLts, format: BpnetFormat, out: *mut *mut c_char) -> BpnetStatus {
    guarded(|| {
        out_ptr(out)?;
        let l = handle(lts)?;
        let f = match format {
            BpnetFormat::Dot => Format::Dot,
            BpnetFormat::Json => Format::Json,
        };
        *out = into_c_string(l.lts.export(f));
        Ok(())
    })
}

/// # Safety
/// `lts` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn bpnet_lts_free(lts: *mut BpnetLts) {
    if !lts.is_null() {
        drop(Box::from_raw(lts));
    }
}

/// Compares two graphs on their shared non-helper events and writes the JSON
/// report to `out` (free with `bpnet_string_free`).
///
/// # Safety
/// All handles must be live and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn bpnet_compare(
    left_model: *const BpnetModel,
    left: *const BpnetLts,
    right_model: *const BpnetModel,
    right: *const BpnetLts,
    out: *mut *mut c_char,
) -> BpnetStatus {
    guarded(|| {
        out_ptr(out)?;
        let (ma, la, mb, lb) = (handle(left_model)?, handle(left)?, handle(right_model)?, handle(right)?);
        let helpers = ma.model.helpers().into_iter().chain(mb.model.helpers()).collect();
        let shared = default_shared(&la.lts, &lb.lts, &helpers);
        *out = into_c_string(compare(&la.lts, &lb.lts, &shared).to_json());
        Ok(())
    })
}

/// # Safety
/// `s` must be a string returned by this library, or null.
#[no_mangle]
pub unsafe extern "C" fn bpnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
