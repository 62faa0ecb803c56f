//! C ABI over `amd-core`. Polytopes are opaque handles; every function
//! returns an [`AmdStatus`] and writes results through out-pointers. On
//! failure a message is available from [`amd_last_error_message`] until the
//! next call on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::ops::ControlFlow;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use amd_core::amd::{AmdEngine, AmdOptions, PolytopeContext};
use amd_core::error::{AmdError, GeometryError};
use amd_core::geometry::LatticePolytope3;
use amd_core::invariants::betti_numbers;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmdStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NotReflexive = 3,
    Internal = 4,
    Panic = 5,
}

/// Opaque polytope handle.
pub struct AmdPolytope {
    polytope: LatticePolytope3,
    context: OnceLock<Result<PolytopeContext, AmdError>>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn fail(status: AmdStatus, msg: impl Into<String>) -> AmdStatus {
    set_error(msg);
    status
}

fn status_of(e: &AmdError) -> AmdStatus {
    match e {
        AmdError::Geometry(GeometryError::NotReflexive)
        | AmdError::Geometry(GeometryError::OriginNotInterior)
        | AmdError::Geometry(GeometryError::FacetDistance { .. }) => AmdStatus::NotReflexive,
        AmdError::Geometry(_) => AmdStatus::InvalidInput,
        _ => AmdStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> AmdStatus) -> AmdStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(AmdStatus::Panic, "panic in amd-core"))
}

impl AmdPolytope {
    fn context(&self) -> Result<&PolytopeContext, AmdStatus> {
        self.context
            .get_or_init(|| PolytopeContext::new(&self.polytope, 0))
            .as_ref()
            .map_err(|e| fail(status_of(e), e.to_string()))
    }
}

/// Build a polytope from `n` vertices given as `3 * n` coordinates
/// `x0 y0 z0 x1 ...`. The handle must be released with
/// [`amd_polytope_free`].
///
/// # Safety
/// `coords` must point to `3 * n` readable values and `out` must be valid
/// for writing.
#[no_mangle]
pub unsafe extern "C" fn amd_polytope_new(coords: *const i64, n: usize, out: *mut *mut AmdPolytope) -> AmdStatus {
    guard(|| {
        if coords.is_null() || out.is_null() {
            return fail(AmdStatus::NullPointer, "null pointer argument");
        }
        let Some(len) = n.checked_mul(3) else {
            return fail(AmdStatus::InvalidInput, "vertex count overflows");
        };
        let flat = std::slice::from_raw_parts(coords, len);
        let pts: Vec<[i64; 3]> = flat.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        match LatticePolytope3::hull(&pts) {
            Ok(polytope) => {
                *out = Box::into_raw(Box::new(AmdPolytope {
                    polytope,
                    context: OnceLock::new(),
                }));
                AmdStatus::Ok
            }
            Err(e) => fail(AmdStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `p` must come from [`amd_polytope_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn amd_polytope_free(p: *mut AmdPolytope) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn amd_polytope_is_reflexive(p: *const AmdPolytope, out: *mut bool) -> AmdStatus {
    guard(|| {
        let (Some(p), false) = (p.as_ref(), out.is_null()) else {
            return fail(AmdStatus::NullPointer, "null pointer argument");
        };
        *out = p.polytope.is_reflexive();
        AmdStatus::Ok
    })
}

/// Number of amd, stopping at `limit` (0 for no limit); with `dedup`,
/// amd differing by a relabeling of summands count once.
///
/// # Safety
/// `p` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn amd_polytope_count_amd(
    p: *const AmdPolytope,
    limit: u64,
    dedup: bool,
    out: *mut u64,
) -> AmdStatus {
    guard(|| {
        let (Some(p), false) = (p.as_ref(), out.is_null()) else {
            return fail(AmdStatus::NullPointer, "null pointer argument");
        };
        let ctx = match p.context() {
            Ok(c) => c,
            Err(s) => return s,
        };
        let opts = AmdOptions {
            limit: limit as usize,
            dedup,
            ..AmdOptions::default()
        };
        match AmdEngine::new(ctx).count(&opts) {
            Ok(n) => {
                *out = n;
                AmdStatus::Ok
            }
            Err(e) => fail(status_of(&e), e.to_string()),
        }
    })
}

/// JSON array with the smoothing invariants of each amd (at most `limit`,
/// 0 for all). Release the string with [`amd_string_free`].
///
/// # Safety
/// `p` must be a live handle and `out` valid for writing.
#[no_mangle]
pub unsafe extern "C" fn amd_polytope_invariants_json(
    p: *const AmdPolytope,
    limit: u64,
    out: *mut *mut c_char,
) -> AmdStatus {
    guard(|| {
        let (Some(p), false) = (p.as_ref(), out.is_null()) else {
            return fail(AmdStatus::NullPointer, "null pointer argument");
        };
        let ctx = match p.context() {
            Ok(c) => c,
            Err(s) => return s,
        };
        let opts = AmdOptions {
            limit: limit as usize,
            ..AmdOptions::default()
        };
        let mut items = Vec::new();
        let mut err = None;
        let walk = AmdEngine::new(ctx).for_each(&opts, |a| match betti_numbers(ctx, a) {
            Ok(inv) => {
                items.push(inv);
                ControlFlow::Continue(())
            }
            Err(e) => {
                err = Some(e);
                ControlFlow::Break(())
            }
        });
        if let Some(e) = walk.err().or(err) {
            return fail(status_of(&e), e.to_string());
        }
        let text = serde_json::to_string(&items).expect("serializable");
        *out = CString::new(text).expect("no interior nul").into_raw();
        AmdStatus::Ok
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn amd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn amd_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
