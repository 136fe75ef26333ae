//! C ABI over `glat`.
//!
//! Lattices cross the boundary as opaque `GlatLattice` handles. Every
//! fallible call returns a `GlatStatus`; on failure the message is available
//! from `glat_last_error_message` on the same thread. Strings returned by the
//! library are released with `glat_string_free`, handles with
//! `glat_lattice_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use glat::cohomology::{h1_profile, CohomologyProfile};
use glat::error::Error;
use glat::lattice_file::{parse_lattice, write_lattice};
use glat::lattices::{dual, GLattice};
use glat::report::{self, Format};
use glat::resolutions::{flasque_resolution, is_coflasque, is_flasque, stably_permutation_verdict, StableSearchBounds};
use num_traits::ToPrimitive;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlatStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidParameter = 4,
    BufferTooSmall = 5,
    Overflow = 6,
    InternalError = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlatFormat {
    Human = 0,
    Kv = 1,
}

/// Opaque lattice handle.
pub struct GlatLattice {
    lattice: GLattice,
    profile: OnceLock<CohomologyProfile>,
    dual_profile: OnceLock<CohomologyProfile>,
}

impl GlatLattice {
    fn new(lattice: GLattice) -> *mut GlatLattice {
        Box::into_raw(Box::new(GlatLattice {
            lattice,
            profile: OnceLock::new(),
            dual_profile: OnceLock::new(),
        }))
    }

    fn profile(&self, dual_side: bool) -> Result<&CohomologyProfile, Failure> {
        let cell = if dual_side { &self.dual_profile } else { &self.profile };
        if let Some(p) = cell.get() {
            return Ok(p);
        }
        let p = if dual_side {
            h1_profile(&dual(&self.lattice))?
        } else {
            h1_profile(&self.lattice)?
        };
        Ok(cell.get_or_init(|| p))
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(GlatStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } => GlatStatus::ParseError,
            Error::Invariant(_) => GlatStatus::InternalError,
            _ => GlatStatus::InvalidParameter,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: GlatStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GlatStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            GlatStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside glat");
            GlatStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(GlatStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(GlatStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn handle<'a>(p: *const GlatLattice) -> Result<&'a GlatLattice, Failure> {
    p.as_ref()
        .map_or_else(|| fail(GlatStatus::NullPointer, "lattice handle is null"), Ok)
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .map_or_else(|| fail(GlatStatus::NullPointer, format!("{what} is null")), Ok)
}

fn into_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s)
        .map(CString::into_raw)
        .or_else(|_| fail(GlatStatus::InternalError, "output contains a NUL byte"))
}

/// Parses a lattice file (JSON) into a new handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_lattice_from_json(text: *const c_char, out: *mut *mut GlatLattice) -> GlatStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let lat = parse_lattice(str_arg(text, "text")?)?;
        *out = GlatLattice::new(lat);
        Ok(())
    })
}

/// Builds a gallery lattice: `"torus-pi"`, `"torus-w"` or `"trepalin"` (which uses `n`).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_lattice_gallery(name: *const c_char, n: u32, out: *mut *mut GlatLattice) -> GlatStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let lat = glat::gallery::by_name(str_arg(name, "name")?, Some(n as usize))?;
        *out = GlatLattice::new(lat);
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `lattice` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn glat_lattice_free(lattice: *mut GlatLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_lattice_rank(lattice: *const GlatLattice, out: *mut usize) -> GlatStatus {
    guard(|| {
        *out_ptr(out, "out")? = handle(lattice)?.lattice.rank();
        Ok(())
    })
}

/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_lattice_group_order(lattice: *const GlatLattice, out: *mut usize) -> GlatStatus {
    guard(|| {
        *out_ptr(out, "out")? = handle(lattice)?.lattice.group().order();
        Ok(())
    })
}

/// Serializes to the lattice file format; free the result with `glat_string_free`.
///
/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_lattice_to_json(lattice: *const GlatLattice, out: *mut *mut c_char) -> GlatStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        *out = into_c_string(write_lattice(&handle(lattice)?.lattice))?;
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn glat_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Number of subgroups; subgroup indices follow the canonical `(order, members)` order,
/// so the last index is the whole group.
///
/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_lattice_subgroup_count(lattice: *const GlatLattice, out: *mut usize) -> GlatStatus {
    guard(|| {
        let h = handle(lattice)?;
        *out_ptr(out, "out")? = glat::groups::subgroups(h.lattice.group()).len();
        Ok(())
    })
}

/// Invariant factors of H1 over subgroup `subgroup` (of the dual lattice if
/// `dual_side`). `*len` receives the number of factors, 0 for a trivial group.
/// Returns `BufferTooSmall` (with `*len` set) if `capacity` is too small.
///
/// # Safety
/// `lattice` must be a live handle, `len` a valid pointer, and `factors`
/// valid for `capacity` writes (it may be null when `capacity` is 0).
#[no_mangle]
pub unsafe extern "C" fn glat_h1_invariant_factors(
    lattice: *const GlatLattice,
    subgroup: usize,
    dual_side: bool,
    factors: *mut i64,
    capacity: usize,
    len: *mut usize,
) -> GlatStatus {
    guard(|| {
        let len = out_ptr(len, "len")?;
        let profile = handle(lattice)?.profile(dual_side)?;
        let Some(entry) = profile.entries.get(subgroup) else {
            return fail(
                GlatStatus::InvalidParameter,
                format!("subgroup index {subgroup} out of range ({} subgroups)", profile.entries.len()),
            );
        };
        let values = entry
            .invariant_factors
            .iter()
            .map(|d| d.to_i64().map_or_else(|| fail(GlatStatus::Overflow, format!("factor {d} exceeds i64")), Ok))
            .collect::<Result<Vec<i64>, Failure>>()?;
        *len = values.len();
        if values.len() > capacity {
            return fail(GlatStatus::BufferTooSmall, format!("{} factors, capacity {capacity}", values.len()));
        }
        if !values.is_empty() {
            if factors.is_null() {
                return fail(GlatStatus::NullPointer, "factors is null");
            }
            std::slice::from_raw_parts_mut(factors, values.len()).copy_from_slice(&values);
        }
        Ok(())
    })
}

/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_is_coflasque(lattice: *const GlatLattice, out: *mut bool) -> GlatStatus {
    guard(|| {
        *out_ptr(out, "out")? = is_coflasque(&handle(lattice)?.lattice)?.holds();
        Ok(())
    })
}

/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_is_flasque(lattice: *const GlatLattice, out: *mut bool) -> GlatStatus {
    guard(|| {
        *out_ptr(out, "out")? = is_flasque(&handle(lattice)?.lattice)?.holds();
        Ok(())
    })
}

/// Flasque resolution `0 -> M -> S -> F -> 0`; returns new handles for `S` and `F`.
///
/// # Safety
/// `lattice` must be a live handle; `s_out` and `f_out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn glat_flasque_resolution(
    lattice: *const GlatLattice,
    s_out: *mut *mut GlatLattice,
    f_out: *mut *mut GlatLattice,
) -> GlatStatus {
    guard(|| {
        let s_out = out_ptr(s_out, "s_out")?;
        let f_out = out_ptr(f_out, "f_out")?;
        *s_out = ptr::null_mut();
        *f_out = ptr::null_mut();
        let res = flasque_resolution(&handle(lattice)?.lattice)?;
        *s_out = GlatLattice::new(res.s);
        *f_out = GlatLattice::new(res.f);
        Ok(())
    })
}

/// Stable-permutation obstruction report. `rank_bound` 0 means rank + 8 and
/// `coeff_bound` 0 means the default. Free the result with `glat_string_free`.
///
/// # Safety
/// `lattice` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn glat_obstruction_report(
    lattice: *const GlatLattice,
    rank_bound: u32,
    coeff_bound: u32,
    format: GlatFormat,
    out: *mut *mut c_char,
) -> GlatStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let n = &handle(lattice)?.lattice;
        let mut bounds = StableSearchBounds::default_for(n.rank());
        if rank_bound > 0 {
            bounds.rank_bound = rank_bound as usize;
        }
        if coeff_bound > 0 {
            bounds.limits.coeff_bound = coeff_bound;
        }
        let rep = stably_permutation_verdict(n, &bounds)?;
        let fmt = match format {
            GlatFormat::Human => Format::Human,
            GlatFormat::Kv => Format::Kv,
        };
        *out = into_c_string(report::obstruction(n, &rep).render(fmt))?;
        Ok(())
    })
}

/// Message of the last failed call on this thread ("" after a success).
/// Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn glat_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
