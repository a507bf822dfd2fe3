//! C ABI over `ringfill`.
//!
//! Every function returns an [`RfStatus`]; on failure the message is
//! available from [`rf_last_error_message`] on the same thread. Handles are
//! opaque and must be released with [`rf_filling_free`]. Strings returned to
//! the caller are released with [`rf_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ringfill::analysis;
use ringfill::filling::{build_filling, predict_density, BuildResult, Params};
use ringfill::verify::{self, uniform_estimates};
use ringfill::{io, Error};

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ScheduleRejected = 3,
    CheckFailed = 4,
    BufferTooSmall = 5,
    Malformed = 6,
    Internal = 7,
    Panic = 8,
}

/// A built filling together with its schedule and layer ledger.
pub struct RfFilling {
    inner: BuildResult,
}

/// Exact Lipschitz constant `delta_num / delta_den` and the pair attaining it.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RfVerification {
    pub delta_num: u64,
    pub delta_den: u64,
    pub is_isometric: bool,
    pub worst_x: u32,
    pub worst_y: u32,
    pub worst_d_k: u32,
    pub worst_d_c: u32,
    pub pairs_checked: u64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct RfDriftSummary {
    pub annuli: u64,
    pub slanted_edges: u64,
    /// Whether every equal-length annulus attains its bound on every edge.
    pub equal_annuli_attain_bound: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let mut bytes = msg.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let c = CString::new(bytes).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> RfStatus {
    match e {
        Error::Schedule(_) => RfStatus::ScheduleRejected,
        Error::InvalidNumber(_) => RfStatus::InvalidArgument,
        Error::DriftViolation { .. } => RfStatus::CheckFailed,
        Error::Malformed(_) | Error::Json(_) => RfStatus::Malformed,
        _ => RfStatus::Internal,
    }
}

/// Runs `f`, records any error or panic, and maps it to a status.
fn guard(f: impl FnOnce() -> Result<(), RfStatus>) -> RfStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RfStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            RfStatus::Panic
        }
    }
}

fn fail(e: Error) -> RfStatus {
    set_error(e.to_string());
    status_of(&e)
}

fn null(what: &str) -> RfStatus {
    set_error(format!("{what} is null"));
    RfStatus::NullPointer
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, RfStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not UTF-8"));
        RfStatus::InvalidArgument
    })
}

unsafe fn handle<'a>(h: *const RfFilling) -> Result<&'a BuildResult, RfStatus> {
    h.as_ref().map(|f| &f.inner).ok_or_else(|| null("filling handle"))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, RfStatus> {
    p.as_mut().ok_or_else(|| null(what))
}

/// Builds `K_n`. `rho` and `eta` are decimal or `a/b` strings and are
/// parsed exactly. On success `*out` owns a new handle.
///
/// # Safety
/// `rho` and `eta` must be nul-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_build(n: u32, rho: *const c_char, eta: *const c_char, out: *mut *mut RfFilling) -> RfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let params = Params::parse(n, str_arg(rho, "rho")?, str_arg(eta, "eta")?).map_err(fail)?;
        let built = build_filling(&params).map_err(fail)?;
        *out = Box::into_raw(Box::new(RfFilling { inner: built }));
        Ok(())
    })
}

/// Parses a build document produced by [`rf_filling_to_json`].
///
/// # Safety
/// `json` must be a nul-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_from_json(json: *const c_char, out: *mut *mut RfFilling) -> RfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let built = io::build_from_json(str_arg(json, "json")?).map_err(fail)?;
        *out = Box::into_raw(Box::new(RfFilling { inner: built }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `h` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_free(h: *mut RfFilling) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_boundary_length(h: *const RfFilling, out: *mut u32) -> RfStatus {
    guard(|| {
        *out_ref(out, "out")? = handle(h)?.params.n;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_vertex_count(h: *const RfFilling, out: *mut u64) -> RfStatus {
    guard(|| {
        *out_ref(out, "out")? = handle(h)?.vertex_count() as u64;
        Ok(())
    })
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_triangle_count(h: *const RfFilling, out: *mut u64) -> RfStatus {
    guard(|| {
        *out_ref(out, "out")? = handle(h)?.complex.triangles().len() as u64;
        Ok(())
    })
}

/// `|V| / n^2`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_density(h: *const RfFilling, out: *mut f64) -> RfStatus {
    guard(|| {
        *out_ref(out, "out")? = handle(h)?.density();
        Ok(())
    })
}

/// Copies triangles as consecutive vertex-id triples into `buf`, which holds
/// `capacity` ids. `*written` receives the number of ids needed; when it
/// exceeds `capacity` nothing is copied and `BufferTooSmall` is returned.
/// `buf` may be null when `capacity` is 0, to query the size.
///
/// # Safety
/// `buf` must be writable for `capacity` ids; `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_copy_triangles(
    h: *const RfFilling,
    buf: *mut u32,
    capacity: usize,
    written: *mut usize,
) -> RfStatus {
    guard(|| {
        let written = out_ref(written, "written")?;
        let tris = handle(h)?.complex.triangles();
        let needed = tris.len() * 3;
        *written = needed;
        if needed > capacity {
            set_error(format!("buffer holds {capacity} ids, {needed} needed"));
            return Err(RfStatus::BufferTooSmall);
        }
        if needed > 0 && buf.is_null() {
            return Err(null("buf"));
        }
        let dst = std::slice::from_raw_parts_mut(buf, needed);
        for (chunk, tri) in dst.chunks_exact_mut(3).zip(tris) {
            chunk.copy_from_slice(&tri.vertices());
        }
        Ok(())
    })
}

/// Exact all-pairs boundary verification. Returns `Ok` whether or not the
/// filling is isometric; inspect `is_isometric`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_verify(h: *const RfFilling, out: *mut RfVerification) -> RfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let r = verify::verify_filling(&handle(h)?.complex).map_err(fail)?;
        *out = RfVerification {
            delta_num: r.delta.num,
            delta_den: r.delta.den,
            is_isometric: r.is_isometric,
            worst_x: r.worst_pair.x,
            worst_y: r.worst_pair.y,
            worst_d_k: r.worst_pair.d_k,
            worst_d_c: r.worst_pair.d_c,
            pairs_checked: r.pairs_checked,
        };
        Ok(())
    })
}

/// Exact rational drift audit. Returns `CheckFailed` on the first edge that
/// exceeds its bound.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_drift_audit(h: *const RfFilling, out: *mut RfDriftSummary) -> RfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let audit = verify::drift_audit(handle(h)?).map_err(fail)?;
        *out = RfDriftSummary {
            annuli: audit.annuli.len() as u64,
            slanted_edges: audit.annuli.iter().map(|a| a.slanted_edges as u64).sum(),
            equal_annuli_attain_bound: audit.equal_annuli_attain_bound(),
        };
        Ok(())
    })
}

/// Largest discrepancy between the stepwise profile and its continuum limit.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_eps_n(h: *const RfFilling, out: *mut f64) -> RfStatus {
    guard(|| {
        *out_ref(out, "out")? = uniform_estimates(handle(h)?).eps_n;
        Ok(())
    })
}

/// Serialises the filling with its schedule. Release with [`rf_string_free`].
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_filling_to_json(h: *const RfFilling, out: *mut *mut c_char) -> RfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        *out = ptr::null_mut();
        let text = io::build_to_json(handle(h)?).map_err(fail)?;
        *out = CString::new(text).map_err(|_| RfStatus::Internal)?.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library, or be null.
#[no_mangle]
pub unsafe extern "C" fn rf_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `rho + (1 - eta^3) / 6`, the asymptotic density of the construction.
///
/// # Safety
/// `rho` and `eta` must be nul-terminated strings; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_density_bound(rho: *const c_char, eta: *const c_char, out: *mut f64) -> RfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let params = Params::parse(3, str_arg(rho, "rho")?, str_arg(eta, "eta")?).map_err(fail)?;
        *out = predict_density(&params).bound_f64();
        Ok(())
    })
}

/// `(delta^3 / 8)(n - 1)^2 + (n - 1)/2`, the size any `delta`-Lipschitz
/// filling of `C_n` must reach.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rf_lower_bound(n: u32, delta: f64, out: *mut f64) -> RfStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        if !(delta > 0.0 && delta <= 1.0) {
            set_error(format!("delta = {delta} must lie in (0, 1]"));
            return Err(RfStatus::InvalidArgument);
        }
        *out = analysis::lower_bound(n, delta);
        Ok(())
    })
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rf_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn rf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
