//! C ABI over the warpcone library.
//!
//! Objects are opaque handles returned through out-pointers and
//! released with the matching `wc_*_free`. Every fallible call returns a
//! [`WcStatus`]; on failure the message is kept per thread and can be read
//! with [`wc_last_error`]. Handles are immutable once built and may be
//! shared between threads.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;
use std::sync::Arc;

use warpcone::actions::{ActionModel, GroupPresentation, Turn};
use warpcone::harness::{run_scenario, Overrides};
use warpcone::spaces::{build_net, FiniteSpace, Model};
use warpcone::spectral::{level_graph, schreier_family, spectral_gap, SpectralReport};
use warpcone::warp::{BaseEdgeRule, WarpedLevel, DEFAULT_COMPLETE_CAP};
use warpcone::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Unsupported = 3,
    CapExceeded = 4,
    MetricViolation = 5,
    Injectivity = 6,
    Config = 7,
    Parse = 8,
    Io = 9,
    OutOfRange = 10,
    Utf8 = 11,
    /// Some declared check of a scenario run failed.
    AssertionFailed = 12,
    Panic = 13,
}

impl From<&Error> for WcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::DeltaAboveThreshold { .. } => WcStatus::InvalidParameter,
            Error::UnsupportedKind(_) => WcStatus::Unsupported,
            Error::CapExceeded { .. } => WcStatus::CapExceeded,
            Error::MetricViolation(_) | Error::NotInvariant(_) => WcStatus::MetricViolation,
            Error::Injectivity(_) => WcStatus::Injectivity,
            Error::Config(_) => WcStatus::Config,
            Error::Parse { .. } => WcStatus::Parse,
            Error::Io(_) => WcStatus::Io,
            Error::Assertion { .. } => WcStatus::AssertionFailed,
        }
    }
}

/// A finite net of a compact metric space.
pub struct WcSpace(Arc<FiniteSpace>);

/// A group action on a space handle.
pub struct WcAction(Arc<ActionModel>);

/// One level of the warped cone, with all pairwise distances.
pub struct WcLevel(WarpedLevel);

/// Spectral summary of a graph.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct WcSpectrum {
    pub vertices: usize,
    pub components: usize,
    pub lambda1_norm: f64,
    pub lambda1_comb: f64,
    pub cheeger_lower: f64,
    pub cheeger_upper: f64,
    /// Distortion lower bound, or NaN when not computed.
    pub d_lb: f64,
}

impl From<&SpectralReport> for WcSpectrum {
    fn from(r: &SpectralReport) -> Self {
        WcSpectrum {
            vertices: r.vertex_count,
            components: r.components,
            lambda1_norm: r.lambda1_norm,
            lambda1_comb: r.lambda1_comb,
            cheeger_lower: r.cheeger_lower,
            cheeger_upper: r.cheeger_upper,
            d_lb: r.d_lb.unwrap_or(f64::NAN),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(WcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(WcStatus::from(&e), e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn guard(f: impl FnOnce() -> Outcome) -> WcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            WcStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            WcStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(WcStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> std::result::Result<&'a T, Failure> {
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &str) -> std::result::Result<&'a mut T, Failure> {
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> std::result::Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure(WcStatus::Utf8, format!("`{what}` is not UTF-8")))
}

fn boxed<T>(value: T) -> *mut T {
    Box::into_raw(Box::new(value))
}

/// Copy the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len` bytes). Returns the length the full
/// message needs including the terminator, or 0 when there is none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wc_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes_with_nul();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len);
                unsafe {
                    ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                    *buf.add(n - 1) = 0;
                }
            }
            bytes.len()
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn wc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Uniform grid net of `resolution^dim` points on the flat torus.
///
/// # Safety
/// `space_out` must be null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_space_torus(dim: usize, resolution: usize, space_out: *mut *mut WcSpace) -> WcStatus {
    guard(|| {
        let slot = unsafe { out(space_out, "space_out") }?;
        let net = build_net(&Model::Torus { dim }, resolution, 0)?;
        *slot = boxed(WcSpace(Arc::new(net)));
        Ok(())
    })
}

/// # Safety
/// `space` must be null or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wc_space_free(space: *mut WcSpace) {
    if !space.is_null() {
        drop(unsafe { Box::from_raw(space) });
    }
}

/// Number of net points, or 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wc_space_len(space: *const WcSpace) -> usize {
    unsafe { space.as_ref() }.map_or(0, |s| s.0.len())
}

/// # Safety
/// `space` must be a live handle and `dist_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_space_dist(space: *const WcSpace, i: usize, j: usize, dist_out: *mut f64) -> WcStatus {
    guard(|| {
        let s = unsafe { deref(space, "space") }?;
        let slot = unsafe { out(dist_out, "dist_out") }?;
        let n = s.0.len();
        if i >= n || j >= n {
            return Err(Failure(WcStatus::OutOfRange, format!("({i}, {j}) outside a net of {n} points")));
        }
        *slot = s.0.dist(i, j);
        Ok(())
    })
}

/// Rotation of the torus by one turn per coordinate. Each turn is a
/// string `p/q`, `golden` or a decimal number of full turns.
///
/// # Safety
/// `space` must be a live handle, `turns` must point to `count` valid
/// C strings and `action_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_action_rotation(
    space: *const WcSpace,
    turns: *const *const c_char,
    count: usize,
    action_out: *mut *mut WcAction,
) -> WcStatus {
    guard(|| {
        let s = unsafe { deref(space, "space") }?;
        let slot = unsafe { out(action_out, "action_out") }?;
        if turns.is_null() && count > 0 {
            return Err(null("turns"));
        }
        let mut parsed = Vec::with_capacity(count);
        for k in 0..count {
            let t: Turn = unsafe { text(*turns.add(k), "turns[k]") }?.parse()?;
            parsed.push(t);
        }
        let action = ActionModel::rotation(Arc::clone(&s.0), parsed)?;
        *slot = boxed(WcAction(Arc::new(action)));
        Ok(())
    })
}

/// Standard action of SL(2, Z) on the 2-torus.
///
/// # Safety
/// `space` must be a live handle and `action_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_action_sl2(space: *const WcSpace, action_out: *mut *mut WcAction) -> WcStatus {
    guard(|| {
        let s = unsafe { deref(space, "space") }?;
        let slot = unsafe { out(action_out, "action_out") }?;
        *slot = boxed(WcAction(Arc::new(ActionModel::sl2_torus(Arc::clone(&s.0))?)));
        Ok(())
    })
}

/// Action of the trivial group.
///
/// # Safety
/// `space` must be a live handle and `action_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_action_trivial(space: *const WcSpace, action_out: *mut *mut WcAction) -> WcStatus {
    guard(|| {
        let s = unsafe { deref(space, "space") }?;
        let slot = unsafe { out(action_out, "action_out") }?;
        *slot = boxed(WcAction(Arc::new(ActionModel::trivial(Arc::clone(&s.0))?)));
        Ok(())
    })
}

/// # Safety
/// `action` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wc_action_free(action: *mut WcAction) {
    if !action.is_null() {
        drop(unsafe { Box::from_raw(action) });
    }
}

/// Warped distances at level `level` with the complete base graph.
///
/// # Safety
/// `action` must be a live handle and `level_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_level_build(action: *const WcAction, level: f64, level_out: *mut *mut WcLevel) -> WcStatus {
    guard(|| {
        let a = unsafe { deref(action, "action") }?;
        let slot = unsafe { out(level_out, "level_out") }?;
        let lv = WarpedLevel::build(Arc::clone(&a.0), level, BaseEdgeRule::Complete, DEFAULT_COMPLETE_CAP)?;
        *slot = boxed(WcLevel(lv));
        Ok(())
    })
}

/// # Safety
/// `level` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wc_level_free(level: *mut WcLevel) {
    if !level.is_null() {
        drop(unsafe { Box::from_raw(level) });
    }
}

/// Number of net points, or 0 for a null handle.
///
/// # Safety
/// `level` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn wc_level_len(level: *const WcLevel) -> usize {
    unsafe { level.as_ref() }.map_or(0, |l| l.0.len())
}

/// # Safety
/// `level` must be a live handle and `dist_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_level_dist(level: *const WcLevel, i: usize, j: usize, dist_out: *mut f64) -> WcStatus {
    guard(|| {
        let l = unsafe { deref(level, "level") }?;
        let slot = unsafe { out(dist_out, "dist_out") }?;
        let n = l.0.len();
        if i >= n || j >= n {
            return Err(Failure(WcStatus::OutOfRange, format!("({i}, {j}) outside a net of {n} points")));
        }
        *slot = l.0.dist(i, j);
        Ok(())
    })
}

/// Spectrum of the level graph at `level`: unit shortcuts plus base pairs
/// at scaled distance at most 1.
///
/// # Safety
/// `action` must be a live handle and `spectrum_out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_level_spectrum(action: *const WcAction, level: f64, spectrum_out: *mut WcSpectrum) -> WcStatus {
    guard(|| {
        let a = unsafe { deref(action, "action") }?;
        let slot = unsafe { out(spectrum_out, "spectrum_out") }?;
        if !(level > 0.0) {
            return Err(Failure(WcStatus::InvalidParameter, format!("level {level} is not positive")));
        }
        *slot = WcSpectrum::from(&spectral_gap(&level_graph(&a.0, level)));
        Ok(())
    })
}

/// Spectrum of the SL(2, Z) Schreier graph on the orbit of `(1, 0)` in
/// `(Z/n)^2`, including its distortion lower bound.
///
/// # Safety
/// `spectrum_out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn wc_schreier_spectrum(modulus: u64, spectrum_out: *mut WcSpectrum) -> WcStatus {
    guard(|| {
        let slot = unsafe { out(spectrum_out, "spectrum_out") }?;
        let fam = schreier_family(&GroupPresentation::sl2(), &[modulus])?;
        *slot = WcSpectrum::from(&fam.reports[0]);
        Ok(())
    })
}

/// Run a scenario file, writing its CSV and manifest into `out_dir` (or
/// the directory the scenario names when null). Returns
/// `WC_STATUS_ASSERTION_FAILED` when the run completed but a check failed.
///
/// # Safety
/// `config_path` must be a valid C string; `out_dir` must be null or one.
#[no_mangle]
pub unsafe extern "C" fn wc_run_scenario(config_path: *const c_char, out_dir: *const c_char) -> WcStatus {
    guard(|| {
        let config = PathBuf::from(unsafe { text(config_path, "config_path") }?);
        let out_dir = if out_dir.is_null() {
            None
        } else {
            Some(PathBuf::from(unsafe { text(out_dir, "out_dir") }?))
        };
        let overrides = Overrides {
            out: out_dir,
            ..Overrides::default()
        };
        let outcome = run_scenario(&config, &overrides)?;
        let failed: Vec<_> = outcome
            .manifest
            .assertions
            .iter()
            .filter(|a| !a.passed)
            .map(|a| a.invariant.as_str())
            .collect();
        if failed.is_empty() {
            Ok(())
        } else {
            Err(Failure(WcStatus::AssertionFailed, format!("failed checks: {}", failed.join("; "))))
        }
    })
}
