//! C ABI over `mskit`.
//!
//! Objects are opaque handles owned by the caller and released with the
//! matching `*_free`. Every fallible call returns an [`MskitStatus`]; on
//! failure the message is available from [`mskit_last_error`] on the same
//! thread. Strings returned through `out` parameters are NUL-terminated UTF-8
//! and must be released with [`mskit_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mskit::brauer::{build_algebra, BrauerConfiguration};
use mskit::format;
use mskit::presentation::SpecialPresentation;
use mskit::random::{self, ConfigParams};
use mskit::recovery::{config_isomorphic, recover_configuration};
use mskit::scalar::Field;
use mskit::Error;

/// Result of an FFI call. Nonzero values match the command-line exit codes
/// where one exists.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MskitStatus {
    Ok = 0,
    Parse = 1,
    Invalid = 2,
    Obstruction = 3,
    Checker = 4,
    NullPointer = 5,
    Utf8 = 6,
    Panic = 7,
}

/// A validated Brauer configuration.
pub struct MskitConfig(BrauerConfiguration);

/// A special-shape presentation of an algebra.
pub struct MskitPresentation(SpecialPresentation);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: MskitStatus, message: impl Into<String>) -> MskitStatus {
    set_error(message.into());
    status
}

fn from_error(e: Error) -> MskitStatus {
    let status = match e.exit_code() {
        1 => MskitStatus::Parse,
        2 => MskitStatus::Invalid,
        3 => MskitStatus::Obstruction,
        _ => MskitStatus::Checker,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into `MskitStatus::Panic`.
fn guard(f: impl FnOnce() -> Result<(), MskitStatus>) -> MskitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MskitStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => fail(MskitStatus::Panic, "internal panic"),
    }
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, MskitStatus> {
    if s.is_null() {
        return Err(fail(MskitStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(MskitStatus::Utf8, "string is not valid UTF-8"))
}

unsafe fn handle<'a, T>(h: *const T) -> Result<&'a T, MskitStatus> {
    h.as_ref().ok_or_else(|| fail(MskitStatus::NullPointer, "null handle"))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), MskitStatus> {
    if out.is_null() {
        return Err(fail(MskitStatus::NullPointer, "null output pointer"));
    }
    out.write(value);
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), MskitStatus> {
    let c = CString::new(s).map_err(|_| fail(MskitStatus::Checker, "output contains NUL"))?;
    put(out, c.into_raw())
}

fn field(characteristic: u32) -> Result<Field, MskitStatus> {
    if characteristic == 0 {
        Ok(Field::Rationals)
    } else {
        Field::prime(characteristic).map_err(from_error)
    }
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn mskit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn mskit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses and validates `.bcfg` text.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_parse(src: *const c_char, out: *mut *mut MskitConfig) -> MskitStatus {
    guard(|| {
        let cfg = format::parse_config(text(src)?).map_err(from_error)?;
        cfg.check().map_err(from_error)?;
        put(out, Box::into_raw(Box::new(MskitConfig(cfg))))
    })
}

/// A seeded random configuration with at most `polygons` polygons, valencies
/// at most `max_val` and multiplicities at most `max_mu`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_random(
    seed: u64,
    polygons: usize,
    max_val: usize,
    max_mu: u32,
    out: *mut *mut MskitConfig,
) -> MskitStatus {
    guard(|| {
        let params = ConfigParams { polygons, max_val, max_mu };
        let cfg = random::random_configuration(&mut random::rng(seed), params).map_err(from_error)?;
        put(out, Box::into_raw(Box::new(MskitConfig(cfg))))
    })
}

/// # Safety
/// `cfg` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_free(cfg: *mut MskitConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

/// Number of vertices and polygons.
///
/// # Safety
/// `cfg` must be a live handle; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_counts(
    cfg: *const MskitConfig,
    vertices: *mut usize,
    polygons: *mut usize,
) -> MskitStatus {
    guard(|| {
        let cfg = &handle(cfg)?.0;
        put(vertices, cfg.vertex_count())?;
        put(polygons, cfg.polygons.len())
    })
}

/// `.bcfg` text of the configuration.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_to_text(cfg: *const MskitConfig, out: *mut *mut c_char) -> MskitStatus {
    guard(|| put_string(out, format::print_config(&handle(cfg)?.0)))
}

/// JSON export of the configuration.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_to_json(cfg: *const MskitConfig, out: *mut *mut c_char) -> MskitStatus {
    guard(|| put_string(out, format::config_json(&handle(cfg)?.0).to_string()))
}

/// The configuration algebra over Q (`characteristic == 0`) or F_p.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_build(
    cfg: *const MskitConfig,
    characteristic: u32,
    out: *mut *mut MskitPresentation,
) -> MskitStatus {
    guard(|| {
        let p = build_algebra(&handle(cfg)?.0, field(characteristic)?).map_err(from_error)?;
        put(out, Box::into_raw(Box::new(MskitPresentation(p))))
    })
}

/// Whether two configurations are isomorphic.
///
/// # Safety
/// Both handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_isomorphic(
    a: *const MskitConfig,
    b: *const MskitConfig,
    out: *mut bool,
) -> MskitStatus {
    guard(|| put(out, config_isomorphic(&handle(a)?.0, &handle(b)?.0)))
}

/// Builds the algebra and recovers it again; `out` is true when the result is
/// isomorphic to the input.
///
/// # Safety
/// `cfg` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_config_roundtrip(cfg: *const MskitConfig, characteristic: u32, out: *mut bool) -> MskitStatus {
    guard(|| {
        let cfg = &handle(cfg)?.0;
        let p = build_algebra(cfg, field(characteristic)?).map_err(from_error)?;
        let back = recover_configuration(&p).map_err(from_error)?;
        put(out, config_isomorphic(cfg, &back))
    })
}

/// Parses `.qpres` text.
///
/// # Safety
/// `src` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_presentation_parse(src: *const c_char, out: *mut *mut MskitPresentation) -> MskitStatus {
    guard(|| {
        let p = format::parse_presentation(text(src)?).map_err(from_error)?;
        put(out, Box::into_raw(Box::new(MskitPresentation(p))))
    })
}

/// # Safety
/// `p` must come from this library and not have been freed. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn mskit_presentation_free(p: *mut MskitPresentation) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Dimension of the algebra over its field.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_presentation_dimension(p: *const MskitPresentation, out: *mut usize) -> MskitStatus {
    guard(|| put(out, handle(p)?.0.dim()))
}

/// `.qpres` text of the presentation.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_presentation_to_text(p: *const MskitPresentation, out: *mut *mut c_char) -> MskitStatus {
    guard(|| put_string(out, format::print_presentation(&handle(p)?.0)))
}

/// JSON export of the presentation.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_presentation_to_json(p: *const MskitPresentation, out: *mut *mut c_char) -> MskitStatus {
    guard(|| put_string(out, format::presentation_json(&handle(p)?.0).to_string()))
}

/// Recovers the Brauer configuration of a symmetric presentation.
///
/// # Safety
/// `p` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn mskit_presentation_recover(p: *const MskitPresentation, out: *mut *mut MskitConfig) -> MskitStatus {
    guard(|| {
        let cfg = recover_configuration(&handle(p)?.0).map_err(from_error)?;
        put(out, Box::into_raw(Box::new(MskitConfig(cfg))))
    })
}
