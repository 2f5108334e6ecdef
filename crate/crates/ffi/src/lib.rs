//! C ABI over the germ-moduli command layer.
//!
//! Documents are opaque handles created by [`gm_document_parse`] or
//! [`gm_document_catalog`] and released with [`gm_document_free`]. Every
//! command returns a [`GmStatus`] and, through `out`, a JSON string owned by
//! the caller and released with [`gm_string_free`]. On failure that string is
//! `{"error": "..."}`.

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use germ_moduli::cli::run::{run, Command, RunConfig, Status};
use germ_moduli::cli::{catalog, CurveDocument};
use germ_moduli::Error;

/// Result codes. `GM_STATUS_UNSUPPORTED` still carries a report.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmStatus {
    Ok = 0,
    InputError = 1,
    Unsupported = 2,
    Precondition = 3,
    Truncation = 4,
    Inconsistent = 5,
    NullPointer = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GmCommand {
    Semiring = 0,
    Normalize = 1,
    Saito = 2,
    Classify = 3,
    Dimension = 4,
    Action = 5,
    Equiv = 6,
}

/// Opaque curve document.
pub struct GmDocument(CurveDocument);

/// Run options. Zero `degree_bound` selects the default; `marking` may be
/// NULL; `phi` and `against` may be NULL.
#[repr(C)]
pub struct GmOptions {
    pub truncation: u32,
    pub degree_bound: u32,
    pub seed: u32,
    pub reduce: bool,
    pub marking: *const u32,
    pub marking_len: usize,
    pub phi: *const c_char,
    pub against: *const GmDocument,
}

impl From<GmCommand> for Command {
    fn from(c: GmCommand) -> Command {
        match c {
            GmCommand::Semiring => Command::Semiring,
            GmCommand::Normalize => Command::Normalize,
            GmCommand::Saito => Command::Saito,
            GmCommand::Classify => Command::Classify,
            GmCommand::Dimension => Command::Dimension,
            GmCommand::Action => Command::Action,
            GmCommand::Equiv => Command::Equiv,
        }
    }
}

fn status_of(e: &Error) -> GmStatus {
    match e {
        Error::Input(_) => GmStatus::InputError,
        Error::Unsupported(_) | Error::Bound(_) => GmStatus::Unsupported,
        Error::Precondition(_) => GmStatus::Precondition,
        Error::Truncation(_) => GmStatus::Truncation,
        Error::Inconsistent(_) => GmStatus::Inconsistent,
    }
}

fn into_c(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

unsafe fn write_out(out: *mut *mut c_char, s: String) {
    if !out.is_null() {
        *out = into_c(s);
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, GmStatus> {
    if p.is_null() {
        return Err(GmStatus::NullPointer);
    }
    CStr::from_ptr(p).to_str().map_err(|_| GmStatus::InvalidUtf8)
}

unsafe fn guarded(out: *mut *mut c_char, f: impl FnOnce() -> (GmStatus, String)) -> GmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok((s, text)) => {
            write_out(out, text);
            s
        }
        Err(_) => {
            write_out(out, error_json("internal panic"));
            GmStatus::Panic
        }
    }
}

unsafe fn make_document(out: *mut *mut GmDocument, err: *mut *mut c_char, f: impl FnOnce() -> Result<CurveDocument, (GmStatus, String)>) -> GmStatus {
    if out.is_null() {
        return GmStatus::NullPointer;
    }
    *out = ptr::null_mut();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(d)) => {
            *out = Box::into_raw(Box::new(GmDocument(d)));
            GmStatus::Ok
        }
        Ok(Err((s, msg))) => {
            write_out(err, error_json(&msg));
            s
        }
        Err(_) => GmStatus::Panic,
    }
}

/// Parse a JSON curve document. On failure `*out` is NULL and, when `err` is
/// non-NULL, `*err` receives an error string to free with [`gm_string_free`].
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable; `err` may
/// be NULL.
#[no_mangle]
pub unsafe extern "C" fn gm_document_parse(json: *const c_char, out: *mut *mut GmDocument, err: *mut *mut c_char) -> GmStatus {
    make_document(out, err, || {
        let text = read_str(json).map_err(|s| (s, "bad document string".to_string()))?;
        CurveDocument::parse(text).map_err(|e| (status_of(&e), e.to_string()))
    })
}

/// Look up a bundled catalog entry by name.
///
/// # Safety
/// As for [`gm_document_parse`].
#[no_mangle]
pub unsafe extern "C" fn gm_document_catalog(name: *const c_char, out: *mut *mut GmDocument, err: *mut *mut c_char) -> GmStatus {
    make_document(out, err, || {
        let name = read_str(name).map_err(|s| (s, "bad catalog name".to_string()))?;
        catalog::lookup(name).map_err(|e| (status_of(&e), e.to_string()))
    })
}

/// Canonical JSON of a document.
///
/// # Safety
/// `doc` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_document_emit(doc: *const GmDocument, out: *mut *mut c_char) -> GmStatus {
    if doc.is_null() || out.is_null() {
        return GmStatus::NullPointer;
    }
    let d = &(*doc).0;
    guarded(out, || (GmStatus::Ok, d.emit()))
}

/// # Safety
/// `doc` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gm_document_free(doc: *mut GmDocument) {
    if !doc.is_null() {
        drop(Box::from_raw(doc));
    }
}

/// Default options: truncation 32, default degree bound, seed 0.
#[no_mangle]
pub extern "C" fn gm_options_default() -> GmOptions {
    GmOptions { truncation: 32, degree_bound: 0, seed: 0, reduce: false, marking: ptr::null(), marking_len: 0, phi: ptr::null(), against: ptr::null() }
}

unsafe fn config(opts: &GmOptions) -> Result<RunConfig, (GmStatus, String)> {
    let marking =
        if opts.marking.is_null() { None } else { Some(std::slice::from_raw_parts(opts.marking, opts.marking_len).iter().map(|i| *i as usize).collect()) };
    let phi = if opts.phi.is_null() { None } else { Some(read_str(opts.phi).map_err(|s| (s, "bad phi string".to_string()))?.to_string()) };
    let against = if opts.against.is_null() { None } else { Some((*opts.against).0.clone()) };
    Ok(RunConfig {
        truncation: opts.truncation as usize,
        degree_bound: (opts.degree_bound > 0).then_some(opts.degree_bound),
        seed: opts.seed as usize,
        marking,
        phi,
        reduce: opts.reduce,
        against,
        ..RunConfig::default()
    })
}

/// Run a command; `*out` receives the JSON report (or an error object).
///
/// # Safety
/// `doc` must be a live handle; `opts` may be NULL for defaults; pointers in
/// `opts` must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gm_run(doc: *const GmDocument, command: GmCommand, opts: *const GmOptions, out: *mut *mut c_char) -> GmStatus {
    if doc.is_null() || out.is_null() {
        return GmStatus::NullPointer;
    }
    *out = ptr::null_mut();
    let d = &(*doc).0;
    let defaults = gm_options_default();
    let opts = if opts.is_null() { &defaults } else { &*opts };
    guarded(out, || {
        let cfg = match config(opts) {
            Ok(c) => c,
            Err((s, m)) => return (s, error_json(&m)),
        };
        let r = run(command.into(), d, &cfg);
        match r {
            Ok(rep) => {
                let s = if rep.status == Status::Ok { GmStatus::Ok } else { GmStatus::Unsupported };
                (s, rep.value.to_string())
            }
            Err(e) => (status_of(&e), error_json(&e.to_string())),
        }
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn gm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
