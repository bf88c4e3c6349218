//! C interface to udlab.
//!
//! Every function returns a [`UdlabStatus`]; outputs go through pointer
//! arguments. Objects are opaque and must be released with their `_free`
//! function. After a failure, [`udlab_last_error`] describes what went wrong
//! on the calling thread.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use udlab::bits::BitString;
use udlab::cli::{self, CliError, RunArgs};
use udlab::games::{GameReport, TrialRng, Verdict};
use udlab::qcp::BackendTag;
use udlab::schemes::{self, Ciphertext, SchemeInstance, SchemeSpecError, UdKey};

/// Result of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    UnknownName = 3,
    InvalidParams = 4,
    Failed = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Verdict of a finished game.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UdlabVerdict {
    WithinBound = 0,
    ExceedsBound = 1,
    Inconclusive = 2,
}

/// Settings for one game run, as `key = value` pairs with the CLI's option names.
pub struct UdlabRunConfig {
    settings: BTreeMap<String, String>,
}

/// A finished game report.
pub struct UdlabReport {
    report: GameReport,
    json: String,
}

/// A parsed encryption scheme bound to a backend.
pub struct UdlabScheme {
    scheme: SchemeInstance,
}

/// A secret key of a scheme.
pub struct UdlabKey {
    key: UdKey,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure(UdlabStatus, String);

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        let status = match e {
            CliError::Unknown { .. } => UdlabStatus::UnknownName,
            CliError::Invalid(_) => UdlabStatus::InvalidParams,
            CliError::Io(_) => UdlabStatus::Failed,
        };
        Failure(status, e.to_string())
    }
}

impl From<SchemeSpecError> for Failure {
    fn from(e: SchemeSpecError) -> Self {
        CliError::from(e).into()
    }
}

impl From<schemes::SchemeError> for Failure {
    fn from(e: schemes::SchemeError) -> Self {
        Failure(UdlabStatus::InvalidParams, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> UdlabStatus {
    let (status, message) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => (UdlabStatus::Ok, String::new()),
        Ok(Err(Failure(status, message))) => (status, message),
        Err(_) => (UdlabStatus::Panic, "internal panic".to_string()),
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = message);
    status
}

unsafe fn text<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(UdlabStatus::NullPointer, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(UdlabStatus::InvalidUtf8, "argument is not UTF-8".into()))
}

unsafe fn object<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(UdlabStatus::NullPointer, "null handle".into()))
}

fn null_out() -> Failure {
    Failure(UdlabStatus::NullPointer, "null output pointer".into())
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null_out());
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Copies `bytes` into `buf`. `*needed` always receives the full length.
unsafe fn copy_out(bytes: &[u8], buf: *mut u8, len: usize, needed: *mut usize) -> Result<(), Failure> {
    if needed.is_null() {
        return Err(null_out());
    }
    *needed = bytes.len();
    if buf.is_null() || len < bytes.len() {
        return Err(Failure(UdlabStatus::BufferTooSmall, format!("{} bytes needed", bytes.len())));
    }
    ptr::copy_nonoverlapping(bytes.as_ptr(), buf, bytes.len());
    Ok(())
}

/// Copies the last error message of this thread as a NUL-terminated string.
///
/// # Safety
/// `buf` must be valid for `len` bytes (or null to query the size); `needed` must be valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_last_error(buf: *mut c_char, len: usize, needed: *mut usize) -> UdlabStatus {
    let mut message = LAST_ERROR.with(|e| e.borrow().clone()).into_bytes();
    message.push(0);
    // Not routed through `guard`, which would clear the message being read.
    match copy_out(&message, buf.cast(), len, needed) {
        Ok(()) => UdlabStatus::Ok,
        Err(Failure(status, _)) => status,
    }
}

/// Creates an empty run configuration.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn udlab_config_new(out: *mut *mut UdlabRunConfig) -> UdlabStatus {
    guard(|| put(out, UdlabRunConfig { settings: BTreeMap::new() }))
}

/// Sets one option, e.g. `("game", "flip_qcp")` or `("trials", "1000")`.
///
/// # Safety
/// `config` must come from [`udlab_config_new`]; `key` and `value` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn udlab_config_set(
    config: *mut UdlabRunConfig,
    key: *const c_char,
    value: *const c_char,
) -> UdlabStatus {
    guard(|| {
        let config = config.as_mut().ok_or_else(|| Failure(UdlabStatus::NullPointer, "null handle".into()))?;
        let (key, value) = (text(key)?, text(value)?);
        // Validate early so the error points at the offending key.
        RunArgs::default().merge_config(&BTreeMap::from([(key.to_string(), value.to_string())]))?;
        config.settings.insert(key.to_string(), value.to_string());
        Ok(())
    })
}

/// # Safety
/// `config` must come from [`udlab_config_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn udlab_config_free(config: *mut UdlabRunConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Runs the configured game. A missing seed is drawn from OS entropy; read it back from the report.
///
/// # Safety
/// `config` must come from [`udlab_config_new`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_run(config: *const UdlabRunConfig, out: *mut *mut UdlabReport) -> UdlabStatus {
    guard(|| {
        let config = object(config)?;
        if out.is_null() {
            return Err(null_out());
        }
        let args = RunArgs::default().merge_config(&config.settings)?;
        let report = cli::run_game(&args)?;
        let json = report.to_json();
        put(out, UdlabReport { report, json })
    })
}

/// # Safety
/// `report` must come from [`udlab_run`]; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_report_summary(
    report: *const UdlabReport,
    mean: *mut f64,
    half_width: *mut f64,
    verdict: *mut UdlabVerdict,
) -> UdlabStatus {
    guard(|| {
        let r = &object(report)?.report;
        if mean.is_null() || half_width.is_null() || verdict.is_null() {
            return Err(null_out());
        }
        *mean = r.mean;
        *half_width = r.ci.half_width;
        *verdict = match r.verdict {
            Verdict::WithinBound => UdlabVerdict::WithinBound,
            Verdict::ExceedsBound => UdlabVerdict::ExceedsBound,
            Verdict::Inconclusive => UdlabVerdict::Inconclusive,
        };
        Ok(())
    })
}

/// # Safety
/// `report` must come from [`udlab_run`]; `seed` must be valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_report_seed(report: *const UdlabReport, seed: *mut u64) -> UdlabStatus {
    guard(|| {
        let r = object(report)?;
        seed.as_mut().map(|s| *s = r.report.seed).ok_or_else(null_out)
    })
}

/// Copies the JSON report as a NUL-terminated string.
///
/// # Safety
/// `buf` must be valid for `len` bytes or null; `needed` must be valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_report_json(
    report: *const UdlabReport,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> UdlabStatus {
    guard(|| {
        let mut bytes = object(report)?.json.clone().into_bytes();
        bytes.push(0);
        copy_out(&bytes, buf.cast(), len, needed)
    })
}

/// # Safety
/// `report` must come from [`udlab_run`] or be null.
#[no_mangle]
pub unsafe extern "C" fn udlab_report_free(report: *mut UdlabReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Parses a scheme specification such as `extend(ud1_cpa)` for `backend` (e.g. `ideal_token`).
///
/// # Safety
/// Strings must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_scheme_new(
    spec: *const c_char,
    backend: *const c_char,
    out: *mut *mut UdlabScheme,
) -> UdlabStatus {
    guard(|| {
        let name = text(backend)?;
        let backend = BackendTag::parse(name)
            .ok_or_else(|| Failure(UdlabStatus::UnknownName, format!("unknown backend `{name}`")))?;
        let scheme = schemes::parse_scheme(text(spec)?, backend)?;
        put(out, UdlabScheme { scheme })
    })
}

/// # Safety
/// `scheme` must come from [`udlab_scheme_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn udlab_scheme_free(scheme: *mut UdlabScheme) {
    if !scheme.is_null() {
        drop(Box::from_raw(scheme));
    }
}

/// Generates a key deterministically from `seed`.
///
/// # Safety
/// `scheme` must come from [`udlab_scheme_new`]; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_key_gen(
    scheme: *const UdlabScheme,
    lambda: usize,
    seed: u64,
    out: *mut *mut UdlabKey,
) -> UdlabStatus {
    guard(|| {
        let scheme = object(scheme)?;
        let key = scheme.scheme.key_gen(lambda, &mut TrialRng::seed_from_u64(seed))?;
        put(out, UdlabKey { key })
    })
}

/// # Safety
/// `key` must come from [`udlab_key_gen`] or be null.
#[no_mangle]
pub unsafe extern "C" fn udlab_key_free(key: *mut UdlabKey) {
    if !key.is_null() {
        drop(Box::from_raw(key));
    }
}

/// Encrypts a message given as a string of `0`/`1` characters; writes the ciphertext bytes.
///
/// # Safety
/// Handles must be live; `message` NUL-terminated; `buf` valid for `len` bytes or null; `needed` valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_encrypt(
    scheme: *const UdlabScheme,
    key: *const UdlabKey,
    message: *const c_char,
    seed: u64,
    buf: *mut u8,
    len: usize,
    needed: *mut usize,
) -> UdlabStatus {
    guard(|| {
        let (scheme, key) = (object(scheme)?, object(key)?);
        let m: BitString = text(message)?
            .parse()
            .map_err(|e| Failure(UdlabStatus::InvalidParams, format!("message: {e}")))?;
        let c = scheme.scheme.encrypt(&key.key, &m, &mut TrialRng::seed_from_u64(seed))?;
        copy_out(&c.to_bytes(), buf, len, needed)
    })
}

/// Decrypts ciphertext bytes. The plaintext is written as a NUL-terminated `0`/`1`
/// string; `*rejected` is set to 1 (and nothing is written) when decryption gives ⊥.
///
/// # Safety
/// Handles must be live; `ct` valid for `ct_len` bytes; `buf` valid for `len` bytes or null;
/// `needed` and `rejected` valid.
#[no_mangle]
pub unsafe extern "C" fn udlab_decrypt(
    scheme: *const UdlabScheme,
    key: *const UdlabKey,
    ct: *const u8,
    ct_len: usize,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
    rejected: *mut u8,
) -> UdlabStatus {
    guard(|| {
        let (scheme, key) = (object(scheme)?, object(key)?);
        if ct.is_null() || rejected.is_null() || needed.is_null() {
            return Err(null_out());
        }
        let bytes = std::slice::from_raw_parts(ct, ct_len);
        let plain = match Ciphertext::from_bytes(bytes) {
            Ok(c) => scheme.scheme.decrypt_key(&key.key, &c)?,
            Err(_) => None,
        };
        match plain {
            None => {
                *rejected = 1;
                *needed = 0;
                Ok(())
            }
            Some(m) => {
                *rejected = 0;
                let mut s = m.to_string().into_bytes();
                s.push(0);
                copy_out(&s, buf.cast(), len, needed)
            }
        }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn udlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_turns_panics_into_status() {
        assert_eq!(guard(|| panic!("boom")), UdlabStatus::Panic);
        assert_eq!(LAST_ERROR.with(|e| e.borrow().clone()), "internal panic");
        assert_eq!(guard(|| Ok(())), UdlabStatus::Ok);
        assert!(LAST_ERROR.with(|e| e.borrow().is_empty()));
    }

    #[test]
    fn copy_out_reports_the_needed_size() {
        let mut needed = 0;
        let mut buf = [0u8; 2];
        let r = unsafe { copy_out(b"abc", buf.as_mut_ptr(), buf.len(), &mut needed) };
        assert!(matches!(r, Err(Failure(UdlabStatus::BufferTooSmall, _))));
        assert_eq!(needed, 3);
        let mut buf = [0u8; 3];
        assert!(unsafe { copy_out(b"abc", buf.as_mut_ptr(), buf.len(), &mut needed) }.is_ok());
        assert_eq!(&buf, b"abc");
    }
}
