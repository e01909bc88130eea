//! C interface to `magnipersist`.
//!
//! Spaces live behind the opaque [`MpSpace`] handle. Every fallible call
//! returns an [`MpStatus`]; on failure the message is available from
//! [`mp_last_error_message`] on the same thread. Strings handed out by the
//! library are NUL-terminated and must be released with [`mp_string_free`].
//! Rational arguments are passed as text (`"3"`, `"1/2"`, `"0.25"`).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use magnipersist::filtration::build_vietoris_rips;
use magnipersist::homology::{euler_check, magnitude_homology, Mode};
use magnipersist::io::{parse_distance_matrix, parse_rational};
use magnipersist::limits::separation_witness;
use magnipersist::magnitude::{magnitude_function_eval, magnitude_rational};
use magnipersist::persistence::{blurred_mh, reduce_persistence};
use magnipersist::{Error, ErrorKind, FiniteMetricSpace};
use num_rational::BigRational;

/// Status codes; the nonzero values below 6 match the CLI exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpStatus {
    Ok = 0,
    Usage = 1,
    Parse = 2,
    Validation = 3,
    Resource = 4,
    InternalCheck = 5,
    NullPointer = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

impl From<ErrorKind> for MpStatus {
    fn from(kind: ErrorKind) -> Self {
        match kind {
            ErrorKind::Usage => MpStatus::Usage,
            ErrorKind::Parse => MpStatus::Parse,
            ErrorKind::Validation => MpStatus::Validation,
            ErrorKind::Resource => MpStatus::Resource,
            ErrorKind::InternalCheck => MpStatus::InternalCheck,
        }
    }
}

/// A validated finite metric space.
pub struct MpSpace {
    inner: FiniteMetricSpace,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(MpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.kind().into(), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MpStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            MpStatus::Panic
        }
    }
}

unsafe fn text_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(MpStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(MpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn rational_arg(p: *const c_char, what: &str) -> Result<BigRational, Failure> {
    parse_rational(text_arg(p, what)?).map_err(|r| Failure(MpStatus::Usage, format!("{what}: {r}")))
}

unsafe fn space_arg<'a>(p: *const MpSpace) -> Result<&'a FiniteMetricSpace, Failure> {
    p.as_ref().map(|s| &s.inner).ok_or(Failure(MpStatus::NullPointer, "space is null".into()))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(MpStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(value);
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(MpStatus::InternalCheck, "NUL in output".into()))?;
    if out.is_null() {
        return Err(Failure(MpStatus::NullPointer, "output pointer is null".into()));
    }
    out.write(c.into_raw());
    Ok(())
}

/// Parse a distance matrix in the text format and validate it as a metric space.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_space_from_text(text: *const c_char, out: *mut *mut MpSpace) -> MpStatus {
    guard(|| {
        let space = parse_distance_matrix(text_arg(text, "text")?)?;
        write_out(out, Box::into_raw(Box::new(MpSpace { inner: space })))
    })
}

/// # Safety
/// `space` must come from [`mp_space_from_text`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn mp_space_free(space: *mut MpSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Number of points, or 0 for a null handle.
///
/// # Safety
/// `space` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn mp_space_len(space: *const MpSpace) -> usize {
    space.as_ref().map_or(0, |s| s.inner.len())
}

/// Magnitude as a rational function in `q`.
///
/// # Safety
/// `space` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_magnitude(space: *const MpSpace, out: *mut *mut c_char) -> MpStatus {
    guard(|| write_string(out, magnitude_rational(space_arg(space)?)?.to_string()))
}

/// Magnitude of `tX`; the decimal string is optional.
///
/// # Safety
/// `space` and `t` must be valid; `out_decimal` may be null.
#[no_mangle]
pub unsafe extern "C" fn mp_magnitude_eval(
    space: *const MpSpace,
    t: *const c_char,
    precision: u32,
    out_value: *mut f64,
    out_decimal: *mut *mut c_char,
) -> MpStatus {
    guard(|| {
        let v = magnitude_function_eval(space_arg(space)?, &rational_arg(t, "t")?, precision as usize)?;
        write_out(out_value, v.value)?;
        if !out_decimal.is_null() {
            write_string(out_decimal, v.decimal)?;
        }
        Ok(())
    })
}

/// Magnitude homology table as TSV `n l rank torsion`.
///
/// # Safety
/// `space` and `l_max` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_magnitude_homology_tsv(
    space: *const MpSpace,
    n_max: u32,
    l_max: *const c_char,
    unnormalized: bool,
    out: *mut *mut c_char,
) -> MpStatus {
    guard(|| {
        let mode = if unnormalized { Mode::Unnormalized } else { Mode::Normalized };
        let table = magnitude_homology(space_arg(space)?, n_max as usize, &rational_arg(l_max, "l_max")?, mode)?;
        write_string(out, table.to_tsv())
    })
}

/// Euler characteristic check as TSV `l chi series expansion ok`.
///
/// # Safety
/// `space` and `l_max` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_euler_check_tsv(
    space: *const MpSpace,
    n_max: u32,
    l_max: *const c_char,
    out: *mut *mut c_char,
) -> MpStatus {
    guard(|| {
        let report = euler_check(space_arg(space)?, n_max as usize, &rational_arg(l_max, "l_max")?)?;
        write_string(out, report.to_tsv())
    })
}

/// Blurred magnitude homology barcode as TSV `k birth death`.
///
/// # Safety
/// `space` and `eps_max` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_blurred_barcode_tsv(
    space: *const MpSpace,
    dim_max: u32,
    eps_max: *const c_char,
    prime: u64,
    out: *mut *mut c_char,
) -> MpStatus {
    guard(|| {
        let b = blurred_mh(space_arg(space)?, dim_max as usize, &rational_arg(eps_max, "eps_max")?, prime)?;
        write_string(out, b.to_tsv())
    })
}

/// Vietoris–Rips barcode as TSV `k birth death`.
///
/// # Safety
/// `space` and `eps_max` must be valid and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_rips_barcode_tsv(
    space: *const MpSpace,
    dim_max: u32,
    eps_max: *const c_char,
    prime: u64,
    out: *mut *mut c_char,
) -> MpStatus {
    guard(|| {
        let complex = build_vietoris_rips(space_arg(space)?, dim_max as usize, &rational_arg(eps_max, "eps_max")?)?;
        write_string(out, reduce_persistence(&complex, prime)?.to_tsv())
    })
}

/// Degree-0 limits of blurred and ordinary magnitude homology.
///
/// # Safety
/// `space` must be a live handle and both outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn mp_separation_witness(
    space: *const MpSpace,
    prime: u64,
    out_blurred: *mut usize,
    out_ordinary: *mut usize,
) -> MpStatus {
    guard(|| {
        let (b, o) = separation_witness(space_arg(space)?, prime)?;
        write_out(out_blurred, b)?;
        write_out(out_ordinary, o)
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message for the last failed call on this thread, or null.
///
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn mp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
