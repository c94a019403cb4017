//! C interface to `obuchi`.
//!
//! Every function returns an [`ObuchiStatus`] code and writes its result
//! through an out-pointer. On failure [`obuchi_last_error`] describes the
//! problem. Handles are opaque and must be released with their `_free`
//! function; strings returned by the library are released with
//! [`obuchi_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use obuchi::io::{parse_automaton, parse_rabin, to_json, Automaton};
use obuchi::{
    determinize, dpa_member_up, npa_member_up, oba_member_up, parity_to_oba, rabin_to_oba, record_count_bound, Error,
    OrderedBuchiAutomaton, UpWord,
};

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObuchiStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Validation = 4,
    Usage = 5,
    Internal = 6,
}

/// An ordered Büchi automaton.
pub struct ObuchiOba(OrderedBuchiAutomaton);

/// A parity automaton, possibly the result of determinization.
pub struct ObuchiParity(Automaton);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> ObuchiStatus {
    match e {
        Error::Parse { .. } => ObuchiStatus::Parse,
        Error::Usage(_) | Error::EpsInWord | Error::EmptyPeriod | Error::UnknownLetter(_) => ObuchiStatus::Usage,
        _ => ObuchiStatus::Validation,
    }
}

struct Failure(ObuchiStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard<F: FnOnce() -> Result<(), Failure>>(f: F) -> ObuchiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            ObuchiStatus::Ok
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal error");
            ObuchiStatus::Internal
        }
    }
}

fn null() -> Failure {
    Failure(ObuchiStatus::NullArgument, "null argument".into())
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(ObuchiStatus::InvalidUtf8, "string is not valid UTF-8".into()))
}

unsafe fn put<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(value);
    Ok(())
}

unsafe fn put_box<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    out.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    let c = CString::new(s).map_err(|_| Failure(ObuchiStatus::Internal, "interior NUL".into()))?;
    if out.is_null() {
        return Err(null());
    }
    out.write(c.into_raw());
    Ok(())
}

unsafe fn word(prefix: *const c_char, period: *const c_char) -> Result<UpWord, Failure> {
    Ok(UpWord::parse(text(prefix)?, text(period)?)?)
}

fn parity_of(a: &Automaton) -> &obuchi::ParityAutomaton {
    match a {
        Automaton::Parity(p) => p,
        Automaton::Det(d) => &d.automaton,
        _ => unreachable!("parity handles hold parity automata"),
    }
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn obuchi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn obuchi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an `ordered-buchi` JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_oba_from_json(json: *const c_char, out: *mut *mut ObuchiOba) -> ObuchiStatus {
    guard(|| match parse_automaton(text(json)?)? {
        Automaton::Oba(a) => put_box(out, ObuchiOba(a)),
        other => Err(Failure(
            ObuchiStatus::Usage,
            format!("expected an ordered-buchi file, got {}", other.kind()),
        )),
    })
}

/// # Safety
/// `a` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn obuchi_oba_free(a: *mut ObuchiOba) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_oba_state_count(a: *const ObuchiOba, out: *mut usize) -> ObuchiStatus {
    guard(|| put(out, a.as_ref().ok_or_else(null)?.0.size()))
}

/// Membership of `prefix period^ω`; letters are separated by spaces.
///
/// # Safety
/// `a` must be a live handle, the strings NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_oba_member(
    a: *const ObuchiOba,
    prefix: *const c_char,
    period: *const c_char,
    out: *mut bool,
) -> ObuchiStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(null)?;
        let b = oba_member_up(&a.0, &word(prefix, period)?)?;
        put(out, b)
    })
}

/// Canonical JSON; release with [`obuchi_string_free`].
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_oba_to_json(a: *const ObuchiOba, out: *mut *mut c_char) -> ObuchiStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(null)?;
        put_string(out, to_json(&Automaton::Oba(a.0.clone())))
    })
}

/// Determinizes into a deterministic parity automaton.
///
/// # Safety
/// `a` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_oba_determinize(a: *const ObuchiOba, out: *mut *mut ObuchiParity) -> ObuchiStatus {
    guard(|| {
        let a = a.as_ref().ok_or_else(null)?;
        put_box(out, ObuchiParity(Automaton::Det(determinize(&a.0))))
    })
}

/// Encodes a Rabin condition given as JSON.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_rabin_to_oba(json: *const c_char, out: *mut *mut ObuchiOba) -> ObuchiStatus {
    guard(|| {
        let (a, _) = rabin_to_oba(&parse_rabin(text(json)?)?)?;
        put_box(out, ObuchiOba(a))
    })
}

/// Parses a `parity` or `det-parity` JSON document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_parity_from_json(json: *const c_char, out: *mut *mut ObuchiParity) -> ObuchiStatus {
    guard(|| match parse_automaton(text(json)?)? {
        a @ (Automaton::Parity(_) | Automaton::Det(_)) => put_box(out, ObuchiParity(a)),
        other => Err(Failure(
            ObuchiStatus::Usage,
            format!("expected a parity file, got {}", other.kind()),
        )),
    })
}

/// # Safety
/// `p` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn obuchi_parity_free(p: *mut ObuchiParity) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_parity_state_count(p: *const ObuchiParity, out: *mut usize) -> ObuchiStatus {
    guard(|| put(out, parity_of(&p.as_ref().ok_or_else(null)?.0).size()))
}

/// Membership of `prefix period^ω`, with ε-closure for nondeterministic
/// automata.
///
/// # Safety
/// `p` must be a live handle, the strings NUL-terminated and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_parity_member(
    p: *const ObuchiParity,
    prefix: *const c_char,
    period: *const c_char,
    out: *mut bool,
) -> ObuchiStatus {
    guard(|| {
        let p = parity_of(&p.as_ref().ok_or_else(null)?.0);
        let w = word(prefix, period)?;
        let b = if p.deterministic {
            dpa_member_up(p, &w)?
        } else {
            npa_member_up(p, &w)?
        };
        put(out, b)
    })
}

/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_parity_to_json(p: *const ObuchiParity, out: *mut *mut c_char) -> ObuchiStatus {
    guard(|| put_string(out, to_json(&p.as_ref().ok_or_else(null)?.0)))
}

/// Translates an ε-complete parity automaton.
///
/// # Safety
/// `p` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_parity_to_oba(p: *const ObuchiParity, out: *mut *mut ObuchiOba) -> ObuchiStatus {
    guard(|| {
        let conv = parity_to_oba(parity_of(&p.as_ref().ok_or_else(null)?.0))?;
        put_box(out, ObuchiOba(conv.oba))
    })
}

/// Number of records over `n` states.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn obuchi_record_count_bound(n: usize, out: *mut u64) -> ObuchiStatus {
    guard(|| put(out, record_count_bound(n)?))
}
