//! C interface to `quantlang`.
//!
//! Automata are opaque handles owned by the caller and released with
//! `ql_automaton_free`. Every fallible call returns a `QlStatus`; on failure
//! `ql_last_error` describes the most recent error on the calling thread.
//! Strings returned through out-parameters are released with `ql_string_free`.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use quantlang::closure::{compose, Mode, Operator};
use quantlang::{format, Error, Rational, WeightedAutomaton, Word};

/// Status codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    NotClosed = 4,
    Precondition = 5,
    Panic = 6,
}

/// Closure operators.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QlOperator {
    Max = 0,
    Min = 1,
    Sum = 2,
    Complement = 3,
}

impl From<QlOperator> for Operator {
    fn from(op: QlOperator) -> Self {
        match op {
            QlOperator::Max => Operator::Max,
            QlOperator::Min => Operator::Min,
            QlOperator::Sum => Operator::Sum,
            QlOperator::Complement => Operator::Complement,
        }
    }
}

/// Opaque automaton handle.
pub struct QlAutomaton(WeightedAutomaton);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).unwrap_or_default()));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> QlStatus {
    match e {
        Error::Parse { .. } | Error::InvalidAutomaton(_) => QlStatus::Parse,
        Error::ClosedUnderOpViolation { .. } => QlStatus::NotClosed,
        _ => QlStatus::Precondition,
    }
}

struct Fail(QlStatus);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        set_error(e.to_string());
        Fail(status_of(&e))
    }
}

fn null(what: &str) -> Fail {
    set_error(format!("{what} is null"));
    Fail(QlStatus::NullArgument)
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QlStatus::Ok,
        Ok(Err(Fail(s))) => s,
        Err(_) => {
            set_error("internal panic");
            QlStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        Fail(QlStatus::InvalidUtf8)
    })
}

unsafe fn aut_arg<'a>(p: *const QlAutomaton, what: &str) -> Result<&'a WeightedAutomaton, Fail> {
    p.as_ref().map(|a| &a.0).ok_or_else(|| null(what))
}

unsafe fn put_automaton(out: *mut *mut QlAutomaton, a: WeightedAutomaton) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(QlAutomaton(a)));
    Ok(())
}

unsafe fn put_string(out: *mut *mut c_char, s: String) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw();
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ql_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ql_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses an automaton in the text format.
#[no_mangle]
pub unsafe extern "C" fn ql_automaton_parse(text: *const c_char, out: *mut *mut QlAutomaton) -> QlStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        put_automaton(out, format::parse(text)?)
    })
}

/// Loads a shipped fixture by name.
#[no_mangle]
pub unsafe extern "C" fn ql_automaton_fixture(name: *const c_char, out: *mut *mut QlAutomaton) -> QlStatus {
    guard(|| {
        let name = str_arg(name, "name")?;
        let f = quantlang::fixtures::fixture(name)?;
        put_automaton(out, f.automaton())
    })
}

/// Releases an automaton. NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn ql_automaton_free(a: *mut QlAutomaton) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

/// Writes the canonical text form of `a` to `*out`.
#[no_mangle]
pub unsafe extern "C" fn ql_automaton_serialize(a: *const QlAutomaton, out: *mut *mut c_char) -> QlStatus {
    guard(|| {
        let a = aut_arg(a, "automaton")?;
        put_string(out, format::serialize(a))
    })
}

/// Number of states, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn ql_automaton_num_states(a: *const QlAutomaton) -> usize {
    a.as_ref().map_or(0, |a| a.0.num_states())
}

/// 1 if deterministic, 0 if not or NULL.
#[no_mangle]
pub unsafe extern "C" fn ql_automaton_is_deterministic(a: *const QlAutomaton) -> i32 {
    a.as_ref().map_or(0, |a| a.0.is_deterministic().unwrap_or(false) as i32)
}

/// Evaluates `a` on `word` (`u | v` for u·v^ω) and writes the exact value
/// as `p/q` to `*value`.
#[no_mangle]
pub unsafe extern "C" fn ql_eval(a: *const QlAutomaton, word: *const c_char, value: *mut *mut c_char) -> QlStatus {
    guard(|| {
        let a = aut_arg(a, "automaton")?;
        let w = Word::parse(str_arg(word, "word")?)?;
        let r = quantlang::eval(a, &w)?;
        put_string(value, r.value.to_fraction_string())
    })
}

/// Applies `op`. `b` must be NULL for complement and non-NULL otherwise.
/// A nonzero `nondet` selects the nondeterministic class for deterministic
/// inputs.
#[no_mangle]
pub unsafe extern "C" fn ql_compose(
    op: QlOperator,
    a: *const QlAutomaton,
    b: *const QlAutomaton,
    nondet: i32,
    out: *mut *mut QlAutomaton,
) -> QlStatus {
    guard(|| {
        let a = aut_arg(a, "first automaton")?;
        let b = b.as_ref().map(|b| &b.0);
        let mode = if nondet != 0 {
            Mode::Nondeterministic
        } else {
            Mode::Auto
        };
        let c = compose(op.into(), a, b, mode)?;
        put_automaton(out, c.automaton)
    })
}

unsafe fn affine(
    a: *const QlAutomaton,
    by: *const c_char,
    out: *mut *mut QlAutomaton,
    f: fn(&WeightedAutomaton, &Rational) -> quantlang::Result<WeightedAutomaton>,
) -> QlStatus {
    guard(|| {
        let a = aut_arg(a, "automaton")?;
        let c: Rational = str_arg(by, "constant")?
            .parse()
            .map_err(|e: quantlang::rational::ParseRationalError| {
                set_error(e.to_string());
                Fail(QlStatus::Parse)
            })?;
        put_automaton(out, f(a, &c)?)
    })
}

/// Automaton for `c + L`; `by` is a rational such as `-3/4`.
#[no_mangle]
pub unsafe extern "C" fn ql_shift(a: *const QlAutomaton, by: *const c_char, out: *mut *mut QlAutomaton) -> QlStatus {
    affine(a, by, out, WeightedAutomaton::shift)
}

/// Automaton for `c * L`, `c >= 0`.
#[no_mangle]
pub unsafe extern "C" fn ql_scale(a: *const QlAutomaton, by: *const c_char, out: *mut *mut QlAutomaton) -> QlStatus {
    affine(a, by, out, WeightedAutomaton::scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_mapping() {
        assert_eq!(
            status_of(&Error::Parse {
                line: 1,
                message: String::new()
            }),
            QlStatus::Parse
        );
        assert_eq!(status_of(&Error::Precondition(String::new())), QlStatus::Precondition);
    }

    #[test]
    fn error_cleared_on_success() {
        set_error("x");
        assert_eq!(guard(|| Ok(())), QlStatus::Ok);
        assert!(ql_last_error().is_null());
    }
}
