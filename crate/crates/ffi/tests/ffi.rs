use std::ffi::{CStr, CString};
use std::ptr;

use quantlang_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

unsafe fn take(s: *mut std::ffi::c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    ql_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = ql_last_error();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

#[test]
fn fixture_eval_and_free() {
    unsafe {
        let mut a = ptr::null_mut();
        assert_eq!(
            ql_automaton_fixture(c("disc_gap_witness").as_ptr(), &mut a),
            QlStatus::Ok
        );
        assert_eq!(ql_automaton_num_states(a), 1);
        assert_eq!(ql_automaton_is_deterministic(a), 1);
        let mut v = ptr::null_mut();
        assert_eq!(ql_eval(a, c("a | b").as_ptr(), &mut v), QlStatus::Ok);
        assert_eq!(take(v), "5/6");
        ql_automaton_free(a);
    }
}

#[test]
fn parse_serialize_round_trip() {
    unsafe {
        let text = "automaton t\nsemantics sum\nalphabet a\nstates 1\ninitial 0\ntrans 0 a 0 1/2\n";
        let mut a = ptr::null_mut();
        assert_eq!(ql_automaton_parse(c(text).as_ptr(), &mut a), QlStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(ql_automaton_serialize(a, &mut s), QlStatus::Ok);
        assert_eq!(take(s), text);
        ql_automaton_free(a);
    }
}

#[test]
fn errors_set_status_and_message() {
    unsafe {
        let mut a = ptr::null_mut();
        assert_eq!(
            ql_automaton_parse(c("automaton x\nbogus\n").as_ptr(), &mut a),
            QlStatus::Parse
        );
        assert!(a.is_null());
        assert!(last_error().contains("line 2"));
        assert_eq!(ql_automaton_parse(ptr::null(), &mut a), QlStatus::NullArgument);

        let (mut x, mut y, mut m) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        ql_automaton_fixture(c("limavg_count_a").as_ptr(), &mut x);
        ql_automaton_fixture(c("limavg_count_b").as_ptr(), &mut y);
        assert_eq!(ql_compose(QlOperator::Max, x, y, 0, &mut m), QlStatus::NotClosed);
        assert!(last_error().contains("Theorem 13"));
        assert_eq!(ql_compose(QlOperator::Max, x, y, 1, &mut m), QlStatus::Ok);
        assert!(ql_last_error().is_null());
        let mut v = ptr::null_mut();
        assert_eq!(ql_eval(m, c("| a b b").as_ptr(), &mut v), QlStatus::Ok);
        assert_eq!(take(v), "2/3");
        assert_eq!(ql_eval(m, c("| q").as_ptr(), &mut v), QlStatus::Precondition);
        for h in [x, y, m] {
            ql_automaton_free(h);
        }
    }
}

#[test]
fn shift_and_scale() {
    unsafe {
        let mut a = ptr::null_mut();
        ql_automaton_fixture(c("sum_count_a").as_ptr(), &mut a);
        let (mut b, mut d) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(ql_shift(a, c("-1/2").as_ptr(), &mut b), QlStatus::Ok);
        assert_eq!(ql_scale(b, c("4").as_ptr(), &mut d), QlStatus::Ok);
        let mut v = ptr::null_mut();
        ql_eval(d, c("a a b").as_ptr(), &mut v);
        assert_eq!(take(v), "6/1");
        assert_eq!(ql_scale(a, c("x").as_ptr(), &mut d), QlStatus::Parse);
        for h in [a, b, d] {
            ql_automaton_free(h);
        }
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/quantlang.h");
    for f in [
        "ql_last_error",
        "ql_string_free",
        "ql_automaton_parse",
        "ql_automaton_fixture",
        "ql_automaton_free",
        "ql_automaton_serialize",
        "ql_automaton_num_states",
        "ql_automaton_is_deterministic",
        "ql_eval",
        "ql_compose",
        "ql_shift",
        "ql_scale",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f}");
    }
    assert!(header.contains("typedef struct QlAutomaton QlAutomaton;"));
}
