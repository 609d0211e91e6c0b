use std::ffi::{CStr, CString};
use std::ptr;

use condorcet_ffi::*;

const STRICT: &str = r#"{"agents":["a0","a1","a2"],"objects":["o0","o1","o2"],
"edges":[["a0","o0"],["a0","o1"],["a0","o2"],["a1","o0"],["a1","o2"],["a2","o0"],["a2","o1"],["a2","o2"]],
"prefs":{"a0":[["o0","o1"],["o1","o2"]],"a1":[["o0","o2"]],"a2":[["o0","o2"],["o2","o1"]]}}"#;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn parse(json: &str) -> *mut CondorcetInstance {
    let mut inst = ptr::null_mut();
    let json = c(json);
    assert_eq!(unsafe { condorcet_instance_parse(json.as_ptr(), &mut inst) }, CONDORCET_OK);
    assert!(!inst.is_null());
    inst
}

fn last_error() -> String {
    let p = condorcet_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { condorcet_string_free(s) };
    out
}

#[test]
fn solve_round_trip() {
    let inst = parse(STRICT);
    unsafe {
        assert_eq!(condorcet_instance_n_agents(inst), 3);
        let mut set = ptr::null_mut();
        assert_eq!(condorcet_solve(inst, &mut set), CONDORCET_OK);
        let len = condorcet_set_len(set);
        assert!((1..=2).contains(&len));
        let mut popular = -1;
        assert_eq!(condorcet_verify_popular(inst, set, &mut popular), CONDORCET_OK);
        assert_eq!(popular, 1);

        let mut json = ptr::null_mut();
        assert_eq!(condorcet_set_to_json(inst, set, &mut json), CONDORCET_OK);
        let text = take(json);
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), len);

        let mut again = ptr::null_mut();
        let text = c(&text);
        assert_eq!(condorcet_set_parse(inst, text.as_ptr(), &mut again), CONDORCET_OK);
        assert_eq!(condorcet_set_len(again), len);
        condorcet_set_free(again);
        condorcet_set_free(set);
        condorcet_instance_free(inst);
    }
}

#[test]
fn single_matching_is_beaten() {
    let inst = parse(STRICT);
    unsafe {
        let mut set = ptr::null_mut();
        let json = c(r#"[{"a0":"o2","a1":"o0","a2":"o1"}]"#);
        assert_eq!(condorcet_set_parse(inst, json.as_ptr(), &mut set), CONDORCET_OK);
        let mut popular = -1;
        assert_eq!(condorcet_verify_popular(inst, set, &mut popular), CONDORCET_OK);
        assert_eq!(popular, 0);
        condorcet_set_free(set);
        condorcet_instance_free(inst);
    }
}

#[test]
fn pareto_verdicts() {
    let inst = parse(STRICT);
    unsafe {
        let mut optimal = -1;
        let good = c(r#"{"a0":"o1","a1":"o0","a2":"o2"}"#);
        assert_eq!(condorcet_verify_pareto(inst, good.as_ptr(), &mut optimal), CONDORCET_OK);
        assert_eq!(optimal, 1);
        let bad = c(r#"{"a0":"o2","a1":null,"a2":"o1"}"#);
        assert_eq!(condorcet_verify_pareto(inst, bad.as_ptr(), &mut optimal), CONDORCET_OK);
        assert_eq!(optimal, 0);
        condorcet_instance_free(inst);
    }
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut inst = ptr::null_mut();
    let bad = c("{not json");
    let code = unsafe { condorcet_instance_parse(bad.as_ptr(), &mut inst) };
    assert_eq!(code, condorcet::Error::Parse(String::new()).code());
    assert!(inst.is_null());
    assert!(last_error().contains("parse"));

    let unknown = c(r#"{"agents":["a"],"objects":["o"],"edges":[["a","p"]],"prefs":{}}"#);
    let code = unsafe { condorcet_instance_parse(unknown.as_ptr(), &mut inst) };
    assert_ne!(code, CONDORCET_OK);
    assert!(!last_error().is_empty());

    let code = unsafe { condorcet_instance_parse(ptr::null(), &mut inst) };
    assert_eq!(code, CONDORCET_ERR_NULL);
    let json = c(STRICT);
    let code = unsafe { condorcet_instance_parse(json.as_ptr(), ptr::null_mut()) };
    assert_eq!(code, CONDORCET_ERR_NULL);

    let mut set = ptr::null_mut();
    assert_eq!(unsafe { condorcet_solve(ptr::null(), &mut set) }, CONDORCET_ERR_NULL);
    assert!(set.is_null());

    let inst = parse(STRICT);
    let wrong = c(r#"[{"a9":"o0"}]"#);
    let code = unsafe { condorcet_set_parse(inst, wrong.as_ptr(), &mut set) };
    assert_eq!(code, condorcet::Error::Validation(String::new()).code());
    unsafe { condorcet_instance_free(inst) };
}

#[test]
fn success_clears_the_last_error() {
    let bad = c("[");
    let mut inst = ptr::null_mut();
    assert_ne!(unsafe { condorcet_instance_parse(bad.as_ptr(), &mut inst) }, CONDORCET_OK);
    assert!(!condorcet_last_error().is_null());
    let inst = parse(STRICT);
    assert!(condorcet_last_error().is_null());
    unsafe { condorcet_instance_free(inst) };
}

#[test]
fn null_handles_are_harmless() {
    unsafe {
        condorcet_instance_free(ptr::null_mut());
        condorcet_set_free(ptr::null_mut());
        condorcet_string_free(ptr::null_mut());
        assert_eq!(condorcet_instance_n_agents(ptr::null()), 0);
        assert_eq!(condorcet_set_len(ptr::null()), 0);
    }
}

#[test]
fn arborescence_pair_as_json() {
    let json = c(r#"{"nodes":["r","a","b"],"root":"r","arcs":[["r","a"],["r","b"],["a","b"],["b","a"]],"prefs":{}}"#);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { condorcet_arborescence_solve(json.as_ptr(), &mut out) }, CONDORCET_OK);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["first"].as_array().unwrap().len(), 2);
    assert_eq!(v["second"].as_array().unwrap().len(), 2);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/condorcet.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 12);
    for name in exports {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/condorcet.h");
    let status = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
}
