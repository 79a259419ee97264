//! The command line, run in-process through `cli::run`.

use revccs::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["revccs"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn check_prints_the_verdict_first() {
    let (code, out, _) = call(&["check", "--relation", "hhpb", "a.(b+b)", "(a.b)+(a.b)"]);
    assert_eq!((code, out.lines().next()), (0, Some("HOLDS")));
    let (code, out, _) = call(&["check", "--relation", "sbf", "(a.a)|b", "a|a|b"]);
    assert_eq!((code, out.lines().next()), (0, Some("HOLDS")));
    let (code, out, _) = call(&["check", "--relation", "hpb", "(a.a)|b", "a|a|b"]);
    assert_eq!((code, out.lines().next()), (0, Some("FAILS")));
    assert!(out.lines().count() > 1, "a failure prints its certificate");
}

#[test]
fn check_json() {
    let (code, out, _) = call(&["check", "--relation", "bf", "--format", "json", "a", "a"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["relation"], "bf");
}

#[test]
fn encode_nil_as_json() {
    let (code, out, _) = call(&["encode", "0", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v, serde_json::json!({"events": [], "configs": [[]]}));
}

#[test]
fn outputs_are_deterministic() {
    for args in [
        &["lts", "a.b | ~a", "--format", "dot"][..],
        &["encode", "(a.b) | (c.~a)", "--format", "json"],
        &["check", "--relation", "hhpb-rccs", "a.(b+b)", "(a.b)+(a.b)"],
    ] {
        assert_eq!(call(args), call(args));
    }
}

#[test]
fn step_scripts() {
    let (code, out, _) = call(&["step", "a.b | c.~a", "+c; +tau; +b; -3"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("+1:c"));
    assert!(lines[2].starts_with("+2:tau"));
    assert!(lines[4].starts_with("-3:b"));
    let (code, out, _) = call(&["step", "a | a", "+7:a#2", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["steps"][0]["id"], 7);
    assert_eq!(call(&["step", "a", "+b"]).0, 1);
    assert_eq!(call(&["step", "a", "-1"]).0, 1);
    assert_eq!(call(&["step", "a", "+1:a; +1:a"]).0, 1);
}

#[test]
fn memories_and_addresses() {
    let r = "(<2,a,0>.Y.{} |> b) | (<1,c,0>.Y.{} |> 0)";
    let (code, out, _) = call(&["address", r]);
    assert_eq!(code, 0);
    assert!(out.starts_with("address: {a, c}"));
    let (code, out, _) = call(&["encode-memory", r, "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["configs"].as_array().unwrap().len(), 4);
}

#[test]
fn parse_reports_kinds() {
    assert!(call(&["parse", "a.b | ~a"]).1.contains("kind: ccs"));
    assert!(call(&["parse", "(a | b) + c"]).1.contains("kind: term"));
    assert!(call(&["parse", "<1,a,0>.{} |> 0"]).1.contains("kind: rccs"));
    let (code, _, err) = call(&["parse", "a.("]);
    assert_eq!(code, 1);
    assert!(err.contains("parse error"));
}

#[test]
fn file_arguments() {
    let dir = std::env::temp_dir().join(format!("revccs-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("p.ccs");
    std::fs::write(&path, "a.(b + b)\n").unwrap();
    let arg = format!("@{}", path.display());
    let (code, out, _) = call(&["check", "--relation", "hhpb", &arg, "(a.b)+(a.b)"]);
    assert_eq!((code, out.lines().next()), (0, Some("HOLDS")));
    assert_eq!(call(&["encode", "@/nonexistent/revccs/input"]).0, 1);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(call(&[]).0, 1);
    assert_eq!(call(&["check", "a", "b"]).0, 1, "relation is required");
    assert_eq!(call(&["check", "--relation", "nope", "a", "b"]).0, 1);
    assert_eq!(call(&["check", "--relation", "bf", "--weak", "a", "a"]).0, 1);
    assert_eq!(call(&["check", "--relation", "bf", "(a | b) + c", "a"]).0, 1, "not a CCS process");
    assert_eq!(call(&["check", "--relation", "bf", "--format", "dot", "a", "a"]).0, 1);
    let (code, _, err) = call(&["--state-cap", "2", "lts", "a.b"]);
    assert_eq!(code, 2);
    assert!(err.contains("state cap"));
    assert_eq!(call(&["--state-cap", "2", "check", "--relation", "sbf", "a.b", "a.b"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn reference_suite_passes() {
    let (code, out, _) = call(&["paper-suite"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(|l| l.starts_with("PASS") || l.ends_with("passed")));
    let (code, out, _) = call(&["paper-suite", "--spot-checks", "10", "--seed", "5", "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["passed"], v["total"]);
}

#[test]
fn state_cap_from_environment() {
    let bin = env!("CARGO_BIN_EXE_revccs");
    let run_with = |args: &[&str]| {
        std::process::Command::new(bin).args(args).env("REVCCS_STATE_CAP", "2").output().unwrap()
    };
    assert_eq!(run_with(&["lts", "a.b"]).status.code(), Some(2));
    assert_eq!(run_with(&["--state-cap", "10", "lts", "a.b"]).status.code(), Some(0), "the flag wins");
    let out = std::process::Command::new(bin).args(["lts", "a.b"]).env_remove("REVCCS_STATE_CAP").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
