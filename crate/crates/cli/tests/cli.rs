use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn galsym(session: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galsym"))
        .arg("--session")
        .arg(session)
        .args(args)
        .env_remove("GALSYM_SESSION")
        .output()
        .expect("binary runs")
}

fn json_ok(session: &Path, args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = galsym(session, &full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

fn session_with(q: &str, m: &str, unif: &str) -> (TempDir, std::path::PathBuf) {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("session.json");
    let out = galsym(&path, &["tower", "new", "--q", q, "--m", m, "--uniformizers", unif]);
    assert!(out.status.success());
    (dir, path)
}

#[test]
fn period_index_on_m6() {
    let (_dir, s) = session_with("7", "6", "t1,t2");
    let v = json_ok(&s, &["period-index", "(c,t1,t2)"]);
    assert_eq!(v["result"]["period"], 6);
    assert_eq!(v["result"]["degree"], 6);
    assert_eq!(v["result"]["equal"], true);
    assert_eq!(v["tower"]["m"], 6);
    assert!(v["generator_convention"].as_str().unwrap().contains("c = 3"));
}

#[test]
fn normalize_diagonal() {
    let (_dir, s) = session_with("7", "2", "t1");
    let v = json_ok(&s, &["normalize", "(t1,t1)"]);
    assert_eq!(v["result"]["coeffs"], serde_json::json!({"c,t1": 1}));
}

#[test]
fn tate_slot_is_tower_free() {
    let dir = TempDir::new().unwrap();
    let v = json_ok(&dir.path().join("absent.json"), &["tate-slot", "(-1,-1)", "(-1,-3)"]);
    assert_eq!(v["result"]["d"], -1);
    assert_eq!(v["result"]["ramification"]["(-1,-3)"], serde_json::json!(["3", "inf"]));
    assert!(v["result"]["verification"].as_array().unwrap().iter().all(|c| c["nonsquare"] == true));
    assert!(v["tower"].is_null());
}

#[test]
fn hilbert_oracle() {
    let dir = TempDir::new().unwrap();
    let v = json_ok(&dir.path().join("absent.json"), &["oracle", "hilbert", "7", "7", "--place", "7"]);
    assert_eq!(v["result"]["symbols"][0]["symbol"], -1);
    let v = json_ok(&dir.path().join("absent.json"), &["oracle", "hilbert", "-1", "-1"]);
    assert_eq!(v["result"]["ramification"], serde_json::json!(["2", "inf"]));
}

#[test]
fn split_both_orders() {
    let (_dir, s) = session_with("7", "6", "t");
    for (order, first) in [("2,3", 2), ("3,2", 3)] {
        let v = json_ok(&s, &["split", "--order", order, "(c,t)"]);
        assert_eq!(v["result"]["degree"], 6);
        assert_eq!(v["result"]["verified"], true);
        assert_eq!(v["result"]["chain"][0]["degree"], first);
    }
}

#[test]
fn decompose_trace_and_descent() {
    let (_dir, s) = session_with("7", "3", "t");
    let v = json_ok(&s, &["decompose", "--trace", "(c*t, t^2)"]);
    assert!(!v["result"]["trace"].as_array().unwrap().is_empty());
    assert_eq!(v["result"]["rewrite"]["agrees"], true);

    let (_dir, s) = session_with("7", "5", "t");
    let v = json_ok(&s, &["descend"]);
    assert_eq!(v["result"]["d"], 4);
    assert_eq!(v["result"]["valid"], true);
}

#[test]
fn errors_are_structured() {
    let (_dir, s) = session_with("7", "2", "t");
    let out = galsym(&s, &["--json", "normalize", "(c,"]);
    assert!(!out.status.success());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "Parse");
    assert!(err["error"]["message"].as_str().unwrap().contains("column 4"));

    let out = galsym(&s, &["split", "(c,t) + (t)"]);
    assert!(!out.status.success());

    let (_dir, s) = session_with("7", "3", "t");
    let out = galsym(&s, &["--json", "descend"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "Precondition");

    let dir = TempDir::new().unwrap();
    let out = galsym(&dir.path().join("missing.json"), &["normalize", "(c,t)"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("tower new"));
}

#[test]
fn seeded_output_is_reproducible() {
    let (_dir, s) = session_with("13", "12", "t1,t2");
    let run = |seed: &str| galsym(&s, &["--json", "--seed", seed, "common-slot", "--random", "5"]).stdout;
    assert_eq!(run("42"), run("42"));
    assert_ne!(run("42"), run("43"));
    let v: Value = serde_json::from_slice(&run("42")).unwrap();
    assert_eq!(v["result"]["verified"], true);
}
