use std::process::{Command, Output};

use serde_json::Value;

fn realign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_realign")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = realign(&full);
    assert_eq!(code(&o), 0, "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn items(v: &Value) -> &Vec<Value> {
    v["items"].as_array().unwrap()
}

#[test]
fn bell_ccnr() {
    let v = json(&["detect", "--state", "builtin:bell(2)", "--criterion", "ccnr"]);
    let r = &items(&v)[0];
    assert_eq!(r["kind"], "criterion");
    assert!((r["lhs"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert_eq!(r["verdict"], "ENTANGLED");
    assert_eq!(v["digest"].as_str().unwrap().len(), 64);
}

#[test]
fn tiles_escapes_ppt_but_not_q() {
    let v = json(&["detect", "--state", "builtin:tiles", "--criterion", "ppt,thm1", "--mu", "1,1", "--nu", "1,0"]);
    let it = items(&v);
    assert_eq!(it[0]["criterion"], "ppt");
    assert_eq!(it[0]["verdict"], "INCONCLUSIVE");
    assert_eq!(it[1]["criterion"], "qmat");
    assert_eq!(it[1]["verdict"], "ENTANGLED");
}

#[test]
fn white_noise_ghz_not_flagged() {
    let v = json(&["detect", "--state", "builtin:ghz_noise(1)", "--criterion", "bisep", "--mu", "1", "--nu", "1"]);
    assert_eq!(items(&v)[0]["verdict"], "INCONCLUSIVE");
}

#[test]
fn cut_gives_bipartite_view() {
    let v = json(&["detect", "--state", "builtin:w_noise(1)", "--criterion", "ccnr", "--cut", "2"]);
    assert_eq!(items(&v)[0]["verdict"], "ENTANGLED");
    let o = realign(&["detect", "--state", "builtin:w_noise(1)", "--criterion", "ccnr"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn digest_is_deterministic() {
    let a = json(&["detect", "--state", "builtin:bell(3)", "--criterion", "ccnr"]);
    let b = json(&["detect", "--state", "builtin:bell(3)", "--criterion", "ccnr"]);
    let c = json(&["detect", "--state", "builtin:bell(3)", "--criterion", "ccnr", "--tau", "0.1"]);
    assert_eq!(a["digest"], b["digest"]);
    assert_ne!(a["digest"], c["digest"]);
}

fn threshold(v: &Value) -> f64 {
    let t = items(v).iter().find(|i| i["kind"] == "threshold").unwrap();
    t["threshold"].as_f64().unwrap()
}

#[test]
fn scan_example1_with_reference_vectors() {
    let v = json(&[
        "scan", "--family", "example1", "--lo", "0", "--hi", "1", "--mu", "1,1,1,1,1", "--nu", "1,1,1,1,1",
    ]);
    let t = threshold(&v);
    assert!(t > 0.0 && t < 1.0);
}

#[test]
fn scan_example2_at_fixed_t() {
    let v = json(&[
        "scan", "--family", "example2(0.9)", "--lo", "0.9", "--hi", "1", "--mu", "2.3125,9,9", "--nu", "2.35,9,9",
    ]);
    let t = threshold(&v);
    assert!((t - 0.999073).abs() < 5e-4, "{t}");
}

#[test]
fn scan_w_noise_bisep() {
    let v = json(&["scan", "--family", "w_noise", "--lo", "0.5", "--hi", "1", "--criterion", "bisep", "--mu", "1,2", "--nu", "2,1"]);
    let t = threshold(&v);
    assert!((t - 0.805131).abs() < 5e-4, "{t}");
}

#[test]
fn scan_without_verdict_change_exits_4() {
    let o = realign(&["scan", "--family", "tiles_noise", "--lo", "0", "--hi", "0.1", "--criterion", "ccnr"]);
    assert_eq!(code(&o), 4);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[NoSignChange]"));
}

#[test]
fn scan_grid_csv() {
    let o = realign(&["--csv", "scan", "--family", "w_noise", "--lo", "0.5", "--hi", "1", "--criterion", "bisep", "--mu", "1,2", "--nu", "2,1", "--grid", "4"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "family,param,criterion,lhs,rhs,margin,verdict");
    assert_eq!(lines.len(), 1 + 4 + 2);
    assert!(lines[1].starts_with("w_noise,0.5,bisep,"));
}

#[test]
fn bound_on_tiles() {
    let v = json(&["bound", "--state", "builtin:tiles", "--mu", "1,1", "--nu", "1,0", "--measure", "concurrence"]);
    let b = &items(&v)[0];
    assert_eq!(b["measure"], "concurrence");
    assert!((b["bound"].as_f64().unwrap() - 0.044064).abs() < 1e-3);
}

#[test]
fn bound_defaults_to_gme_for_three_parties() {
    let v = json(&["bound", "--state", "builtin:ghz_noise(0)", "--mu", "1", "--nu", "1"]);
    assert_eq!(items(&v)[0]["measure"], "gme_concurrence");
}

#[test]
fn optimize_is_reproducible() {
    let args = ["optimize", "--state", "builtin:tiles_noise(0.95)", "--restarts", "3", "--max-iters", "200", "--seed", "7"];
    let a = json(&args);
    let b = json(&args);
    assert_eq!(items(&a)[0]["best"], items(&b)[0]["best"]);
    assert_eq!(items(&a)[0]["margin"], items(&b)[0]["margin"]);
    let trace = items(&a)[0]["trace"].as_array().unwrap();
    let margins: Vec<f64> = trace.iter().map(|p| p["margin"].as_f64().unwrap()).collect();
    assert!(margins.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn detect_with_auto_params() {
    let v = json(&["detect", "--state", "builtin:example1(0.5)", "--auto-params", "--restarts", "2", "--max-iters", "300"]);
    let it = items(&v);
    assert_eq!(it[0]["kind"], "optimization");
    assert_eq!(it[1]["verdict"], "ENTANGLED");
}

#[test]
fn reproduce_selected_examples() {
    for id in ["2", "5", "6"] {
        let o = realign(&["reproduce", "--example", id]);
        assert_eq!(code(&o), 0, "example {id}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains(&format!("example {id}:")));
    }
}

#[test]
fn reproduce_deviation_exits_5() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ref.toml");
    let bundled = include_str!("../../core/data/reference.toml");
    let shifted = bundled.replace("value = 0.805132\ntol = 5e-4", "value = 0.5\ntol = 5e-4");
    assert_ne!(shifted, bundled);
    std::fs::write(&path, shifted).unwrap();
    let o = realign(&["reproduce", "--example", "5", "--reference", path.to_str().unwrap()]);
    assert_eq!(code(&o), 5, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("DEVIATION"));
}

#[test]
fn json_report_round_trips() {
    let v = json(&["reproduce", "--example", "1"]);
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);
    assert_eq!(items(&v)[0]["kind"], "example");
}

#[test]
fn export_then_detect_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tiles.json");
    let o = realign(&["export", "--state", "builtin:tiles", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let spec = format!("file:{}", path.display());
    let from_file = json(&["detect", "--state", &spec, "--criterion", "ccnr"]);
    let builtin = json(&["detect", "--state", "builtin:tiles", "--criterion", "ccnr"]);
    assert_eq!(items(&from_file)[0]["lhs"], items(&builtin)[0]["lhs"]);
    assert_eq!(from_file["digest"], builtin["digest"]);
}

#[test]
fn bad_trace_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"dims":[2],"matrix":[[[0.5,0],[0,0]],[[0,0],[0.4,0]]]}"#).unwrap();
    let o = realign(&["detect", "--state", &format!("file:{}", path.display()), "--criterion", "ccnr"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("error[TraceNotOne]"));
}

#[test]
fn malformed_state_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\n  \"dims\": [2,\n").unwrap();
    let o = realign(&["detect", "--state", &format!("file:{}", path.display())]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["detect", "--state", "builtin:bell(2)", "--criterion", "nope"][..],
        &["detect", "--state", "builtin:bell(2)", "--criterion", "thm1"],
        &["detect", "--state", "builtin:nosuch(1)"],
        &["detect", "--state", "file:/nonexistent/state.json"],
        &["reproduce", "--example", "9"],
        &["frobnicate"],
    ] {
        let o = realign(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn threads_variable_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_realign"))
        .args(["detect", "--state", "builtin:bell(2)", "--criterion", "ccnr"])
        .env("THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_realign"))
        .args(["detect", "--state", "builtin:bell(2)", "--criterion", "ccnr"])
        .env("THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}
