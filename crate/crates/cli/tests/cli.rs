use std::process::{Command, Output};

use interkernel::classifier::KernelBasis;
use interkernel::worked::{hardy_model, HardyModel};
use serde_json::Value;

const HARDY: &str = "a0=0.5,ainf=0.25,b0=-0.5,binf=-0.75";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_interkernel"))
        .args(args)
        .env_remove("INTERKERNEL_GRID")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn verdict_of(v: &Value) -> String {
    match &v["verdict"] {
        Value::String(s) => s.clone(),
        Value::Object(m) => m.keys().next().unwrap().clone(),
        other => panic!("unexpected verdict {other}"),
    }
}

#[test]
fn classify_hardy_verdicts() {
    let out = run(&["classify", "--hardy", HARDY, "--theta", "0.1,0.25,0.4,0.5,0.7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    let got: Vec<String> = v["classifications"].as_array().unwrap().iter().map(verdict_of).collect();
    assert_eq!(got, ["Invertible", "NotFredholm", "ClassF1", "NotFredholm", "Invertible"]);
    assert_eq!(v["classifications"][2]["verdict"]["ClassF1"]["dim_ker"], 1);
}

#[test]
fn classify_csv_sweep() {
    let out = run(&["classify", "--hardy", HARDY, "--theta-range", "0.05:0.95:0.05", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,verdict,n,d"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 19);
    assert!(rows.iter().any(|r| r.contains(",ClassF1,1,0")));
}

#[test]
fn missing_hardy_field_is_named() {
    let out = run(&["classify", "--hardy", "a0=0.5,ainf=0.25,b0=-0.5", "--theta", "0.4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("binf"), "{}", stderr(&out));
}

#[test]
fn json_missing_field_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, r#"{"model":"hardy","p":2,"a0":0.5,"a_inf":0.25,"b0":-0.5}"#).unwrap();
    let out = run(&["classify", "--input", path.to_str().unwrap(), "--theta", "0.4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("b_inf"), "{}", stderr(&out));
}

#[test]
fn input_file_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    std::fs::write(&path, r#"{"model":"hardy","p":2,"a0":0.5,"a_inf":0.25,"b0":-0.5,"b_inf":-0.75}"#).unwrap();
    let a = run(&["classify", "--input", path.to_str().unwrap(), "--theta", "0.4", "--format", "csv"]);
    let b = run(&["classify", "--hardy", HARDY, "--theta", "0.4", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn breakpoint_at_q_inf_is_boundary() {
    let out = run(&["classify", "--hardy", HARDY, "--theta", "0.25", "--q", "inf"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert_eq!(verdict_of(&json(&out)["classifications"][0]), "Boundary");
}

#[test]
fn theta_outside_unit_interval() {
    let out = run(&["classify", "--hardy", HARDY, "--theta", "1.2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("theta"));
}

#[test]
fn indices_of_hardy_kernel_and_reference_element() {
    let out = run(&["indices", "--hardy", HARDY]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let ix = &json(&out)["indices"];
    assert_eq!(ix["alpha0"], 0.5);
    assert_eq!(ix["alpha_inf"], 0.25);

    let out = run(&["indices", "--a-theta", "0.3"]);
    let ix = &json(&out)["indices"];
    for key in ["alpha", "beta", "alpha0", "beta0", "alpha_inf", "beta_inf"] {
        assert!((ix[key].as_f64().unwrap() - 0.3).abs() < 1e-9, "{key}: {}", ix[key]);
    }
}

#[test]
fn empty_kernel_indices_are_vacuous() {
    let mut model = hardy_model(&HardyModel::with_breakpoints(2.0, 0.5, 0.25).unwrap()).unwrap();
    if let KernelBasis::Functions { basis, .. } = &mut model.kernel {
        basis.clear();
    }
    let spec = serde_json::json!({"model": "custom", "operator": model}).to_string();
    let out = run(&["indices", "--json", &spec]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    assert!(v["element"].as_str().unwrap().contains("dimension 0"));
    assert_eq!(v["indices"]["certification"]["source"], "vacuous");
    assert_eq!(v["indices"]["alpha"], 1.0);
    assert_eq!(v["indices"]["beta"], 0.0);

    let out = run(&["classify", "--json", &spec, "--theta", "0.25"]);
    assert_eq!(verdict_of(&json(&out)["classifications"][0]), "Invertible");
}

#[test]
fn factorize_needs_finite_q() {
    let out = run(&["factorize", "--hardy", HARDY, "--theta", "0.4", "--q", "inf"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["factorize", "--hardy", HARDY, "--theta", "0.4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(json(&out)[0]["factors"].as_array().is_some());
}

#[test]
fn seqcheck_passes() {
    let out = run(&["seqcheck", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json(&out);
    for s in v["suites"].as_array().unwrap() {
        assert_eq!(s["violations"], 0, "{s}");
    }
    assert_eq!(v["growth"]["verdict"], "Diverging");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<_> = (0..2).map(|i| dir.path().join(format!("run{i}.json"))).collect();
    for p in &paths {
        let out = run(&["seqcheck", "--seed", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        assert!(out.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());

    let a = run(&["classify", "--hardy", HARDY, "--theta-range", "0.1:0.9:0.1"]);
    let b = run(&["classify", "--hardy", HARDY, "--theta-range", "0.1:0.9:0.1"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn hardy_table_lists_breakpoints() {
    let out = run(&["hardy-table", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("2.5000000000000000e-1,NotFredholm")));
    assert!(text.lines().any(|l| l.contains("ClassF1,1,0")));
}

#[test]
fn strip_table_has_kernel_jumps() {
    let out = run(&["strip-table", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("2.5000000000000000e-1,NotFredholm")));
    assert!(text.lines().any(|l| l.starts_with("5.0000000000000000e-1,Invertible")));
}
