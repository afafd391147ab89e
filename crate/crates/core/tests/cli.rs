use std::path::{Path, PathBuf};
use std::process::Command;

use dh_pencil::cli::{resolve_tolerance, run};
use dh_pencil::io::{read_matrix_market, write_matrix_market, AnalysisDocument, PencilDescriptor};
use dh_pencil::linalg::{Matrix, Tolerance};
use dh_pencil::pencil::{fixture, FixtureParams};
use dh_pencil::stabilization::{stabilize, YChoice};
use serde_json::Value;

fn tmp(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("dh-pencil-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn bin(args: &[&str], env_tol: Option<&str>) -> (i32, String, String) {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dh-pencil"));
    c.args(args).env_remove("DH_PENCIL_TOL");
    if let Some(t) = env_tol {
        c.env("DH_PENCIL_TOL", t);
    }
    let o = c.output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

fn generate_fixture(dir: &Path, name: &str, params: &[&str]) -> PathBuf {
    let mut args = vec!["generate", "fixture", name, "--out", dir.to_str().unwrap()];
    args.extend_from_slice(params);
    let (code, _, err) = bin(&args, None);
    assert_eq!(code, 0, "{err}");
    dir.join(format!("{}.json", name.replace(':', "_")))
}

fn strip_version(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("version");
    v
}

#[test]
fn check_reports_left_index_of_eq() {
    let dir = tmp("check");
    let m = generate_fixture(&dir, "ex:rhp", &["--param", "a=1"]);
    let (code, out, _) = bin(&["check", m.to_str().unwrap(), "--format", "json"], None);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["eq_structure"]["left_minimal_indices"], serde_json::json!([1]));
    let (code, out, _) = bin(&["check", m.to_str().unwrap()], None);
    assert_eq!(code, 0);
    assert!(out.contains("left minimal indices [1]"));
}

#[test]
fn analyze_matches_library() {
    let dir = tmp("analyze");
    let tol = Tolerance::default();
    for (name, params) in [("nonsimple0", vec![]), ("rem:ind", vec!["--param", "n=4"]), ("rlc", vec![])] {
        let m = generate_fixture(&dir, name, &params);
        let (code, out, _) = bin(&["analyze", m.to_str().unwrap(), "--format", "json"], None);
        let (_, p) = PencilDescriptor::load(&m).unwrap();
        let doc = AnalysisDocument::new(&p, &tol);
        assert_eq!(code, if doc.stability.hypothesis_report.holds() { 0 } else { 1 }, "{name}");
        let got: Value = serde_json::from_str(&out).unwrap();
        let want: Value = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(strip_version(got), strip_version(want), "{name}");
        let (_, again, _) = bin(&["analyze", m.to_str().unwrap(), "--format", "json"], None);
        assert_eq!(again, out);
    }
}

#[test]
fn analyze_rejects_bad_input() {
    let dir = tmp("bad");
    std::fs::write(dir.join("E.mtx"), "%%MatrixMarket matrix array real general\n2 2\n1\n0\n0\n1\n").unwrap();
    std::fs::write(dir.join("Q.mtx"), "%%MatrixMarket matrix array real general\n1 1\n1\n").unwrap();
    let manifest = dir.join("bad.json");
    std::fs::write(&manifest, r#"{"field": "real", "E": "E.mtx", "Q": "Q.mtx", "L": [[-1, 0], [0, -1]]}"#).unwrap();
    let (code, out, err) = bin(&["analyze", manifest.to_str().unwrap()], None);
    assert_eq!(code, 2);
    assert!(out.is_empty() && err.contains("error"));
    let (code, _, _) = bin(&["analyze", dir.join("missing.json").to_str().unwrap()], None);
    assert_eq!(code, 2);
    let (code, _, _) = bin(&["frobnicate"], None);
    assert_eq!(code, 2);
    let (code, _, err) = bin(&["analyze", manifest.to_str().unwrap()], Some("abc"));
    assert_eq!(code, 2);
    assert!(err.contains("DH_PENCIL_TOL"));
}

#[test]
fn stabilize_nonsimple_zero() {
    let dir = tmp("stab");
    let m = generate_fixture(&dir, "nonsimple0", &[]);
    let out_dir = dir.join("out");
    let (code, out, err) =
        bin(&["stabilize", m.to_str().unwrap(), "--mode", "zero", "--out", out_dir.to_str().unwrap(), "--format", "json"], None);
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["perturbation"]["perturbed"]["zero_jordan_sizes"], serde_json::json!([1, 1]));
    let dj = read_matrix_market(out_dir.join("delta_J.mtx")).unwrap();
    let tol = Tolerance::default();
    let p = fixture("nonsimple0", &FixtureParams::new()).unwrap();
    let s = stabilize(&p, &YChoice::Zero, &tol).unwrap();
    assert_eq!(dj, s.delta_j);
    assert_eq!(read_matrix_market(out_dir.join("delta_R.mtx")).unwrap(), s.delta_r);
    let (_, pp) = PencilDescriptor::load(out_dir.join("perturbed.json")).unwrap();
    assert_eq!(pp.l(), s.perturbed(&p, 1.0, 1.0).unwrap().l());

    let (code, _, _) = bin(&["stabilize", m.to_str().unwrap(), "--mode", "symmetric-only", "--out", out_dir.to_str().unwrap()], None);
    assert_eq!(code, 3);
    let y = dir.join("y.mtx");
    write_matrix_market(&Matrix::from_rows(&[vec![1.0]]), &y).unwrap();
    let args = ["stabilize", m.to_str().unwrap(), "--mode", "mixed", "--y", y.to_str().unwrap(), "--out", out_dir.to_str().unwrap()];
    assert_eq!(bin(&args, None).0, 3);
    assert_eq!(bin(&["stabilize", m.to_str().unwrap(), "--mode", "mixed"], None).0, 2);

    let m2 = generate_fixture(&dir, "index2", &[]);
    assert_eq!(bin(&["stabilize", m2.to_str().unwrap(), "--out", out_dir.to_str().unwrap()], None).0, 3);
}

#[test]
fn condense_writes_files() {
    let dir = tmp("condense");
    let m = generate_fixture(&dir, "nonsimple0", &[]);
    let out = dir.join("s5");
    let (code, _, err) = bin(&["condense", m.to_str().unwrap(), "--which", "section5", "--out", out.to_str().unwrap()], None);
    assert_eq!(code, 0, "{err}");
    let manifest: Value = serde_json::from_str(&std::fs::read_to_string(out.join("condensed.json")).unwrap()).unwrap();
    assert_eq!(manifest["document"]["condensed"]["section5"]["partition"], serde_json::json!([0, 1, 1, 0]));
    let a = read_matrix_market(out.join("A_condensed.mtx")).unwrap();
    assert_eq!(a[(1, 0)].norm(), 1.0);

    let m = generate_fixture(&dir, "rem:ind", &["--param", "n=3"]);
    let out = dir.join("eq");
    let (code, _, err) = bin(&["condense", m.to_str().unwrap(), "--which", "eq", "--out", out.to_str().unwrap()], None);
    assert_eq!(code, 0, "{err}");
    let (_, p) = PencilDescriptor::load(&m).unwrap();
    let u = read_matrix_market(out.join("U.mtx")).unwrap();
    let x = read_matrix_market(out.join("X.mtx")).unwrap();
    let ec = read_matrix_market(out.join("E_condensed.mtx")).unwrap();
    assert!((&(&u * p.e()) * &x).max_diff(&ec) < 1e-9);
}

#[test]
fn generate_kinds() {
    let dir = tmp("gen");
    let d = dir.to_str().unwrap();
    let (code, _, err) = bin(&["generate", "left-indices", "--n", "5", "--m", "7", "--eta", "1,2", "--out", d], None);
    assert_eq!(code, 0, "{err}");
    let (code, out, _) = bin(&["check", dir.join("left_indices.json").to_str().unwrap(), "--format", "json"], None);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["eq_structure"]["left_minimal_indices"], serde_json::json!([1, 2]));

    let (code, _, _) = bin(&["generate", "random", "--n", "4", "--m", "6", "--field", "complex", "--seed", "3", "--out", d], None);
    assert_eq!(code, 0);
    let (_, p) = PencilDescriptor::load(dir.join("random.json")).unwrap();
    assert_eq!(p.e().shape(), (4, 6));

    let args = ["generate", "zero-defective", "--partition", "1,1,1,1", "--seed", "9", "--out", d];
    assert_eq!(bin(&args, None).0, 0);
    let (code, _, _) = bin(&["stabilize", dir.join("zero_defective.json").to_str().unwrap(), "--out", d], None);
    assert_eq!(code, 0);

    assert_eq!(bin(&["generate", "fixture", "nope", "--out", d], None).0, 2);
    assert_eq!(bin(&["generate", "left-indices", "--n", "2", "--m", "2", "--eta", "3", "--out", d], None).0, 3);
}

#[test]
fn tolerance_resolution() {
    let d = Tolerance::default();
    assert_eq!(resolve_tolerance(None, None).unwrap(), d);
    assert_eq!(resolve_tolerance(None, Some("1e-6")).unwrap().relative, 1e-6);
    assert_eq!(resolve_tolerance(Some(1e-4), Some("1e-6")).unwrap().relative, 1e-4);
    assert!(resolve_tolerance(Some(-1.0), None).is_err());
    assert!(resolve_tolerance(None, Some("x")).is_err());

    let dir = tmp("tol");
    let m = generate_fixture(&dir, "nonsimple0", &[]);
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run(["dh-pencil", "analyze", m.to_str().unwrap(), "--format", "json"], Some("1e-6"), &mut out, &mut err);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(v["tolerance"]["relative"], serde_json::json!(1e-6));
    let (_, text, _) = bin(&["analyze", m.to_str().unwrap(), "--format", "json"], Some("1e-6"));
    assert_eq!(text.as_bytes(), &out[..]);
}

#[test]
fn batch_analysis_matches_single_runs() {
    let dir = tmp("batch");
    for name in ["nonsimple0", "rlc", "ex:rhp"] {
        generate_fixture(&dir, name, &[]);
    }
    let (code, out, err) = bin(&["analyze", "--batch", dir.to_str().unwrap(), "--format", "json"], None);
    assert_eq!(code, 1, "{err}");
    let v: Value = serde_json::from_str(&out).unwrap();
    for name in ["nonsimple0", "rlc", "ex_rhp"] {
        let m = dir.join(format!("{name}.json"));
        let (_, single, _) = bin(&["analyze", m.to_str().unwrap(), "--format", "json"], None);
        let single: Value = serde_json::from_str(&single).unwrap();
        assert_eq!(v[format!("{name}.json")], single, "{name}");
    }
}
