use std::process::{Command, Output};

use addlab::experiments::{ExhwCertificate, GapReport, KinkScanReport, SuiteReport, TensorCheckReport, Verdict};
use addlab::{HermitianMatrix, OptResult, SchmidtVector};
use serde::Deserialize;

fn addlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_addlab")).args(args).output().unwrap()
}

fn addlab_threads(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_addlab"))
        .args(args)
        .env("ADDLAB_THREADS", threads)
        .output()
        .unwrap()
}

fn ok_stdout(out: &Output) -> String {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[derive(Deserialize)]
struct SpectrumReport {
    schmidt: SchmidtVector,
    e_values: Vec<f64>,
    g_values: Vec<f64>,
    t: f64,
    theta: f64,
    spectrum: Vec<f64>,
}

#[derive(Deserialize)]
struct ConvexityReport {
    function_spec: String,
    dim: usize,
    samples: usize,
    passed: bool,
    worst_violation: f64,
    witness: (HermitianMatrix, HermitianMatrix),
}

#[test]
fn gap_on_werner_holevo_pair_is_certified() {
    let text = ok_stdout(&addlab(&["gap", "--pair", "wh:3,wh:3", "--fn", "power:5", "--seed", "7"]));
    let r: GapReport = serde_json::from_str(&text).unwrap();
    assert_eq!(r.verdict, Verdict::NonAdditiveCertified);
    assert!((r.gap - 2.4112654320987654e-4).abs() < 1e-9);
}

#[test]
fn spectrum_of_near_maximally_entangled_input() {
    let text = ok_stdout(&addlab(&["spectrum", "--schmidt", "0.333333,0.333333,0.333334"]));
    let r: SpectrumReport = serde_json::from_str(&text).unwrap();
    assert_eq!(r.spectrum.len(), 9);
    assert!((r.spectrum[0] - 1.0 / 3.0).abs() < 1e-6);
    for &v in &r.spectrum[1..] {
        assert!((v - 1.0 / 12.0).abs() < 1e-6);
    }
    assert_eq!((r.e_values.len(), r.g_values.len()), (6, 3));
    assert_eq!(r.schmidt.len(), 3);
    assert!(r.t > 0.037 && r.theta < 1e-4);
}

#[test]
fn certify_kink() {
    let text = ok_stdout(&addlab(&["certify", "--fn", "kink:0.30"]));
    let c: ExhwCertificate = serde_json::from_str(&text).unwrap();
    assert!((c.lhs - 1.0 / 30.0).abs() < 1e-12);
    assert_eq!(c.rhs, 0.0);
    assert!(c.non_additive);
}

#[test]
fn identical_arguments_give_identical_bytes() {
    let args = ["optimize", "--pair", "wh:3,id:2", "--fn", "xplogx:0.75", "--restarts", "6", "--seed", "3"];
    let a = addlab_threads(&args, "1");
    let b = addlab_threads(&args, "1");
    let c = addlab_threads(&args, "3");
    let a = ok_stdout(&a);
    assert_eq!(a, ok_stdout(&b));
    assert_eq!(a, ok_stdout(&c));
    let r: OptResult = serde_json::from_str(&a).unwrap();
    assert!(r.value.is_finite());
}

#[test]
fn every_report_reparses() {
    let text = ok_stdout(&addlab(&["optimize", "--mode", "maxeig", "--restarts", "4"]));
    let r: OptResult = serde_json::from_str(&text).unwrap();
    assert!((r.value - 1.0 / 3.0).abs() < 1e-6);

    let text = ok_stdout(&addlab(&["optimize", "--mode", "schmidt", "--fn", "power:2"]));
    let r: OptResult = serde_json::from_str(&text).unwrap();
    assert!((r.value - 0.25).abs() < 1e-12);

    let text = ok_stdout(&addlab(&["optimize", "--mode", "product", "--fn", "power:5", "--restarts", "2"]));
    let r: OptResult = serde_json::from_str(&text).unwrap();
    assert!((r.value - 3.90625e-3).abs() < 1e-15);

    let text = ok_stdout(&addlab(&["kink-scan", "--x0", "0.3,0.34", "--restarts", "4"]));
    let r: KinkScanReport = serde_json::from_str(&text).unwrap();
    assert!(r.grid[0].non_additive && !r.grid[1].non_additive);
    assert!(r.gamma_lower_bound >= 1.0 / 3.0);

    let text = ok_stdout(&addlab(&["suite", "--lambdas", "-0.5,0", "--grid", "60"]));
    let r: SuiteReport = serde_json::from_str(&text).unwrap();
    assert!(r.passed && r.entries.len() == 2);

    let text = ok_stdout(&addlab(&["tensor-check", "--fn", "kink:0.3", "--mu", "0.9,0.1", "--trials", "20"]));
    let r: TensorCheckReport = serde_json::from_str(&text).unwrap();
    assert!(r.passed && r.max_deviation <= 1e-9);

    let text = ok_stdout(&addlab(&["convexity", "--fn", "power:3", "--samples", "200"]));
    let r: ConvexityReport = serde_json::from_str(&text).unwrap();
    assert!(!r.passed && r.worst_violation > 1e-8);
    assert_eq!((r.function_spec.as_str(), r.dim, r.samples), ("power:3", 2, 200));
    assert_eq!(r.witness.0.dim(), 2);
    assert_eq!(r.witness.1.dim(), 2);
}

#[test]
fn csv_output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spec.csv");
    let out = addlab(&[
        "spectrum",
        "--schmidt",
        "1,0,0",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,index,value"));
    assert_eq!(lines.count(), 11);
}

#[test]
fn kraus_file_channels_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("damp.json");
    let g: f64 = 0.4;
    let kraus = format!(
        r#"{{"dim_in":2,"dim_out":2,"kraus":[{{"dim":2,"re":[1,0,0,{}],"im":[0,0,0,0]}},{{"dim":2,"re":[0,{},0,0],"im":[0,0,0,0]}}]}}"#,
        (1.0 - g).sqrt(),
        g.sqrt()
    );
    std::fs::write(&path, kraus).unwrap();
    let pair = format!("@{},id:2", path.display());
    let text = ok_stdout(&addlab(&["optimize", "--pair", &pair, "--fn", "power:2", "--mode", "product", "--restarts", "3"]));
    let r: OptResult = serde_json::from_str(&text).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);

    std::fs::write(&path, r#"{"dim_in":2,"dim_out":2,"kraus":[{"dim":2,"re":[1,0,0,1],"im":[0,0,0,0]},{"dim":2,"re":[1,0,0,1],"im":[0,0,0,0]}]}"#).unwrap();
    let out = addlab(&["optimize", "--pair", &pair, "--fn", "power:2"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_errors_exit_with_usage() {
    for args in [
        vec!["frobnicate"],
        vec!["gap", "--fn", "power:"],
        vec!["gap", "--fn", "power:5", "--pair", "wh:3"],
        vec!["gap", "--fn", "power:5", "--pair", "@/nonexistent/kraus.json,id:2"],
        vec!["spectrum", "--schmidt", "0.5,0.5"],
        vec!["optimize", "--mode", "entangled"],
        vec!["certify"],
    ] {
        let out = addlab(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains("Usage"), "{args:?}: {err}");
    }
    let out = addlab(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let out = addlab_threads(&["certify", "--fn", "power:2"], "0");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unconverged_gap_exits_with_two() {
    // a single local-search iteration cannot converge on a non-covariant pair
    let out = addlab(&[
        "gap",
        "--pair",
        "wh:3,id:2",
        "--fn",
        "power:3",
        "--restarts",
        "1",
        "--max-iters",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let r: GapReport = serde_json::from_slice(&out.stdout).unwrap();
    assert!(!r.converged);
    assert_eq!(r.verdict, Verdict::NumericalEvidenceOnly);
}
