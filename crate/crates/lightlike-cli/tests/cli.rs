use std::path::Path;
use std::process::{Command, Output};

use lightlike_cli::{emit, run, Metadata, RunConfig, Stage, VerificationReport};
use serde_json::{json, Value};

fn lightlike(config: &Value, extra: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("job.json");
    std::fs::write(&path, config.to_string()).unwrap();
    Command::new(env!("CARGO_BIN_EXE_lightlike")).arg("--config").arg(&path).args(extra).output().unwrap()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn trivial_pair() -> Value {
    json!({
        "command": "pair-gen",
        "m": 2,
        "exprs": {"f_plus": "0", "f_minus": "0", "g_plus": "x1", "g_minus": "x1"},
        "options": {"branch": "A", "mu": "+"}
    })
}

fn generic_pair() -> Value {
    json!({
        "command": "pair-gen",
        "m": 2,
        "exprs": {"f_plus": "sin(x1*x2)", "f_minus": "x1^2 - x2", "g_plus": "x2 + 0.3*x1^2", "g_minus": "cosh(x1) + 2*x2"},
        "options": {"branch": "B", "mu": "-"},
        "samples": 60,
        "seed": 17
    })
}

#[test]
fn trivial_pair_passes() {
    let out = lightlike(&trivial_pair(), &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(&out);
    assert_eq!(r["pass"], true);
    for s in r["stages"].as_array().unwrap() {
        assert!(s["max_residual"].as_f64().unwrap() <= 1e-9, "{s}");
    }
}

#[test]
fn identity_is_in_so() {
    let id: Vec<Vec<f64>> = (0..8).map(|i| (0..8).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let cfg = json!({"command": "so-check", "n": 2, "matrices": {"A": id}, "options": {"admissible": "true"}});
    let out = lightlike(&cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["stages"].as_array().unwrap().len(), 5);
}

#[test]
fn broken_walker_fails_with_named_stage() {
    let cfg = json!({
        "command": "walker-check",
        "forms": {"w32": ["1", "0"]},
        "matrices": {"D": [[1, 0], [0, 1], [-1, 0], [0, 1]]}
    });
    let out = lightlike(&cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["pass"], false);
    let failing: Vec<&str> = r["stages"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|s| s["pass"] == false)
        .map(|s| s["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, ["walker"]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`walker`"));
}

#[test]
fn runs_are_byte_identical() {
    for cfg in [trivial_pair(), generic_pair()] {
        let a = lightlike(&cfg, &[]);
        let b = lightlike(&cfg, &[]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let to_file = lightlike(&generic_pair(), &["--out", target.to_str().unwrap()]);
    assert!(to_file.stdout.is_empty());
    let to_stdout = lightlike(&generic_pair(), &[]);
    assert_eq!(std::fs::read(Path::new(&target)).unwrap(), to_stdout.stdout);
}

#[test]
fn flags_override_the_config() {
    let out = lightlike(&generic_pair(), &["--seed", "99", "--tol", "1e-7"]);
    let r = report(&out);
    assert_eq!(r["metadata"]["seed"], 99);
    assert!(r["stages"].as_array().unwrap().iter().all(|s| s["tol"].as_f64() == Some(1e-7)));
    assert_ne!(out.stdout, lightlike(&generic_pair(), &[]).stdout);
}

#[test]
fn invalid_inputs_exit_2() {
    let cases = [
        json!({"command": "no-such-command"}),
        json!({"command": "pair-gen", "exprs": {"f_plus": "0"}}),
        json!({"command": "norm", "forms": {"w21": ["x3", "0"]}}),
        json!({"command": "norm", "box": [[1, -1], [0, 1]]}),
        json!({"command": "so-check", "matrices": {"A": [[1, 0], [0]]}}),
        json!({"command": "pair-gen", "exprs": {"f_plus": "0", "f_minus": "0", "g_plus": "0", "g_minus": "x1"}}),
        json!({"command": "so-check", "unknown_field": 1}),
    ];
    for cfg in cases {
        let out = lightlike(&cfg, &[]);
        assert_eq!(out.status.code(), Some(2), "{cfg}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(out.stdout.is_empty());
    }
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_lightlike")).arg("--config").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_3() {
    let out = lightlike(&json!({"command": "norm", "forms": {"w21": ["log(x1)", "0"]}}), &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("log"));
}

fn metadata() -> Metadata {
    Metadata { seed: 3, bounds: vec![[-1.0, 1.0]], versions: lightlike_cli::versions() }
}

#[test]
fn empty_stage_list_is_invalid() {
    let r = VerificationReport::new("norm", vec![], metadata());
    assert!(!r.pass);
    assert_eq!(r.exit_code(), 2);
}

#[test]
fn pass_is_the_conjunction_of_stages() {
    let ok = Stage::residual("a", 1e-12, 10, 1e-9);
    let bad = Stage::residual("b", 1e-3, 10, 1e-9);
    assert!(VerificationReport::new("x", vec![ok.clone()], metadata()).pass);
    let r = VerificationReport::new("x", vec![ok, bad], metadata());
    assert!(!r.pass);
    assert_eq!(r.exit_code(), 1);
    assert_eq!(r.first_failure().unwrap().name, "b");
    assert!(!Stage::residual("nan", f64::NAN, 1, 1.0).pass);
}

#[test]
fn emit_is_canonical() {
    let stages = vec![Stage::residual("z", 0.1, 2, 1e-9), Stage::residual("a", f64::NAN, 2, 1e-9)];
    let bytes = emit(&VerificationReport::new("so-check", stages, metadata()));
    let text = String::from_utf8(bytes).unwrap();
    assert!(text.ends_with("}\n") && !text.ends_with("\n\n"));
    assert!(text.starts_with(
        r#"{"command":"so-check","metadata":{"box":[[-1.0000000000000000e0,1.0000000000000000e0]],"seed":3,"#
    ));
    assert!(text.contains(r#"{"max_residual":1.0000000000000001e-1,"name":"z","pass":false,"points_tested":2,"tol":1.0000000000000001e-9}"#));
    assert!(text.contains(r#""max_residual":null,"name":"a""#));
    let back: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back["stages"][0]["max_residual"].as_f64(), Some(0.1));
}

fn config(v: Value) -> RunConfig {
    RunConfig::from_json(&v.to_string()).unwrap()
}

#[test]
fn every_command_runs() {
    let jobs = [
        json!({"command": "so-check", "matrices": {"A": [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]}}),
        json!({"command": "group-sample", "n": 2, "samples": 20, "options": {"kind": "product"}, "tol": 1e-8}),
        json!({"command": "group-sample", "n": 1, "samples": 20, "options": {"kind": "w-random"}, "tol": 1e-8}),
        json!({"command": "structure-check", "n": 1, "samples": 20, "tol": 1e-10}),
        json!({"command": "factorize", "n": 2, "options": {"family": "symmetric"}, "exprs": {"phi": "x1", "f": "x2"},
               "matrices": {"C0": [[1, 2], [2, 0]]}}),
        json!({"command": "norm", "exprs": {"f_plus": "x1", "f_minus": "0", "g_plus": "x2", "g_minus": "x1 + x2"}}),
        json!({"command": "walker-check", "exprs": {"f_plus": "x1", "f_minus": "0", "g_plus": "x2", "g_minus": "x1 + x2", "h": "x2"},
               "options": {"eps": "+"}, "samples": 20}),
        json!({"command": "flat-gen", "n": 2, "options": {"family": "skew"}, "exprs": {"psi": "sin(x1)", "f": "x2"},
               "matrices": {"C0": [[0, 1], [-1, 0]]}}),
        json!({"command": "classify", "exprs": {"f_plus": "x1", "f_minus": "0", "g_plus": "x2", "g_minus": "x1 + x2"},
               "options": {"branch": "B", "mu": "-", "expect": "B"}}),
        json!({"command": "gauss-verify", "box": [[-1, 1], [-1.2, 1.2]], "samples": 30,
               "exprs": {"a1": "sin(x1)", "a2": "-cos(x1)", "a3": "x1", "b1": "sin(x1)", "b2": "-cos(x1)", "b3": "-x1"}}),
    ];
    let mut seen = std::collections::BTreeSet::new();
    for job in jobs.into_iter().chain([generic_pair()]) {
        let r = run(&config(job.clone())).unwrap();
        assert!(r.pass, "{job}: {:?}", r.first_failure());
        seen.insert(r.command.clone());
    }
    assert_eq!(seen.len(), lightlike_cli::commands::COMMANDS.len());
}

#[test]
fn classify_reports_the_branch() {
    let job = json!({"command": "classify", "exprs": {"f_plus": "x1", "f_minus": "0", "g_plus": "x2", "g_minus": "x1 + x2"},
                     "options": {"branch": "A", "expect": "B"}});
    let r = run(&config(job)).unwrap();
    assert_eq!(r.result.as_deref(), Some("A"));
    assert_eq!(r.first_failure().unwrap().name, "branch");
}

#[test]
fn gauss_verify_with_positive_curvature_has_an_empty_mask() {
    let job = json!({"command": "gauss-verify", "box": [[0.3, 2.8415926535897931], [-1, 1]], "samples": 30,
                     "exprs": {"a1": "sin(x1)", "a2": "-cos(x1)", "a3": "x1", "b1": "-sin(x1)", "b2": "-cos(x1)", "b3": "-x1"}});
    let r = run(&config(job)).unwrap();
    assert_eq!(r.first_failure().unwrap().name, "negative_curvature_mask");
}
