use std::path::PathBuf;

use serde_json::Value;
use srheat::cli::{EXIT_NOT_CERTIFIED, EXIT_OK, EXIT_USAGE};
use srheat::{parse_frame, parse_polynomial, run_cli, FrameSpec, StructureSpec};
use srheat_core::steptwo::{left_invariant_frame, StructureConstants};
use srheat_core::vf_analyzer::Polynomial;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(std::iter::once("srheat").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("srheat-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&doc).unwrap()
}

fn assert_valid(validator: &jsonschema::Validator, text: &str) {
    let doc: Value = serde_json::from_str(text).unwrap();
    let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}\n{text}");
}

const MARTINET: &str = r#"{"d": 3, "n": 2, "fields": [
    {"label": "X1", "components": ["1", "0", "0"]},
    {"label": "X2", "components": ["0", "1", "0.5*x1^2"]}
]}"#;

fn martinet_path() -> PathBuf {
    temp_file("martinet.json", MARTINET)
}

fn heisenberg_structure() -> PathBuf {
    let spec = StructureSpec::from_constants(&StructureConstants::heisenberg());
    temp_file("heis.json", &serde_json::to_string(&spec).unwrap())
}

#[test]
fn polynomial_expressions() {
    let p = parse_polynomial("(x1+x2)^2", 2).unwrap();
    let q = Polynomial::from_terms(2, vec![(vec![2, 0], 1.0), (vec![1, 1], 2.0), (vec![0, 2], 1.0)]).unwrap();
    assert_eq!(p, q);
    let r = parse_polynomial("-x1*x2^2 + 3*x3 - 0.5", 3).unwrap();
    assert_eq!(r.eval_f64(&[2.0, 1.5, 1.0]), -2.0 * 2.25 + 3.0 - 0.5);
    assert_eq!(parse_polynomial("2*-x1", 1).unwrap().eval_f64(&[3.0]), -6.0);
    assert!(parse_polynomial("x4", 3).is_err());
    assert!(parse_polynomial("x1^-1", 1).unwrap_err().to_string().contains("negative exponent"));
}

#[test]
fn frame_spec_round_trip() {
    let frame = left_invariant_frame(&StructureConstants::heisenberg());
    let spec = FrameSpec::from_frame(&frame, None);
    let text = serde_json::to_string(&spec).unwrap();
    assert_valid(&schema("frame_spec.schema.json"), &text);
    let back = parse_frame(&FrameSpec::from_json(&text).unwrap()).unwrap();
    assert_eq!(back, frame);

    let rank2 = StructureConstants::new(
        4,
        vec![
            srheat_core::steptwo::rotation(4, 0, 1, 1.0) + srheat_core::steptwo::rotation(4, 2, 3, 0.5),
            srheat_core::steptwo::rotation(4, 0, 2, 1.0) + srheat_core::steptwo::rotation(4, 1, 3, -0.7),
        ],
    )
    .unwrap();
    let frame = left_invariant_frame(&rank2);
    let spec = FrameSpec::from_frame(&frame, None);
    assert_eq!(parse_frame(&spec).unwrap(), frame);
}

#[test]
fn frame_errors_name_the_component() {
    let bad = r#"{"d": 2, "n": 2, "fields": [
        {"components": ["1", "x1^-1"]},
        {"components": ["x3", "0"]}
    ]}"#;
    let err = parse_frame(&FrameSpec::from_json(bad).unwrap()).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("field 1, component 2"), "{text}");
    assert!(text.contains("negative exponent"), "{text}");
    assert!(text.contains("field 2, component 1"), "{text}");
    assert_eq!(err.issues.len(), 2);

    let path = temp_file("bad-frame.json", bad);
    let (code, _, stderr) = run(&["analyze", "--frame", path.to_str().unwrap(), "--point", "0,0"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(stderr.contains("component 2"), "{stderr}");
}

#[test]
fn basis_listing() {
    let (code, out, _) = run(&["basis", "--letters", "2", "--step", "2"]);
    assert_eq!(code, EXIT_OK);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4, "{out}");
    assert!(lines[3].contains("[1,2]"), "{out}");

    let (code, out, _) = run(&["basis", "--letters", "2", "--step", "4", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_valid(&schema("basis.schema.json"), &out);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["grade_sizes"], serde_json::json!([2, 1, 2, 3]));
}

#[test]
fn contact_constant_output() {
    let (code, out, _) = run(&["c0", "--case", "contact3d"]);
    assert_eq!(code, EXIT_OK);
    assert_valid(&schema("c0_result.schema.json"), &out);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert!((doc["value"].as_f64().unwrap() - 0.25).abs() < 1e-8);
    assert_eq!(doc["nu"], 4);

    let (code, out, _) = run(&["c0", "--case", "cr", "--k", "2"]);
    assert_eq!(code, EXIT_OK);
    let v = serde_json::from_str::<Value>(&out).unwrap()["value"].as_f64().unwrap();
    assert!((v - 1.0 / (24.0 * std::f64::consts::PI)).abs() < 1e-8);

    let s = heisenberg_structure();
    let (code, out, _) = run(&["c0", "--case", "steptwo", "--structure", s.to_str().unwrap(), "--measure", "popp"]);
    assert_eq!(code, EXIT_OK);
    let v = serde_json::from_str::<Value>(&out).unwrap()["value"].as_f64().unwrap();
    assert!((v - 2f64.sqrt() / 4.0).abs() < 1e-8);
}

#[test]
fn martinet_analysis() {
    let path = martinet_path();
    let p = path.to_str().unwrap();
    let (code, out, _) = run(&["analyze", "--frame", p, "--point", "0,0,0", "--point", "1,0,0"]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("growth [2, 2, 3]"), "{out}");
    assert!(out.contains("verdict: not equiregular (first disagreement at point 2)"), "{out}");

    let (code, out, _) = run(&["analyze", "--frame", p, "--point", "0,0,0", "--point", "1,0,0", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_valid(&schema("filtration_report.schema.json"), &out);
    let doc: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["equiregular"], false);
    assert_eq!(doc["reports"][0]["nu"], 5);
    assert_eq!(doc["reports"][1]["nu"], 4);
}

#[test]
fn uncertified_point_exit_code() {
    // X2 has no z-component, so the frame never spans R^3.
    let flat = temp_file(
        "flat.json",
        r#"{"d": 3, "n": 2, "fields": [{"components": ["1", "0", "0"]}, {"components": ["0", "1", "0"]}]}"#,
    );
    let (code, _, stderr) = run(&["analyze", "--frame", flat.to_str().unwrap(), "--point", "0,0,0", "--nmax", "3"]);
    assert_eq!(code, EXIT_NOT_CERTIFIED, "{stderr}");
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(run(&["c0", "--case", "riemannian"]).0, EXIT_USAGE);
    assert_eq!(run(&["basis", "--letters", "2", "--step", "2", "--threads", "0"]).0, EXIT_USAGE);
    let (code, _, err) = run(&["analyze", "--frame", "/nonexistent/frame.json", "--point", "0"]);
    assert_ne!(code, EXIT_OK);
    assert!(err.contains("/nonexistent/frame.json"), "{err}");
    let s = heisenberg_structure();
    let (code, _, _) = run(&[
        "simulate", "--structure", s.to_str().unwrap(), "--time", "1", "--samples", "10", "--substeps", "4",
        "--bandwidth", "0.1,0.1", "--seed", "1",
    ]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(run(&["--help"]).0, EXIT_OK);
}

#[test]
fn kernel_grid_csv() {
    let s = heisenberg_structure();
    let (code, out, _) = run(&[
        "kernel", "--structure", s.to_str().unwrap(), "--time", "1", "--grid", "0,-1:1:3,0",
    ]);
    assert_eq!(code, EXIT_OK);
    let mut rows = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rows.headers().unwrap(), vec!["x1", "x2", "z1", "value", "error"]);
    let values: Vec<f64> = rows.records().map(|r| r.unwrap()[3].parse().unwrap()).collect();
    assert_eq!(values.len(), 3);
    assert!((values[1] - 0.25).abs() < 1e-8);
    assert!((values[0] - values[2]).abs() < 1e-10);
}

#[test]
fn simulate_outputs_and_seed_sources() {
    let s = heisenberg_structure();
    let p = s.to_str().unwrap();
    let base = ["simulate", "--structure", p, "--time", "1", "--samples", "5000", "--substeps", "20"];
    let with = |extra: &[&str]| {
        let args: Vec<&str> = base.iter().chain(extra).copied().collect();
        run(&args)
    };
    let (code, out, _) = with(&["--seed", "99"]);
    assert_eq!(code, EXIT_OK);
    let mut r = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(r.headers().unwrap(), vec!["value", "stderr", "N", "m", "h", "seed"]);
    let rec = r.records().next().unwrap().unwrap();
    assert_eq!(&rec[2], "5000");
    assert_eq!(&rec[5], "99");
    assert_eq!(rec[4].split(';').count(), 3);

    let (code, json, _) = with(&["--seed", "99", "--json"]);
    assert_eq!(code, EXIT_OK);
    assert_valid(&schema("sim_estimate.schema.json"), &json);
    let doc: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(doc["value"].as_f64().unwrap(), rec[0].parse::<f64>().unwrap());

    // The only test in this binary that leaves the seed unset.
    std::env::set_var("SRHEAT_SEED", "99");
    let (_, from_env, _) = with(&[]);
    std::env::set_var("SRHEAT_SEED", "98");
    let (_, flag_wins, _) = with(&["--seed", "99"]);
    std::env::set_var("SRHEAT_SEED", "not-a-number");
    let (bad_code, _, _) = with(&[]);
    std::env::remove_var("SRHEAT_SEED");
    assert_eq!(from_env, out);
    assert_eq!(flag_wins, out);
    assert_eq!(bad_code, EXIT_USAGE);
}
