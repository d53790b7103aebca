//! Subprocess tests for the satake binary: exit codes, output shapes and
//! the JSON contract of each subcommand.

use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_satake"))
        .args(args)
        .output()
        .expect("failed to run satake");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).to_string(),
        String::from_utf8_lossy(&output.stderr).to_string(),
    )
}

fn run_json(args: &[&str]) -> Value {
    let mut args = args.to_vec();
    args.extend_from_slice(&["--format", "json"]);
    let (code, stdout, stderr) = run(&args);
    assert_eq!(code, 0, "stderr: {stderr}");
    serde_json::from_str(&stdout).expect("valid JSON output")
}

// ---------------------------------------------------------------------------
// check
// ---------------------------------------------------------------------------

#[test]
fn check_reports_odd_nodes_and_diagnostics() {
    let v = run_json(&["check", "A2[X=1]"]);
    assert_eq!(v["compatible"], true);
    assert_eq!(v["generalizedSatake"], false);
    assert_eq!(v["satake"], false);
    assert_eq!(v["oddNodes"], serde_json::json!([2]));

    let v = run_json(&["check", "A2[]"]);
    assert_eq!(v["generalizedSatake"], true);
    assert_eq!(v["satake"], true);

    let v = run_json(&["check", "A3[X=2; tau=1:3]"]);
    assert_eq!(v["generalizedSatake"], true);

    // incompatible decorations get a diagnostic naming the failed clause
    let v = run_json(&["check", "A2[X=1,2]"]);
    assert_eq!(v["compatible"], false);
    assert!(v["diagnostic"].as_str().unwrap().contains("opposition"));
}

#[test]
fn check_accepts_json_specs() {
    let spec = r#"{"cartan": {"name": "A3"}, "X": [2], "tau": [[1, 3]]}"#;
    let v = run_json(&["check", spec]);
    assert_eq!(v["generalizedSatake"], true);
}

// ---------------------------------------------------------------------------
// exit codes
// ---------------------------------------------------------------------------

#[test]
fn exit_codes() {
    // 2: parse errors
    let (code, _, stderr) = run(&["check", "Q7[]"]);
    assert_eq!(code, 2, "stderr: {stderr}");
    let (code, _, _) = run(&["check", "A2[Y=1]"]);
    assert_eq!(code, 2);
    // 0: success
    let (code, _, _) = run(&["verify", "A2[]"]);
    assert_eq!(code, 0);
    // 4: resource guards (affine verify below the needed window)
    let (code, _, stderr) = run(&["verify", "G2~v[X=1]", "--height", "3"]);
    assert_eq!(code, 4, "stderr: {stderr}");
    assert!(stderr.contains("retry"));
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[test]
fn verify_passes_for_the_paper_examples() {
    let v = run_json(&["verify", "A2[X=1]"]);
    assert_eq!(v["allPassed"], true);
    assert_eq!(v["generalizedSatake"], false);
    assert_eq!(v["threeGroups"]["orderWBar"], 1);
    assert_eq!(v["threeGroups"]["orderWPhiBar"], 2);
    assert_eq!(v["threeGroups"]["orderWTilde"], 3);
    assert_eq!(v["iwasawa"]["holds"], false);

    let v = run_json(&["verify", "G2[X=1]"]);
    assert_eq!(v["allPassed"], true);
    assert_eq!(v["restrictedType"], "(B,C)1+");
    assert_eq!(v["battery"]["generalizedSatake"], true);

    let v = run_json(&["verify", "A2[]", "--chi", "1:1,2:1", "--height", "4"]);
    assert_eq!(v["allPassed"], true);
    assert_eq!(v["iwasawa"]["holds"], true);
}

// ---------------------------------------------------------------------------
// classify / table
// ---------------------------------------------------------------------------

#[test]
fn classify_counts_match_the_catalogue() {
    let v = run_json(&["classify", "A", "2"]);
    assert_eq!(v[0]["orbits"].as_array().unwrap().len(), 3);
    assert_eq!(v[0]["tableDiff"]["clean"], true);

    let v = run_json(&["classify", "A", "1"]);
    assert_eq!(v[0]["orbits"].as_array().unwrap().len(), 2);

    let v = run_json(&["classify", "G", "2"]);
    // G2: (empty,id), X={1}, X={2}, X=I
    assert_eq!(v[0]["orbits"].as_array().unwrap().len(), 4);

    let (code, stdout, _) = run(&["classify", "A", "4", "--format", "tsv"]);
    assert_eq!(code, 0);
    assert!(stdout.lines().count() >= 5);
    assert!(stdout.contains("(B,C)"));
}

#[test]
fn table_type_a_diff_is_clean() {
    let v = run_json(&["table", "A", "4"]);
    assert_eq!(v["diffClean"], true);
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    let (code, stdout, _) = run(&["table", "A", "3"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("(A3)^alt"));
    assert!(stdout.contains("AIII"));
}

// ---------------------------------------------------------------------------
// restricted / render
// ---------------------------------------------------------------------------

#[test]
fn restricted_report_shape() {
    let v = run_json(&["restricted", "G2~v[X=1]"]);
    assert_eq!(v["type"], "(C~',C~)1+");
    assert_eq!(v["gram"][0][0], 2);
    assert_eq!(v["gram"][0][1], -1);
    assert_eq!(v["gram"][1][1], "1/2");
    assert_eq!(v["coxeter"][0][1], "inf");
    for key in ["sigma", "Pi_bar", "gram", "tilde_I", "battery", "coxeter", "type"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let (code, stdout, _) = run(&["restricted", "A3[X=2; tau=1:3]", "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("graph restricted"));
    assert!(stdout.contains(" x"));
}

#[test]
fn render_roundtrip_and_dot() {
    let (code, stdout, _) = run(&["render", "A4[X=2,3; tau=1:4]"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.trim(), "A4[X=2,3; tau=1:4]");
    let (code, stdout, _) = run(&["render", "A4[X=2,3; tau=1:4]", "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("style=filled"));
    assert!(stdout.contains("dir=both"));
    let (code, stdout, _) = run(&["render", "A2[X=1]", "--format", "json"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["text"], "A2[X=1]");
    assert_eq!(v["X"], serde_json::json!([1]));
}

// ---------------------------------------------------------------------------
// JSON schema of the verify report
// ---------------------------------------------------------------------------

#[test]
fn verify_json_matches_shipped_schema() {
    let schema_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../docs/verify-report.schema.json"
    ))
    .expect("schema shipped with the repository");
    let schema: Value = serde_json::from_str(&schema_text).unwrap();
    let report = run_json(&["verify", "G2[X=1]"]);
    validate(&schema, &report, "$");
}

/// Minimal structural validator: `type`, `required` and `properties` only,
/// which is all the shipped schema uses.
fn validate(schema: &Value, value: &Value, path: &str) {
    if let Some(t) = schema.get("type").and_then(|t| t.as_str()) {
        let ok = match t {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "boolean" => value.is_boolean(),
            "string" => value.is_string(),
            "number" | "integer" => value.is_number(),
            _ => true,
        };
        assert!(ok, "{path}: expected {t}, got {value}");
    }
    if let Some(required) = schema.get("required").and_then(|r| r.as_array()) {
        for key in required {
            let key = key.as_str().unwrap();
            assert!(value.get(key).is_some(), "{path}: missing required key {key}");
        }
    }
    if let Some(props) = schema.get("properties").and_then(|p| p.as_object()) {
        for (key, sub) in props {
            if let Some(v) = value.get(key) {
                validate(sub, v, &format!("{path}.{key}"));
            }
        }
    }
}
