mod common;

use common::*;
use tempfile::tempdir;

const ROBIN_KITE: &str = r#"{"geometry":{"type":"kite"},"bc":{"type":"robin","b_minus":1.0,"b_plus":-1.0},
                             "k":{"k_min":1.0,"k_max":3.0,"count":3},"N":128,"M":32}"#;

fn farfield_with_threads(json: &str, threads: &str) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempdir().unwrap();
    let (out, res) = run_config(dir.path(), "farfield", json, &["--threads", threads]);
    assert_code(&res, 0);
    (dir, out)
}

#[test]
fn reruns_are_byte_identical_at_fixed_thread_count() {
    let (_a, first) = farfield_with_threads(ROBIN_KITE, "2");
    let (_b, second) = farfield_with_threads(ROBIN_KITE, "2");
    for i in 0..3 {
        let name = format!("farfield_k{i:03}.csv");
        assert_eq!(std::fs::read(first.join(&name)).unwrap(), std::fs::read(second.join(&name)).unwrap(), "{name}");
    }
}

#[test]
fn thread_count_changes_results_by_at_most_roundoff() {
    let (_a, one) = farfield_with_threads(ROBIN_KITE, "1");
    let (_b, four) = farfield_with_threads(ROBIN_KITE, "4");
    assert_eq!(manifest(&one)["threads"], 1);
    assert_eq!(manifest(&four)["threads"], 4);
    for i in 0..3 {
        let name = format!("farfield_k{i:03}.csv");
        let (_, a) = read_csv(&one.join(&name));
        let (_, b) = read_csv(&four.join(&name));
        for col in 2..4 {
            let d = max_abs_diff(&numbers(&a, col), &numbers(&b, col));
            assert!(d <= 1e-13, "{name} column {col}: {d:.3e}");
        }
    }
}

#[test]
fn missing_or_unreadable_config_exits_2() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("o");
    let res = run(&["farfield", "--config", "/nonexistent/config.json", "--out", out.to_str().unwrap()]);
    assert_code(&res, 2);

    let res = run(&["smatrix", "--out", out.to_str().unwrap()]);
    assert_code(&res, 2);
    assert!(stderr(&res).contains("--config"));
}

#[test]
fn malformed_json_reports_its_position() {
    let dir = tempdir().unwrap();
    let (_, res) = run_config(dir.path(), "farfield", "{\n  \"geometry\": {\"type\": \"circle\", \"radius\": 1.0},\n  \"bc\": \n}", &[]);
    assert_code(&res, 2);
    assert!(stderr(&res).contains("line 4"), "{}", stderr(&res));
}

#[test]
fn invalid_fields_are_named() {
    let cases = [
        (r#"{"geometry":{"type":"circle","radius":-1},"bc":{"type":"dirichlet"},"k":1,"N":64}"#, "geometry"),
        (r#"{"geometry":{"type":"circle","radius":1},"bc":{"type":"dirichlet"},"k":-1,"N":64}"#, "k"),
        (r#"{"geometry":{"type":"circle","radius":1},"bc":{"type":"dirichlet"},"k":1,"N":7}"#, "N"),
        (r#"{"geometry":{"type":"circle","radius":1},"bc":{"type":"dirichlet"},"k":1,"N":64,"M":1}"#, "M"),
        (r#"{"geometry":{"type":"circle","radius":1},"bc":{"type":"delta","alpha":[]},"k":1,"N":64}"#, "bc"),
        (r#"{"geometry":{"type":"circle","radius":1},"bc":{"type":"dirichlet"},"k":1,"N":64,"threads":0}"#, "threads"),
        (r#"{"geometry":{"type":"circle","radius":1},"bc":{"type":"dirichlet"},"k":1,"N":64,"colour":"red"}"#, "colour"),
        (
            r#"{"geometry":{"type":"circle","radius":1},"bc":{"type":"dirichlet"},"k":1,"N":64,
                "resolvent":{"x":[1.0,0.0],"y0":[3,0]}}"#,
            "resolvent.x",
        ),
        (
            r#"{"geometry":{"type":"circle","radius":1},"bc":{"type":"dirichlet"},"k":1,"N":64,
                "field":{"incident":[1,1],"points":[[3,0]]}}"#,
            "field.incident",
        ),
    ];
    for (json, field) in cases {
        let dir = tempdir().unwrap();
        let (out, res) = run_config(dir.path(), "farfield", json, &[]);
        assert_code(&res, 2);
        assert!(stderr(&res).contains(field), "expected `{field}` in: {}", stderr(&res));
        assert!(!out.join("manifest.json").exists());
    }
}

#[test]
fn singular_system_exits_3_with_condition_estimate() {
    // first Dirichlet eigenvalue of the unit disk
    let json = r#"{"geometry":{"type":"circle","radius":1.0},"bc":{"type":"dirichlet"},"k":2.404825557695773,"N":128,"M":8}"#;
    let dir = tempdir().unwrap();
    let (out, res) = run_config(dir.path(), "farfield", json, &[]);
    assert_code(&res, 3);
    assert!(stderr(&res).contains("condition estimate"), "{}", stderr(&res));
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn output_directory_comes_from_config_or_flag() {
    let dir = tempdir().unwrap();
    let target = dir.path().join("from_config");
    let json = format!(
        r#"{{"geometry":{{"type":"circle","radius":1.0}},"bc":{{"type":"neumann"}},"k":1.0,"N":64,"M":8,"output":{}}}"#,
        serde_json::to_string(target.to_str().unwrap()).unwrap()
    );
    let cfg = write_config(dir.path(), &json);
    let res = run(&["smatrix", "--quiet", "--config", cfg.to_str().unwrap()]);
    assert_code(&res, 0);
    assert!(target.join("smatrix.csv").exists());

    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"geometry":{"type":"circle","radius":1.0},"bc":{"type":"neumann"},"k":1.0,"N":64}"#);
    let res = run(&["smatrix", "--config", cfg.to_str().unwrap()]);
    assert_code(&res, 2);
}

#[test]
fn quiet_suppresses_progress() {
    let json = r#"{"geometry":{"type":"circle","radius":1.0},"bc":{"type":"neumann"},"k":1.0,"N":64,"M":8}"#;
    let dir = tempdir().unwrap();
    let cfg = write_config(dir.path(), json);
    let out = dir.path().join("o");
    let loud = run(&["farfield", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(!loud.stderr.is_empty());
    let quiet = run(&["farfield", "--quiet", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(quiet.stderr.is_empty() && quiet.stdout.is_empty());
}

#[test]
fn injected_far_field_sign_fault_fails_validation() {
    let dir = tempdir().unwrap();
    let out = dir.path().join("v");
    let res = run(&["validate", "quick", "--inject-fault", "far-field-sign", "--out", out.to_str().unwrap()]);
    assert_code(&res, 1);
    let m = manifest(&out);
    let failed: Vec<u64> =
        m["checks"].as_array().unwrap().iter().filter(|c| c["passed"] == false).map(|c| c["criterion"].as_u64().unwrap()).collect();
    assert!(failed.contains(&1), "oracle checks should fail: {failed:?}");
    assert!(failed.contains(&4), "reciprocity checks should fail: {failed:?}");
    let table = String::from_utf8_lossy(&res.stdout);
    assert!(table.contains("FAIL"));
}

#[test]
fn fault_flag_is_hidden_from_help() {
    let res = run(&["validate", "--help"]);
    assert_code(&res, 0);
    assert!(!String::from_utf8_lossy(&res.stdout).contains("inject"));
}
