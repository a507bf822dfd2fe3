use std::path::Path;
use std::process::{Command, Output};

fn ringfill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringfill"))
        .args(args)
        .env_remove("RINGFILL_JOBS")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn build_verify_export_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("k.json");
    let o = ringfill(&["build", "--n", "200", "--rho", "0.1", "--eta", "0.25", "--out", path(&json)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("density="));

    let report = dir.path().join("report.json");
    let o = ringfill(&["verify", path(&json), "--out", path(&report), "--witness"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["n"], 200);
    assert_eq!(r["delta_num"], 1);
    assert_eq!(r["delta_den"], 1);
    assert_eq!(r["is_isometric"], true);
    assert!(r["eps_n"].as_f64().unwrap() > 0.0);
    assert!(r["worst_pair"]["d_k"].is_u64());

    let built = ringfill::io::build_from_json(&std::fs::read_to_string(&json).unwrap()).unwrap();
    for (format, header) in [("off", "OFF\n"), ("obj", "# ringfill")] {
        let mesh = dir.path().join(format!("k.{format}"));
        let o = ringfill(&["export", path(&json), "--format", format, "--out", path(&mesh)]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let text = std::fs::read_to_string(&mesh).unwrap();
        assert!(text.starts_with(header));
        let counts = ringfill::io::mesh_counts(&text, format.parse().unwrap()).unwrap();
        assert_eq!(counts, (built.vertex_count(), built.complex.triangles().len()));
    }
}

#[test]
fn build_output_is_deterministic() {
    let a = ringfill(&["build", "--n", "64"]);
    let b = ringfill(&["build", "--n", "64", "--jobs", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn schedule_rejections_exit_with_2() {
    let o = ringfill(&["build", "--n", "100", "--rho", "0.01", "--eta", "0.2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("eta^2 < rho violated"));

    let o = ringfill(&["build", "--n", "10", "--rho", "0.001"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("schedule rejected"));
}

#[test]
fn usage_errors_exit_with_2() {
    assert_eq!(ringfill(&["export", "x.json", "--format", "stl"]).status.code(), Some(2));
    assert_eq!(ringfill(&["build"]).status.code(), Some(2));
    assert_eq!(ringfill(&["verify", "/nonexistent/k.json"]).status.code(), Some(2));
}

#[test]
fn verify_fails_on_a_shortcut() {
    let dir = tempfile::tempdir().unwrap();
    let cone = dir.path().join("cone6.json");
    std::fs::write(&cone, ringfill::io::triangulation_to_json(&ringfill::Triangulation::cone(6)).unwrap()).unwrap();
    let o = ringfill(&["verify", path(&cone), "--witness"]);
    assert_eq!(o.status.code(), Some(1));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!((r["delta_num"].as_u64(), r["delta_den"].as_u64()), (Some(2), Some(3)));
    assert_eq!(r["witness_path"].as_array().unwrap().len(), 3);
    assert!(r["eps_n"].is_null());
}

#[test]
fn verify_reports_disk_defects() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"n":4,"vertices":[{"id":0},{"id":1},{"id":2},{"id":3}],"triangles":[[0,1,2]]}"#,
    )
    .unwrap();
    let o = ringfill(&["verify", path(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[FAIL] disk"));
}

#[test]
fn audit_passes_and_samples_large_n() {
    let o = ringfill(&["audit", "--n", "96", "--isometry"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("[pass] lower bound soundness: 4560 pairs"));

    let o = ringfill(&["audit", "--n", "256", "--samples", "500", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("500 pairs, 0 violations"));
}

#[test]
fn sweep_writes_csv() {
    let o = ringfill(&["sweep", "--n", "64,128", "--rho", "0.1", "--eta", "0.25"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(ringfill::analysis::SWEEP_COLUMNS.join(",").as_str()));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("64,0.1,0.25,1235,"));

    let o = ringfill(&["sweep", "--n-list", "64,10"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_prints_a_minimal_witness() {
    let o = ringfill(&["oracle", "--n", "5", "--max-interior", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = ringfill::io::triangulation_from_json(std::str::from_utf8(&o.stdout).unwrap()).unwrap();
    assert_eq!(t.vertex_count(), 6);
    assert!(ringfill::verify_filling(&t).unwrap().is_isometric);

    let o = ringfill(&["oracle", "--n", "4", "--max-interior", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn analyze_reports_all_checks() {
    let o = ringfill(&["analyze", "--grid", "200"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("[pass] core inequality"));
    assert_eq!(err.matches("[pass] profile integral").count(), 4);
    assert!(err.contains("0.125 <= 0.166667 < 0.18378"));

    let o = ringfill(&["analyze", "--core-inequality", "--grid", "50"]);
    assert!(!stderr(&o).contains("profile integral"));
}
