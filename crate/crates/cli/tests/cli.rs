use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_toric-periods"))
}

fn run(args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("TORIC_PERIODS_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn emit(dir: &Path, name: &str, extra: &[&str]) -> std::path::PathBuf {
    let path = dir.join(format!("{name}.json"));
    let mut args = vec!["catalog", "emit", name, "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    assert!(run(&args).status.success());
    path
}

fn edit(path: &Path, f: impl FnOnce(&mut serde_json::Value)) {
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    f(&mut v);
    std::fs::write(path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
}

#[test]
fn catalog_lists_entries() {
    let out = run(&["catalog", "list"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "tate",
        "quadric_cone",
        "square_cone_3d",
        "weight_2_stack",
        "height_p1",
    ] {
        assert!(text.lines().any(|l| l == name), "{name} missing");
    }
}

#[test]
fn emit_prints_a_scenario() {
    let out = run(&["catalog", "emit", "weight_n_stack", "--n", "4"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["curve"]["q"], 5);
    assert_eq!(v["isogeny"]["inclusion"], serde_json::json!([[4]]));
    assert_eq!(
        run(&["catalog", "emit", "weight_n_stack"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["catalog", "emit", "no_such_entry"]).status.code(),
        Some(2)
    );
}

#[test]
fn verify_writes_a_report_beside_the_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "quadric_cone", &["--order", "5"]);
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let report: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("quadric_cone.report.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["passed"], true);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .contains("PASS weak_duality [formal]"));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let reports = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "tate", &["--order", "4"]);
    let out = bin()
        .args(["verify", path.to_str().unwrap()])
        .env("TORIC_PERIODS_OUT_DIR", reports.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(reports.path().join("tate.report.json").exists());
}

#[test]
fn non_convex_rays_are_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "orthant_a2", &[]);
    edit(&path, |v| v["rays"] = serde_json::json!([[1, 0], [-1, 0]]));
    let out = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("schema error"));
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(
        run(&["verify", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn wrong_eigenform_fails_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = emit(dir.path(), "quadric_cone", &["--order", "4"]);
    edit(&path, |v| v["eta"] = serde_json::json!([0, 1]));
    let out = run(&["verify", "--json", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["validation"]["passed"], false);
}

#[test]
fn jobs_do_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["square_cone_3d", "weight_3_stack"] {
        let path = emit(dir.path(), name, &["--order", "5"]);
        let mut bodies = Vec::new();
        for jobs in ["1", "3"] {
            let report = dir.path().join(format!("{name}.{jobs}.json"));
            let out = run(&[
                "verify",
                "--jobs",
                jobs,
                "--out",
                report.to_str().unwrap(),
                path.to_str().unwrap(),
            ]);
            assert!(out.status.success());
            bodies.push(std::fs::read(report).unwrap());
        }
        assert_eq!(bodies[0], bodies[1], "{name}");
    }
}

#[test]
fn committed_scenarios_match_the_catalog() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let listed = String::from_utf8(run(&["catalog", "list"]).stdout).unwrap();
    let names: Vec<&str> = listed.lines().filter(|l| !l.contains(' ')).collect();
    assert!(names.len() >= 8);
    for name in names {
        let committed: serde_json::Value = serde_json::from_str(
            &std::fs::read_to_string(dir.join(format!("{name}.json"))).unwrap(),
        )
        .unwrap();
        let emitted: serde_json::Value =
            serde_json::from_slice(&run(&["catalog", "emit", name]).stdout).unwrap();
        assert_eq!(committed, emitted, "scenarios/{name}.json is stale");
    }
}
