use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_cleanlabel"));
    c.env_remove("CLEANLABEL_WORKERS");
    c
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn run(cfg: &Path, out: &Path, extra: &[&str]) -> Output {
    bin().arg("run").arg("--config").arg(cfg).arg("--out").arg(out).args(extra).output().unwrap()
}

#[test]
fn run_example1_writes_two_rows_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&config("example1.json"), dir.path(), &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("example1/A1,") && rows[1].starts_with("example1/A2,"));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
    assert!(manifest["wall_clock_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn seed_override_reaches_manifest_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&config("example1.json"), dir.path(), &["--seed", "99", "--workers", "2"]);
    assert_eq!(code(&o), 0);
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 99);
    let csv = std::fs::read_to_string(dir.path().join("results.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",99")));
}

#[test]
fn config_errors_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"experiment\": ").unwrap();
    assert_eq!(code(&run(&bad, dir.path(), &[])), 2);

    let text = std::fs::read_to_string(config("example1.json")).unwrap().replacen("fit_max_interval", "fit_oracle", 1);
    std::fs::write(&bad, text).unwrap();
    let o = run(&bad, dir.path(), &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("fit_oracle"));
    assert!(!dir.path().join("results.csv").exists());
}

#[test]
fn missing_config_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&dir.path().join("absent.json"), dir.path(), &[])), 1);
}

#[test]
fn table_reproduces_run_rows() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&run(&config("example1.json"), dir.path(), &[])), 0);
    let results = dir.path().join("results.csv");
    let o = bin().args(["table", "--format", "csv"]).arg(&results).output().unwrap();
    assert_eq!(code(&o), 0);
    let table = String::from_utf8(o.stdout).unwrap();
    let mut src = csv::Reader::from_path(&results).unwrap();
    let atk_col = src.headers().unwrap().iter().position(|h| h == "atk_mean").unwrap();
    let src_rows: Vec<csv::StringRecord> = src.records().map(Result::unwrap).collect();
    let mut out = csv::Reader::from_reader(table.as_bytes());
    assert_eq!(out.headers().unwrap().iter().collect::<Vec<_>>(), ["experiment_id", "rows", "atk_mean", "atk_ci95", "err_mean"]);
    for (s, t) in src_rows.iter().zip(out.records()) {
        let t = t.unwrap();
        assert_eq!(&t[0], &s[0]);
        assert_eq!(&t[2], &s[atk_col]);
    }

    // Two copies of the same file group into one weighted row with the same mean.
    let o = bin().args(["table", "--format", "csv", "--group-by", "class"]).arg(&results).arg(&results).output().unwrap();
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "4");
}

#[test]
fn table_rejects_bad_inputs() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin().arg("table").output().unwrap()), 2);
    let other = dir.path().join("other.csv");
    std::fs::write(&other, "a,b\n1,2\n").unwrap();
    assert_eq!(code(&bin().arg("table").arg(&other).output().unwrap()), 2);
    let o = bin().args(["table", "--group-by", "colour"]).arg(&other).output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn geometry_audit_passes() {
    let o = bin().args(["audit", "--scope", "geometry"]).output().unwrap();
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.lines().count() > 0 && out.lines().all(|l| l.starts_with("PASS")), "{out}");
}

#[test]
fn negative_control_fails_the_audit() {
    let o = bin().args(["audit", "--scope", "attackers", "--invocations", "200", "--negative-control"]).output().unwrap();
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}
