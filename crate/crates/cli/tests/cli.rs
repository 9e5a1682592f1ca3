use std::path::Path;
use std::process::{Command, Output};

fn etadense(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_etadense")).current_dir(dir).args(args).output().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn col(row: &[String], k: usize) -> f64 {
    row[k].parse().unwrap()
}

#[test]
fn eval_writes_grid_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "eval",
        "--m",
        "1",
        "--sigma",
        "0.5",
        "--t-start",
        "20",
        "--t-end",
        "30",
        "--t-step",
        "0.5",
        "--zero-table",
        "bundled",
    ];
    let out = etadense(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = rows(&dir.path().join("eval.csv"));
    assert_eq!(table.len(), 21);
    assert!(table.iter().all(|r| col(r, 13) < 1e-4));
    let manifest = std::fs::read_to_string(dir.path().join("eval.csv.manifest.toml")).unwrap();
    assert!(manifest.contains("rows = 21"));
}

#[test]
fn rerun_from_manifest_is_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "eval",
        "--m",
        "2",
        "--sigma",
        "0.8",
        "--t-start",
        "14",
        "--t-end",
        "16",
        "--t-step",
        "1",
        "--zero-table",
        "bundled",
        "--output",
        "first.csv",
    ];
    assert_eq!(etadense(dir.path(), &args).status.code(), Some(0));
    let again = etadense(dir.path(), &["eval", "--config", "first.csv.manifest.toml", "--output", "second.csv"]);
    assert_eq!(again.status.code(), Some(0), "{}", String::from_utf8_lossy(&again.stderr));
    let a = std::fs::read_to_string(dir.path().join("first.csv")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("second.csv")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn config_file_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("run.toml"), "m = 1\nsigma = 3\nt_start = 1\nt_end = 3\nt_step = 1\n").unwrap();
    let out = etadense(dir.path(), &["eval", "--config", "run.toml", "--sigma", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = rows(&dir.path().join("eval.csv"));
    assert_eq!(table.len(), 3);
    assert!(table.iter().all(|r| col(r, 1) == 2.0));
}

#[test]
fn eval_validation() {
    let dir = tempfile::tempdir().unwrap();
    let out = etadense(
        dir.path(),
        &["eval", "--m", "1", "--sigma", "0.5", "--t-start", "20", "--t-end", "30", "--t-step", "0.5"],
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("vertical quadrature"));

    let out =
        etadense(dir.path(), &["eval", "--m", "1", "--sigma", "2", "--t-start", "5", "--t-end", "5", "--t-step", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(rows(&dir.path().join("eval.csv")).is_empty());
    assert!(dir.path().join("eval.csv.manifest.toml").exists());
}

#[test]
fn meansquare_rows_decrease() {
    let dir = tempfile::tempdir().unwrap();
    let args =
        ["meansquare", "--m", "1", "--sigma", "0.8", "--xs", "3,10,30", "--t-max", "200", "--zero-table", "bundled"];
    let out = etadense(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let table = rows(&dir.path().join("meansquare.csv"));
    assert_eq!(table.len(), 3);
    assert!(col(&table[0], 5) > col(&table[1], 5) && col(&table[1], 5) > col(&table[2], 5));

    for bad in [["--sigma", "0.4", "--t-max", "200"], ["--sigma", "0.8", "--t-max", "10"]] {
        let mut args = vec!["meansquare", "--m", "1", "--xs", "3", "--zero-table", "bundled"];
        args.extend(bad);
        assert_eq!(etadense(dir.path(), &args).status.code(), Some(2));
    }
}

#[test]
fn hunt_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let hit = [
        "hunt",
        "--m",
        "1",
        "--sigma",
        "0.8",
        "--a",
        "-0.8922244985001784+0.6006878944565847i",
        "--epsilon",
        "0.1",
        "--zero-table",
        "bundled",
    ];
    let out = etadense(dir.path(), &hit);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let row = &rows(&dir.path().join("hunt.csv"))[0];
    assert!(col(row, 8) < 0.1);
    assert_eq!(row[12], "success");

    let miss = [
        "hunt",
        "--m",
        "1",
        "--sigma",
        "0.8",
        "--a",
        "100",
        "--epsilon",
        "0.1",
        "--zero-table",
        "bundled",
        "--max-evaluations",
        "3",
    ];
    assert_eq!(etadense(dir.path(), &miss).status.code(), Some(3));

    let bad = ["hunt", "--m", "1", "--sigma", "0.8", "--a", "1+x", "--epsilon", "0.1", "--zero-table", "bundled"];
    let out = etadense(dir.path(), &bad);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`a`"));
}

#[test]
fn polygon_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = etadense(dir.path(), &["polygon", "--radii", "3,4,5", "--z", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&dir.path().join("polygon.csv"));
    let (r, th): (Vec<f64>, Vec<f64>) = table.iter().map(|row| (col(row, 1), col(row, 2))).unzip();
    let sum: num_complex::Complex64 =
        r.iter().zip(&th).map(|(&r, &t)| num_complex::Complex64::from_polar(r, -std::f64::consts::TAU * t)).sum();
    assert!(sum.norm() < 1e-10);

    let out = etadense(dir.path(), &["polygon", "--radii", "5,1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dominance"));
}

#[test]
fn polygon_construct_serializes_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "polygon",
        "--construct",
        "--m",
        "1",
        "--sigma",
        "0.8",
        "--a",
        "0.2+0.1i",
        "--epsilon",
        "0.2",
        "--sieve-limit",
        "1000000",
    ];
    let out = etadense(dir.path(), &args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("theta.json")).unwrap()).unwrap();
    assert!(json["final_error"].as_f64().unwrap() < 0.2);
    assert!(dir.path().join("theta.json.manifest.toml").exists());
    assert!(dir.path().join("theta.csv.manifest.toml").exists());
}
