use std::fs;
use std::process::{Command, Output};

fn branchon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branchon"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn records(stdout: &[u8]) -> (csv::StringRecord, Vec<csv::StringRecord>) {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(stdout);
    let header = reader.headers().unwrap().clone();
    let rows = reader.records().collect::<Result<Vec<_>, _>>().unwrap();
    (header, rows)
}

fn column(header: &csv::StringRecord, rows: &[csv::StringRecord], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
#[allow(clippy::approx_constant)] // the documented run uses t_end = 6.2832, not 2 pi
fn simulate_harmonic_period() {
    let out = branchon(&[
        "simulate", "--k", "0", "--lambda", "1", "--x0", "1", "--v0", "0", "--t-end", "6.2832",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = records(&out.stdout);
    let x = column(&header, &rows, "x");
    assert!((x.last().unwrap() - 6.2832f64.cos()).abs() <= 1e-9);
}

#[test]
fn spectrum_without_linear_term() {
    let out = branchon(&[
        "spectrum",
        "--s",
        "6",
        "--lambda",
        "1",
        "--branch",
        "plus",
        "--no-linear-term",
        "--count",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = records(&out.stdout);
    let eta = column(&header, &rows, "eta");
    assert_eq!(eta.len(), 5);
    for (n, e) in eta.iter().enumerate() {
        assert!((e - (2.0 * n as f64 + 2.0)).abs() <= 1e-6);
    }
}

#[test]
fn compare_at_strong_confinement() {
    let out = branchon(&[
        "compare", "--s", "1", "--lambda", "16", "--n", "0", "--order", "4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let (header, rows) = records(&out.stdout);
    assert_eq!(rows.len(), 2);
    for rel in column(&header, &rows, "rel_diff") {
        assert!(rel <= 5e-3);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let args = [
        "perturb", "--s", "2", "--lambda", "3", "--order", "5", "--branch", "minus",
    ];
    let a = branchon(&args);
    let b = branchon(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn json_output_parses() {
    let out = branchon(&[
        "branches", "--model", "type2", "--format", "json", "--count", "4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "branches");
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
    assert_eq!(v["config"]["model"], "type2");
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(
        &path,
        "# harmonic\nk = 0\nlambda = 4\nt_end = 1\nx0 = 0.5\n",
    )
    .unwrap();
    let out = branchon(&[
        "simulate",
        "--config",
        path.to_str().unwrap(),
        "--lambda",
        "1",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# lambda=1.0\n"));
    assert!(text.contains("# t_end=1.0\n"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.cfg");
    fs::write(&path, "omega = 3\n").unwrap();
    assert_eq!(
        branchon(&["simulate", "--config", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    // accepted key that simulate never reads
    assert_eq!(branchon(&["simulate", "--s", "2"]).status.code(), Some(2));
    assert_eq!(
        branchon(&["spectrum", "--lambda", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(branchon(&["bogus"]).status.code(), Some(2));
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_branchon"))
            .args(["compare", "--s", "1", "--lambda", "16", "--order", "2"])
            .env("BRANCHON_THREADS", threads)
            .output()
            .unwrap()
    };
    let two = run("2");
    assert!(two.status.success());
    assert_eq!(two.stdout, run("1").stdout);
    assert_eq!(run("zero").status.code(), Some(2));
    assert_eq!(run("0").status.code(), Some(2));
}

#[test]
fn out_writes_file_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("levels.csv");
    let out = branchon(&["spectrum", "--count", "3", "--out", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let written = fs::read(&path).unwrap();
    let (_, rows) = records(&written);
    assert_eq!(rows.len(), 3);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("spectrum: 3 rows"));
}
