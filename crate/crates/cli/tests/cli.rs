use std::fs;
use std::process::{Command, Output};

fn surdlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surdlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn scan_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let report = dir.path().join("report.json");
    let out = surdlab(&[
        "scan",
        "2",
        "--nmax",
        "10",
        "--threshold",
        "0",
        "--out",
        csv.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,n,radicand,D");
    assert_eq!(lines[1], "2,1,2,1");
    assert_eq!(lines[2], "2,2,8,2");
    assert_eq!(lines[4], "2,4,32,4");
    assert_eq!(lines.len(), 11);
    assert!(!text.contains('\r'));

    let rep: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["d"], "2");
    assert_eq!(rep["n_max"], 10);
    let total: u64 = rep["counts"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(total, 10);
    assert_eq!(
        rep["candidates"].as_array().unwrap().len(),
        rep["counts"].as_object().unwrap().len()
    );
}

#[test]
fn scan_is_identical_across_workers() {
    let one = surdlab(&["scan", "3", "--nmax", "500", "--workers", "1"]);
    let four = surdlab(&["scan", "3", "--nmax", "500", "--workers", "4"]);
    assert!(one.status.success());
    assert_eq!(one.stdout, four.stdout);
    assert!(stdout(&one).contains("\n3,6,108,8\n"));
}

#[test]
fn scan_rejects_square() {
    let out = surdlab(&["scan", "4", "--nmax", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("perfect-square"));
}

#[test]
fn verify_suites() {
    let out = surdlab(&["verify", "galois", "--dmax", "500"]);
    assert!(out.status.success());
    let out = surdlab(&["verify", "even-parity", "--dmax", "30", "--nmax", "50"]);
    assert!(out.status.success());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.json");
    let out = surdlab(&[
        "verify",
        "all",
        "--dmax",
        "40",
        "--samples",
        "200",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let reports: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 8);
    let out = surdlab(&["verify", "unknown"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn construct_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = surdlab(&["construct", "5", "1", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["working_d"], "80");
    assert_eq!(
        (cert["p"].as_u64(), cert["q"].as_u64(), cert["m"].as_u64()),
        (Some(47), Some(29), Some(840))
    );
    let d = cert["measured_period"].as_u64().unwrap();
    assert!(d == 14 || d == 16);
    assert!(cert["checks"]
        .as_object()
        .unwrap()
        .values()
        .all(|v| v == true));
}

#[test]
fn construct_error_codes() {
    let out = surdlab(&["construct", "3", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("r-not-odd"));
    let out = surdlab(&["construct", "5", "1", "--max-index", "100"]);
    assert_eq!(out.status.code(), Some(3));
    let out = surdlab(&["construct"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn euclid_spectrum_csv() {
    let out = surdlab(&["euclid-spectrum", "--nmin", "1", "--nmax", "5", "--k", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,attained,covered,smallest_missing");
    assert_eq!(lines[1], "1,1,false,2");
    assert_eq!(lines[2], "2,1,false,2");
    assert!(lines[5].starts_with("5,1;2"));
}

#[test]
fn q3_report() {
    let out = surdlab(&["q3", "2", "--nmax", "10", "--kmax", "1", "--threshold", "1"]);
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["rows"][0]["satisfied"], true);
    let out = surdlab(&["q3", "9", "--nmax", "10", "--kmax", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
