use std::path::Path;
use std::process::{Command, Output};

use hsreach_cli::{read_report, read_sets, REPORT_FILE, SCHEDULE_FILE, SETS_FILE};

fn hsreach(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hsreach"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

const FAST: [&str; 8] = ["--system", "pendulum", "--samples", "2000", "--clock", "sim", "--horizon", "8"];

#[test]
fn naive_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = hsreach(&[&["run", "--mode", "naive"], &FAST[..]].concat(), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(read_sets(&dir.path().join(SETS_FILE)).unwrap().len(), 8);
    let log: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join(SCHEDULE_FILE)).unwrap()).unwrap();
    let log = log.as_array().unwrap();
    assert_eq!(log.len(), 8);
    assert!(log.iter().all(|r| r["depth"] == 1));
    let rows = read_report(&dir.path().join(REPORT_FILE)).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].e_volume >= 1.0);
}

#[test]
fn fixed_schedule_must_cover_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let o = hsreach(&[&["run", "--mode", "fixed", "--schedule", "4,4,3"], &FAST[..]].concat(), dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("sum"));
    let o = hsreach(&[&["run", "--mode", "fixed", "--schedule", "4,4"], &FAST[..]].concat(), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn refined_needs_budget_and_sweep_needs_two() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!hsreach(&[&["run"], &FAST[..]].concat(), dir.path()).status.success());
    assert!(!hsreach(&[&["sweep", "--budgets", "5"], &FAST[..]].concat(), dir.path()).status.success());
    let o = hsreach(&[&["sweep", "--budgets", "5,inf"], &FAST[..]].concat(), dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 2);
}

#[test]
fn compare_prints_ratio_table() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(hsreach(&[&["run", "--mode", "naive"], &FAST[..]].concat(), &a).status.success());
    assert!(hsreach(&[&["run", "--budget", "inf"], &FAST[..]].concat(), &b).status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_hsreach")).arg("compare").arg(&a).arg(&b).output().unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8_lossy(&o.stdout);
    assert!(table.contains("Error (volume)") && table.contains("Time (s)"));

    let c = dir.path().join("c");
    let mut other = FAST.to_vec();
    other[3] = "3000";
    assert!(hsreach(&[&["run", "--mode", "naive"], &other[..]].concat(), &c).status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_hsreach")).arg("compare").arg(&a).arg(&c).output().unwrap();
    assert!(!o.status.success());
}
