use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mhq(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_mhq"));
    cmd.args(args).env_remove("MHQ_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_config(dir: &Path, body: &str) -> String {
    let file = dir.join("run.toml");
    fs::write(&file, body).unwrap();
    path(&file).to_owned()
}

#[test]
fn selftest_exits_zero() {
    let out = mhq(&["selftest"], &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("schemes.reconstruction"));
}

#[test]
fn fig3_is_reproducible_and_starts_classical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = mhq(&["reproduce-fig3", "--out", path(dir.path())], &[]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let csv = fs::read_to_string(a.path().join("fig3.csv")).unwrap();
    assert_eq!(csv, fs::read_to_string(b.path().join("fig3.csv")).unwrap());
    assert_eq!(csv.lines().next(), Some("t_us,series,value,stderr"));
    let aleph0 = csv.lines().find(|l| l.starts_with("0,aleph,")).unwrap();
    let value: f64 = aleph0.split(',').nth(2).unwrap().parse().unwrap();
    assert!(value.abs() < 1e-9);

    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("fig3_meta.json")).unwrap()).unwrap();
    let peak = meta["aleph_peak"]["value"].as_f64().unwrap();
    assert!((peak - 0.24836888942537083).abs() < 1e-9);
}

#[test]
fn shots_fill_the_stderr_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\npoints = 5\n");
    let out = mhq(
        &["reproduce-fig4", "--config", &cfg, "--out", path(dir.path()), "--shots", "10000", "--seed", "3"],
        &[],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("fig4.csv")).unwrap();
    let w: Vec<&str> = csv.lines().filter(|l| l.contains(",w_mhq,")).collect();
    assert_eq!(w.len(), 5);
    assert!(w.iter().all(|l| !l.ends_with(',')));
}

#[test]
fn sweep_archive_ignores_thread_count() {
    let one = tempfile::tempdir().unwrap();
    let four = tempfile::tempdir().unwrap();
    let cfg = write_config(one.path(), "seed = 7\n[sweep]\nn_sets = 10\nn_time = 50\n");
    for (dir, threads) in [(&one, "1"), (&four, "4")] {
        let out = mhq(&["sweep", "--config", &cfg, "--out", path(dir.path())], &[("MHQ_THREADS", threads)]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["sweep_records.csv", "sweep_summary.json"] {
        assert_eq!(fs::read(one.path().join(name)).unwrap(), fs::read(four.path().join(name)).unwrap(), "{name}");
    }
    let rows = fs::read_to_string(one.path().join("sweep_records.csv")).unwrap().lines().count();
    assert_eq!(rows, 1 + 3 * 10);
}

#[test]
fn bad_config_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "seed = 1\n\n[drive]\nomega1 = \"fast\"\n");
    let out = mhq(&["reproduce-fig2", "--config", &cfg, "--out", path(dir.path())], &[]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
}

#[test]
fn empty_sweep_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[sweep]\nn_sets = 0\n");
    let out = mhq(&["sweep", "--config", &cfg, "--out", path(dir.path())], &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_sets"));
    assert!(!dir.path().join("sweep_records.csv").exists());
}

#[test]
fn unknown_key_and_missing_file_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "[grid]\npointz = 3\n");
    assert_eq!(mhq(&["reproduce-fig3", "--config", &cfg], &[]).status.code(), Some(1));
    let missing = dir.path().join("nope.toml");
    assert_eq!(mhq(&["reproduce-fig3", "--config", path(&missing)], &[]).status.code(), Some(1));
}

#[test]
fn bad_thread_count_exits_one() {
    let out = mhq(&["selftest"], &[("MHQ_THREADS", "zero")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MHQ_THREADS"));
}
