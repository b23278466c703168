use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use weakdisc::harness::{Format, IdpRow, McRow, ParsedTable, ResultRow};

fn weakdisc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weakdisc"))
        .args(args)
        .output()
        .unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const POINT: &str = r#"{"eta": [0.001, 0.0], "g": 0.05, "eps": 0.001, "delta_n_mag": 0.0,
    "delta_f_mag": 0.001, "samples": 2000, "seed": 5}"#;

#[test]
fn verify_quick_exits_zero() {
    let out = weakdisc(&["verify", "--quick"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    for module in [
        "qubit_algebra",
        "weak_measurement",
        "discrimination",
        "error_analysis",
        "harness_cli",
    ] {
        assert!(text.contains(module), "missing {module}");
    }
    assert!(!text.contains("FAIL"));
}

#[test]
fn sweep_csv_round_trips() {
    let cfg = configs().join("g_sweep.json");
    let out = weakdisc(&["sweep", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("# command: sweep\n"));
    assert!(text.contains("# seed: 9"));
    let rows: Vec<ResultRow> = ParsedTable::parse(&text, Format::Csv)
        .unwrap()
        .records()
        .unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().enumerate().all(|(i, r)| r.index == i as u64));
}

#[test]
fn mc_beta_jsonl_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "point.json", POINT);
    let out_path = dir.path().join("mc.jsonl");
    let out = weakdisc(&[
        "mc-beta",
        "--config",
        &cfg,
        "--format",
        "jsonl",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_path).unwrap();
    let rows: Vec<McRow> = ParsedTable::parse(&text, Format::Jsonl)
        .unwrap()
        .records()
        .unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].summary.mean_beta_b > rows[0].summary.mean_beta_a);
    assert_eq!(rows[0].expected_beta_a, 3.0);
}

#[test]
fn idp_command() {
    let cfg = configs().join("idp_eta.json");
    let out = weakdisc(&["idp", "--config", cfg.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<IdpRow> = ParsedTable::parse(&text, Format::Csv)
        .unwrap()
        .records()
        .unwrap();
    assert!(rows.len() > 1);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write(
        dir.path(),
        "unknown.json",
        &POINT.replace("\"g\"", "\"gee\""),
    );
    let out = weakdisc(&["sweep", "--config", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gee"));

    let bad_range = write(
        dir.path(),
        "range.json",
        &POINT.replace("\"eps\": 0.001", "\"eps\": -1.0"),
    );
    let out = weakdisc(&["sweep", "--config", &bad_range]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eps"));

    let swept = configs().join("g_sweep.json");
    assert_eq!(
        weakdisc(&["mc-beta", "--config", swept.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );

    let point = write(dir.path(), "point.json", POINT);
    assert_eq!(
        weakdisc(&["sweep", "--config", &point, "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn io_errors_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.json");
    let out = weakdisc(&["sweep", "--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));

    let point = write(dir.path(), "point.json", POINT);
    let unwritable = dir.path().join("no/such/dir/out.csv");
    let out = weakdisc(&[
        "sweep",
        "--config",
        &point,
        "--out",
        unwritable.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let point = write(dir.path(), "point.json", POINT);
    let a = weakdisc(&["mc-beta", "--config", &point, "--seed", "1"]).stdout;
    let b = weakdisc(&["mc-beta", "--config", &point, "--seed", "2"]).stdout;
    let c = weakdisc(&["mc-beta", "--config", &point, "--seed", "1"]).stdout;
    assert_ne!(a, b);
    assert_eq!(a, c);
}
