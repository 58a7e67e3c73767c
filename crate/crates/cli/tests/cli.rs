use std::path::Path;
use std::process::{Command, Output};

use hybridisc_cli::{CliError, ExperimentConfig};
use tempfile::TempDir;

fn run_cli(config_text: &str, dir: &Path, extra: &[&str]) -> Output {
    let config = dir.join("config.toml");
    std::fs::write(&config, config_text).unwrap();
    Command::new(env!("CARGO_BIN_EXE_hybridisc"))
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .env_remove("HYBRIDISC_THREADS")
        .output()
        .unwrap()
}

fn csv(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join("out").join(name)).unwrap()
}

const EXACT: &str = r#"
[experiment]
kind = "exact-eval"
output = "exact.csv"

[geometry]
s = 0.99
u0_angle_deg = 45.0

[sweep]
points = [[0.0, 0.5], [2.0, 2.0]]
boundary_samples = 16
"#;

const ERRORS: &str = r#"
[experiment]
kind = "two-disc-error"
output = "errors.csv"

[geometry]
s = 0.99
u0_angle_deg = 45.0

[sweep]
schemes = ["all"]
modes = [5, 10]
"#;

#[test]
fn exact_eval_writes_header_and_rows() {
    let dir = TempDir::new().unwrap();
    let out = run_cli(EXACT, dir.path(), &[]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = csv(dir.path(), "exact.csv");
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,y,re_w,im_w");
    assert_eq!(lines.len(), 1 + 2 + 2 * 16);
    // Im w is constant on each circle
    let im: Vec<f64> = lines[3..19]
        .iter()
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert!(im.iter().all(|v| (v - im[0]).abs() < 1e-10));
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    assert!(run_cli(ERRORS, a.path(), &["--threads", "1"])
        .status
        .success());
    assert!(run_cli(ERRORS, b.path(), &["--threads", "4"])
        .status
        .success());
    let text = csv(a.path(), "errors.csv");
    assert_eq!(text, csv(b.path(), "errors.csv"));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "scheme,N,max_error");
    let order: Vec<String> = lines[1..]
        .iter()
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(" "))
        .collect();
    assert_eq!(
        order,
        ["z 5", "z 10", "zeta 5", "zeta 10", "hybrid 5", "hybrid 10"]
    );
}

#[test]
fn dump_reports_backs_every_row() {
    let dir = TempDir::new().unwrap();
    assert!(run_cli(ERRORS, dir.path(), &["--dump-reports"])
        .status
        .success());
    let reports = dir.path().join("out").join("errors_reports");
    let count = std::fs::read_dir(&reports).unwrap().count();
    assert_eq!(count, 6);
    let text = std::fs::read_to_string(reports.join("hybrid_N10.txt")).unwrap();
    assert!(text.contains("max_boundary_error") && text.contains("scheme hybrid"));
}

#[test]
fn nine_disc_first_row_matches_reference() {
    let dir = TempDir::new().unwrap();
    let config = r#"
[experiment]
kind = "nine-disc-dipole"
output = "nine.csv"

[geometry]
layout = "nine-disc"

[sweep]
separations = [1e-2]
modes = [5]
"#;
    assert!(run_cli(config, dir.path(), &[]).status.success());
    let text = csv(dir.path(), "nine.csv");
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let magnitude: f64 = row[1].parse().unwrap();
    assert!((magnitude - 0.39194).abs() < 1e-4);
    assert_eq!(row[2], "5");
}

#[test]
fn malformed_configs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    for text in [
        "this is not toml [",
        &EXACT.replace("s = 0.99", "s = 0.99\ncolour = 3"),
        &ERRORS.replace("[5, 10]", "[10, 5]"),
        &ERRORS.replace("[5, 10]", "[]"),
        &ERRORS.replace("\"all\"", "\"spline\""),
        &EXACT.replace("s = 0.99", "s = 1.5"),
    ] {
        let out = run_cli(text, dir.path(), &[]);
        assert_eq!(out.status.code(), Some(2), "{text}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn invalid_thread_variable_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let config = dir.path().join("config.toml");
    std::fs::write(&config, EXACT).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_hybridisc"))
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path())
        .env("HYBRIDISC_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unconverged_sweep_exits_with_four() {
    let dir = TempDir::new().unwrap();
    let config = r#"
[experiment]
kind = "nine-disc-dipole"
output = "nine.csv"

[geometry]
layout = "nine-disc"

[sweep]
separations = [1e-3]
target = 1e-14
modes = [5, 10]
"#;
    let out = run_cli(config, dir.path(), &[]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn exit_codes_follow_error_kind() {
    assert_eq!(
        CliError::Solver(hybridisc::Error::DegenerateSystem).exit_code(),
        3
    );
    assert_eq!(
        CliError::Solver(hybridisc::Error::ConvergenceFailure { terms: 9 }).exit_code(),
        4
    );
    assert_eq!(CliError::Config("x".into()).exit_code(), 2);
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            ExperimentConfig::from_path(&path)
                .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 6);
}
