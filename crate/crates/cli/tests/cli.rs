use std::process::Command;

use cpt_cli::commands::{Coefficient, DarkFindReport, IdentityRow, SteadyReport};
use cpt_cli::{run_with, EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE};
use cpt_core::config::{ConfigSolution, Family};
use cpt_core::HalfInt;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cpt(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("cpt").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    Run { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows =
        r.records().map(|rec| rec.unwrap().iter().map(|s| s.parse::<f64>().unwrap_or(f64::NAN)).collect()).collect();
    (header, rows)
}

#[test]
fn identity_suite_passes_to_f5() {
    let r = cpt(&["identity-suite", "--max-F", "5", "--format", "json"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let rows: Vec<IdentityRow> = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(rows.len(), 4);
    for row in rows {
        assert_eq!(row.status, "pass");
        assert!(row.checked > 0 && row.failed == 0);
    }
}

#[test]
fn symmetric_solution_for_cs_d1() {
    let r = cpt(&["config-solve", "--scheme", "cs-d1", "--m", "1", "--family", "symmetric"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let sol: ConfigSolution = serde_json::from_str(&r.stdout).unwrap();
    let eps = -(0.25f64).asin() / 2.0;
    assert_eq!(sol.family, Family::PerpSymmetric);
    assert!((sol.epsilon1 - eps).abs() < 1e-11);
    assert!((sol.epsilon2 + eps).abs() < 1e-11);
    assert!((sol.theta - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
}

#[test]
fn negative_projections_need_no_separator() {
    let r = cpt(&["config-solve", "--scheme", "cs-d1", "--m", "-1", "--family", "symmetric"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let sol: ConfigSolution = serde_json::from_str(&r.stdout).unwrap();
    assert!(sol.epsilon1 > 0.0);
}

#[test]
fn separator_is_a_usage_error() {
    let r = cpt(&["cg", "3/2", "1/2", "1", "1", "--", "5/2", "3/2"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.stdout.is_empty());
    // the six values take hyphens, so options go first
    let r = cpt(&["--format", "json", "cg", "3/2", "1/2", "1", "1", "5/2", "3/2"]);
    assert_eq!(r.code, EXIT_OK);
    let c: Coefficient = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(c.exact, "1/5*sqrt(15)");
    assert!((c.value - 0.6f64.sqrt()).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["cg", "1", "2"][..],
        &["cg", "1/3", "0", "1", "0", "1", "0"],
        &["dipole", "--scheme", "na-d7"],
        &["config-solve", "--scheme", "cs-d1", "--m", "9", "--family", "symmetric"],
        &["config-solve", "--scheme", "cs-d1", "--m", "1", "--family", "parallel_Fplus2"],
        &["dark-find", "--scheme", "cs-d1", "--field", "lin-perp-lin", "--tol", "2"],
        &["comb-check", "--scheme", "cs-d1", "--field", "lin-perp-lin", "--n", "1"],
        &["steady", "--scheme", "cs-d1", "--field", "lin-perp-lin", "--rtol", "-1"],
        &["identity-suite", "--max-F", "0"],
        &["dipole", "--scheme", "{not json"],
    ] {
        let r = cpt(args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
    }
}

#[test]
fn invalid_input_and_numerical_failure_differ() {
    let r = cpt(&["steady", "--scheme", "rb87-d1", "--field", "lin-perp-lin", "--rabi1", "inf"]);
    assert_eq!(r.code, EXIT_USAGE, "{}", r.stderr);
    // finite input whose evolution overflows
    let r = cpt(&[
        "pump",
        "--scheme",
        "rb87-d1",
        "--field",
        "lin-perp-lin",
        "--rabi1",
        "1e300",
        "--rabi2",
        "1e300",
        "--t-final",
        "1",
        "--samples",
        "2",
    ]);
    assert_eq!(r.code, EXIT_NUMERICAL, "{}", r.stderr);
    assert!(r.stderr.contains("numerical"));
}

#[test]
fn pump_writes_metric_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pump.csv");
    let r = cpt(&[
        "pump",
        "--scheme",
        "rb87-d1",
        "--field",
        "lin-perp-lin",
        "--rabi1",
        "1",
        "--rabi2",
        "1",
        "--t-final",
        "20",
        "--samples",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    assert!(r.stdout.is_empty());
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["t", "dark_population", "ground_purity", "excited_population", "end_state_population"]);
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[4][0], 20.0);
    assert!((rows[0][1] - 0.125).abs() < 1e-12);
    // population accumulates in the dark state
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn resolution_scan_csv() {
    let r = cpt(&[
        "resolution-scan",
        "--scheme",
        "rb87-d1",
        "--field",
        "lin-perp-lin",
        "--resonant-fe",
        "2",
        "--splittings",
        "0,100",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let (header, rows) = csv_rows(&r.stdout);
    assert_eq!(header, ["splitting", "fidelity", "line"]);
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert!(row[1] > 0.999, "{row:?}");
    }
}

#[test]
fn dark_find_round_trips() {
    let r = cpt(&["dark-find", "--scheme", "rb87-d1", "--field", "lin-perp-lin", "--m", "0"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let report: DarkFindReport = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(report.candidates.len(), 2);
    for c in &report.candidates {
        assert_eq!(c.m, HalfInt::ZERO);
        let (a1, a2) = (c.a1.re.hypot(c.a1.im), c.a2.re.hypot(c.a2.im));
        assert!((a1 - a2).abs() < 1e-10 && c.residual < 1e-10);
    }
    assert!(report.traps.is_empty());
    let r = cpt(&["dark-find", "--scheme", "rb87-d1", "--field", "sigma++", "--all-excited"]);
    let report: DarkFindReport = serde_json::from_str(&r.stdout).unwrap();
    assert!(!report.traps.is_empty());
}

#[test]
fn steady_round_trips() {
    let r = cpt(&["steady", "--scheme", "rb87-d1", "--field", "lin-perp-lin"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let s: SteadyReport = serde_json::from_str(&r.stdout).unwrap();
    assert!(s.unique && s.dimension == 1);
    assert!(s.dark_population.unwrap() > 0.999999);
}

#[test]
fn inline_json_and_files_match_presets() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.json");
    let field = r#"{"components": [
        {"amplitude": {"re": 1, "im": 0}, "ellipticity_rad": 0, "axis_angle_rad": 0, "tag": 0},
        {"amplitude": {"re": 1, "im": 0}, "ellipticity_rad": 0, "axis_angle_rad": 1.5707963267948966, "tag": 1}]}"#;
    std::fs::write(&path, field).unwrap();
    let preset = cpt(&["dark-find", "--scheme", "rb87-d1", "--field", "lin-perp-lin", "--m", "1"]);
    let from_file = cpt(&["dark-find", "--scheme", "rb87-d1", "--field", path.to_str().unwrap(), "--m", "1"]);
    let inline = cpt(&["dark-find", "--scheme", "rb87-d1", "--field", field, "--m", "1"]);
    assert_eq!(from_file.code, EXIT_OK, "{}", from_file.stderr);
    assert_eq!(inline.code, EXIT_OK, "{}", inline.stderr);
    assert_eq!(preset.stdout, from_file.stdout);
    assert_eq!(preset.stdout, inline.stdout);
}

#[test]
fn output_is_deterministic() {
    let args = ["config-scan", "--scheme", "cs-d2", "--m", "1", "--eps-steps", "5", "--theta-steps", "12"];
    let a = cpt(&args);
    assert_eq!(a.code, EXIT_OK, "{}", a.stderr);
    assert_eq!(a.stdout.lines().count(), 1 + 5 * 5 * 12);
    assert_eq!(a.stdout, cpt(&args).stdout);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_cpt");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(status(&["sixj", "1", "1", "1", "1", "1", "1"]), Some(EXIT_OK));
    assert_eq!(status(&["sixj", "1", "1"]), Some(EXIT_USAGE));
    assert_eq!(status(&["--version"]), Some(EXIT_OK));
}
