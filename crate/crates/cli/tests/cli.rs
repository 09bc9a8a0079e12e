use std::f64::consts::{FRAC_PI_2, TAU};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use spinor_eit::analysis;
use spinor_eit_cli::commands::{self, SCAN_HEADER, SWEEP_HEADER};
use spinor_eit_cli::config::RunConfig;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_spinor-eit");

struct Run {
    dir: TempDir,
    output: Output,
}

impl Run {
    fn code(&self) -> i32 {
        self.output.status.code().expect("exit code")
    }

    fn out(&self) -> PathBuf {
        self.dir.path().join("out")
    }

    fn read(&self, name: &str) -> String {
        fs::read_to_string(self.out().join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
    }

    fn stderr(&self) -> String {
        String::from_utf8_lossy(&self.output.stderr).into_owned()
    }
}

fn run(command: &str, config: &str) -> Run {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("config.json");
    fs::write(&cfg, config).unwrap();
    let output = Command::new(BIN)
        .args([command, "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    Run { dir, output }
}

fn resolved(config: &str) -> RunConfig {
    RunConfig::from_json(config, "test").unwrap().resolve().unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

fn unwrapped_winding(phases: &[f64]) -> f64 {
    let n = phases.len();
    (0..n)
        .map(|k| {
            let d = phases[(k + 1) % n] - phases[k];
            d - TAU * (d / TAU).round()
        })
        .sum::<f64>()
        / TAU
}

#[test]
fn scan_has_one_row_per_grid_point_and_dark_core() {
    let r = run("scan", "{}");
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let text = r.read("scan.csv");
    assert!(!text.contains('\r'));
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, SCAN_HEADER);
    assert_eq!(rows.len(), 601);
    assert_eq!(rows[0][0], 0.0);
    assert_eq!(rows[0][2], 0.0);
    for w in rows.windows(2) {
        assert!(w[1][0] > w[0][0], "rows in grid order");
    }
    // 17 significant digits: one leading digit plus 16 after the point.
    let mantissa = text.lines().nth(1).unwrap().split(',').nth(1).unwrap().split('e').next().unwrap();
    assert_eq!(mantissa.replace('.', "").len(), 17);
    assert!(r.out().join("scan.gp").exists());
}

#[test]
fn scan_is_deterministic_across_runs_and_thread_counts() {
    let a = run("scan", "{}").read("scan.csv");
    let b = run("scan", "{}").read("scan.csv");
    assert_eq!(a, b);
    let cfg = resolved("{}");
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let serial = single.install(|| commands::scan_csv(&commands::scan(&cfg).unwrap()));
    assert_eq!(a, serial);
}

#[test]
fn zero_length_medium_passes_the_probe_unchanged() {
    let r = run("scan", r#"{"medium": {"xi": 0}}"#);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (_, rows) = parse_csv(&r.read("scan.csv"));
    assert!(rows.iter().all(|row| row[1] == 1.0 && row[2] == 0.0));
}

#[test]
fn map_is_azimuthally_uniform_with_winding_minus_l() {
    for l in [1, 2] {
        let r = run("map", &format!(r#"{{"medium": {{"l": {l}}}, "scan": {{"points": 31}}}}"#));
        assert_eq!(r.code(), 0, "{}", r.stderr());
        let (header, rows) = parse_csv(&r.read("map.csv"));
        assert_eq!(header, ["rho", "phi", "i2", "phase2"]);
        let n_phi = 64;
        assert_eq!(rows.len(), 31 * n_phi);
        for ring in rows.chunks(n_phi) {
            let rho = ring[0][0];
            for (k, row) in ring.iter().enumerate() {
                assert_eq!(row[0], rho);
                assert!((row[1] - TAU * k as f64 / n_phi as f64).abs() < 1e-15);
                assert!(row[1] < TAU);
                assert!((row[2] - ring[0][2]).abs() <= 1e-12 * ring[0][2].max(1e-300));
            }
            if ring[0][2] > 1e-12 {
                let phases: Vec<f64> = ring.iter().map(|row| row[3]).collect();
                let w = unwrapped_winding(&phases);
                assert!((w + l as f64).abs() < 1e-9, "rho {rho}: winding {w} for l = {l}");
            }
        }
    }
}

#[test]
fn sweep_over_s_kills_transfer_at_quarter_turn() {
    let cfg = format!(r#"{{"sweep": {{"s": {{"start": 0, "stop": {FRAC_PI_2}, "count": 2}}}}}}"#);
    let r = run("sweep", &cfg);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (header, rows) = parse_csv(&r.read("sweep.csv"));
    assert_eq!(header, SWEEP_HEADER);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1][0], FRAC_PI_2);
    assert!(rows[0][5] > 0.7);
    assert!(rows[1][5] < 1e-20, "i2_peak at S = pi/2: {}", rows[1][5]);
}

#[test]
fn sweep_over_alpha_increases_peak_transfer() {
    let r = run("sweep", r#"{"sweep": {"alpha": {"start": 100, "stop": 1000, "count": 2}}}"#);
    assert_eq!(r.code(), 0, "{}", r.stderr());
    let (_, rows) = parse_csv(&r.read("sweep.csv"));
    let xi_star = analysis::solve_xi_condition(1.0, 0.0).unwrap();
    assert!(rows.iter().all(|row| row[3] == xi_star));
    assert!(rows[1][5] > rows[0][5]);
}

#[test]
fn sweep_loops_xi_fastest() {
    let cfg = resolved(
        r#"{"scan": {"points": 21}, "sweep": {"a": {"start": 0.5, "stop": 1, "count": 2},
            "xi": {"start": 1, "stop": 2, "count": 3}}}"#,
    );
    let rows = commands::sweep(&cfg).unwrap();
    let keys: Vec<(f64, f64)> = rows.iter().map(|r| (r.a, r.xi)).collect();
    assert_eq!(keys, [(0.5, 1.0), (0.5, 1.5), (0.5, 2.0), (1.0, 1.0), (1.0, 1.5), (1.0, 2.0)]);
}

#[test]
fn single_point_sweep_matches_scan_peak() {
    let cfg = resolved("{}");
    let rows = commands::sweep(&cfg).unwrap();
    assert_eq!(rows.len(), 1);
    let peak = analysis::find_peak(&commands::scan(&cfg).unwrap()).unwrap();
    assert_eq!(rows[0].rho_peak, peak.rho);
    assert_eq!(rows[0].i2_peak, peak.i2);
}

#[test]
fn oversized_sweep_is_rejected() {
    let r = run(
        "sweep",
        r#"{"sweep": {"a": {"start": 0.1, "stop": 2, "count": 1001},
                      "alpha": {"start": 50, "stop": 500, "count": 1001}}}"#,
    );
    assert_eq!(r.code(), 1);
    assert!(r.stderr().contains("combinations"), "{}", r.stderr());
}

#[test]
fn check_exit_codes_follow_status() {
    let pass = run("check", "{}");
    assert_eq!(pass.code(), 0, "{}", pass.stderr());
    let json: serde_json::Value = serde_json::from_str(&pass.read("check.json")).unwrap();
    assert_eq!(json["status"], "pass");
    assert!((json["report"]["adiabaticity"].as_f64().unwrap() - 0.0297).abs() < 1e-4);
    assert!(String::from_utf8_lossy(&pass.output.stdout).contains("adiabaticity"));

    assert_eq!(run("check", r#"{"medium": {"alpha": 10}}"#).code(), 3);
    assert_eq!(run("check", r#"{"medium": {"a": 3, "s": 0}}"#).code(), 3);
}

#[test]
fn reports_reproduce_from_their_embedded_config() {
    for (command, file) in [("check", "check.json"), ("validate", "validate.json")] {
        let first = run(command, r#"{"physical": {"l_um": 100, "sigma_um": 20, "lambda_um": 1}}"#);
        let report = first.read(file);
        let json: serde_json::Value = serde_json::from_str(&report).unwrap();
        let embedded = serde_json::to_string(&json["config"]).unwrap();
        let second = run(command, &embedded);
        assert_eq!(first.code(), second.code());
        assert_eq!(report, second.read(file), "{command}");
    }
}

#[test]
fn validate_names_every_check() {
    let r = run("validate", r#"{"scan": {"points": 61}}"#);
    let json: serde_json::Value = serde_json::from_str(&r.read("validate.json")).unwrap();
    for field in ["xi_star", "max_oracle_deviation", "ode_convergence_order", "unitarity_defect_lossless"] {
        assert!(json[field].is_number(), "{field}");
    }
    assert!((json["xi_star"].as_f64().unwrap() - 1.2196).abs() < 1e-4);
    let order = json["ode_convergence_order"].as_f64().unwrap();
    assert!((3.8..=4.2).contains(&order));
    assert!(json["unitarity_defect_lossless"].as_f64().unwrap() < 1e-12);
    let failing: Vec<&str> = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert_eq!(r.code(), if failing.is_empty() { 0 } else { 3 });
    for name in failing {
        assert!(r.stderr().contains(name));
    }
}

#[test]
fn validate_passes_with_loosened_oracle_tolerances() {
    let r = run(
        "validate",
        r#"{"scan": {"points": 61},
            "validation": {"max_oracle_deviation": 1e-2, "oracle_slope_range": [-0.1, 0.1]}}"#,
    );
    assert_eq!(r.code(), 0, "{}", r.stderr());
}

#[test]
fn config_errors_exit_one_with_location() {
    let r = run("scan", "{\n  \"medium\": {\n    \"bogus\": 1\n  }\n}");
    assert_eq!(r.code(), 1);
    let err = r.stderr();
    assert!(err.contains("medium") && err.contains(":3:"), "{err}");

    let r = run("scan", r#"{"scan": {"points": 1}}"#);
    assert_eq!(r.code(), 1);
    assert!(r.stderr().contains("scan.points"));

    let r = run("scan", r#"{"medium": {"s": 1.5707963267948966}}"#);
    assert_eq!(r.code(), 1, "auto xi has no solution at S = pi/2");
}

#[test]
fn unwritable_output_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, "{}").unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let status = Command::new(BIN)
        .args(["scan", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(blocker.join("sub"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    let code = |args: &[&str]| Command::new(BIN).args(args).output().unwrap().status.code();
    assert_eq!(code(&[]), Some(1));
    assert_eq!(code(&["scan"]), Some(1));
    assert_eq!(code(&["frobnicate", "--config", "x"]), Some(1));
    assert_eq!(code(&["--help"]), Some(0));
    assert_eq!(code(&["--version"]), Some(0));
    assert_eq!(code(&["scan", "--config", "/nonexistent/config.json"]), Some(1));
}

#[test]
fn output_dir_from_config_is_used_without_flag() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("from_config");
    let cfg = dir.path().join("c.json");
    fs::write(&cfg, format!(r#"{{"output_dir": {:?}}}"#, target.to_str().unwrap())).unwrap();
    let status = Command::new(BIN).args(["check", "--config"]).arg(&cfg).output().unwrap().status;
    assert_eq!(status.code(), Some(0));
    assert!(Path::new(&target).join("check.json").exists());
}

#[test]
fn shipped_configs_resolve() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "json") {
            RunConfig::load(&path).and_then(RunConfig::resolve).unwrap_or_else(|e| panic!("{e}"));
            seen += 1;
        }
    }
    assert!(seen > 0);
}
