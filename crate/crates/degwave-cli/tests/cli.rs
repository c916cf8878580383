//! End-to-end tests of the command-line interface and its exit-code contract.

use std::path::Path;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_degwave"))
}

fn write(path: &Path, body: &str) {
    std::fs::write(path, body).unwrap();
}

const SQRT_CONFIG: &str = r#"
[coefficients]
a = { kind = "power", K = 0.5 }
d = { kind = "power", K = 0.5 }
lambda = 0.1
lambda_is_fraction = true

[grid]
n = 60

[time]
t_factor = 2.0

[data]
kind = "modes"
modes = 5
"#;

#[test]
fn report_admissible_config_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SQRT_CONFIG);
    let out = bin()
        .args(["report", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("class_a = WD"));
    assert!(report.contains("t0 = 6"));
}

#[test]
fn report_inadmissible_lambda_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[coefficients]
a = { kind = "power", K = 0.5 }
d = { kind = "power", K = 0.5 }
lambda = 1.0
lambda_is_fraction = true

[grid]
n = 40
"#,
    );
    let out = bin()
        .args(["report", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("hyp_lambda_admissible = FAIL"), "{report}");
}

#[test]
fn malformed_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, "[coefficients]\na = { kind = \"power\", K = 0.5 }\nnot_a_key = 1\n");
    let out = bin().args(["report", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_config_exits_one() {
    let out = bin()
        .args(["simulate", "--config", "/nonexistent/run.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_zero_data_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[coefficients]
a = { kind = "power", K = 0.5 }
d = { kind = "power", K = 0.5 }

[grid]
n = 40

[time]
t = 1.0

[data]
kind = "zero"
"#,
    );
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let e: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(e, 0.0);
    }
}

#[test]
fn simulate_deterministic_for_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SQRT_CONFIG);
    let mut bytes = Vec::new();
    for sub in ["a", "b"] {
        let out_dir = dir.path().join(sub);
        let out = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out_dir)
            .args(["--seed", "7"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        bytes.push(std::fs::read(out_dir.join("trajectory.csv")).unwrap());
    }
    assert_eq!(bytes[0], bytes[1], "CSV output differs between identical runs");
}

#[test]
fn control_classical_string_reaches_rest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[coefficients]
a = { kind = "constant", value = 1.0 }
d = { kind = "constant", value = 1.0 }

[grid]
n = 100

[time]
t = 3.0

[data]
kind = "sine"
mode = 1

[tolerances]
control = 1e-3
"#,
    );
    let out = bin()
        .args(["control", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let summary = std::fs::read_to_string(dir.path().join("control.txt")).unwrap();
    assert!(summary.contains("verdict = pass"), "{summary}");
    let csv = std::fs::read_to_string(dir.path().join("control.csv")).unwrap();
    assert!(csv.lines().count() > 100);
}

#[test]
fn observe_short_horizon_warns_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[coefficients]
a = { kind = "power", K = 0.5 }
d = { kind = "power", K = 0.5 }

[grid]
n = 40

[time]
t = 1.0

[observe]
budget = 4
refine = 2
suite = 3
"#,
    );
    let out = bin()
        .args(["observe", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("observe.txt")).unwrap();
    assert!(summary.contains("warning"), "{summary}");
    assert!(!dir.path().join("margins.csv").exists());
}

#[test]
fn observe_zero_budget_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[coefficients]
a = { kind = "power", K = 0.5 }
d = { kind = "power", K = 0.5 }

[grid]
n = 40

[time]
t = 1.0

[observe]
budget = 0
"#,
    );
    let out = bin().args(["observe", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_emits_one_row_per_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[coefficients]
a = { kind = "power", K = 0.5 }
d = { kind = "power", K = 0.5 }

[grid]
n = 40

[sweep]
k_a = [0.4, 0.6]
k_d = [0.3, 0.5]
lambda_frac = [0.0]
t_factor = [2.0]
"#,
    );
    let out = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5); // header + 4 cells

    // deterministic row order across runs
    let again = dir.path().join("again");
    bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&again)
        .output()
        .unwrap();
    let csv2 = std::fs::read_to_string(again.join("sweep.csv")).unwrap();
    assert_eq!(csv, csv2);
}

#[test]
fn tabulated_profile_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("a.csv");
    // log-spaced abscissae so the table resolves the degeneracy at x = 0
    let mut body = String::from("x,g\n");
    for i in 0..256 {
        let t = i as f64 / 255.0;
        let x = 10f64.powf(-6.0 * (1.0 - t));
        body.push_str(&format!("{x},{}\n", x.sqrt()));
    }
    write(&table, &body);
    let cfg = dir.path().join("run.toml");
    write(
        &cfg,
        r#"
[coefficients]
a = { kind = "tabulated", path = "a.csv" }
d = { kind = "power", K = 0.5 }

[grid]
n = 40
"#,
    );
    let out = bin()
        .args(["report", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(dir.path().join("report.txt")).unwrap();
    assert!(report.contains("class_a = WD"), "{report}");
}

#[test]
fn conservative_flag_inflates_t0() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    write(&cfg, SQRT_CONFIG);
    let run = |extra: &[&str]| {
        let out = bin()
            .args(["report", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(dir.path())
            .args(extra)
            .output()
            .unwrap();
        let text = String::from_utf8_lossy(&out.stdout).to_string();
        let line = text.lines().find(|l| l.starts_with("c2 = ")).unwrap().to_string();
        line[5..].parse::<f64>().unwrap()
    };
    let normal = run(&[]);
    let conservative = run(&["--conservative"]);
    assert!(
        conservative >= normal,
        "conservative C2 {conservative} < estimate-based {normal}"
    );
}
