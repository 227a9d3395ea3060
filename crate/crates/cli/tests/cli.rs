use std::path::Path;
use std::process::Command;

use rotfric::config::{default_config, GridSpec, ScenarioConfig, Spacing};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rotfric"))
}

fn small_default(points: usize) -> ScenarioConfig {
    let mut cfg = default_config();
    cfg.sweep.grid = GridSpec {
        values: None,
        start: Some(1e-5),
        stop: Some(3e-3),
        points: Some(points),
        spacing: Spacing::Log,
    };
    cfg
}

fn write_config(dir: &Path, name: &str, cfg: &ScenarioConfig) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, cfg.to_toml().unwrap()).unwrap();
    p
}

#[test]
fn print_defaults_is_a_valid_scenario() {
    let out = bin().arg("print-defaults").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let cfg = ScenarioConfig::from_toml(&text).unwrap();
    cfg.validate().unwrap();
    assert_eq!(cfg, default_config());
}

#[test]
fn config_round_trip_is_idempotent() {
    let text = r#"
[body]
radius_m = 2e-8
T_K = 300
omega0_rad_s = 5e12
material = { kind = "lorentz", terms = [{ strength_rad2_s2 = 1e26, resonance_rad_s = 2e13, damping_rad_s = 1e11 }] }

[environment]
geometry = "half_space"
T0_K = 290
z_m = 1e-7
material = { kind = "drude", sigma0_S_per_m = 4e7 }

[sweep]
kind = "spectrum"
grid = { values = [1e12, 1e13, 1e14] }
"#;
    let first = ScenarioConfig::from_toml(text).unwrap();
    first.validate().unwrap();
    let again = ScenarioConfig::from_toml(&first.to_toml().unwrap()).unwrap();
    assert_eq!(first, again);
    assert_eq!(first.to_toml().unwrap(), again.to_toml().unwrap());
}

#[test]
fn csv_layout_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_default(5);
    let path = write_config(dir.path(), "s.toml", &cfg);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("5 points (0 failed)"), "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("gold_separation.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert!(lines[1].starts_with("# config_hash sha256:"));
    assert!(lines[1].ends_with(&cfg.hash().unwrap()));
    let header = lines.iter().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        *header,
        "z_m,P_halfspace_W,P_vacuum_W,M_Nm,err_P_W,err_M_Nm,error"
    );
    let rows: Vec<&str> = lines
        .iter()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .copied()
        .collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let f: Vec<&str> = r.split(',').collect();
        assert_eq!(f.len(), 7);
        assert_eq!(f[6], "");
        let mantissa = f[1].split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 9, "{r}");
    }
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "s.toml", &small_default(12));
    let mut outputs = Vec::new();
    for threads in ["1", "3"] {
        let out_path = dir.path().join(format!("out{threads}.csv"));
        let st = bin()
            .env("ROTFRIC_THREADS", threads)
            .args(["run"])
            .arg(&path)
            .arg("--output")
            .arg(&out_path)
            .output()
            .unwrap();
        assert!(st.status.success());
        outputs.push(std::fs::read(out_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn validation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_default(3);
    cfg.quadrature.rel_tol = 0.1;
    let path = write_config(dir.path(), "bad.toml", &cfg);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("quadrature.rel_tol"));

    let missing = bin()
        .arg("run")
        .arg(dir.path().join("nope.toml"))
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let threads = bin()
        .env("ROTFRIC_THREADS", "zero")
        .arg("print-defaults")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(1));
}

#[test]
fn all_points_failing_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    // the table cannot cover the thermal window, so every point fails
    std::fs::write(
        dir.path().join("eps.csv"),
        "# omega, re, im\n1e12,2.0,0.1\n1e13,2.0,0.1\n",
    )
    .unwrap();
    let text = small_default(3).to_toml().unwrap().replace(
        "kind = \"drude\"\nsigma0_S_per_m = 16000000.0",
        "kind = \"tabulated\"\npath = \"eps.csv\"",
    );
    let path = dir.path().join("t.toml");
    std::fs::write(&path, text).unwrap();
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("gold_separation.csv")).unwrap();
    let last = csv.lines().last().unwrap();
    assert!(last.contains("outside tabulated range"), "{last}");
}

#[test]
fn spectrum_and_torque_curve_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = default_config();
    cfg.environment.z_m = Some(1e-5);
    cfg.body.t_k = 0.0;
    cfg.environment.t0_k = 0.1;
    cfg.sweep.kind = rotfric::config::SweepKind::Spectrum;
    cfg.sweep.grid = GridSpec {
        values: Some(vec![1e11, 1e12, 5e12, 2e13]),
        start: None,
        stop: None,
        points: None,
        spacing: Spacing::Log,
    };
    cfg.output.path = "spectrum.csv".into();
    let path = write_config(dir.path(), "spectrum.toml", &cfg);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    assert!(csv.contains("omega_rad_s,dPdw_zz_Js"));
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 5);

    cfg.sweep.kind = rotfric::config::SweepKind::TorqueCurve;
    cfg.output.path = "torque.csv".into();
    let path = write_config(dir.path(), "torque.toml", &cfg);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = std::fs::read_to_string(dir.path().join("torque.csv")).unwrap();
    assert!(csv.contains("omega0_rad_s,P_W,M_Nm,M_dipole_Nm,M_field_Nm"));
    // friction opposes the rotation at every speed
    for row in csv.lines().filter(|l| !l.starts_with('#')).skip(1) {
        let m: f64 = row.split(',').nth(2).unwrap().parse().unwrap();
        assert!(m < 0.0, "{row}");
    }
}

fn verify_config(dir: &Path, extra: &str) -> std::path::PathBuf {
    let p = dir.join("v.toml");
    let text = format!(
        "[verify]\nmodes = 4000\nT_K = 50\nomega_rad_s = [2e12, 5e12, 2e13, 3e13]\ntolerance = 0.01\n{extra}"
    );
    std::fs::write(&p, text).unwrap();
    p
}

const LORENTZ_TERM: &str =
    "[[verify.terms]]\nstrength_rad2_s2 = 1e26\nresonance_rad_s = 1e13\ndamping_rad_s = 1e11\n";

#[test]
fn verify_default_lorentz_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("verify")
        .arg(verify_config(dir.path(), LORENTZ_TERM))
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("verify: PASS"));
}

#[test]
fn verify_corrupted_coupling_fails_on_gamma_xx() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("corrupt_mode = 2000\n{LORENTZ_TERM}");
    let out = bin()
        .arg("verify")
        .arg(verify_config(dir.path(), &cfg))
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(3), "{stdout}");
    let last = stdout.lines().last().unwrap();
    assert!(last.contains("FAIL") && last.contains("Gamma_xx"), "{last}");
}

#[test]
fn verify_zero_coupling_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("verify")
        .arg(verify_config(dir.path(), "model = \"zero\"\n"))
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn verify_reads_full_scenario_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "full.toml", &default_config());
    let out = bin().arg("verify").arg(&path).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}
