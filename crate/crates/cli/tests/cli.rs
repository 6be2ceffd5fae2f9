use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mfvmd(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mfvmd"))
        .current_dir(dir)
        .env_remove("MFVMD_OUT_DIR")
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_eq10_shape() {
    let dir = tempfile::tempdir().unwrap();
    let o = mfvmd(dir.path(), &["simulate", "--preset", "eq10", "--out-dir", "sim"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("sim/signal.csv")).unwrap();
    let s = mfvmd::csv::read_signal(&text).unwrap();
    assert_eq!(s.len(), 2000);
    assert!((s.dt() - 1e-6).abs() < 1e-18);
    let svg = fs::read_to_string(dir.path().join("sim/signal.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("time (ms)"));
    let prov = json(&dir.path().join("sim/provenance.json"));
    assert_eq!(prov["schema"], 1);
    assert_eq!(prov["command"], "simulate");
    assert!(prov["version"].is_string());
}

#[test]
fn analyze_bolt_preset() {
    let dir = tempfile::tempdir().unwrap();
    let sim = mfvmd(dir.path(), &["simulate", "--preset", "bolt", "--snr-db", "5", "--seed", "2", "--out-dir", "."]);
    assert!(sim.status.success(), "{}", stderr(&sim));
    let o = mfvmd(dir.path(), &["analyze", "signal.csv", "--out-dir", "out"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = json(&dir.path().join("out/report.json"));
    let length = report["estimated_length_m"].as_f64().unwrap();
    assert!((length - 3.0).abs() <= 0.15, "{length}");
    assert!(dir.path().join("out/analysis.svg").exists());
    let prov = json(&dir.path().join("out/provenance.json"));
    assert_eq!(prov["config"]["analysis"]["velocity_m_s"], 6000.0);
}

#[test]
fn noise_seed_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a", "b"] {
        let o = mfvmd(dir.path(), &["simulate", "--preset", "eq10-noisy", "--seed", "9", "--out-dir", out, "--no-plot"]);
        assert!(o.status.success());
    }
    let read = |d: &str| fs::read(dir.path().join(d).join("signal.csv")).unwrap();
    assert_eq!(read("a"), read("b"));
    assert!(!dir.path().join("a/signal.svg").exists());
    assert_eq!(json(&dir.path().join("a/provenance.json"))["seed"], 9);
}

#[test]
fn decompose_writes_modes_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    mfvmd(dir.path(), &["simulate", "--preset", "eq10", "--out-dir", "."]);
    let o = mfvmd(dir.path(), &["decompose", "signal.csv", "--modes", "2", "--out-dir", "dec"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = json(&dir.path().join("dec/summary.json"));
    let w: Vec<f64> = summary["omegas_hz"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((w[0] - 10e3).abs() < 200.0 && (w[1] - 20e3).abs() < 400.0, "{w:?}");
    assert!(summary["residual_norm"].is_number() && summary["converged"].is_boolean());
    for f in ["mode_1.csv", "mode_2.csv", "residual.csv", "modes.svg"] {
        assert!(dir.path().join("dec").join(f).exists(), "{f}");
    }
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_mfvmd"))
        .current_dir(dir.path())
        .env("MFVMD_OUT_DIR", "from_env")
        .args(["simulate", "--preset", "eq10"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(dir.path().join("from_env/signal.csv").exists());
}

#[test]
fn config_file_applies() {
    let dir = tempfile::tempdir().unwrap();
    mfvmd(dir.path(), &["simulate", "--preset", "eq10", "--out-dir", "."]);
    fs::write(
        dir.path().join("run.json"),
        r#"{"schema": 1, "plots": false, "vmd": {"modes": 3}, "se": {"mode": "fixed", "width": 3}}"#,
    )
    .unwrap();
    let o = mfvmd(dir.path(), &["mf-decompose", "signal.csv", "--config", "run.json", "--out-dir", "mf"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = json(&dir.path().join("mf/summary.json"));
    assert_eq!(summary["omegas_hz"].as_array().unwrap().len(), 3);
    assert_eq!(summary["se_width"], 3);
    assert!(!dir.path().join("mf/modes.svg").exists());
    assert!(dir.path().join("mf/filtered.csv").exists());
}

#[test]
fn spectrum_outputs() {
    let dir = tempfile::tempdir().unwrap();
    mfvmd(dir.path(), &["simulate", "--preset", "eq10", "--out-dir", "."]);
    let o = mfvmd(dir.path(), &["spectrum", "signal.csv", "--out-dir", "hs"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("hs/hilbert_mode_1.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("time_s,freq_hz,amplitude"));
    assert_eq!(csv.lines().count(), 2001);
    let summary = json(&dir.path().join("hs/summary.json"));
    assert_eq!(summary["transition_times_s"].as_array().unwrap().len(), 2);
    let svg = fs::read_to_string(dir.path().join("hs/spectrum.svg")).unwrap();
    assert!(svg.contains("frequency (kHz)"));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["frobnicate"][..],
        &["simulate"],
        &["simulate", "--preset", "bogus"],
        &["mf-decompose", "x.csv", "--se-width", "3", "--se-auto", "9"],
    ] {
        assert_eq!(mfvmd(dir.path(), args).status.code(), Some(2), "{args:?}");
    }
}

fn contract_error(dir: &Path, args: &[&str]) -> String {
    let o = mfvmd(dir, args);
    assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    let err = stderr(&o);
    let line = err.lines().find(|l| l.starts_with("error code=")).expect("machine-readable line");
    line.split_whitespace().nth(1).unwrap().trim_start_matches("code=").to_string()
}

#[test]
fn contract_errors_have_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    mfvmd(d, &["simulate", "--preset", "eq10", "--out-dir", "."]);
    fs::write(d.join("bad.csv"), "# dt=1e-6\n1.0\nabc\n").unwrap();
    fs::write(d.join("v2.json"), r#"{"schema": 2}"#).unwrap();
    assert_eq!(contract_error(d, &["decompose", "missing.csv"]), "E_MISSING_FILE");
    assert_eq!(contract_error(d, &["decompose", "bad.csv"]), "E_MALFORMED_CSV");
    assert_eq!(contract_error(d, &["decompose", "signal.csv", "--config", "v2.json"]), "E_BAD_CONFIG");
    assert_eq!(contract_error(d, &["decompose", "signal.csv", "--alpha", "-1"]), "E_INVALID_CONFIG");
    assert_eq!(
        contract_error(d, &["simulate", "--preset", "bolt", "--bolt-length", "50"]),
        "E_INVALID_SPEC"
    );
    assert_eq!(
        contract_error(d, &["mf-decompose", "signal.csv", "--se-width", "5000"]),
        "E_SE_TOO_WIDE"
    );
}

#[test]
fn refuses_to_overwrite_input() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    mfvmd(d, &["simulate", "--preset", "eq10", "--name", "mode_1.csv", "--out-dir", "."]);
    let before = fs::read(d.join("mode_1.csv")).unwrap();
    assert_eq!(contract_error(d, &["decompose", "mode_1.csv", "--out-dir", "."]), "E_PATH_CONFLICT");
    assert_eq!(fs::read(d.join("mode_1.csv")).unwrap(), before);
}
