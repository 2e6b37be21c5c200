use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn uhs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uhs")).args(args).output().expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn footer(csv: &str, key: &str) -> f64 {
    csv.lines()
        .find_map(|l| l.strip_prefix(&format!("{key},")))
        .and_then(|v| v.parse().ok())
        .unwrap_or(f64::NAN)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn validate_passes_on_default_preset() {
    let out = uhs(&["validate"]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    for key in ["command", "config_echo", "results", "pass"] {
        assert!(r.get(key).is_some(), "missing {key}");
    }
    assert_eq!(r["pass"], Value::Bool(true));
    assert_eq!(r["config_echo"]["d"], 1);
}

#[test]
fn validate_names_the_failing_check() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "nt.toml", "[preset_params]\nwithout_tail = true\n");
    let out = uhs(&["validate", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(1));
    let r = report(&out);
    assert_eq!(r["pass"], Value::Bool(false));
    let failing = r["results"]["failing"].as_array().unwrap();
    assert!(failing.iter().any(|f| f == "amplitude_conditions"), "{failing:?}");
}

#[test]
fn configuration_errors_exit_with_two() {
    for cmd in ["validate", "roundtrip", "residual", "asymptotics", "stationary", "lemmas", "eval"] {
        assert_eq!(uhs(&[cmd, "--d", "4"]).status.code(), Some(2), "{cmd}");
    }
    let dir = tempfile::tempdir().unwrap();
    let malformed = write(dir.path(), "bad.toml", "d = = 3\n");
    assert_eq!(uhs(&["validate", "--config", &malformed]).status.code(), Some(2));
    let unknown = write(dir.path(), "unknown.toml", "d = 2\nflavour = 1\n");
    assert_eq!(uhs(&["validate", "--config", &unknown]).status.code(), Some(2));
    let ladder = write(dir.path(), "ladder.toml", "s_ladder = [16.0, 8.0]\n");
    assert_eq!(uhs(&["asymptotics", "--config", &ladder]).status.code(), Some(2));
    assert_eq!(uhs(&["validate", "--config", "/nonexistent/run.toml"]).status.code(), Some(2));
    assert_eq!(uhs(&["validate", "--epsilon", "0.9"]).status.code(), Some(2));
    assert_eq!(uhs(&["frobnicate"]).status.code(), Some(2));
    let threads = Command::new(env!("CARGO_BIN_EXE_uhs")).arg("eval").env("UHS_THREADS", "zero").output().unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn asymptotics_rate_in_one_plus_one() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("asym");
    let out = uhs(&["asymptotics", "--out", stem.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("asym_p0.csv")).unwrap();
    assert!(csv.starts_with("s,re,im,abs_err\n"));
    assert!(footer(&csv, "fitted_rate") <= -0.4);
    assert!(dir.path().join("asym.json").exists());
}

#[test]
fn stationary_slope_in_two_plus_one() {
    let out = uhs(&["stationary", "--d", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let slope = report(&out)["results"]["comparison"]["residual_slope"].as_f64().unwrap();
    assert!(slope <= -0.8, "{slope}");
    // d = n = 1 has no remainder to measure
    assert_eq!(uhs(&["stationary"]).status.code(), Some(1));
}

#[test]
fn lemma_suite_flags_failing_profiles() {
    assert_eq!(uhs(&["lemmas"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "[lemmas]\nprofile = \"constant\"\n");
    assert_eq!(uhs(&["lemmas", "--config", &cfg]).status.code(), Some(1));
}

#[test]
fn residual_eval_and_roundtrip_pass() {
    let out = uhs(&["residual", "--d", "2", "--n", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["points"].as_array().unwrap().len(), 3);
    assert_eq!(uhs(&["roundtrip"]).status.code(), Some(0));
    let out = uhs(&["eval", "--d", "2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["results"]["values"].as_array().unwrap().len(), 2);
}

#[test]
fn outputs_are_deterministic_and_respect_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "d = 2\nn = 1\n[eval]\npoints = [[0.1, 0.2, 0.3], [0.5, -0.5, 0.9]]\n",
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for stem in [&a, &b] {
        let out = uhs(&["eval", "--dump-rules", "--config", &cfg, "--out", stem.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    for table in ["values", "sphere_d", "sphere_n", "radial"] {
        let x = std::fs::read(dir.path().join(format!("a_{table}.csv"))).unwrap();
        let y = std::fs::read(dir.path().join(format!("b_{table}.csv"))).unwrap();
        assert!(!x.is_empty() && x == y, "{table}");
    }
    let json_only = write(dir.path(), "json.toml", "[output]\nformat = \"json\"\n");
    let c = dir.path().join("c");
    assert_eq!(uhs(&["eval", "--config", &json_only, "--out", c.to_str().unwrap()]).status.code(), Some(0));
    assert!(dir.path().join("c.json").exists());
    assert!(!dir.path().join("c.csv").exists());
}

#[test]
fn custom_polynomial_file() {
    let dir = tempfile::tempdir().unwrap();
    let poly = write(
        dir.path(),
        "poly.json",
        r#"{"terms": [{"coefficient": 1.0}, {"coefficient": 0.25, "zeta": [1, 0], "sigma": [1]}]}"#,
    );
    let cfg = write(
        dir.path(),
        "run.toml",
        &format!("d = 2\nn = 1\npreset = \"custom_file\"\n[preset_params]\nfile = {poly:?}\n"),
    );
    assert_eq!(uhs(&["validate", "--config", &cfg]).status.code(), Some(0));
    let broken = write(dir.path(), "broken.json", "{ not json");
    let cfg = write(
        dir.path(),
        "broken.toml",
        &format!("preset = \"custom_file\"\n[preset_params]\nfile = {broken:?}\n"),
    );
    assert_eq!(uhs(&["validate", "--config", &cfg]).status.code(), Some(2));
}
