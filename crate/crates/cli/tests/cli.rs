use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("deltanls-cli-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&p);
        fs::create_dir_all(&p).unwrap();
        Scratch(p)
    }

    fn scenario(&self, json: &str) -> PathBuf {
        let p = self.0.join("scenario.json");
        fs::write(&p, json).unwrap();
        p
    }

    fn out(&self, sub: &str) -> PathBuf {
        self.0.join(sub)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn deltanls(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_deltanls")).args(args).output().unwrap()
}

fn run(mode: &str, config: &PathBuf, out: &PathBuf) -> Output {
    deltanls(&[mode, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()])
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Data rows of a CSV artifact, metadata and header skipped.
fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn spectrum_d2_matches_closed_form() {
    let s = Scratch::new("spectrum");
    let cfg = s.scenario(
        r#"{"name": "sweep", "model": {"d": 2}, "spectrum": {"min": -0.5, "max": 0.5, "points": 11}}"#,
    );
    let o = run("spectrum", &cfg, &s.out("a"));
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(s.out("a").join("spectrum.csv")).unwrap();
    assert!(csv.lines().any(|l| l == "# d=2"));
    assert!(csv.lines().any(|l| l == "alpha,ell,exists"));
    let rows = rows(&csv);
    assert_eq!(rows.len(), 11);
    for r in rows {
        let exact = -4.0 * (-4.0 * std::f64::consts::PI * r[0] - 2.0 * EULER_GAMMA).exp();
        assert!((r[1] - exact).abs() <= 1e-12 * exact.abs(), "{r:?}");
        assert_eq!(r[2], 1.0);
    }
}

#[test]
fn reruns_are_byte_identical() {
    let s = Scratch::new("rerun");
    let cfg = s.scenario(
        r#"{"name": "small", "model": {"d": 1, "beta": 1.0, "sigma": 1.0},
            "datum": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0},
            "time": {"T": 0.1, "h": 0.01}, "outputs": {"snapshot_times": [0.1]}}"#,
    );
    let (a, b) = (s.out("a"), s.out("b"));
    assert!(run("evolve", &cfg, &a).status.success());
    assert!(run("evolve", &cfg, &b).status.success());
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 3, "{names:?}");
    for n in names {
        assert_eq!(fs::read(a.join(&n)).unwrap(), fs::read(b.join(&n)).unwrap(), "{n:?}");
    }
    let obs = fs::read_to_string(a.join("observables.csv")).unwrap();
    let rows = rows(&obs);
    assert_eq!(rows[0][0], 0.0);
    let m0 = rows[0][1];
    assert!((m0 - std::f64::consts::PI.sqrt()).abs() < 1e-8);
    // coarse step: only a sanity bound on the mass
    assert!(rows.iter().all(|r| (r[1] - m0).abs() < 1e-2 * m0));
}

#[test]
fn zero_sigma_names_the_field() {
    let s = Scratch::new("sigma");
    let cfg = s.scenario(
        r#"{"name": "bad", "model": {"d": 1, "beta": -1.0, "sigma": 0.0},
            "datum": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0},
            "time": {"T": 0.1, "h": 0.01}}"#,
    );
    let o = run("evolve", &cfg, &s.out("a"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("model.sigma"), "{}", stderr(&o));
    assert!(!s.out("a").exists());
}

#[test]
fn dimension_four_is_rejected() {
    let s = Scratch::new("dim");
    let cfg = s.scenario(r#"{"name": "bad", "model": {"d": 4}}"#);
    let o = run("spectrum", &cfg, &s.out("a"));
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("model.d") && e.contains("d = 1, 2, 3"), "{e}");
}

#[test]
fn unknown_key_is_rejected() {
    let s = Scratch::new("unknown");
    let cfg = s.scenario(r#"{"name": "bad", "model": {"d": 2, "alpah": 0.1}}"#);
    let o = run("spectrum", &cfg, &s.out("a"));
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(e.contains("unknown key") && e.contains("alpah"), "{e}");
}

#[test]
fn type_mismatch_and_syntax_errors() {
    let s = Scratch::new("types");
    let cfg = s.scenario(r#"{"name": "bad", "model": {"d": "two"}}"#);
    let o = run("spectrum", &cfg, &s.out("a"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("type mismatch"), "{}", stderr(&o));

    let cfg = s.scenario(r#"{"name": "bad", "model": {"d": 2},}"#);
    let o = run("spectrum", &cfg, &s.out("a"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("syntax error"), "{}", stderr(&o));
}

#[test]
fn declared_mode_must_match_subcommand() {
    let s = Scratch::new("mode");
    let cfg = s.scenario(r#"{"name": "sweep", "mode": "blowup", "model": {"d": 2}}"#);
    let o = run("spectrum", &cfg, &s.out("a"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("mode"), "{}", stderr(&o));
}

#[test]
fn zero_threads_is_rejected() {
    let o = deltanls(&["verify", "--threads", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--threads"));
}

#[test]
fn verify_subset_passes() {
    let s = Scratch::new("verify");
    let cfg = s.scenario(r#"{"name": "quick", "verify": {"criteria": ["1", "5", "11"]}}"#);
    let o = deltanls(&[
        "verify",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        s.out("a").to_str().unwrap(),
        "--tolerance-profile",
        "strict",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    let pass: Vec<_> = stdout.lines().filter(|l| l.starts_with("PASS [")).collect();
    assert_eq!(pass.len(), 3, "{stdout}");
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(s.out("a").join("verify.json")).unwrap()).unwrap();
    // strict tolerances are a tenth of the default ones
    assert_eq!(report[0]["checks"][0]["bound"].as_f64(), Some(1e-13));
}

#[test]
fn virial_factor_eight_fails_verification() {
    let s = Scratch::new("virial");
    let cfg = s.scenario(r#"{"name": "virial", "verify": {"criteria": ["7"]}}"#);
    let o = run("verify", &cfg, &s.out("a"));
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL [7]"));
}

#[test]
fn blowup_rate_fit() {
    let s = Scratch::new("blowup");
    let cfg = s.scenario(
        r#"{"name": "exact", "model": {"d": 1, "beta": -1.0, "sigma": 1.0},
            "datum": {"kind": "pseudoconformal", "omega": 1.0, "blowup_time": 1.0},
            "time": {"T": 0.98, "h": 0.0001},
            "blowup": {"window": [0.5, 0.95], "h_max": 0.0001, "max_rotation": 0.0025, "max_growth": 0.0025}}"#,
    );
    let o = run("blowup", &cfg, &s.out("a"));
    assert!(o.status.success(), "{}", stderr(&o));
    let fit: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(s.out("a").join("rate_fit.json")).unwrap()).unwrap();
    let p = fit["exponent"].as_f64().unwrap();
    let t = fit["t_est"].as_f64().unwrap();
    assert!((p + 0.5).abs() <= 0.05, "{p}");
    assert!((t - 1.0).abs() <= 0.01, "{t}");
    assert!(s.out("a").join("charge.csv").exists());
}

#[test]
fn missing_config_is_a_config_error() {
    let o = deltanls(&["evolve"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--config"));
}
