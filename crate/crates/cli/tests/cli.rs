use std::path::Path;
use std::process::{Command, Output};

fn hmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmlab")).args(args).env_remove("HMLAB_WORKERS").output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const SMALL: &str = r#"
name = "small"
master_seed = 7
n_grid = [64, 128, 256, 512]
seeds_per_n = 5

[distribution]
kind = "gap_margin"
d = 1
lo = 0.25
hi = 0.75
margin = 0.25

[estimator]
kind = "threshold_class"
bits = 10

[risk]
cells = 4096
active_dims = 1
"#;

fn write_config(dir: &Path) -> String {
    let p = dir.join("small.toml");
    std::fs::write(&p, SMALL).unwrap();
    p.to_str().unwrap().to_owned()
}

#[test]
fn bounds_rate_and_schedule() {
    let v = json(&hmlab(&["bounds", "rate", "--beta", "1", "--q", "0", "--d-lower", "1", "--s", "inf"]));
    assert_eq!(v["exponent"], 1.0);
    let v = json(&hmlab(&["bounds", "rate", "--beta", "1", "--q", "0", "--d-lower", "1", "--s", "0"]));
    assert!((v["exponent"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    let out = hmlab(&["bounds", "schedule", "--help"]);
    assert!(out.status.success());
}

#[test]
fn bounds_lower_bound_prints_csv() {
    let out = hmlab(&["bounds", "lower-bound", "--grid", "19", "--s", "1", "--n", "64,256"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,eps,separation,kl,fano_value");
    assert_eq!(lines.len(), 3);
    let col = |k: usize| -> Vec<f64> { lines[1..].iter().map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect() };
    let (eps, fano) = (col(1), col(4));
    assert_eq!(eps[0], eps[1]);
    assert!(fano[1] <= fano[0] && fano[1] >= 0.0);
}

#[test]
fn bad_arguments_exit_nonzero() {
    assert!(!hmlab(&["bounds", "rate", "--beta", "x", "--q", "0", "--d-lower", "1", "--s", "0"]).status.success());
    let out = hmlab(&["run", "/nonexistent/cfg.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_is_deterministic_and_plot_rerenders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path());
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let ra = hmlab(&["run", &cfg, "--out", a.to_str().unwrap(), "--workers", "1"]);
    assert!(ra.status.success(), "{}", String::from_utf8_lossy(&ra.stderr));
    let rb = hmlab(&["run", &cfg, "--out", b.to_str().unwrap(), "--workers", "3"]);
    assert!(rb.status.success());
    for ext in ["csv", "json", "svg"] {
        let fa = std::fs::read(a.join(format!("small.{ext}"))).unwrap();
        let fb = std::fs::read(b.join(format!("small.{ext}"))).unwrap();
        assert_eq!(fa, fb, "{ext} differs across worker counts");
    }
    let svg = dir.path().join("re.svg");
    let csv = a.join("small.csv");
    let summary = a.join("small.json");
    let out = hmlab(&["plot", csv.to_str().unwrap(), "--summary", summary.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&svg).unwrap(), std::fs::read(a.join("small.svg")).unwrap());
}

#[test]
fn verify_fast_suites_pass() {
    for suite in ["kl", "lecam", "threshold", "vg", "tail"] {
        let out = hmlab(&["verify", suite, "--seed", "3"]);
        let text = String::from_utf8_lossy(&out.stdout).into_owned();
        assert!(out.status.success(), "{suite}: {text}");
        assert!(text.contains("PASS"));
    }
}
