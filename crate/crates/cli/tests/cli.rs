//! End-to-end behavior of the `turnpike` binary: outputs, exit codes and
//! error messages.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn turnpike(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turnpike"))
        .args(args)
        .output()
        .expect("spawn turnpike")
}

fn run(cmd: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    turnpike(&args)
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// The small planted fixture with `from` replaced by `to`.
fn small_variant(dir: &Path, from: &str, to: &str) -> PathBuf {
    let text = fs::read_to_string(fixture("small_sweep.toml")).unwrap();
    assert!(text.contains(from), "fixture no longer contains {from:?}");
    let path = dir.join("variant.toml");
    fs::write(&path, text.replacen(from, to, 1)).unwrap();
    path
}

#[test]
fn poisson_unit_square_peaks_at_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run("solve", &fixture("unit_square_poisson.toml"), &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stats = json(&out.join("stats.json"));
    let peak = stats["max_value"].as_f64().unwrap();
    assert!((peak - 1.0).abs() < 1e-3, "peak {peak}");
    assert!(out.join("solution.csv").exists());
    assert!(out.join("manifest.json").exists());
}

#[test]
fn heat_with_zero_data_stays_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = run("solve", &fixture("unit_square_heat.toml"), &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let stats = json(&out.join("stats.json"));
    assert!(stats["max_abs"].as_f64().unwrap() < 1e-14);
    assert!(stats["steps"].as_u64().unwrap() >= 1);
}

#[test]
fn missing_mask_file_is_a_config_error_naming_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("missing.toml");
    fs::write(
        &config,
        "[grid]\nnx = 8\nny = 8\nh = 0.125\n\n[solve]\nequation = \"poisson\"\n\
         mask = { kind = \"file\", path = \"no_such_mask.txt\" }\nsource = { kind = \"constant\", value = 1.0 }\n",
    )
    .unwrap();
    let o = run("solve", &config, &dir.path().join("run"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no_such_mask.txt"), "{}", stderr(&o));
}

#[test]
fn zero_budget_optimize_returns_the_initial_mask() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_variant(dir.path(), "budget = 1500", "budget = 0");
    let out = dir.path().join("run");
    let o = run("optimize", &config, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let result = json(&out.join("result.json"));
    assert_eq!(result["initial_cost"], result["anneal_cost"]);
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2, "header plus the initial row only");

    // Same configuration with polishing off: the written mask is the init.
    let text = fs::read_to_string(&config).unwrap();
    let no_polish = dir.path().join("no_polish.toml");
    fs::write(&no_polish, text.replacen("[optimize]\n", "[optimize]\npolish = false\n", 1)).unwrap();
    let out2 = dir.path().join("run2");
    let o = run("optimize", &no_polish, &out2, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let mask = fs::read_to_string(out2.join("best_mask.txt")).unwrap();
    let holes: usize = mask.lines().skip(1).map(|l| l.matches('0').count()).sum();
    // 16x16 grid: 60 frame cells plus the 5x5 initial hole.
    assert_eq!(holes, 60 + 25, "{mask}");
}

#[test]
fn infeasible_init_exits_with_config_status() {
    let dir = tempfile::tempdir().unwrap();
    // The initial hole swallows the observation region.
    let config = small_variant(
        dir.path(),
        "init = { kind = \"interior\", holes = [{ i0 = 4, i1 = 9, j0 = 4, j1 = 9 }] }\nschedule",
        "init = { kind = \"interior\", holes = [{ i0 = 8, i1 = 13, j0 = 8, j1 = 13 }] }\nschedule",
    );
    let o = run("optimize", &config, &dir.path().join("run"), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("admissible"), "{}", stderr(&o));
}

#[test]
fn single_horizon_sweep_warns_without_a_fit() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_variant(dir.path(), "horizons = [1.0, 2.0, 4.0, 8.0]", "horizons = [2.0]");
    let out = dir.path().join("run");
    let o = run("sweep", &config, &out, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning"), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn non_empty_output_requires_force() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    fs::create_dir_all(&out).unwrap();
    fs::write(out.join("keep.txt"), "x").unwrap();
    let config = fixture("small_sweep.toml");
    let o = run("gamma-probe", &config, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let o = run("gamma-probe", &config, &out, &["--force"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = json(&out.join("gamma.json"));
    assert_eq!(summary["final_zero"], Value::Bool(true));
    assert_eq!(summary["monotone"], Value::Bool(true));
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_variant(dir.path(), "restarts = 3", "restarts = 3\nrestart = 4");
    let o = run("sweep", &config, &dir.path().join("run"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("restart"), "{}", stderr(&o));
}

#[test]
fn zero_jobs_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run("sweep", &fixture("small_sweep.toml"), &dir.path().join("run"), &["--jobs", "0"]);
    assert_eq!(o.status.code(), Some(2));
}
