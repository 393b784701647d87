use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mlckpt::model::{evaluate, LevelSpec, Policy, SystemSpec, TopologySpec};
use mlckpt::optimizer::OptimizationResult;
use mlckpt::simulator::{audit_events, read_event_log};
use serde_json::{json, Value};
use tempfile::TempDir;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn mlckpt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mlckpt")).args(args).output().expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = mlckpt(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn with_config(cfg: &Value, args: &[&str]) -> (Output, TempDir) {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(&path, serde_json::to_string(cfg).unwrap()).unwrap();
    let mut full = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    full.extend(["--config", &p]);
    (mlckpt(&full), dir)
}

fn shipped(name: &str) -> String {
    configs().join(name).to_str().unwrap().to_string()
}

/// CSV body as header plus numeric rows.
fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap_or(f64::NAN)).collect()).collect();
    (header, rows)
}

fn level(rate_per_day: f64, cost_s: f64) -> Value {
    json!({
        "failure_rate": {"value": rate_per_day, "unit": "per_day"},
        "checkpoint_cost": {"value": cost_s, "unit": "seconds"},
        "restart_cost": {"value": cost_s, "unit": "seconds"}
    })
}

fn seconds(v: f64) -> Value {
    json!({"value": v, "unit": "seconds"})
}

#[test]
fn evaluate_reference_row() {
    let (header, rows) = parse_csv(&run_ok(&["evaluate", "--config", &shipped("two_level_evaluate.json"), "--format", "csv"]));
    assert_eq!(header, ["utilization", "effective_period", "mean_ckpt_cost", "recovery_cost_1", "recovery_cost_2"]);
    assert!((rows[0][0] - 0.8206).abs() < 1e-4, "{}", rows[0][0]);
}

#[test]
fn evaluate_without_failures_is_exact() {
    let cfg = json!({
        "system": {"levels": [level(0.0, 20.0), level(0.0, 50.0)], "ordering": "relaxed"},
        "policy": {"interval": seconds(300.0), "probabilities": [0.75, 0.25]}
    });
    let (out, _dir) = with_config(&cfg, &["evaluate", "--format", "csv"]);
    let (_, rows) = parse_csv(std::str::from_utf8(&out.stdout).unwrap());
    let mean_cost = 0.75 * 20.0 + 0.25 * 50.0;
    assert!((rows[0][0] - (300.0 - mean_cost) / 300.0).abs() < 1e-15);
}

#[test]
fn evaluate_json_matches_library_bytes() {
    let stdout = run_ok(&["evaluate", "--config", &shipped("stream3_evaluate.json"), "--format", "json"]);
    let day = 86_400.0;
    let spec = SystemSpec::new(
        vec![
            LevelSpec::new(24.0 / day, 10.0, 10.0).unwrap(),
            LevelSpec::new(2.0 / day, 30.0, 30.0).unwrap(),
            LevelSpec::new(0.1 / day, 120.0, 120.0).unwrap(),
        ],
        Some(TopologySpec::new(50, 0.2).unwrap()),
    )
    .unwrap();
    let policy = Policy::new(300.0, vec![0.7, 0.25, 0.05]).unwrap();
    let expected = serde_json::to_string_pretty(&evaluate(&spec, &policy).unwrap()).unwrap() + "\n";
    assert_eq!(stdout, expected);
}

#[test]
fn optimize_json_round_trips() {
    let stdout = run_ok(&["optimize", "--config", &shipped("two_level_system.json"), "--format", "json"]);
    let parsed: OptimizationResult = serde_json::from_str(&stdout).unwrap();
    assert_eq!(serde_json::to_string_pretty(&parsed).unwrap() + "\n", stdout);
    assert_eq!(run_ok(&["optimize", "--config", &shipped("two_level_system.json"), "--format", "json"]), stdout);
}

#[test]
fn compare_matches_reference_optima() {
    let rows = [
        (0.5, 0.8897, 268.0672, 0.8206, 0.7549, 8.6943),
        (0.75, 0.8649, 268.1357, 0.8151, 0.7543, 8.06),
        (1.0, 0.8439, 268.3256, 0.8106, 0.7537, 7.5449),
        (5.0, 0.6408, 276.0128, 0.7712, 0.7444, 3.6088),
        (10.0, 0.4661, 290.6464, 0.7448, 0.7332, 1.5797),
    ];
    for (l2, p1, t, u, u1, pct) in rows {
        let cfg = json!({"system": {"levels": [level(50.0, 20.0), level(l2, 50.0)]}});
        let (out, _dir) = with_config(&cfg, &["compare", "--format", "csv"]);
        let (header, table) = parse_csv(std::str::from_utf8(&out.stdout).unwrap());
        assert_eq!(header, ["levels", "T_star", "p_star_1", "p_star_2", "U", "pct_increase", "pct_increase_prev"]);
        let two = &table[1];
        assert_eq!(two[0], 2.0);
        assert!((two[1] - t).abs() < 0.5, "λ2={l2} T*={}", two[1]);
        assert!((two[2] - p1).abs() < 0.005, "λ2={l2} p1*={}", two[2]);
        assert!((two[4] - u).abs() < 0.001);
        assert!((table[0][4] - u1).abs() < 0.001);
        assert!((two[5] - pct).abs() < 0.15);
    }
}

#[test]
fn grid_maximum_is_next_to_the_optimum() {
    let grid = run_ok(&["sweep", "--config", &shipped("heatmap.json"), "--format", "csv"]);
    let (header, rows) = parse_csv(&grid);
    assert_eq!(header, ["T", "p1", "utilization"]);
    assert_eq!(rows.len(), 55 * 41);
    let best = rows.iter().filter(|r| r[2].is_finite()).max_by(|a, b| a[2].total_cmp(&b[2])).unwrap();

    let cfg: Value = serde_json::from_str(&std::fs::read_to_string(configs().join("heatmap.json")).unwrap()).unwrap();
    let (out, _dir) = with_config(&json!({"system": cfg["system"]}), &["optimize", "--format", "json"]);
    let opt: OptimizationResult = serde_json::from_slice(&out.stdout).unwrap();
    let (t_step, p_step) = (540.0 / 54.0, 1.0 / 40.0);
    assert!((best[0] - opt.best_policy.interval).abs() <= t_step + 1e-9, "{best:?} vs {opt:?}");
    assert!((best[1] - opt.best_policy.probabilities[0]).abs() <= p_step + 1e-9, "{best:?} vs {opt:?}");
    assert!(best[2] <= opt.best_utilization + 1e-12);
}

#[test]
fn approx_without_level2_failures_checkpoints_level1_only() {
    let cfg = json!({"system": {"levels": [level(50.0, 20.0), level(0.0, 50.0)]}});
    for rate in ["aggregate", "lowest-level"] {
        let (out, _dir) = with_config(&cfg, &["approx", "--rate", rate, "--format", "json"]);
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["p1"], 1.0);
    }
    // both rates coincide when level 2 never fails
    let (out, _dir) = with_config(&cfg, &["approx", "--format", "csv"]);
    let (_, rows) = parse_csv(std::str::from_utf8(&out.stdout).unwrap());
    let (lambda, c) = (50.0 / 86_400.0, 20.0);
    let w = mlckpt::numerics::lambert_w0(-(-lambda * c - 1.0f64).exp()).unwrap();
    assert!((rows[0][0] - (c + (w + 1.0) / lambda)).abs() < 1e-9);
}

#[test]
fn invalid_configs_exit_2() {
    let base = json!({"system": {"levels": [level(50.0, 20.0), level(0.5, 50.0)]}});
    let mut unknown = base.clone();
    unknown["system"]["colour"] = json!("red");
    let (out, _dir) = with_config(&unknown, &["optimize"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));

    let (out, _dir) = with_config(&base, &["evaluate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("policy"));

    let mut extra = base.clone();
    extra["policy"] = json!({"interval": seconds(300.0), "probabilities": [0.5, 0.5]});
    let (out, _dir) = with_config(&extra, &["compare"]);
    assert_eq!(out.status.code(), Some(2));

    let mut bare_rate = base.clone();
    bare_rate["system"]["levels"][0]["failure_rate"] = json!(50.0);
    let (out, _dir) = with_config(&bare_rate, &["optimize"]);
    assert_eq!(out.status.code(), Some(2));

    let disordered = json!({"system": {"levels": [level(0.5, 20.0), level(50.0, 50.0)]}});
    let (out, _dir) = with_config(&disordered, &["optimize"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly decrease"));

    assert_eq!(mlckpt(&["optimize"]).status.code(), Some(2));
    assert_eq!(mlckpt(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn divergence_exits_3() {
    let cfg = json!({
        "system": {"levels": [level(864.0, 1.0), level(864.0, 2.0)], "ordering": "relaxed"},
        "policy": {"interval": seconds(500.0), "probabilities": [0.999, 0.001]}
    });
    let (out, _dir) = with_config(&cfg, &["evaluate"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn simulate_is_deterministic_and_seed_overridable() {
    let cfg = shipped("stream3_simulate.json");
    let a = run_ok(&["simulate", "--config", &cfg, "--format", "csv"]);
    let b = run_ok(&["simulate", "--config", &cfg, "--format", "csv"]);
    let c = run_ok(&["simulate", "--config", &cfg, "--format", "csv", "--seed", "8"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    let (header, rows) = parse_csv(&a);
    assert_eq!(header, ["replica", "utilization", "committed", "checkpoint", "lost", "restart"]);
    assert_eq!(rows.len(), 20);
    for r in &rows {
        let total = r[2] + r[3] + r[4] + r[5];
        assert!((total - 30.0 * 86_400.0).abs() < 1e-6 * total);
    }
}

#[test]
fn event_log_passes_audit() {
    let dir = TempDir::new().unwrap();
    let log = dir.path().join("events.jsonl");
    let report = run_ok(&[
        "simulate",
        "--config",
        &shipped("stream3_simulate.json"),
        "--format",
        "json",
        "--event-log",
        log.to_str().unwrap(),
    ]);
    let report: Value = serde_json::from_str(&report).unwrap();
    assert!(report.get("events").is_none());
    let events = read_event_log(&std::fs::read_to_string(&log).unwrap()).unwrap();
    let summary = audit_events(&events).unwrap();
    assert_eq!(summary.replicas, 20);
    let failures: u64 = report["event_counts"]["failures"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).sum();
    assert!(summary.failures_checked as u64 >= failures);
}

#[test]
fn one_dimensional_sweep_with_simulation() {
    let cfg = json!({
        "system": {"levels": [level(50.0, 20.0), level(0.5, 50.0)]},
        "policy": {"interval": seconds(268.0), "probabilities": [0.89, 0.11]},
        "simulation": {"duration": {"value": 20, "unit": "days"}, "replicas": 8, "seed": 3},
        "sweep": {"axis": "probability", "level": 1, "from": 0.5, "to": 0.9, "steps": 3}
    });
    let (out, _dir) = with_config(&cfg, &["sweep", "--simulate", "--format", "csv"]);
    let (header, rows) = parse_csv(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header, ["p1", "utilization", "sim_mean", "sim_std_dev", "sim_std_error"]);
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), [0.5, 0.7, 0.9]);
    for r in &rows {
        assert!((r[1] - r[2]).abs() < 4.0 * r[4] + 1e-3, "{r:?}");
    }

    let mut no_sim = cfg.clone();
    no_sim.as_object_mut().unwrap().remove("simulation");
    let (out, _dir) = with_config(&no_sim, &["sweep", "--simulate"]);
    assert_eq!(out.status.code(), Some(2));
    let (out, _dir) = with_config(&cfg, &["sweep"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("u.csv");
    let stdout = run_ok(&[
        "evaluate",
        "--config",
        &shipped("two_level_evaluate.json"),
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("utilization,") && written.ends_with('\n') && !written.contains('\r'));
}
