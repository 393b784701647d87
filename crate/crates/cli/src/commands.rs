//! One function per subcommand; each returns the rendered output.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mlckpt::model::{self, IntervalRate, Policy, SystemSpec};
use mlckpt::optimizer;
use mlckpt::simulator::{self, SweepAxis};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{linspace, Format, Needs, RunConfig, SweepSection};
use crate::output::{json, key_values, Cell, Table};
use crate::CliError;

const NOTHING: Needs = Needs { policy: false, optimizer: false, simulation: false, sweep: false };

fn render_table(table: &Table, format: Format) -> Result<String, CliError> {
    match format {
        Format::Human => Ok(table.to_human()),
        Format::Csv => table.to_csv(),
        Format::Json => json(&table_objects(table)),
    }
}

/// Rows as JSON objects keyed by column name; non-finite numbers become `null`.
fn table_objects(table: &Table) -> Vec<Map<String, Value>> {
    table
        .rows
        .iter()
        .map(|row| {
            table
                .header
                .iter()
                .zip(row)
                .map(|(k, cell)| {
                    let v = match cell {
                        Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
                        Cell::Int(n) => Value::from(*n),
                        Cell::Text(s) if s.is_empty() => Value::Null,
                        Cell::Text(s) if s == "true" || s == "false" => Value::Bool(s == "true"),
                        Cell::Text(s) => Value::from(s.as_str()),
                    };
                    (k.clone(), v)
                })
                .collect()
        })
        .collect()
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|l| format!("{prefix}{l}")).collect()
}

pub fn evaluate(cfg: &RunConfig, format: Format) -> Result<String, CliError> {
    let needs = Needs { policy: true, ..NOTHING };
    cfg.check_sections("evaluate", needs, needs)?;
    let spec = cfg.system()?;
    let policy = cfg.policy()?;
    let eval = model::evaluate(&spec, &policy)?;
    match format {
        Format::Json => json(&eval),
        Format::Csv | Format::Human => {
            let mut header = vec!["utilization".to_string(), "effective_period".into(), "mean_ckpt_cost".into()];
            header.extend(numbered("recovery_cost_", spec.num_levels()));
            let mut row: Vec<Cell> = vec![eval.utilization.into(), eval.effective_period.into(), eval.mean_ckpt_cost.into()];
            row.extend(eval.per_level_recovery_cost.iter().map(|&r| Cell::from(r)));
            if format == Format::Csv {
                let mut t = Table::new(header);
                t.push(row);
                return t.to_csv();
            }
            let mut pairs: Vec<(&str, Cell)> = vec![
                ("levels", spec.num_levels().into()),
                ("stream", Cell::Text(if spec.topology().is_some() { "yes" } else { "no" }.into())),
            ];
            pairs.extend(header.iter().map(String::as_str).zip(row));
            Ok(key_values(&pairs))
        }
    }
}

pub fn optimize(cfg: &RunConfig, format: Format, seed: Option<u64>) -> Result<String, CliError> {
    cfg.check_sections("optimize", Needs { optimizer: true, ..NOTHING }, NOTHING)?;
    let spec = cfg.system()?;
    let result = optimizer::optimize(&spec, &cfg.optimizer(seed))?;
    if format == Format::Json {
        return json(&result);
    }
    let mut header = vec!["T_star".to_string()];
    header.extend(numbered("p_star_", spec.num_levels()));
    header.extend(["U", "evaluations", "restarts_used", "converged", "plateau_width"].map(String::from));
    let mut row: Vec<Cell> = vec![result.best_policy.interval.into()];
    row.extend(result.best_policy.probabilities.iter().map(|&p| Cell::from(p)));
    row.extend([
        result.best_utilization.into(),
        result.evaluations.into(),
        result.restarts_used.into(),
        result.converged.into(),
        result.plateau_width.into(),
    ]);
    if format == Format::Csv {
        let mut t = Table::new(header);
        t.push(row);
        return t.to_csv();
    }
    Ok(key_values(&header.iter().map(String::as_str).zip(row).collect::<Vec<_>>()))
}

#[derive(Debug, Serialize)]
struct ApproxOutput {
    interval: f64,
    p1: f64,
    iterations: usize,
    /// Exact utilization at the approximate point; `None` if it diverges.
    utilization: Option<f64>,
}

pub fn approx(cfg: &RunConfig, format: Format, rate: IntervalRate) -> Result<String, CliError> {
    cfg.check_sections("approx", NOTHING, NOTHING)?;
    let spec = cfg.system()?;
    let point = model::approx_fixed_point(&spec, rate)?;
    let utilization = model::evaluate(&spec, &point.policy()?).ok().map(|e| e.utilization);
    match format {
        Format::Json => {
            json(&ApproxOutput { interval: point.interval, p1: point.p1, iterations: point.iterations, utilization })
        }
        Format::Csv => {
            let mut t = Table::new(["T_star", "p_star_1", "U"]);
            t.push(vec![point.interval.into(), point.p1.into(), utilization.unwrap_or(f64::NAN).into()]);
            t.to_csv()
        }
        Format::Human => Ok(key_values(&[
            ("T_star", point.interval.into()),
            ("p_star_1", point.p1.into()),
            ("U", utilization.unwrap_or(f64::NAN).into()),
            ("iterations", point.iterations.into()),
        ])),
    }
}

pub fn simulate(cfg: &RunConfig, format: Format, seed: Option<u64>, event_log: Option<&Path>) -> Result<String, CliError> {
    cfg.check_sections("simulate", Needs { policy: true, simulation: true, ..NOTHING }, Needs { policy: true, ..NOTHING })?;
    let mut sim = cfg.simulation(cfg.system()?, cfg.policy()?, seed);
    sim.record_events = event_log.is_some();
    let mut report = simulator::simulate(&sim)?;
    if let (Some(path), Some(events)) = (event_log, report.events.take()) {
        let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        simulator::write_event_log(&events, &mut out).map_err(io)?;
        out.flush().map_err(io)?;
    }
    match format {
        Format::Json => json(&report),
        Format::Csv => {
            let mut t = Table::new(["replica", "utilization", "committed", "checkpoint", "lost", "restart"]);
            for (k, a) in report.accounting.iter().enumerate() {
                t.push(vec![k.into(), a.utilization().into(), a.committed.into(), a.checkpoint.into(), a.lost.into(), a.restart.into()]);
            }
            t.to_csv()
        }
        Format::Human => {
            let mut out = key_values(&[
                ("replicas", report.per_replica_utilization.len().into()),
                ("duration", sim.duration.into()),
                ("mean", report.mean.into()),
                ("std_dev", report.std_dev.into()),
                ("std_error", report.std_error().into()),
            ]);
            let c = &report.event_counts;
            let mut t = Table::new(["level", "failures", "completed", "discarded", "restarts"]);
            for l in 0..c.failures.len() {
                t.push(vec![
                    (l + 1).into(),
                    c.failures[l].into(),
                    c.checkpoints_completed[l].into(),
                    c.checkpoints_discarded[l].into(),
                    c.restart_attempts[l].into(),
                ]);
            }
            out.push('\n');
            out += &t.to_human();
            Ok(out)
        }
    }
}

fn utilization_or_nan(spec: &SystemSpec, policy: &Policy) -> f64 {
    model::evaluate(spec, policy).map_or(f64::NAN, |e| e.utilization)
}

pub fn sweep(cfg: &RunConfig, format: Format, seed: Option<u64>, with_simulation: bool) -> Result<String, CliError> {
    let section = cfg.sweep.as_ref().ok_or_else(|| CliError::Invalid("`sweep` needs a `sweep` section".into()))?;
    let sections = |policy: bool| {
        let needs = Needs { policy, simulation: with_simulation, sweep: true, ..NOTHING };
        cfg.check_sections("sweep", needs, needs)
    };
    let spec = cfg.system()?;

    let (axis, values, column) = match section {
        SweepSection::Grid { interval, p1 } => {
            if with_simulation {
                return Err(CliError::Invalid("--simulate is not supported for grid sweeps".into()));
            }
            sections(false)?;
            if spec.num_levels() != 2 {
                return Err(CliError::Invalid(format!("grid sweeps need exactly 2 levels, got {}", spec.num_levels())));
            }
            let ts = linspace(interval.from.seconds(), interval.to.seconds(), interval.steps)?;
            let ps = linspace(p1.from, p1.to, p1.steps)?;
            let mut t = Table::new(["T", "p1", "utilization"]);
            for &interval in &ts {
                for &p in &ps {
                    let policy = Policy::new(interval, vec![p, 1.0 - p])?;
                    t.push(vec![interval.into(), p.into(), utilization_or_nan(&spec, &policy).into()]);
                }
            }
            return render_table(&t, format);
        }
        SweepSection::Interval { from, to, steps } => {
            (SweepAxis::Interval, linspace(from.seconds(), to.seconds(), *steps)?, "T".to_string())
        }
        SweepSection::Probability { level, from, to, steps } => {
            (SweepAxis::Probability(*level), linspace(*from, *to, *steps)?, format!("p{level}"))
        }
        SweepSection::CriticalPath { from, to, steps } => {
            let values = linspace(f64::from(*from), f64::from(*to), *steps)?.into_iter().map(f64::round).collect();
            (SweepAxis::CriticalPath, values, "n".to_string())
        }
        SweepSection::FailureRate { level, from, to, steps } => {
            (SweepAxis::FailureRate(*level), linspace(from.per_second(), to.per_second(), *steps)?, format!("lambda{level}"))
        }
    };
    sections(true)?;
    let policy = cfg.policy()?;

    let mut header = vec![column, "utilization".to_string()];
    let mut rows: Vec<Vec<Cell>> = Vec::with_capacity(values.len());
    for &v in &values {
        let (s, p) = axis.apply_to_model(&spec, &policy, v)?;
        rows.push(vec![v.into(), utilization_or_nan(&s, &p).into()]);
    }
    if with_simulation {
        header.extend(["sim_mean", "sim_std_dev", "sim_std_error"].map(String::from));
        let base = cfg.simulation(spec.clone(), policy.clone(), seed);
        let reports = simulator::simulate_sweep(&base, axis, &values)?;
        for (row, r) in rows.iter_mut().zip(&reports) {
            row.extend([r.mean.into(), r.std_dev.into(), r.std_error().into()]);
        }
    }
    let mut t = Table::new(header);
    rows.into_iter().for_each(|r| t.push(r));
    render_table(&t, format)
}

pub fn compare(cfg: &RunConfig, format: Format, seed: Option<u64>) -> Result<String, CliError> {
    cfg.check_sections("compare", Needs { optimizer: true, ..NOTHING }, NOTHING)?;
    let spec = cfg.system()?;
    let rows = optimizer::compare_levels(&spec, &cfg.optimizer(seed))?;
    if format == Format::Json {
        return json(&rows);
    }
    let n = spec.num_levels();
    let mut header = vec!["levels".to_string(), "T_star".into()];
    header.extend(numbered("p_star_", n));
    header.extend(["U", "pct_increase", "pct_increase_prev"].map(String::from));
    let mut t = Table::new(header);
    for row in &rows {
        let mut cells: Vec<Cell> = vec![row.levels_used.into(), row.policy.interval.into()];
        cells.extend(row.full_probabilities(n).into_iter().map(Cell::from));
        cells.extend([row.utilization.into(), row.pct_increase.into(), row.pct_increase_prev.into()]);
        t.push(cells);
    }
    render_table(&t, format)
}
