//! Utilization-maximizing checkpoint policies.
//!
//! The joint search runs Nelder–Mead over `(ln T, z)` where `p = softmax([z, 0])`,
//! from Latin-hypercube starts, then polishes the best point by cyclic
//! coordinate ascent: golden-section on `T` and line searches along
//! `e_i − e_j` inside the simplex. Points where the model diverges score `−∞`.

mod nelder_mead;
mod simplex;

pub use simplex::project_to_simplex;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{evaluate, Policy, SystemSpec};
use crate::numerics::maximize_1d;
use simplex::{from_unit_cube, logits_pinned, softmax_pinned};

/// Upper end of the default interval range, in seconds.
pub const DEFAULT_T_CEILING: f64 = 1e6;
/// Utilization drop that delimits the reported plateau around the optimum.
pub const PLATEAU_DROP: f64 = 1e-4;

const MAX_REFINE_CYCLES: usize = 200;
const NM_ITERATIONS_PER_DIM: usize = 400;

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Search range for `T` in seconds. `None` uses `(max c + 1, min(10/λ₁, 10⁶))`.
    pub t_bounds: Option<(f64, f64)>,
    pub multistarts: usize,
    /// Utilization change per refinement cycle below which the search has settled.
    pub simplex_tolerance: f64,
    /// Interval change per refinement cycle (seconds) below which the search has settled.
    pub t_tolerance: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { t_bounds: None, multistarts: 8, simplex_tolerance: 1e-9, t_tolerance: 0.01, seed: 0 }
    }
}

impl OptimizerConfig {
    /// The interval range for `spec`, validated.
    pub fn bounds_for(&self, spec: &SystemSpec) -> Result<(f64, f64)> {
        if self.multistarts == 0 {
            return Err(Error::InvalidConfig("multistarts must be >= 1".into()));
        }
        if !(self.simplex_tolerance > 0.0) || !(self.t_tolerance > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be > 0".into()));
        }
        let max_cost = spec.max_checkpoint_cost();
        let (lo, hi) = self.t_bounds.unwrap_or_else(|| {
            let rate = spec.levels()[0].failure_rate;
            let hi = if rate > 0.0 { (10.0 / rate).min(DEFAULT_T_CEILING) } else { DEFAULT_T_CEILING };
            (max_cost + 1.0, hi)
        });
        if !(lo > max_cost) || !(lo < hi) || !hi.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "infeasible interval bounds [{lo}, {hi}] s: need max checkpoint cost {max_cost} s < lo < hi < inf"
            )));
        }
        Ok((lo, hi))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub best_policy: Policy,
    pub best_utilization: f64,
    pub evaluations: usize,
    /// Starts that reached a finite utilization.
    pub restarts_used: usize,
    pub converged: bool,
    /// Width in seconds of the `T` range, at the optimal probabilities, where
    /// utilization is within [`PLATEAU_DROP`] of the optimum.
    pub plateau_width: Option<f64>,
}

/// One row of [`compare_levels`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelComparison {
    pub levels_used: usize,
    /// Retained levels of the original system, 1-based.
    pub retained: Vec<usize>,
    /// Optimum over the retained levels only.
    pub policy: Policy,
    pub utilization: f64,
    /// Gain over the single-level row, in percent.
    pub pct_increase: f64,
    /// Gain over the previous row, in percent.
    pub pct_increase_prev: f64,
}

impl LevelComparison {
    /// Probabilities over all `num_levels` original levels, zero where dropped.
    pub fn full_probabilities(&self, num_levels: usize) -> Vec<f64> {
        let mut p = vec![0.0; num_levels];
        for (level, q) in self.retained.iter().zip(&self.policy.probabilities) {
            p[level - 1] = *q;
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    interval: f64,
    probabilities: Vec<f64>,
    utilization: f64,
}

impl Candidate {
    /// Higher utilization wins; ties go to the lexicographically smaller policy.
    fn beats(&self, other: &Candidate) -> bool {
        match self.utilization.total_cmp(&other.utilization) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => {
                let key = |c: &Candidate| std::iter::once(c.interval).chain(c.probabilities.clone()).collect::<Vec<_>>();
                key(self).iter().zip(key(other).iter()).map(|(a, b)| a.total_cmp(b)).find(|o| o.is_ne())
                    == Some(std::cmp::Ordering::Less)
            }
        }
    }
}

struct Objective<'a> {
    spec: &'a SystemSpec,
    bounds: (f64, f64),
    evaluations: usize,
}

impl<'a> Objective<'a> {
    fn new(spec: &'a SystemSpec, bounds: (f64, f64)) -> Self {
        Objective { spec, bounds, evaluations: 0 }
    }

    fn utilization(&mut self, interval: f64, probabilities: &[f64]) -> f64 {
        self.evaluations += 1;
        let policy = Policy { interval, probabilities: probabilities.to_vec() };
        match evaluate(self.spec, &policy) {
            Ok(e) if e.utilization.is_finite() => e.utilization,
            _ => f64::NEG_INFINITY,
        }
    }

    fn candidate(&mut self, interval: f64, probabilities: Vec<f64>) -> Candidate {
        let utilization = self.utilization(interval, &probabilities);
        Candidate { interval, probabilities, utilization }
    }

    fn clamp(&self, interval: f64) -> f64 {
        interval.clamp(self.bounds.0, self.bounds.1)
    }
}

/// Finite stand-in for `−∞` inside the golden-section searches.
fn finite_or_floor(u: f64) -> f64 {
    if u.is_finite() {
        u
    } else {
        -1.0
    }
}

fn latin_hypercube(samples: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; dims]; samples];
    for d in 0..dims {
        let mut strata: Vec<usize> = (0..samples).collect();
        strata.shuffle(&mut rng);
        for (point, stratum) in points.iter_mut().zip(&strata) {
            point[d] = (*stratum as f64 + rng.random::<f64>()) / samples as f64;
        }
    }
    points
}

fn region(bounds: (f64, f64)) -> String {
    format!("T in [{}, {}] s over the probability simplex", bounds.0, bounds.1)
}

/// Nelder–Mead over `(ln T, z)`, or over `z` alone when `fixed_interval` is set.
fn nelder_mead_from(
    obj: &mut Objective,
    start: &Candidate,
    fixed_interval: Option<f64>,
    config: &OptimizerConfig,
) -> Candidate {
    let mut x0 = Vec::new();
    let mut steps = Vec::new();
    if fixed_interval.is_none() {
        x0.push(start.interval.ln());
        steps.push(0.2);
    }
    x0.extend(logits_pinned(&start.probabilities));
    steps.resize(x0.len(), 1.0);
    if x0.is_empty() {
        return start.clone();
    }
    let decode = |obj: &Objective, x: &[f64]| match fixed_interval {
        Some(t) => (t, softmax_pinned(x)),
        None => (obj.clamp(x[0].exp()), softmax_pinned(&x[1..])),
    };
    let out = nelder_mead::maximize(
        |x| {
            let (t, p) = decode(obj, x);
            obj.utilization(t, &p)
        },
        &x0,
        &steps,
        config.simplex_tolerance * 0.1,
        1e-8,
        NM_ITERATIONS_PER_DIM * x0.len(),
    );
    let (t, p) = decode(obj, &out.x);
    let polished = obj.candidate(t, p);
    if polished.beats(start) {
        polished
    } else {
        start.clone()
    }
}

/// Cyclic coordinate ascent; returns the improved point and whether it settled.
fn refine(
    obj: &mut Objective,
    mut best: Candidate,
    vary_t: bool,
    vary_p: bool,
    config: &OptimizerConfig,
) -> (Candidate, bool) {
    let n = if vary_p { best.probabilities.len() } else { 0 };
    for _ in 0..MAX_REFINE_CYCLES {
        let previous = best.clone();
        if vary_t {
            let lo = obj.bounds.0.max(best.interval / 2.0);
            let hi = obj.bounds.1.min(best.interval * 2.0);
            if lo < hi {
                let p = best.probabilities.clone();
                let found = maximize_1d(|t| finite_or_floor(obj.utilization(t, &p)), lo, hi, config.t_tolerance * 0.1);
                if let Ok((t, u)) = found {
                    if u > best.utilization {
                        best = Candidate { interval: t, probabilities: p, utilization: u };
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = (-best.probabilities[i], best.probabilities[j]);
                if !(b - a > 1e-15) {
                    continue;
                }
                let base = best.probabilities.clone();
                let point = |s: f64| {
                    let mut v = base.clone();
                    v[i] += s;
                    v[j] -= s;
                    project_to_simplex(&v)
                };
                let t = best.interval;
                let found = maximize_1d(|s| finite_or_floor(obj.utilization(t, &point(s))), a, b, 1e-10);
                if let Ok((s, u)) = found {
                    if u > best.utilization {
                        best = Candidate { interval: t, probabilities: point(s), utilization: u };
                    }
                }
            }
        }
        let settled = (best.utilization - previous.utilization).abs() < config.simplex_tolerance
            && (best.interval - previous.interval).abs() < config.t_tolerance;
        if settled {
            return (best, true);
        }
    }
    (best, false)
}

/// Width of the `T` range around `best` where `U ≥ U* − PLATEAU_DROP`.
fn plateau_width(obj: &mut Objective, best: &Candidate) -> Option<f64> {
    let floor = best.utilization - PLATEAU_DROP;
    let p = best.probabilities.clone();
    let (lo, hi) = obj.bounds;
    let mut edge = |far: f64| {
        if obj.utilization(far, &p) >= floor {
            return far;
        }
        let (mut inside, mut outside) = (best.interval, far);
        for _ in 0..80 {
            let mid = 0.5 * (inside + outside);
            if obj.utilization(mid, &p) >= floor {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        inside
    };
    let width = edge(hi) - edge(lo);
    width.is_finite().then_some(width)
}

fn finish(obj: &mut Objective, best: Candidate, restarts_used: usize, converged: bool) -> Result<OptimizationResult> {
    let plateau = plateau_width(obj, &best);
    let best_policy = Policy::new(best.interval, best.probabilities)?;
    Ok(OptimizationResult {
        best_policy,
        best_utilization: best.utilization,
        evaluations: obj.evaluations,
        restarts_used,
        converged,
        plateau_width: plateau,
    })
}

/// Runs one multistart: returns the local optimum (if the start was usable)
/// and the evaluations spent.
fn run_start(
    spec: &SystemSpec,
    bounds: (f64, f64),
    unit: &[f64],
    fixed_interval: Option<f64>,
    config: &OptimizerConfig,
) -> (Option<Candidate>, usize) {
    let mut obj = Objective::new(spec, bounds);
    let (ln_lo, ln_hi) = (bounds.0.ln(), bounds.1.ln());
    let (mut interval, cube) = match fixed_interval {
        Some(t) => (t, unit),
        None => ((ln_lo + unit[0] * (ln_hi - ln_lo)).exp(), &unit[1..]),
    };
    let mut probabilities = from_unit_cube(cube);
    let mut start = obj.candidate(interval, probabilities.clone());
    // pull diverging starts toward short intervals and top-level checkpoints;
    // the top-level-only policy is the single-level model, finite everywhere
    let top = probabilities.len() - 1;
    let mut tries = 0;
    while !start.utilization.is_finite() && tries < 40 {
        if fixed_interval.is_none() {
            interval = (ln_lo + 0.5 * (interval.ln() - ln_lo)).exp();
        }
        for (l, p) in probabilities.iter_mut().enumerate() {
            *p = 0.5 * (*p + f64::from(u8::from(l == top)));
        }
        start = obj.candidate(interval, probabilities.clone());
        tries += 1;
    }
    if !start.utilization.is_finite() {
        return (None, obj.evaluations);
    }
    let local = nelder_mead_from(&mut obj, &start, fixed_interval, config);
    (Some(local), obj.evaluations)
}

fn best_of_starts(
    spec: &SystemSpec,
    bounds: (f64, f64),
    fixed_interval: Option<f64>,
    config: &OptimizerConfig,
) -> Result<(Candidate, usize, usize)> {
    let dims = spec.num_levels() - 1 + usize::from(fixed_interval.is_none());
    let starts = latin_hypercube(config.multistarts, dims, config.seed);
    let outcomes: Vec<(Option<Candidate>, usize)> =
        starts.par_iter().map(|u| run_start(spec, bounds, u, fixed_interval, config)).collect();
    let evaluations = outcomes.iter().map(|o| o.1).sum();
    let usable: Vec<Candidate> = outcomes.into_iter().filter_map(|o| o.0).collect();
    let used = usable.len();
    let best = usable
        .into_iter()
        .reduce(|a, b| if b.beats(&a) { b } else { a })
        .ok_or_else(|| Error::NoFeasibleStart(region(bounds)))?;
    Ok((best, used, evaluations))
}

/// Maximizes utilization jointly over the interval and level probabilities.
pub fn optimize(spec: &SystemSpec, config: &OptimizerConfig) -> Result<OptimizationResult> {
    let bounds = config.bounds_for(spec)?;
    let (best, used, evaluations) = best_of_starts(spec, bounds, None, config)?;
    let mut obj = Objective::new(spec, bounds);
    obj.evaluations = evaluations;
    let best = nelder_mead_from(&mut obj, &best, None, config);
    let (best, converged) = refine(&mut obj, best, true, true, config);
    finish(&mut obj, best, used, converged)
}

/// Best level probabilities for a fixed interval.
pub fn optimize_fixed_t(spec: &SystemSpec, interval: f64, config: &OptimizerConfig) -> Result<OptimizationResult> {
    let bounds = config.bounds_for(spec)?;
    if !(interval > spec.levels()[0].checkpoint_cost) || !interval.is_finite() {
        return Err(Error::InvalidPolicy(format!("interval {interval} s is infeasible for every level mix")));
    }
    let bounds = (bounds.0.min(interval), bounds.1.max(interval));
    let (best, used, evaluations) = best_of_starts(spec, bounds, Some(interval), config)?;
    let mut obj = Objective::new(spec, bounds);
    obj.evaluations = evaluations;
    let (best, converged) = refine(&mut obj, best, false, true, config);
    finish(&mut obj, best, used, converged)
}

/// Best interval for fixed level probabilities.
pub fn optimize_fixed_p(spec: &SystemSpec, probabilities: &[f64], config: &OptimizerConfig) -> Result<OptimizationResult> {
    let bounds = config.bounds_for(spec)?;
    let probe = Policy::new(bounds.1, probabilities.to_vec())?;
    probe.validate_for(spec)?;
    let mut obj = Objective::new(spec, bounds);
    let p = probe.probabilities;
    let (ln_t, u) = maximize_1d(
        |x| finite_or_floor(obj.utilization(obj.clamp(x.exp()), &p)),
        bounds.0.ln(),
        bounds.1.ln(),
        1e-10,
    )?;
    if !(u > 0.0) {
        return Err(Error::NoFeasibleStart(format!("T in [{}, {}] s at p = {p:?}", bounds.0, bounds.1)));
    }
    let best = Candidate { interval: obj.clamp(ln_t.exp()), probabilities: p, utilization: u };
    let (best, converged) = refine(&mut obj, best, true, false, config);
    finish(&mut obj, best, 1, converged)
}

/// Optimizes with 1, 2, …, `L` levels. Row `k` keeps levels `1..k−1` and `L`
/// and folds each dropped level's failure rate into the next retained level.
pub fn compare_levels(spec: &SystemSpec, config: &OptimizerConfig) -> Result<Vec<LevelComparison>> {
    let num_levels = spec.num_levels();
    if num_levels < 2 {
        return Err(Error::InvalidSpec("comparing levels needs L >= 2".into()));
    }
    let mut rows: Vec<LevelComparison> = Vec::with_capacity(num_levels);
    for k in 1..=num_levels {
        let retained: Vec<usize> = (0..k - 1).chain([num_levels - 1]).collect();
        let folded = spec.folded(&retained)?;
        let result = optimize(&folded, config)?;
        let u = result.best_utilization;
        let base = rows.first().map_or(u, |r| r.utilization);
        let prev = rows.last().map_or(u, |r| r.utilization);
        rows.push(LevelComparison {
            levels_used: k,
            retained: retained.iter().map(|l| l + 1).collect(),
            policy: result.best_policy,
            utilization: u,
            pct_increase: (u / base - 1.0) * 100.0,
            pct_increase_prev: (u / prev - 1.0) * 100.0,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate_1level, LevelSpec, OrderingCheck, TopologySpec};
    use crate::numerics::lambert_w0;

    fn two_level(l2: f64) -> SystemSpec {
        SystemSpec::new(
            vec![LevelSpec::per_day(50.0, 20.0, 20.0).unwrap(), LevelSpec::per_day(l2, 50.0, 50.0).unwrap()],
            None,
        )
        .unwrap()
    }

    fn u_at(spec: &SystemSpec, t: f64, p: &[f64]) -> f64 {
        evaluate(spec, &Policy { interval: t, probabilities: p.to_vec() }).map_or(f64::NEG_INFINITY, |e| e.utilization)
    }

    #[test]
    fn two_level_reference_row() {
        let r = optimize(&two_level(0.5), &OptimizerConfig::default()).unwrap();
        assert!((r.best_policy.interval - 268.0672).abs() < 0.5, "{r:?}");
        assert!((r.best_policy.probabilities[0] - 0.8897).abs() < 0.005);
        assert!((r.best_utilization - 0.8206).abs() < 0.001);
        assert!(r.converged);
        assert_eq!(r.restarts_used, 8);
        assert!(r.plateau_width.unwrap() > 1.0);
    }

    #[test]
    fn locally_optimal() {
        let spec = SystemSpec::new(
            vec![
                LevelSpec::per_day(20.0, 10.0, 10.0).unwrap(),
                LevelSpec::per_day(5.0, 20.0, 20.0).unwrap(),
                LevelSpec::per_day(1.0, 100.0, 100.0).unwrap(),
            ],
            Some(TopologySpec::new(5, 0.5).unwrap()),
        )
        .unwrap();
        let r = optimize(&spec, &OptimizerConfig::default()).unwrap();
        let (t, p, u) = (r.best_policy.interval, r.best_policy.probabilities.clone(), r.best_utilization);
        assert!(u_at(&spec, t + 0.1, &p) <= u + 1e-9 && u_at(&spec, t - 0.1, &p) <= u + 1e-9);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    let mut q = p.clone();
                    q[i] += 1e-3;
                    q[j] -= 1e-3;
                    assert!(u_at(&spec, t, &project_to_simplex(&q)) <= u + 1e-9, "{i} {j}");
                }
            }
        }
    }

    #[test]
    fn deterministic() {
        let spec = two_level(5.0);
        let config = OptimizerConfig { seed: 42, ..Default::default() };
        assert_eq!(optimize(&spec, &config).unwrap(), optimize(&spec, &config).unwrap());
    }

    #[test]
    fn single_level_matches_grid() {
        let spec = SystemSpec::new(vec![LevelSpec::per_day(50.5, 50.0, 50.0).unwrap()], None).unwrap();
        let r = optimize(&spec, &OptimizerConfig::default()).unwrap();
        let level = spec.levels()[0];
        let (mut grid_t, mut grid_u) = (0.0, f64::NEG_INFINITY);
        for k in 0..40_000 {
            let t = 51.0 + 0.1 * k as f64;
            let u = evaluate_1level(&level, t).unwrap().utilization;
            if u > grid_u {
                (grid_t, grid_u) = (t, u);
            }
        }
        assert!((r.best_policy.interval - grid_t).abs() <= 0.1);
        assert!(r.best_utilization >= grid_u - 1e-12);
    }

    #[test]
    fn fixed_p_all_top_level_is_one_level_closed_form() {
        let spec = two_level(0.5);
        let r = optimize_fixed_p(&spec, &[0.0, 1.0], &OptimizerConfig::default()).unwrap();
        let rate = spec.total_rate();
        let c = 50.0;
        let closed = c + (lambert_w0(-(-rate * c - 1.0).exp()).unwrap() + 1.0) / rate;
        assert!((r.best_policy.interval - closed).abs() < 0.01, "{} vs {closed}", r.best_policy.interval);
    }

    #[test]
    fn fixed_t_agrees_with_joint_optimum() {
        let spec = two_level(1.0);
        let config = OptimizerConfig::default();
        let joint = optimize(&spec, &config).unwrap();
        let t = joint.best_policy.interval;
        let at_t = optimize_fixed_t(&spec, t, &config).unwrap();
        assert!((at_t.best_policy.probabilities[0] - joint.best_policy.probabilities[0]).abs() < 1e-3);
        let long = optimize_fixed_t(&spec, 10.0 * t, &config).unwrap();
        assert!(long.best_policy.probabilities[0] < at_t.best_policy.probabilities[0]);
    }

    #[test]
    fn compare_levels_reference_row() {
        let rows = compare_levels(&two_level(0.5), &OptimizerConfig::default()).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].retained, vec![2]);
        assert!((rows[0].utilization - 0.7549).abs() < 0.001);
        assert_eq!(rows[0].pct_increase, 0.0);
        assert!((rows[1].pct_increase - 8.6943).abs() < 0.15);
        assert_eq!(rows[1].pct_increase, rows[1].pct_increase_prev);
        assert_eq!(rows[0].full_probabilities(2), vec![0.0, 1.0]);
    }

    #[test]
    fn config_errors() {
        let spec = two_level(0.5);
        let bad = |c: OptimizerConfig| matches!(optimize(&spec, &c), Err(Error::InvalidConfig(_)));
        assert!(bad(OptimizerConfig { multistarts: 0, ..Default::default() }));
        assert!(bad(OptimizerConfig { t_bounds: Some((40.0, 1000.0)), ..Default::default() }));
        assert!(bad(OptimizerConfig { t_bounds: Some((500.0, 100.0)), ..Default::default() }));
        assert!(bad(OptimizerConfig { t_tolerance: 0.0, ..Default::default() }));
        assert!(compare_levels(&SystemSpec::new(vec![LevelSpec::new(1e-3, 1.0, 1.0).unwrap()], None).unwrap(), &OptimizerConfig::default()).is_err());
    }

    #[test]
    fn everywhere_divergent_is_reported() {
        let spec = SystemSpec::with_ordering(
            vec![LevelSpec::new(0.01, 1.0, 1.0).unwrap(), LevelSpec::new(0.01, 2.0, 2.0).unwrap()],
            None,
            OrderingCheck::Relaxed,
        )
        .unwrap();
        let err = optimize_fixed_p(&spec, &[0.99, 0.01], &OptimizerConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NoFeasibleStart(_)), "{err}");
        assert!(err.is_numerical());
    }

    #[test]
    fn latin_hypercube_strata() {
        let pts = latin_hypercube(8, 3, 7);
        for d in 0..3 {
            let mut strata: Vec<usize> = pts.iter().map(|p| (p[d] * 8.0) as usize).collect();
            strata.sort_unstable();
            assert_eq!(strata, (0..8).collect::<Vec<_>>());
        }
        assert_eq!(pts, latin_hypercube(8, 3, 7));
        assert_ne!(pts, latin_hypercube(8, 3, 8));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]
            #[test]
            fn more_starts_never_hurt(
                l1 in 5.0f64..200.0, ratio in 0.001f64..0.5, c1 in 2.0f64..30.0, extra in 1.0f64..80.0, seed in 0u64..1000,
            ) {
                let spec = SystemSpec::new(
                    vec![LevelSpec::per_day(l1, c1, c1).unwrap(), LevelSpec::per_day(l1 * ratio, c1 + extra, c1 + extra).unwrap()],
                    None,
                ).unwrap();
                let one = optimize(&spec, &OptimizerConfig { multistarts: 1, seed, ..Default::default() }).unwrap();
                let eight = optimize(&spec, &OptimizerConfig { multistarts: 8, seed, ..Default::default() }).unwrap();
                prop_assert!(eight.best_utilization >= one.best_utilization - 1e-9);
                prop_assert!(eight.best_utilization > 0.0 && eight.best_utilization < 1.0);
            }
        }
    }
}
