//! Nelder–Mead simplex search, written for maximization.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct NelderMeadOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Maximizes `f` from `x0`, with initial edge lengths `steps`.
///
/// `f` may return `−∞` for points to avoid. Stops when the spread of values
/// is at most `f_tol` and every vertex is within `x_tol` of the best one, or
/// after `max_iterations`.
pub(crate) fn maximize(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    steps: &[f64],
    f_tol: f64,
    x_tol: f64,
    max_iterations: usize,
) -> NelderMeadOutcome {
    let n = x0.len();
    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();
    let mut evaluations = n + 1;
    let mut converged = false;

    for _ in 0..max_iterations {
        // best first; stable sort keeps the result deterministic on ties
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[0] - values[n];
        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if values[0].is_finite() && spread <= f_tol && size <= x_tol {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[n]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let reflected = along(REFLECT);
        let fr = f(&reflected);
        evaluations += 1;
        if fr > values[0] {
            let expanded = along(EXPAND);
            let fe = f(&expanded);
            evaluations += 1;
            if fe > fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr > values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        // outside contraction must beat the reflection, inside the worst vertex
        let (contracted, bar) = if fr > values[n] { (along(REFLECT * CONTRACT), fr) } else { (along(-CONTRACT), values[n]) };
        let fc = f(&contracted);
        evaluations += 1;
        if fc >= bar && fc > f64::NEG_INFINITY {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            for (x, b) in simplex[i].iter_mut().zip(&best) {
                *x = b + SHRINK * (*x - b);
            }
            values[i] = f(&simplex[i]);
            evaluations += 1;
        }
    }

    let best = (0..=n).max_by(|&a, &b| values[a].total_cmp(&values[b]).then(b.cmp(&a))).unwrap_or(0);
    NelderMeadOutcome { x: simplex[best].clone(), value: values[best], evaluations, converged }
}
