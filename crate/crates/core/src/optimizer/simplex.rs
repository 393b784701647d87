//! Helpers for the probability simplex.

/// Euclidean projection onto `{p : p_i ≥ 0, Σ p_i = 1}`.
///
/// The projection of a finite point is unique; inputs with a non-finite
/// entry map to the uniform distribution.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let n = v.len();
    if n == 0 {
        return Vec::new();
    }
    if v.iter().any(|x| !x.is_finite()) {
        return vec![1.0 / n as f64; n];
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, u) in sorted.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - 1.0) / (j + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    let mut w: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    w
}

/// `softmax([z, 0])`: `L − 1` free logits with the last one pinned at zero.
pub(crate) fn softmax_pinned(z: &[f64]) -> Vec<f64> {
    let top = z.iter().copied().fold(0.0, f64::max);
    let mut p: Vec<f64> = z.iter().map(|x| (x - top).exp()).collect();
    p.push((-top).exp());
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
    p
}

/// Inverse of [`softmax_pinned`], with entries floored so the logits stay finite.
pub(crate) fn logits_pinned(p: &[f64]) -> Vec<f64> {
    const FLOOR: f64 = 1e-9;
    let last = p[p.len() - 1].max(FLOOR);
    p[..p.len() - 1].iter().map(|x| (x.max(FLOOR) / last).ln()).collect()
}

/// Maps a point of `[0, 1]^{L−1}` to the simplex via the spacings of its
/// sorted coordinates (uniform on the simplex for uniform input).
pub(crate) fn from_unit_cube(u: &[f64]) -> Vec<f64> {
    let mut cuts = u.to_vec();
    cuts.sort_by(f64::total_cmp);
    let mut p = Vec::with_capacity(u.len() + 1);
    let mut prev = 0.0;
    for c in cuts {
        p.push(c - prev);
        prev = c;
    }
    p.push(1.0 - prev);
    p
}
