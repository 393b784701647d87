//! Bracketed one-dimensional maximization.

use crate::error::{Error, Result};

/// Points evaluated before the golden-section phase to pick a bracket.
pub const PRESCAN_POINTS: usize = 64;

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on `[lo, hi]`.
///
/// A uniform pre-scan of [`PRESCAN_POINTS`] points picks the best cell, then
/// golden-section search narrows the two cells around it to width `tol`.
/// For unimodal `f` this is the global maximizer; otherwise a local one.
/// Returns `(argmax, max)`. Any non-finite evaluation is an error.
pub fn maximize_1d(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Domain(format!("maximize_1d needs finite lo < hi, got [{lo}, {hi}]")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("maximize_1d needs tol > 0, got {tol}")));
    }
    let mut eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFinite { value: y, at: x })
        }
    };

    let step = (hi - lo) / (PRESCAN_POINTS - 1) as f64;
    let grid = |i: usize| if i == PRESCAN_POINTS - 1 { hi } else { lo + step * i as f64 };
    let mut best = (0, eval(lo)?);
    for i in 1..PRESCAN_POINTS {
        let y = eval(grid(i))?;
        if y > best.1 {
            best = (i, y);
        }
    }
    let (mut a, mut b) = (grid(best.0.saturating_sub(1)), grid((best.0 + 1).min(PRESCAN_POINTS - 1)));
    let (mut best_x, mut best_y) = (grid(best.0), best.1);

    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = eval(x2)?;
        }
    }
    for (x, y) in [(x1, f1), (x2, f2)] {
        if y > best_y {
            best_x = x;
            best_y = y;
        }
    }
    Ok((best_x, best_y))
}
