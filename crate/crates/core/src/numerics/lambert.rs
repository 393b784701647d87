//! Principal branch of the Lambert W function.

use crate::error::{Error, Result};

/// `−1/e`, the branch point.
pub const BRANCH_POINT: f64 = -0.367_879_441_171_442_33;

/// Tuning for [`lambert_w0_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPointPolicy {
    /// Use the branch-point series when `z` is within this distance of `−1/e`.
    pub series_threshold: f64,
    pub max_iterations: usize,
    /// Relative step size at which Halley iteration stops.
    pub tolerance: f64,
}

impl Default for BranchPointPolicy {
    fn default() -> Self {
        BranchPointPolicy { series_threshold: 1e-4, max_iterations: 50, tolerance: 1e-15 }
    }
}

impl BranchPointPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) || !(self.series_threshold > 0.0) {
            return Err(Error::InvalidConfig("tolerance and series_threshold must be > 0".into()));
        }
        Ok(())
    }
}

/// `W₀(z)`: the `w ≥ −1` with `w·e^w = z`, for `z ≥ −1/e`.
pub fn lambert_w0(z: f64) -> Result<f64> {
    lambert_w0_with(z, &BranchPointPolicy::default())
}

pub fn lambert_w0_with(z: f64, policy: &BranchPointPolicy) -> Result<f64> {
    policy.validate()?;
    if z.is_nan() || z < BRANCH_POINT {
        return Err(Error::Domain(format!("Lambert W0 is undefined below -1/e, got {z}")));
    }
    if z == f64::INFINITY {
        return Ok(f64::INFINITY);
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if z == BRANCH_POINT {
        return Ok(-1.0);
    }

    // p = sqrt(2(ez + 1)); e·z + 1 is evaluated as e·(z + 1/e) to keep digits
    let offset = z - BRANCH_POINT;
    let p = (2.0 * std::f64::consts::E * offset).sqrt();
    if offset < policy.series_threshold {
        return Ok(branch_series(p));
    }

    let mut w = if offset < 0.25 {
        branch_series(p)
    } else if z.abs() < 0.25 {
        z * (1.0 - z)
    } else if z < std::f64::consts::E {
        z.ln_1p()
    } else {
        let lz = z.ln();
        lz - lz.ln()
    };

    let mut previous_step = f64::INFINITY;
    for _ in 0..policy.max_iterations {
        let ew = w.exp();
        let f = w * ew - z;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        // near −1/e rounding in f can keep the step above tolerance; a step that
        // no longer shrinks means the iteration has reached that floor
        if step.abs() >= previous_step {
            return Ok(w);
        }
        w -= step;
        if step.abs() <= policy.tolerance * (1.0 + w.abs()) {
            return Ok(w);
        }
        previous_step = step.abs();
    }
    Err(Error::NonConvergence("Lambert W0 Halley iteration", policy.max_iterations))
}

/// Series of `W₀` about the branch point in `p = sqrt(2(ez + 1))`.
fn branch_series(p: f64) -> f64 {
    const C: [f64; 7] = [
        -1.0,
        1.0,
        -1.0 / 3.0,
        11.0 / 72.0,
        -43.0 / 540.0,
        769.0 / 17_280.0,
        -221.0 / 8_505.0,
    ];
    C.iter().rev().fold(0.0, |acc, c| acc * p + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bisection on `w·e^w − z`, test oracle only.
    fn bisect(z: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid * mid.exp() < z {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn identities() {
        assert_eq!(lambert_w0(0.0).unwrap(), 0.0);
        assert!((lambert_w0(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(lambert_w0(-(-1.0f64).exp()).unwrap(), -1.0);
        assert!(lambert_w0(BRANCH_POINT - 1e-12).is_err());
        assert!(lambert_w0(f64::NAN).is_err());
    }

    #[test]
    fn omega_constant() {
        let oracle = bisect(1.0, 0.0, 1.0);
        assert!((oracle - 0.567_143_290_409_783_8).abs() < 1e-15);
        assert!((lambert_w0(1.0).unwrap() - oracle).abs() < 1e-15);
    }

    #[test]
    fn agrees_with_bisection() {
        for &z in &[-0.36f64, -0.3, -0.1, -1e-5, 1e-8, 0.2, 2.0, 10.0, 1e3, 1e6] {
            let hi = if z > 1.0 { z.ln().max(1.0) } else { 1.0 };
            let oracle = bisect(z, -1.0, hi);
            assert!((lambert_w0(z).unwrap() - oracle).abs() < 1e-12 * (1.0 + oracle.abs()), "{z}");
        }
    }

    #[test]
    fn near_branch_point() {
        for k in 0..20 {
            let z = BRANCH_POINT + 1e-6 * (k as f64) / 20.0 + 1e-17;
            let w = lambert_w0(z).unwrap();
            assert!(w >= -1.0);
            assert!((w * w.exp() - z).abs() <= 1e-12, "{z}");
        }
    }

    #[test]
    fn converges_where_the_residual_is_ill_conditioned() {
        for k in 0..2000 {
            let z = BRANCH_POINT + 1e-4 + 2e-4 * k as f64 / 2000.0;
            let w = lambert_w0(z).unwrap();
            assert!((w * w.exp() - z).abs() <= 1e-15, "{z}");
        }
    }

    #[test]
    fn rejects_bad_policy() {
        let bad = BranchPointPolicy { tolerance: 0.0, ..Default::default() };
        assert!(lambert_w0_with(1.0, &bad).is_err());
        let capped = BranchPointPolicy { max_iterations: 0, ..Default::default() };
        assert!(matches!(lambert_w0_with(1.0, &capped), Err(Error::NonConvergence(..))));
    }
}
