//! Exponential-failure primitives.
//!
//! For a horizon `t` and aggregate rate `Λ` with `q = e^{-Λt}`:
//! the expected number of failed attempts before one survives `t` is
//! `(1 − q)/q = expm1(Λt)`, and the expected time lost per failed attempt is
//! `F_Λ(t)`. Their product `expm1(Λt)·F_Λ(t)` simplifies exactly to
//! `(e^{Λt} − 1 − Λt)/Λ`, which is what the evaluators use; it stays accurate
//! as `Λt → 0` where the factored form loses every digit.

use crate::error::{Error, Result};

/// Below this `|x|` the excess `e^x − 1 − x` is summed as a Taylor series.
const SERIES_CUTOFF: f64 = 0.5;

/// `e^x − 1 − x` without cancellation near zero.
pub(crate) fn exp_excess(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let mut term = x * x / 2.0;
        let mut sum = term;
        let mut k = 2.0;
        while term.abs() > f64::EPSILON * 1e-2 * sum.abs() {
            k += 1.0;
            term *= x / k;
            sum += term;
        }
        sum
    } else {
        x.exp_m1() - x
    }
}

/// `P[X ≥ duration]` for an exponential failure time with the given rate.
pub fn survival_probability(duration: f64, rate: f64) -> Result<f64> {
    if !(duration >= 0.0) || !(rate >= 0.0) {
        return Err(Error::Domain(format!(
            "survival_probability needs duration >= 0 and rate >= 0, got ({duration}, {rate})"
        )));
    }
    Ok((-rate * duration).exp())
}

/// `F_Λ(T) = E[X | X < T]`: mean failure time given that a failure happens
/// within the horizon.
pub fn conditional_mttf(horizon: f64, rate: f64) -> Result<f64> {
    if !(horizon > 0.0) || !(rate > 0.0) || !horizon.is_finite() || !rate.is_finite() {
        return Err(Error::Domain(format!(
            "conditional_mttf needs horizon > 0 and rate > 0, got ({horizon}, {rate})"
        )));
    }
    Ok(mttf_unchecked(horizon, rate))
}

fn mttf_unchecked(horizon: f64, rate: f64) -> f64 {
    let x = horizon * rate;
    if x < 1.0 {
        exp_excess(x) / (rate * x.exp_m1())
    } else {
        // (e^x − x − 1)/(e^x − 1) = 1 − x/(e^x − 1); fine for large x too.
        (1.0 - x / x.exp_m1()) / rate
    }
}

/// `(1 − q_{t,Λ})/q_{t,Λ}`: expected failures before surviving `t`.
pub(crate) fn expected_failures(horizon: f64, rate: f64) -> f64 {
    (rate * horizon).exp_m1()
}

/// `expected_failures(t, Λ) · F_Λ(t)`, zero when `t` or `Λ` is zero.
pub(crate) fn expected_lost_time(horizon: f64, rate: f64) -> f64 {
    if horizon == 0.0 || rate == 0.0 {
        0.0
    } else {
        exp_excess(rate * horizon) / rate
    }
}

/// Expected wall time of a restart of length `r` that is retried whenever a
/// failure at rate `Λ_i` strikes it: `r + (1/q_{r,Λ_i} − 1)·F_{Λ_i}(r)`.
pub fn expected_restart_time(restart_cost: f64, rate: f64) -> f64 {
    if restart_cost == 0.0 {
        0.0
    } else {
        restart_cost + expected_lost_time(restart_cost, rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Composite Simpson rule, test oracle only.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let x = a + h * i as f64;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    fn mttf_by_quadrature(horizon: f64, rate: f64) -> f64 {
        let num = simpson(|t| t * rate * (-rate * t).exp(), 0.0, horizon, 200_000);
        let den = simpson(|t| rate * (-rate * t).exp(), 0.0, horizon, 200_000);
        num / den
    }

    #[test]
    fn survival_examples() {
        assert_eq!(survival_probability(0.0, 3.0).unwrap(), 1.0);
        assert_eq!(survival_probability(250.0, 0.0).unwrap(), 1.0);
        // alternating series for e^{-1}
        let mut term = 1.0;
        let mut series = 1.0;
        for k in 1..30 {
            term *= -1.0 / k as f64;
            series += term;
        }
        let q = survival_probability(1000.0, 0.001).unwrap();
        assert!((q - series).abs() < 1e-15);
        assert!((q - 0.367879).abs() < 1e-6);
        assert!(survival_probability(-1.0, 1.0).is_err());
        assert!(survival_probability(1.0, -1.0).is_err());
    }

    #[test]
    fn mttf_matches_quadrature() {
        let oracle = mttf_by_quadrature(1000.0, 0.001);
        let f = conditional_mttf(1000.0, 0.001).unwrap();
        assert!((f - oracle).abs() < 1e-9 * oracle);
        let e = std::f64::consts::E;
        assert!((f - (e - 2.0) / (0.001 * (e - 1.0))).abs() < 1e-10);
        assert!((f - 418.0233).abs() < 1e-4);

        for &(t, l) in &[(30.0, 1e-4), (500.0, 5e-3), (2.0, 0.3), (5000.0, 1e-3)] {
            let oracle = mttf_by_quadrature(t, l);
            assert!((conditional_mttf(t, l).unwrap() - oracle).abs() < 1e-9 * oracle, "{t} {l}");
        }
    }

    #[test]
    fn mttf_limits() {
        let small = conditional_mttf(1.0, 1e-6).unwrap();
        assert!((small - 0.5).abs() < 0.5e-6);
        let large = conditional_mttf(10_000.0, 0.01).unwrap();
        assert!((large - 100.0).abs() < 0.01);
        // F = T(1/2 − TΛ/12 + O((TΛ)³)), so the relative gap to T/2 is TΛ/6
        let f = conditional_mttf(1.0, 1e-3).unwrap();
        let gap = (0.5 - f) / 0.5;
        assert!((gap - 1e-3 / 6.0).abs() < 1e-9);
        let f = conditional_mttf(1.0, 5e-4).unwrap();
        assert!((f - 0.5).abs() / 0.5 < 1e-4);
        // huge TΛ does not overflow
        assert!((conditional_mttf(1e6, 1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!(conditional_mttf(0.0, 1.0).is_err());
        assert!(conditional_mttf(1.0, 0.0).is_err());
    }

    #[test]
    fn excess_is_continuous_at_cutoff() {
        for &x in &[1e-12f64, 1e-6, 0.1, 0.4999999, 0.5, 0.5000001, 2.0, -0.3] {
            let direct = x.exp() - 1.0 - x;
            let got = exp_excess(x);
            if x.abs() > 0.1 {
                assert!((got - direct).abs() < 1e-14, "{x}");
            }
            assert!((got - x * x / 2.0).abs() <= (x * x * x).abs(), "{x}");
        }
    }

    #[test]
    fn restart_time_closed_form() {
        assert_eq!(expected_restart_time(0.0, 1.0), 0.0);
        assert_eq!(expected_restart_time(30.0, 0.0), 30.0);
        let (r, l) = (30.0, 0.002);
        let direct = r + expected_failures(r, l) * conditional_mttf(r, l).unwrap();
        assert!((expected_restart_time(r, l) - direct).abs() < 1e-12);
        assert!((expected_restart_time(r, l) - (l * r).exp_m1() / l).abs() < 1e-12);
    }
}
