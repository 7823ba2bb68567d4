//! Direct Monte Carlo: the plain failure-fraction estimator and its exact
//! variance theory.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::FailureSpec;
use crate::randmath::RandomStream;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DmcEstimate {
    pub p_hat: f64,
    pub n_samples: u64,
    pub n_failures: u64,
    /// `√((1-p̂)/(N p̂))`; `None` when no failures were observed.
    pub theoretical_cov: Option<f64>,
    pub evaluations_used: u64,
}

/// Coefficient of variation of the direct estimator with `n` samples when the
/// true probability is `p`.
pub fn dmc_cov(p: f64, n: u64) -> f64 {
    ((1.0 - p) / (n as f64 * p)).sqrt()
}

/// Draws `n_samples` i.i.d. inputs from `stream`, evaluating `g` once each.
/// Points are not retained.
pub fn dmc_estimate(
    spec: &FailureSpec,
    n_samples: u64,
    stream: &mut RandomStream,
) -> Result<DmcEstimate> {
    if n_samples == 0 {
        return Err(Error::domain("direct Monte Carlo needs at least one sample"));
    }
    let mut x = vec![0.0; spec.dim()];
    let mut n_failures = 0u64;
    for _ in 0..n_samples {
        spec.inputs.draw_into(stream, &mut x);
        if spec.model.evaluate(&x) > spec.critical_threshold {
            n_failures += 1;
        }
    }
    let p_hat = n_failures as f64 / n_samples as f64;
    Ok(DmcEstimate {
        p_hat,
        n_samples,
        n_failures,
        theoretical_cov: (n_failures > 0).then(|| dmc_cov(p_hat, n_samples)),
        evaluations_used: n_samples,
    })
}

/// Smallest `N` whose direct-estimator c.o.v. at `p_f` is at most
/// `target_cov`.
pub fn dmc_required_samples(p_f: f64, target_cov: f64) -> Result<u64> {
    if !(p_f > 0.0 && p_f < 1.0) {
        return Err(Error::domain(format!("p_f must lie in (0, 1), got {p_f}")));
    }
    if !(target_cov > 0.0 && target_cov.is_finite()) {
        return Err(Error::domain(format!(
            "target c.o.v. must be positive, got {target_cov}"
        )));
    }
    let est = ((1.0 - p_f) / (p_f * target_cov * target_cov)).ceil();
    if est >= u64::MAX as f64 {
        return Err(Error::domain("required sample count overflows u64"));
    }
    let ok = |n: u64| n > 0 && dmc_cov(p_f, n) <= target_cov;
    // Float rounding in `est` can be off by one either way.
    let mut n = (est as u64).max(1);
    while !ok(n) {
        n += 1;
    }
    while n > 1 && ok(n - 1) {
        n -= 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::linear_sum_model;

    fn spec(d: usize, y: f64) -> FailureSpec {
        FailureSpec::new(linear_sum_model(d).unwrap(), y)
    }

    #[test]
    fn certain_event() {
        let mut s = RandomStream::new(0);
        let e = dmc_estimate(&spec(2, -100.0), 500, &mut s).unwrap();
        assert_eq!(e.p_hat, 1.0);
        assert_eq!(e.theoretical_cov, Some(0.0));
    }

    #[test]
    fn symmetric_half() {
        let mut s = RandomStream::new(11);
        let e = dmc_estimate(&spec(1, 0.0), 100_000, &mut s).unwrap();
        // 3σ binomial bound: 3 * sqrt(0.25 / 1e5) ≈ 0.0047
        assert!((e.p_hat - 0.5).abs() < 0.005, "{}", e.p_hat);
        assert_eq!(e.evaluations_used, 100_000);
        assert_eq!(e.p_hat, e.n_failures as f64 / e.n_samples as f64);
    }

    #[test]
    fn rare_event_is_effectively_zero() {
        let sp = spec(2, 9.0);
        let mut s = RandomStream::new(3);
        let e = dmc_estimate(&sp, 10_000, &mut s).unwrap();
        assert_eq!(e.n_failures, 0);
        assert_eq!(e.p_hat, 0.0);
        assert_eq!(e.theoretical_cov, None);
        assert_eq!(sp.model.evaluations(), 10_000);
    }

    #[test]
    fn zero_samples_rejected() {
        let mut s = RandomStream::new(0);
        assert!(dmc_estimate(&spec(1, 0.0), 0, &mut s).is_err());
    }

    #[test]
    fn required_samples_examples() {
        let n = dmc_required_samples(1e-4, 0.1).unwrap();
        assert_eq!(n, 999_900);
        assert!((n as f64 / 1e6 - 1.0).abs() < 1e-3);
        assert_eq!(dmc_required_samples(0.5, 1.0).unwrap(), 1);
        // (1 - 1e-10) / (1e-10 * 0.74²) = 18_261_504_746.165...
        assert_eq!(dmc_required_samples(1e-10, 0.74).unwrap(), 18_261_504_747);
        assert!(dmc_required_samples(0.0, 0.1).is_err());
        assert!(dmc_required_samples(0.1, 0.0).is_err());
        assert!(dmc_required_samples(1.0, 0.1).is_err());
    }
}
