//! Fast invariant checks behind `subsim selftest`.

use serde::Serialize;

use crate::dmc::{dmc_cov, dmc_estimate};
use crate::experiments::{replicate_dmc, SampleStats};
use crate::mma::{mma_step, MmaStats, ProposalSpec};
use crate::model::{analytic_failure_probability, linear_sum_model, FailureSpec};
use crate::randmath::{normal_cdf, normal_quantile, RandomStream};
use crate::subset::{run_subset_simulation, SsConfig, SsEstimate};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

fn linear(d: usize, y: f64) -> FailureSpec {
    FailureSpec::new(linear_sum_model(d).expect("positive dimension"), y)
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Runs every check. `quick` shrinks replicate counts.
pub fn run_selftest(quick: bool) -> SelftestReport {
    let mut checks = Vec::new();

    let p2 = analytic_failure_probability(2, 9.0).unwrap_or(f64::NAN);
    let p1000 = analytic_failure_probability(1000, 200.0).unwrap_or(f64::NAN);
    checks.push(check(
        "analytic_oracle",
        rel(p2, 1e-10) <= 0.05 && rel(p1000, 1.27e-10) <= 0.01,
        format!("p(2, 9) = {p2:.6e}, p(1000, 200) = {p1000:.6e}"),
    ));

    let worst = [1e-12, 1e-6, 0.1, 0.5, 0.9, 1.0 - 1e-9]
        .iter()
        .map(|&q| rel(normal_cdf(normal_quantile(q).unwrap_or(f64::NAN)), q))
        .fold(0.0, f64::max);
    checks.push(check(
        "quantile_roundtrip",
        worst < 1e-9,
        format!("worst relative error {worst:.2e}"),
    ));

    let replicates = if quick { 50 } else { 200 };
    let y90 = normal_quantile(0.9).unwrap_or(f64::NAN);
    let dmc = replicate_dmc(&linear(1, y90), 1000, replicates, 0)
        .ok()
        .and_then(|v| SampleStats::from_values(&v));
    let (ok, detail) = match dmc {
        Some(s) => (
            (s.mean - 0.1).abs() <= 3.0 * s.standard_error()
                && s.cov.is_some_and(|c| rel(c, dmc_cov(0.1, 1000)) <= 0.3),
            format!("mean {:.5}, c.o.v. {:?} over {replicates} runs", s.mean, s.cov),
        ),
        None => (false, "direct Monte Carlo failed".into()),
    };
    checks.push(check("dmc_unbiased", ok, detail));

    let sp = linear(3, -1.0);
    let start = sp.sample_at(vec![0.0; 3]);
    let calls_before = sp.model.evaluations();
    let mut stream = RandomStream::new(5);
    let mut stats = MmaStats::default();
    let mut identity = true;
    for _ in 0..50 {
        let before = stats;
        match mma_step(&start, &sp, -1.0, &ProposalSpec::gaussian(1e6), &mut stream, &mut stats) {
            Ok(next) if stats.coordinate_acceptances == before.coordinate_acceptances => {
                identity &= next == start && stats.evaluations == before.evaluations;
            }
            Ok(_) => {}
            Err(_) => identity = false,
        }
    }
    checks.push(check(
        "rejected_candidate_identity",
        identity && sp.model.evaluations() - calls_before == stats.evaluations,
        format!("{} evaluations in 50 steps", stats.evaluations),
    ));

    let spec = linear(1, 0.0);
    let ss = run_subset_simulation(&spec, &SsConfig::default(), &mut RandomStream::new(1));
    let direct = dmc_estimate(&spec, 1000, &mut RandomStream::new(1));
    let (ok, detail) = match (ss, direct) {
        (Ok(s), Ok(d)) => (
            s.levels == 0 && s.p_hat == d.p_hat,
            format!("levels {}, p_hat {} vs {}", s.levels, s.p_hat, d.p_hat),
        ),
        (Err(e), _) | (_, Err(e)) => (false, e.to_string()),
    };
    checks.push(check("level_zero_reduction", ok, detail));

    let (y, runs) = if quick { (6.0, 2) } else { (9.0, 5) };
    let spec = linear(2, y);
    let config = SsConfig {
        retain_samples: true,
        ..SsConfig::default()
    };
    let results: Vec<_> = (0..runs)
        .map(|r| run_subset_simulation(&spec, &config, &mut RandomStream::new(0).substream(r)))
        .collect();
    let problems: Vec<String> = results
        .iter()
        .enumerate()
        .filter_map(|(r, res)| match res {
            Ok(est) => structural_problem(est, y).map(|p| format!("run {r}: {p}")),
            Err(e) => Some(format!("run {r}: {e}")),
        })
        .collect();
    checks.push(check(
        "ss_structure",
        problems.is_empty(),
        if problems.is_empty() {
            format!("{runs} runs at y* = {y}")
        } else {
            problems.join("; ")
        },
    ));

    let again = run_subset_simulation(&spec, &config, &mut RandomStream::new(0).substream(0));
    let identical = match (&results[0], &again) {
        (Ok(a), Ok(b)) => a == b && a.p_hat.to_bits() == b.p_hat.to_bits(),
        _ => false,
    };
    checks.push(check(
        "reproducible",
        identical,
        "rerun with the same stream".into(),
    ));

    SelftestReport { checks }
}

/// First violated structural property of a finished run, if any.
pub fn structural_problem(est: &SsEstimate, y_star: f64) -> Option<String> {
    let n = est.samples_per_level as u64;
    let np = (est.samples_per_level as f64 * est.level_probability).round() as u64;
    if est.tie_levels.is_empty() && est.total_samples != n + est.levels as u64 * (n - np) {
        return Some(format!("total samples {} off budget", est.total_samples));
    }
    if !est.thresholds.windows(2).all(|w| w[0] < w[1]) {
        return Some("thresholds not strictly increasing".into());
    }
    if est.thresholds.iter().any(|&t| t >= y_star) {
        return Some("intermediate threshold at or above y*".into());
    }
    let nf = est.failure_counts();
    if !nf.windows(2).all(|w| w[0] <= w[1]) {
        return Some(format!("failure counts decrease: {nf:?}"));
    }
    if (*nf.last()? as u64) < np {
        return Some("stopped before the stopping band".into());
    }
    for rec in est.level_records.iter().skip(1) {
        let t = rec.threshold?;
        if let Some(samples) = &rec.samples {
            if samples.iter().any(|s| s.response <= t) {
                return Some(format!("level {} sample outside its domain", rec.level));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_selftest_passes() {
        let report = run_selftest(true);
        for c in &report.checks {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
        assert_eq!(report.checks.len(), 7);
    }
}
