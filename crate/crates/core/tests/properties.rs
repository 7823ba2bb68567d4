//! Property tests of estimator-level invariants across random settings.

use proptest::prelude::*;

use subsim::dmc::dmc_cov;
use subsim::experiments::{
    replicate_dmc, replicate_ss, sweep_compare, DmcBudget, SampleStats, SweepSpec,
};
use subsim::randmath::{ks_critical_1pct, ks_statistic};
use subsim::*;

fn linear(d: usize, y: f64) -> FailureSpec {
    FailureSpec::new(linear_sum_model(d).unwrap(), y)
}

/// `(p, n)` pairs with integral `n·p` and `1/p`.
fn level_settings() -> impl Strategy<Value = (f64, usize)> {
    prop_oneof![
        (1usize..4).prop_map(|k| (0.1, 100 * k)),
        (1usize..4).prop_map(|k| (0.2, 50 * k)),
        (1usize..4).prop_map(|k| (0.5, 20 * k)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    })]

    #[test]
    fn subset_simulation_structure(
        (p, n) in level_settings(),
        d in 1usize..12,
        y in 0.0f64..6.0,
        seed in any::<u64>(),
    ) {
        let y_star = y * (d as f64).sqrt();
        let spec = linear(d, y_star);
        let config = SsConfig { retain_samples: true, ..SsConfig::default().with_level(p, n) };
        let est = match run_subset_simulation(&spec, &config, &mut RandomStream::new(seed)) {
            Ok(est) => est,
            // A tiny population can collapse onto one chain state sitting on
            // the previous threshold; nothing lies strictly above it.
            Err(Error::Stalled { level, value, partial }) => {
                prop_assert_eq!(partial.len(), level);
                let last = partial.last().unwrap();
                let samples = last.samples.as_ref().unwrap();
                prop_assert!(samples.iter().all(|s| s.response <= value));
                prop_assert!(last.threshold.is_none_or(|t| value > t));
                let ts: Vec<f64> = partial.iter().filter_map(|r| r.threshold).collect();
                prop_assert!(ts.windows(2).all(|w| w[0] < w[1]));
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let np = (n as f64 * p).round() as usize;
        let l = est.levels;

        // Tiny levels can repeat a chain state on the previous threshold,
        // which forces a strict-exceedance level.
        if est.tie_levels.is_empty() {
            prop_assert_eq!(est.total_samples, (n + l * (n - np)) as u64);
        }
        prop_assert_eq!(est.level_records.len(), l + 1);
        prop_assert_eq!(est.thresholds.len(), l);
        prop_assert!(est.thresholds.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(est.thresholds.iter().all(|&t| t < y_star));

        let nf = est.failure_counts();
        prop_assert!(nf.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(nf[..l].iter().all(|&c| c < np));
        prop_assert!(nf[l] >= np);
        if est.tie_levels.is_empty() {
            let expected = p.powi(l as i32) * (nf[l] as f64 / n as f64);
            prop_assert_eq!(est.p_hat, expected);
            prop_assert!(est.p_hat >= p.powi(l as i32 + 1) * (1.0 - 1e-12));
        }
        prop_assert!(est.p_hat <= p.powi(l as i32) * (1.0 + 1e-12));

        prop_assert!(est.total_evaluations <= est.total_samples);
        for rec in &est.level_records[1..] {
            let t = rec.threshold.unwrap();
            let samples = rec.samples.as_ref().unwrap();
            prop_assert_eq!(samples.len(), n);
            prop_assert!(samples.iter().all(|s| s.response > t));
            if rec.boundary != BoundaryKind::StrictExceedance {
                prop_assert_eq!(rec.conditional_probability, Some(p));
            }
        }
    }

    #[test]
    fn select_threshold_splits_distinct_responses(
        mut ys in prop::collection::hash_set(-1_000_000i64..1_000_000, 20..200)
            .prop_map(|s| s.into_iter().map(|v| v as f64 / 1000.0).collect::<Vec<_>>()),
    ) {
        ys.sort_by(|a, b| b.total_cmp(a));
        let n = ys.len();
        for p in [0.1, 0.2, 0.5] {
            let np = n as f64 * p;
            if (np - np.round()).abs() > 1e-9 || np.round() < 1.0 {
                continue;
            }
            let sel = select_threshold(&ys, p).unwrap();
            prop_assert!(!sel.tie);
            prop_assert_eq!(ys.iter().filter(|&&y| y > sel.threshold).count(), np.round() as usize);
        }
    }

    #[test]
    fn evaluations_counted_exactly(seed in any::<u64>(), d in 1usize..6) {
        let spec = linear(d, 2.0 * (d as f64).sqrt());
        let config = SsConfig::default().with_level(0.1, 200);
        let before = spec.model.evaluations();
        let est = match run_subset_simulation(&spec, &config, &mut RandomStream::new(seed)) {
            Ok(est) => est,
            // A tiny population can collapse onto one chain state sitting on
            // the previous threshold; nothing lies strictly above it.
            Err(Error::Stalled { level, value, partial }) => {
                prop_assert_eq!(partial.len(), level);
                let last = partial.last().unwrap();
                let samples = last.samples.as_ref().unwrap();
                prop_assert!(samples.iter().all(|s| s.response <= value));
                prop_assert!(last.threshold.is_none_or(|t| value > t));
                let ts: Vec<f64> = partial.iter().filter_map(|r| r.threshold).collect();
                prop_assert!(ts.windows(2).all(|w| w[0] < w[1]));
                return Ok(());
            }
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        prop_assert_eq!(spec.model.evaluations() - before, est.total_evaluations);
    }
}

#[test]
fn dmc_unbiased_with_theoretical_spread() {
    for (d, q, n) in [(1usize, 0.9, 1000u64), (4, 0.99, 5000), (16, 0.5, 200)] {
        let y = (d as f64).sqrt() * normal_quantile(q).unwrap();
        let p = 1.0 - q;
        let runs = replicate_dmc(&linear(d, y), n, 300, 3).unwrap();
        let s = SampleStats::from_values(&runs).unwrap();
        assert!((s.mean - p).abs() <= 3.5 * s.standard_error(), "d={d}: {} vs {p}", s.mean);
        let theory = dmc_cov(p, n);
        let cov = s.cov.unwrap();
        assert!((cov - theory).abs() <= 0.2 * theory, "d={d}: {cov} vs {theory}");
    }
}

#[test]
fn mma_two_dimensional_stationarity() {
    // Target: standard normal in 2-D conditioned on x1 + x2 > 2. The
    // response x1 + x2 is then N(0, 2) truncated below at 2.
    let spec = linear(2, 2.0);
    let seed = spec.sample_at(vec![1.5, 1.5]);
    let mut stream = RandomStream::new(11);
    let mut stats = MmaStats::default();
    let chain = run_chain(seed, 1000 + 40 * 20_000, &spec, 2.0, &ProposalSpec::default(), &mut stream, &mut stats)
        .unwrap();
    let mut ys: Vec<f64> = chain[1000..].iter().step_by(40).map(|s| s.response).collect();
    let s2 = std::f64::consts::SQRT_2;
    let tail = normal_sf(2.0 / s2);
    let d = ks_statistic(&mut ys, |y| {
        if y <= 2.0 {
            0.0
        } else {
            (tail - normal_sf(y / s2)) / tail
        }
    });
    assert!(d < ks_critical_1pct(ys.len()), "KS D = {d}");
}

#[test]
fn replicate_summary_tracks_truth() {
    // Mean within three standard errors of the truth with R = 100.
    let spec = linear(5, 8.0);
    let truth = analytic_failure_probability(5, 8.0).unwrap();
    let batch = replicate_ss(&spec, &SsConfig::default().with_level(0.1, 500), 100, 42).unwrap();
    let s = batch.summary.p_hat.unwrap();
    assert_eq!(batch.summary.exclusions, 0);
    assert!((s.mean - truth).abs() <= 3.0 * s.standard_error(), "{} vs {truth}", s.mean);
}

#[test]
fn sweep_rows_follow_theory() {
    let sweep = SweepSpec {
        dim: 10,
        thresholds: vec![0.0, 2.0, 4.0, 8.0, 12.0],
        replicates: 100,
        ss: SsConfig::default().with_level(0.1, 500),
        dmc_budget: DmcBudget::MatchSs,
    };
    let rows = sweep_compare(&sweep, 1).unwrap();
    for r in &rows {
        let ss = r.ss.p_hat.unwrap();
        assert!(
            (ss.mean - r.p_true).abs() <= 3.0 * ss.standard_error(),
            "y*={}: ss {} vs {}",
            r.y_star,
            ss.mean,
            r.p_true
        );
        if r.p_true * r.dmc_samples as f64 >= 50.0 {
            let cov = r.dmc.unwrap().cov.unwrap();
            assert!(
                (cov - r.dmc_cov_theory).abs() <= 0.3 * r.dmc_cov_theory,
                "y*={}: dmc c.o.v. {cov} vs {}",
                r.y_star,
                r.dmc_cov_theory
            );
        }
        let levels = r.ss.levels.unwrap().mean;
        let planned = expected_levels(r.p_true.min(0.999), 0.1).unwrap() as f64;
        assert!((levels - planned).abs() <= 1.0, "y*={}: {levels} vs {planned}", r.y_star);
    }
    // Staircase: the mean budget grows as the probability shrinks.
    let budgets: Vec<f64> = rows.iter().map(|r| r.ss.total_samples.unwrap().mean).collect();
    assert!(budgets.windows(2).all(|w| w[0] <= w[1]), "{budgets:?}");
    assert_eq!(rows[0].p_true, 0.5);
}
