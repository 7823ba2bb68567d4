//! Every example under `examples/` runs and produces sensible numbers.

#[allow(dead_code)]
#[path = "../examples/analytic_oracle.rs"]
mod analytic_oracle;
#[allow(dead_code)]
#[path = "../examples/direct_monte_carlo.rs"]
mod direct_monte_carlo;
#[allow(dead_code)]
#[path = "../examples/mma_chain.rs"]
mod mma_chain;
#[allow(dead_code)]
#[path = "../examples/subset_2d.rs"]
mod subset_2d;
#[allow(dead_code)]
#[path = "../examples/high_dimensional.rs"]
mod high_dimensional;
#[allow(dead_code)]
#[path = "../examples/threshold_sweep.rs"]
mod threshold_sweep;
#[allow(dead_code)]
#[path = "../examples/custom_model.rs"]
mod custom_model;
#[allow(dead_code)]
#[path = "../examples/config_run.rs"]
mod config_run;

#[test]
fn analytic_oracle_values() {
    let r = analytic_oracle::run_example().unwrap();
    assert!((r.p_2d - 9.830_802_207_714_437e-11).abs() < 1e-21);
    assert!((r.p_1000d - 1.269_814_294_735_432_5e-10).abs() < 1e-20);
    assert!((r.y_for_1e10 - 8.996_294_579_058_519).abs() < 1e-9);
    assert!(r.dmc_samples > 10_000_000_000);
}

#[test]
fn direct_monte_carlo_tracks_truth() {
    let (p, stats) = direct_monte_carlo::run_example().unwrap();
    assert!((stats.mean - p).abs() < 4.0 * stats.standard_error());
}

#[test]
fn mma_chain_mean() {
    let (mean, exact, stats) = mma_chain::run_example().unwrap();
    assert!((mean - exact).abs() < 0.02);
    assert!(stats.evaluations < stats.chain_steps);
}

#[test]
fn subset_2d_budget() {
    let est = subset_2d::run_example().unwrap();
    assert_eq!(est.total_samples, 1000 + 900 * est.levels as u64);
    assert!(est.p_hat > 1e-12 && est.p_hat < 1e-8);
}

#[test]
fn high_dimensional_run() {
    let est = high_dimensional::run_example().unwrap();
    assert!(est.levels >= 8 && est.levels <= 11);
    assert!(est.p_hat > 1.27e-12 && est.p_hat < 1.27e-8);
}

#[test]
fn threshold_sweep_rows() {
    let rows = threshold_sweep::run_example().unwrap();
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[0].p_true, 0.5);
    for r in &rows {
        let m = r.ss_mean().unwrap();
        assert!(m > r.p_true / 3.0 && m < r.p_true * 3.0, "{} vs {}", m, r.p_true);
    }
}

#[test]
fn custom_model_probabilities() {
    let (cantilever, logistic) = custom_model::run_example().unwrap();
    // First-order reliability estimate for the cantilever: Φ(-5) ≈ 2.9e-7.
    assert!(cantilever > 1e-8 && cantilever < 1e-5, "{cantilever}");
    assert!(logistic > 1e-6 && logistic < 1e-3, "{logistic}");
}

#[test]
fn config_run_writes_files() {
    let files = config_run::run_example().unwrap();
    let names: Vec<String> = files
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    for expected in ["summary.json", "runs.csv", "levels.csv", "responses.csv", "manifest.json"] {
        assert!(names.iter().any(|n| n == expected), "{expected} missing from {names:?}");
    }
}
