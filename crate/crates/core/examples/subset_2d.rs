//! Subset Simulation on `x1 + x2 > 9` with standard normal inputs, where
//! the failure probability is about 1e-10. Prints the level ladder.
//!
//! `cargo run --example subset_2d`

use subsim::{
    analytic_failure_probability, linear_sum_model, run_subset_simulation, FailureSpec,
    RandomStream, SsConfig, SsEstimate,
};

pub fn run_example() -> subsim::Result<SsEstimate> {
    let spec = FailureSpec::new(linear_sum_model(2)?, 9.0);
    let est = run_subset_simulation(&spec, &SsConfig::default(), &mut RandomStream::new(0))?;

    println!("level  threshold   n_F  acceptance");
    for r in &est.level_records {
        println!(
            "{:>5}  {:>9}  {:>4}  {}",
            r.level,
            r.threshold.map_or("-".into(), |t| format!("{t:.4}")),
            r.n_failures,
            r.acceptance_stats
                .and_then(|s| s.acceptance_rate())
                .map_or("-".into(), |a| format!("{a:.3}")),
        );
    }
    println!(
        "p_hat = {:.3e} (truth {:.3e}) from {} samples",
        est.p_hat,
        analytic_failure_probability(2, 9.0)?,
        est.total_samples
    );
    Ok(est)
}

fn main() -> subsim::Result<()> {
    run_example().map(|_| ())
}
