//! One run in 1000 dimensions at y* = 200. Direct Monte Carlo would need
//! around 10^10 samples for a usable estimate; Subset Simulation uses about
//! 3·10^4.
//!
//! `cargo run --release --example high_dimensional`

use subsim::{
    analytic_failure_probability, dmc_required_samples, linear_sum_model, run_subset_simulation,
    FailureSpec, RandomStream, SsConfig, SsEstimate,
};

pub fn run_example() -> subsim::Result<SsEstimate> {
    let (d, y_star) = (1000, 200.0);
    let spec = FailureSpec::new(linear_sum_model(d)?, y_star);
    let config = SsConfig::default().with_level(0.1, 3000);
    let est = run_subset_simulation(&spec, &config, &mut RandomStream::new(0))?;
    let truth = analytic_failure_probability(d, y_star)?;

    println!("n_F by level: {:?}", est.failure_counts());
    println!(
        "p_hat = {:.3e}, truth {truth:.3e}, {} levels, {} samples",
        est.p_hat, est.levels, est.total_samples
    );
    println!(
        "direct Monte Carlo at c.o.v. 0.74 would need {} samples",
        dmc_required_samples(truth, 0.74)?
    );
    Ok(est)
}

fn main() -> subsim::Result<()> {
    run_example().map(|_| ())
}
