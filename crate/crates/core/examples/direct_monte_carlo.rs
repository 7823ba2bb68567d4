//! Direct Monte Carlo on a moderately rare event, with the theoretical
//! coefficient of variation next to the observed one.
//!
//! `cargo run --example direct_monte_carlo`

use subsim::dmc::dmc_cov;
use subsim::experiments::{replicate_dmc, SampleStats};
use subsim::{analytic_failure_probability, dmc_estimate, linear_sum_model, FailureSpec, RandomStream};

pub fn run_example() -> subsim::Result<(f64, SampleStats)> {
    let d = 10;
    let y_star = 7.0;
    let spec = FailureSpec::new(linear_sum_model(d)?, y_star);
    let p_true = analytic_failure_probability(d, y_star)?;

    let single = dmc_estimate(&spec, 100_000, &mut RandomStream::new(0))?;
    println!(
        "one run: p_hat = {:.4e} ({} failures), truth {p_true:.4e}",
        single.p_hat, single.n_failures
    );

    let runs = replicate_dmc(&spec, 20_000, 50, 0)?;
    let stats = SampleStats::from_values(&runs).expect("non-empty");
    println!(
        "50 runs of 20000: mean {:.4e}, c.o.v. {:.3} (theory {:.3})",
        stats.mean,
        stats.cov.unwrap_or(f64::NAN),
        dmc_cov(p_true, 20_000)
    );
    Ok((p_true, stats))
}

fn main() -> subsim::Result<()> {
    run_example().map(|_| ())
}
