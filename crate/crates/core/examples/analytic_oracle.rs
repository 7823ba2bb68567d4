//! Closed-form failure probability of the linear-sum model, the threshold
//! that yields a target probability, and the direct Monte Carlo sample size
//! needed to reach a given accuracy.
//!
//! `cargo run --example analytic_oracle`

use subsim::{analytic_failure_probability, dmc_required_samples, threshold_for_probability};

pub struct OracleReport {
    pub p_2d: f64,
    pub p_1000d: f64,
    pub y_for_1e10: f64,
    pub dmc_samples: u64,
}

pub fn run_example() -> subsim::Result<OracleReport> {
    let p_2d = analytic_failure_probability(2, 9.0)?;
    let p_1000d = analytic_failure_probability(1000, 200.0)?;
    let y_for_1e10 = threshold_for_probability(2, 1e-10)?;
    let dmc_samples = dmc_required_samples(p_1000d, 0.74)?;
    println!("P(x1 + x2 > 9)          = {p_2d:.4e}");
    println!("P(sum of 1000 > 200)    = {p_1000d:.4e}");
    println!("y* giving 1e-10 at d=2  = {y_for_1e10:.6}");
    println!("DMC samples for c.o.v. 0.74 at that probability: {dmc_samples}");
    Ok(OracleReport {
        p_2d,
        p_1000d,
        y_for_1e10,
        dmc_samples,
    })
}

fn main() -> subsim::Result<()> {
    run_example().map(|_| ())
}
