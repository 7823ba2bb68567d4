//! A Modified Metropolis chain restricted to `x > 1` in one dimension. Its
//! states follow the standard normal conditioned on the region, whose mean
//! is φ(1) / (1 - Φ(1)).
//!
//! `cargo run --example mma_chain`

use subsim::{linear_sum_model, normal_pdf, normal_sf, run_chain, FailureSpec, MmaStats};
use subsim::{ProposalSpec, RandomStream};

pub fn run_example() -> subsim::Result<(f64, f64, MmaStats)> {
    let spec = FailureSpec::new(linear_sum_model(1)?, 1.0);
    let seed = spec.sample_at(vec![1.5]);
    let mut stream = RandomStream::new(0);
    let mut stats = MmaStats::default();
    let chain = run_chain(seed, 200_000, &spec, 1.0, &ProposalSpec::gaussian(1.0), &mut stream, &mut stats)?;

    let kept = &chain[1000..];
    let mean = kept.iter().map(|s| s.point[0]).sum::<f64>() / kept.len() as f64;
    let exact = normal_pdf(1.0) / normal_sf(1.0);
    println!("chain mean {mean:.4}, exact {exact:.4}");
    println!(
        "acceptance rate {:.3}, {} evaluations for {} steps",
        stats.acceptance_rate().unwrap_or(0.0),
        stats.evaluations,
        stats.chain_steps
    );
    Ok((mean, exact, stats))
}

fn main() -> subsim::Result<()> {
    run_example().map(|_| ())
}
