//! Subset Simulation against direct Monte Carlo at a matched budget over a
//! grid of thresholds, written to `sweep.csv` in a temporary directory.
//!
//! `cargo run --release --example threshold_sweep`

use subsim::experiments::{sweep_compare, DmcBudget, SweepRow, SweepSpec};
use subsim::output::write_sweep_csv;
use subsim::SsConfig;

pub fn run_example() -> subsim::Result<Vec<SweepRow>> {
    let sweep = SweepSpec {
        dim: 50,
        thresholds: SweepSpec::evenly_spaced(0.0, 35.0, 8),
        replicates: 10,
        ss: SsConfig::default().with_level(0.1, 500),
        dmc_budget: DmcBudget::MatchSs,
    };
    let rows = sweep_compare(&sweep, 0)?;
    println!("    y*      truth    SS mean   DMC mean   DMC N");
    for r in &rows {
        println!(
            "{:>6.1} {:>10.3e} {:>10.3e} {:>10.3e} {:>7}",
            r.y_star,
            r.p_true,
            r.ss_mean().unwrap_or(f64::NAN),
            r.dmc_mean().unwrap_or(f64::NAN),
            r.dmc_samples
        );
    }
    let path = std::env::temp_dir().join("subsim_threshold_sweep.csv");
    write_sweep_csv(&path, &rows)?;
    println!("wrote {}", path.display());
    Ok(rows)
}

fn main() -> subsim::Result<()> {
    run_example().map(|_| ())
}
