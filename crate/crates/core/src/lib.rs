//! Rare-event probability estimation by Subset Simulation.
//!
//! The crate estimates `p_F = P(g(X) > y*)` for a performance function `g`
//! of independent random inputs, where `p_F` may be far too small for direct
//! Monte Carlo. Modules, bottom-up:
//!
//! - [`randmath`]: standard-normal functions and reproducible random streams.
//! - [`model`]: performance functions, failure domains, standardization.
//! - [`dmc`]: the direct Monte Carlo baseline.
//! - [`mma`]: the Modified Metropolis transition kernel.
//! - [`subset`]: the Subset Simulation driver.
//! - [`experiments`]: replication, threshold sweeps and level traces.
//! - [`config`], [`runner`] and [`output`]: run configuration, command
//!   execution and result files.
//!
//! ```
//! use subsim::{linear_sum_model, run_subset_simulation, FailureSpec, RandomStream, SsConfig};
//!
//! let spec = FailureSpec::new(linear_sum_model(2).unwrap(), 6.0);
//! let est = run_subset_simulation(&spec, &SsConfig::default(), &mut RandomStream::new(0)).unwrap();
//! assert!(est.p_hat > 1e-6 && est.p_hat < 1e-4);
//! ```

pub mod config;
pub mod dmc;
pub mod error;
pub mod experiments;
pub mod mma;
pub mod model;
pub mod output;
pub mod randmath;
pub mod runner;
pub mod selftest;
pub mod subset;

pub use dmc::{dmc_estimate, dmc_required_samples, DmcEstimate};
pub use error::{Error, Result};
pub use mma::{adapt_spread, mma_step, run_chain, MmaStats, ProposalKind, ProposalSpec, Spread};
pub use model::{
    analytic_failure_probability, indicator, linear_sum_model, standardize,
    threshold_for_probability, FailureSpec, InputModel, MarginalSpec, PerformanceModel, Sample,
};
pub use randmath::{normal_cdf, normal_pdf, normal_quantile, normal_sf, RandomStream};
pub use subset::{
    expected_levels, run_subset_simulation, select_threshold, BoundaryKind, LevelRecord, SsConfig,
    SsEstimate,
};
