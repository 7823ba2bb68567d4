//! Executes a resolved [`RunConfig`] and collects what the output layer
//! writes.

use serde::Serialize;

use crate::config::{Command, Method, RunConfig};
use crate::dmc::dmc_cov;
use crate::error::{Error, Result};
use crate::experiments::{
    level_trace, replicate_dmc_on, replicate_ss, sweep_compare, LevelTrace, RunPoint, RunSummary,
    SampleStats, SsBatch, SweepRow,
};
use crate::model::{analytic_failure_probability, linear_sum_model, FailureSpec};
use crate::randmath::RandomStream;
use crate::selftest::{run_selftest, SelftestReport};
use crate::subset::{run_subset_simulation, SsConfig, SsEstimate};

/// Substream of the master seed used by direct Monte Carlo in `estimate`.
/// Subset Simulation replicates use labels `0..R`.
pub const DMC_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsOutcome {
    pub summary: RunSummary,
    pub points: Vec<RunPoint>,
    /// First replicate that finished; its levels go to the per-level files.
    #[serde(skip)]
    pub first: Option<SsEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DmcOutcome {
    pub n_samples: u64,
    pub estimates: Vec<f64>,
    pub stats: Option<SampleStats>,
    /// c.o.v. of the direct estimator at the true probability.
    pub cov_theory: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateOutput {
    pub y_star: f64,
    pub p_true: f64,
    pub ss: Option<SsOutcome>,
    pub dmc: Option<DmcOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceOutput {
    pub y_star: f64,
    pub p_true: f64,
    pub trace: LevelTrace,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Estimate(EstimateOutput),
    Sweep(Vec<SweepRow>),
    Trace(TraceOutput),
    Selftest(SelftestReport),
}

fn failure_spec(cfg: &RunConfig) -> Result<(FailureSpec, f64, f64)> {
    let model = cfg
        .model
        .as_ref()
        .ok_or_else(|| Error::config("model", "missing [model] table"))?;
    let y_star = cfg
        .y_star
        .ok_or_else(|| Error::config("y_star", "missing"))?;
    let spec = FailureSpec::new(linear_sum_model(model.dim)?, y_star);
    let p_true = analytic_failure_probability(model.dim, y_star)?;
    Ok((spec, y_star, p_true))
}

/// Runs the configured command.
///
/// A single-replicate `estimate` whose run fails returns that error; with
/// more replicates failures are counted as exclusions instead.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput> {
    match cfg.command {
        Command::Estimate => estimate(cfg).map(RunOutput::Estimate),
        Command::Sweep => {
            let sweep = cfg
                .sweep
                .as_ref()
                .ok_or_else(|| Error::config("sweep", "missing sweep settings"))?;
            sweep_compare(sweep, cfg.seed).map(RunOutput::Sweep)
        }
        Command::Trace => {
            let (spec, y_star, p_true) = failure_spec(cfg)?;
            let trace = level_trace(&spec, &cfg.ss, cfg.seed)?;
            Ok(RunOutput::Trace(TraceOutput {
                y_star,
                p_true,
                trace,
            }))
        }
        Command::Selftest => Ok(RunOutput::Selftest(run_selftest(cfg.quick))),
    }
}

fn estimate(cfg: &RunConfig) -> Result<EstimateOutput> {
    let (spec, y_star, p_true) = failure_spec(cfg)?;
    let ss = match cfg.method {
        Method::Ss | Method::Both => {
            let SsBatch {
                runs,
                points,
                summary,
            } = replicate_ss(&spec, &cfg.ss, cfg.replicates, cfg.seed)?;
            let mut first = None;
            for (r, run) in runs.into_iter().enumerate() {
                match run {
                    Err(e) if cfg.replicates == 1 => return Err(e),
                    Ok(est) if first.is_none() => first = Some((r, est)),
                    _ => {}
                }
            }
            let first = match first {
                Some((r, _)) if spec.dim() == 2 => Some(rerun_with_samples(&spec, cfg, r)?),
                other => other.map(|(_, est)| est),
            };
            Some(SsOutcome {
                summary,
                points,
                first,
            })
        }
        Method::Dmc => None,
    };
    let dmc = match cfg.method {
        Method::Dmc | Method::Both => {
            let n_samples = match (cfg.dmc_samples, &ss) {
                (Some(n), _) => n,
                (None, Some(o)) => o
                    .summary
                    .total_samples
                    .map(|s| s.mean.ceil() as u64)
                    .unwrap_or(cfg.ss.samples_per_level as u64),
                (None, None) => {
                    return Err(Error::config("dmc_samples", "required when method = \"dmc\""))
                }
            };
            let root = RandomStream::new(cfg.seed).substream(DMC_STREAM);
            let estimates = replicate_dmc_on(&spec, n_samples, cfg.replicates, &root)?;
            Some(DmcOutcome {
                n_samples,
                stats: SampleStats::from_values(&estimates),
                estimates,
                cov_theory: dmc_cov(p_true, n_samples),
            })
        }
        Method::Ss => None,
    };
    Ok(EstimateOutput {
        y_star,
        p_true,
        ss,
        dmc,
    })
}

/// Replicate `r` again with its sample points kept.
fn rerun_with_samples(spec: &FailureSpec, cfg: &RunConfig, r: usize) -> Result<SsEstimate> {
    let config = SsConfig {
        retain_samples: true,
        ..cfg.ss.clone()
    };
    let mut stream = RandomStream::new(cfg.seed).substream(r as u64);
    run_subset_simulation(spec, &config, &mut stream)
}
