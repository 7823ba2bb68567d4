//! Replication harness: repeated independent runs, threshold sweeps that
//! compare Subset Simulation against direct Monte Carlo at a matched budget,
//! and single-run level traces.
//!
//! Every replicate draws from a substream of the master seed keyed by its
//! position, so results are independent of scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dmc::{dmc_cov, dmc_estimate};
use crate::error::{Error, Result};
use crate::model::{analytic_failure_probability, linear_sum_model, FailureSpec};
use crate::randmath::RandomStream;
use crate::subset::{run_subset_simulation, SsConfig, SsEstimate};

/// Substream tags under a sweep grid point.
const SS_TAG: u64 = 0;
const DMC_TAG: u64 = 1;

/// Mean, sample standard deviation and coefficient of variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleStats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for one value.
    pub std: f64,
    /// `std / mean`; `None` when the mean is 0.
    pub cov: Option<f64>,
}

impl SampleStats {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        let count = values.len();
        if count == 0 {
            return None;
        }
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        Some(Self {
            count,
            mean,
            std,
            cov: (mean != 0.0).then(|| std / mean.abs()),
        })
    }

    /// `std / √count`.
    pub fn standard_error(&self) -> f64 {
        self.std / (self.count as f64).sqrt()
    }
}

/// Per-run scalars kept for per-run tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunPoint {
    pub replicate: usize,
    pub p_hat: Option<f64>,
    pub levels: Option<usize>,
    pub total_samples: Option<u64>,
    pub total_evaluations: Option<u64>,
    /// `"ok"` or the error that excluded the run.
    pub status: String,
}

impl RunPoint {
    fn from_result(replicate: usize, result: &Result<SsEstimate>) -> Self {
        match result {
            Ok(e) => Self {
                replicate,
                p_hat: Some(e.p_hat),
                levels: Some(e.levels),
                total_samples: Some(e.total_samples),
                total_evaluations: Some(e.total_evaluations),
                status: "ok".into(),
            },
            Err(err) => Self {
                replicate,
                p_hat: None,
                levels: None,
                total_samples: None,
                total_evaluations: None,
                status: err.to_string(),
            },
        }
    }
}

/// Summary of a batch of Subset Simulation replicates.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub replicates: usize,
    /// Runs that failed (e.g. level budget exceeded) and were left out of
    /// the statistics.
    pub exclusions: usize,
    pub p_hat: Option<SampleStats>,
    pub total_samples: Option<SampleStats>,
    pub levels: Option<SampleStats>,
}

impl RunSummary {
    pub fn from_points(points: &[RunPoint]) -> Self {
        let ok: Vec<&RunPoint> = points.iter().filter(|p| p.p_hat.is_some()).collect();
        let collect = |f: &dyn Fn(&RunPoint) -> f64| {
            SampleStats::from_values(&ok.iter().map(|p| f(p)).collect::<Vec<_>>())
        };
        Self {
            replicates: points.len(),
            exclusions: points.len() - ok.len(),
            p_hat: collect(&|p| p.p_hat.unwrap_or_default()),
            total_samples: collect(&|p| p.total_samples.unwrap_or_default() as f64),
            levels: collect(&|p| p.levels.unwrap_or_default() as f64),
        }
    }
}

/// Outcome of [`replicate_ss`].
#[derive(Debug)]
pub struct SsBatch {
    pub runs: Vec<Result<SsEstimate>>,
    pub points: Vec<RunPoint>,
    pub summary: RunSummary,
}

impl SsBatch {
    pub fn estimates(&self) -> impl Iterator<Item = &SsEstimate> {
        self.runs.iter().filter_map(|r| r.as_ref().ok())
    }
}

/// `R` independent Subset Simulation runs; replicate `r` uses
/// `RandomStream::new(master_seed).substream(r)`. Failed runs are kept in
/// the batch and excluded from the summary.
pub fn replicate_ss(
    spec: &FailureSpec,
    config: &SsConfig,
    replicates: usize,
    master_seed: u64,
) -> Result<SsBatch> {
    if replicates == 0 {
        return Err(Error::domain("at least one replicate is required"));
    }
    config.validate(spec.dim())?;
    let master = RandomStream::new(master_seed);
    let runs: Vec<Result<SsEstimate>> = (0..replicates)
        .into_par_iter()
        .map(|r| run_subset_simulation(spec, config, &mut master.substream(r as u64)))
        .collect();
    let points: Vec<RunPoint> = runs
        .iter()
        .enumerate()
        .map(|(r, res)| RunPoint::from_result(r, res))
        .collect();
    let summary = RunSummary::from_points(&points);
    Ok(SsBatch {
        runs,
        points,
        summary,
    })
}

/// `R` independent direct Monte Carlo runs of `n_samples` each.
pub fn replicate_dmc(
    spec: &FailureSpec,
    n_samples: u64,
    replicates: usize,
    master_seed: u64,
) -> Result<Vec<f64>> {
    let master = RandomStream::new(master_seed);
    replicate_dmc_on(spec, n_samples, replicates, &master)
}

/// As [`replicate_dmc`], with replicate `r` drawing from `root.substream(r)`.
pub fn replicate_dmc_on(
    spec: &FailureSpec,
    n_samples: u64,
    replicates: usize,
    root: &RandomStream,
) -> Result<Vec<f64>> {
    (0..replicates)
        .into_par_iter()
        .map(|r| Ok(dmc_estimate(spec, n_samples, &mut root.substream(r as u64))?.p_hat))
        .collect()
}

/// How the direct Monte Carlo budget is chosen at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DmcBudget {
    /// Mean total samples of the SS replicates at the same point, rounded up.
    MatchSs,
    Fixed(u64),
}

/// Threshold sweep over the linear-sum model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSpec {
    pub dim: usize,
    pub thresholds: Vec<f64>,
    pub replicates: usize,
    pub ss: SsConfig,
    pub dmc_budget: DmcBudget,
}

impl SweepSpec {
    /// `points` evenly spaced thresholds over `[lo, hi]`.
    pub fn evenly_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
        match points {
            0 => Vec::new(),
            1 => vec![lo],
            _ => (0..points)
                .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
                .collect(),
        }
    }

    /// 41 points over `[0, 200]` in dimension 1000, `n = 3000`, `p = 0.1`.
    pub fn high_dimensional_default(replicates: usize) -> Self {
        Self {
            dim: 1000,
            thresholds: Self::evenly_spaced(0.0, 200.0, 41),
            replicates,
            ss: SsConfig::default().with_level(0.1, 3000),
            dmc_budget: DmcBudget::MatchSs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.thresholds.is_empty() {
            return Err(Error::config("sweep.thresholds", "grid must not be empty"));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        if self.dim == 0 {
            return Err(Error::config("model.dim", "must be at least 1"));
        }
        self.ss.validate(self.dim)
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub y_star: f64,
    pub p_true: f64,
    pub ss: RunSummary,
    pub dmc: Option<SampleStats>,
    pub dmc_samples: u64,
    /// c.o.v. of the direct estimator at `p_true` with `dmc_samples`.
    pub dmc_cov_theory: f64,
    pub ss_runs: Vec<RunPoint>,
}

impl SweepRow {
    pub fn ss_mean(&self) -> Option<f64> {
        self.ss.p_hat.map(|s| s.mean)
    }

    pub fn dmc_mean(&self) -> Option<f64> {
        self.dmc.map(|s| s.mean)
    }
}

/// Runs the sweep. Row `i`, replicate `r` uses substream path `[i, 0, r]`
/// for SS and `[i, 1, r]` for direct Monte Carlo.
pub fn sweep_compare(sweep: &SweepSpec, master_seed: u64) -> Result<Vec<SweepRow>> {
    sweep.validate()?;
    let model = linear_sum_model(sweep.dim)?;
    let master = RandomStream::new(master_seed);
    sweep
        .thresholds
        .iter()
        .enumerate()
        .map(|(i, &y_star)| {
            let spec = FailureSpec::new(model.clone(), y_star);
            let row_stream = master.substream(i as u64);
            let ss_root = row_stream.substream(SS_TAG);
            let ss_runs: Vec<RunPoint> = (0..sweep.replicates)
                .into_par_iter()
                .map(|r| {
                    let res =
                        run_subset_simulation(&spec, &sweep.ss, &mut ss_root.substream(r as u64));
                    RunPoint::from_result(r, &res)
                })
                .collect();
            let ss = RunSummary::from_points(&ss_runs);
            let dmc_samples = match sweep.dmc_budget {
                DmcBudget::Fixed(n) => n,
                DmcBudget::MatchSs => ss
                    .total_samples
                    .map(|s| s.mean.ceil() as u64)
                    .unwrap_or(sweep.ss.samples_per_level as u64)
                    .max(1),
            };
            let dmc_values =
                replicate_dmc_on(&spec, dmc_samples, sweep.replicates, &row_stream.substream(DMC_TAG))?;
            let p_true = analytic_failure_probability(sweep.dim, y_star)?;
            log::info!(
                "y* = {y_star}: p_true = {p_true:.3e}, ss mean = {:?}, dmc N = {dmc_samples}",
                ss.p_hat.map(|s| s.mean)
            );
            Ok(SweepRow {
                y_star,
                p_true,
                dmc: SampleStats::from_values(&dmc_values),
                dmc_samples,
                dmc_cov_theory: dmc_cov(p_true, dmc_samples),
                ss,
                ss_runs,
            })
        })
        .collect()
}

/// Per-level data of a single run: descending response curves, thresholds
/// and failure counts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelTrace {
    pub estimate: SsEstimate,
}

impl LevelTrace {
    pub fn thresholds(&self) -> &[f64] {
        &self.estimate.thresholds
    }

    pub fn failure_counts(&self) -> Vec<usize> {
        self.estimate.failure_counts()
    }

    pub fn response_curves(&self) -> impl Iterator<Item = (usize, &[f64])> {
        self.estimate
            .level_records
            .iter()
            .map(|r| (r.level, r.sorted_responses.as_slice()))
    }
}

/// Single traced run seeded with `seed`. Sample points are retained for
/// two-dimensional models so they can be plotted.
pub fn level_trace(spec: &FailureSpec, config: &SsConfig, seed: u64) -> Result<LevelTrace> {
    let config = SsConfig {
        retain_samples: config.retain_samples || spec.dim() == 2,
        ..config.clone()
    };
    let estimate = run_subset_simulation(spec, &config, &mut RandomStream::new(seed))?;
    Ok(LevelTrace { estimate })
}
