//! Subset Simulation driver.
//!
//! Level 0 is a plain Monte Carlo probe of `n` samples. While fewer than
//! `n·p` of the current level's samples fail, the next intermediate threshold
//! is placed halfway between the `n·p`-th and `(n·p+1)`-th largest responses,
//! the samples above it seed `n·p` Modified Metropolis chains of length
//! `1/p`, and the pooled chains form the next level. The estimate is
//! `p^L · n_F(L) / n`.
//!
//! Level `l` chains draw from `stream.substream(l).substream(chain_index)`,
//! so results do not depend on the order in which chains execute.

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mma::{adapt_spread, run_chain, MmaStats, ProposalSpec};
use crate::model::{FailureSpec, Sample};
use crate::randmath::RandomStream;

const INTEGRALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsConfig {
    pub level_probability: f64,
    pub samples_per_level: usize,
    pub proposal: ProposalSpec,
    /// Adapt the proposal spread between levels.
    pub adapt: bool,
    pub max_levels: usize,
    /// Keep every level's sample points in the returned records. Off by
    /// default since high-dimensional runs would hold `n·d` floats per level.
    #[serde(default)]
    pub retain_samples: bool,
}

impl Default for SsConfig {
    fn default() -> Self {
        Self {
            level_probability: 0.1,
            samples_per_level: 1000,
            proposal: ProposalSpec::default(),
            adapt: false,
            max_levels: 50,
            retain_samples: false,
        }
    }
}

fn as_integer(x: f64) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() <= INTEGRALITY_TOL * r.max(1.0) && r >= 1.0).then_some(r as usize)
}

impl SsConfig {
    pub fn with_level(mut self, p: f64, n: usize) -> Self {
        self.level_probability = p;
        self.samples_per_level = n;
        self
    }

    /// Number of seeds per level, `n·p`.
    pub fn seeds_per_level(&self) -> Result<usize> {
        self.check_p()?;
        let n = self.samples_per_level;
        let p = self.level_probability;
        let np = as_integer(n as f64 * p).ok_or_else(|| {
            Error::config(
                "level_probability",
                format!("n·p must be an integer; got n={n}, p={p}"),
            )
        })?;
        if np >= n {
            return Err(Error::config(
                "samples_per_level",
                format!("n·p must be smaller than n; got n={n}, p={p}"),
            ));
        }
        Ok(np)
    }

    /// Chain length per seed, `1/p` (seed included).
    pub fn chain_length(&self) -> Result<usize> {
        self.check_p()?;
        let p = self.level_probability;
        as_integer(1.0 / p).ok_or_else(|| {
            Error::config(
                "level_probability",
                format!("1/p must be an integer; got p={p}"),
            )
        })
    }

    fn check_p(&self) -> Result<()> {
        let p = self.level_probability;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::config(
                "level_probability",
                format!("must lie in (0, 1); got {p}"),
            ));
        }
        Ok(())
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.samples_per_level == 0 {
            return Err(Error::config("samples_per_level", "must be positive"));
        }
        self.seeds_per_level()?;
        self.chain_length()?;
        if self.max_levels == 0 {
            return Err(Error::config("max_levels", "must be at least 1"));
        }
        self.proposal.validate(dim)
    }
}

/// Everything recorded about one level of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub level: usize,
    /// Intermediate threshold `y*_l` every sample of this level exceeds.
    /// `None` for the unconditional level 0.
    pub threshold: Option<f64>,
    pub sorted_responses: Vec<f64>,
    pub n_failures: usize,
    /// Estimated `P(F_l | F_{l-1})`; `p` unless tied responses between
    /// distinct points forced a different count.
    pub conditional_probability: Option<f64>,
    pub boundary: BoundaryKind,
    pub acceptance_stats: Option<MmaStats>,
    pub evaluations_used: u64,
    #[serde(skip)]
    pub samples: Option<Vec<Sample>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SsEstimate {
    pub p_hat: f64,
    pub levels: usize,
    pub level_probability: f64,
    pub samples_per_level: usize,
    pub thresholds: Vec<f64>,
    pub total_samples: u64,
    pub total_evaluations: u64,
    /// Levels seeded by [`BoundaryKind::StrictExceedance`].
    pub tie_levels: Vec<usize>,
    pub level_records: Vec<LevelRecord>,
}

impl SsEstimate {
    /// `n_F(l)` for each level.
    pub fn failure_counts(&self) -> Vec<usize> {
        self.level_records.iter().map(|r| r.n_failures).collect()
    }
}

/// How the samples at the `n·p` boundary were separated when this level's
/// threshold was chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    /// Level 0, or the boundary responses were distinct.
    #[default]
    Distinct,
    /// The tie consisted of copies of one chain state. The top `n·p` samples
    /// seed the level and the threshold sits one ulp below the tied value.
    RepeatedState,
    /// Only the samples strictly above the tied value seed the level, and
    /// the realized fraction is the level factor. Used when distinct inputs
    /// share the boundary response, or when a repeated state sits on the
    /// previous threshold so that stepping below it would not advance.
    StrictExceedance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdSelection {
    pub threshold: f64,
    /// Responses strictly above `threshold`.
    pub exceedances: usize,
    /// The `np`-th and `(np+1)`-th largest responses were equal.
    pub tie: bool,
}

/// Midpoint of the `n·p`-th and `(n·p+1)`-th largest of `sorted_desc`.
pub fn select_threshold(sorted_desc: &[f64], p: f64) -> Result<ThresholdSelection> {
    let n = sorted_desc.len();
    let np = as_integer(n as f64 * p)
        .filter(|&np| np < n)
        .ok_or_else(|| {
            Error::domain(format!(
                "threshold selection needs an integer 1 <= n·p < n; got n={n}, p={p}"
            ))
        })?;
    let upper = sorted_desc[np - 1];
    let lower = sorted_desc[np];
    if upper < lower {
        return Err(Error::domain("responses are not sorted in descending order"));
    }
    let threshold = 0.5 * (upper + lower);
    let tie = upper == lower;
    let exceedances = if tie {
        sorted_desc.iter().take_while(|&&y| y > threshold).count()
    } else {
        np
    };
    Ok(ThresholdSelection {
        threshold,
        exceedances,
        tie,
    })
}

/// Planning heuristic for the number of conditional levels:
/// `floor(ln p_f / ln p)`.
pub fn expected_levels(p_f: f64, p: f64) -> Result<usize> {
    if !(p_f > 0.0 && p_f < 1.0) || !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "expected_levels needs p_f and p in (0, 1); got p_f={p_f}, p={p}"
        )));
    }
    Ok((p_f.ln() / p.ln()).floor().max(0.0) as usize)
}

/// Threshold, seed count and level factor for the next level.
struct LevelPlan {
    threshold: f64,
    seeds: usize,
    factor: f64,
    boundary: BoundaryKind,
}

/// `floor` is the threshold of the level the samples belong to.
fn plan_next_level(
    samples: &[Sample],
    order: &[usize],
    sorted: &[f64],
    p: f64,
    floor: Option<f64>,
) -> Result<LevelPlan> {
    let n = samples.len();
    let sel = select_threshold(sorted, p)?;
    if !sel.tie {
        return Ok(LevelPlan {
            threshold: sel.threshold,
            seeds: sel.exceedances,
            factor: p,
            boundary: BoundaryKind::Distinct,
        });
    }
    let tied_value = sel.threshold;
    let mut block = order
        .iter()
        .zip(sorted)
        .filter(|(_, &y)| y == tied_value)
        .map(|(&i, _)| &samples[i].point);
    let first = block.next().expect("a tie involves at least two samples");
    let below = tied_value.next_down();
    if floor.is_none_or(|f| below > f) && block.all(|pt| pt == first) {
        return Ok(LevelPlan {
            threshold: below,
            seeds: as_integer(n as f64 * p).expect("checked by select_threshold"),
            factor: p,
            boundary: BoundaryKind::RepeatedState,
        });
    }
    Ok(LevelPlan {
        threshold: tied_value,
        seeds: sel.exceedances,
        factor: sel.exceedances as f64 / n as f64,
        boundary: BoundaryKind::StrictExceedance,
    })
}

/// Bookkeeping carried from the chains of one level into its record.
struct Pending {
    threshold: Option<f64>,
    factor: Option<f64>,
    boundary: BoundaryKind,
    stats: Option<MmaStats>,
    evaluations: u64,
}

/// Indices of `samples` ordered by descending response; ties keep insertion
/// order.
fn descending_order(samples: &[Sample]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..samples.len()).collect();
    idx.sort_by(|&a, &b| samples[b].response.total_cmp(&samples[a].response));
    idx
}

/// Runs Subset Simulation for `spec`. Level 0 consumes `stream` directly, so
/// a run that stops at level 0 reproduces a direct Monte Carlo estimate with
/// `n` samples on the same stream.
pub fn run_subset_simulation(
    spec: &FailureSpec,
    config: &SsConfig,
    stream: &mut RandomStream,
) -> Result<SsEstimate> {
    let dim = spec.dim();
    config.validate(dim)?;
    spec.inputs.check_dim(dim)?;
    let n = config.samples_per_level;
    let np = config.seeds_per_level()?;
    let chain_length = config.chain_length()?;
    let p = config.level_probability;
    let y_star = spec.critical_threshold;

    let mut samples: Vec<Sample> = (0..n)
        .map(|_| {
            let mut x = vec![0.0; dim];
            spec.inputs.draw_into(stream, &mut x);
            spec.sample_at(x)
        })
        .collect();

    let mut records: Vec<LevelRecord> = Vec::new();
    let mut thresholds: Vec<f64> = Vec::new();
    let mut factors: Vec<f64> = Vec::new();
    let mut tie_levels = Vec::new();
    let mut total_samples = n as u64;
    let mut proposal = config.proposal.clone();
    let mut pending = Pending {
        threshold: None,
        factor: None,
        boundary: BoundaryKind::Distinct,
        stats: None,
        evaluations: n as u64,
    };

    for level in 0.. {
        let order = descending_order(&samples);
        let sorted_responses: Vec<f64> = order.iter().map(|&i| samples[i].response).collect();
        let n_failures = sorted_responses.iter().take_while(|&&y| y > y_star).count();
        debug!(
            "level {level}: threshold {:?}, n_F = {n_failures}, top response {}",
            pending.threshold, sorted_responses[0]
        );
        let stop = n_failures >= np;
        let plan = if stop || level == config.max_levels {
            None
        } else {
            Some(plan_next_level(&samples, &order, &sorted_responses, p, pending.threshold)?)
        };
        records.push(LevelRecord {
            level,
            threshold: pending.threshold,
            sorted_responses,
            n_failures,
            conditional_probability: pending.factor,
            boundary: pending.boundary,
            acceptance_stats: pending.stats,
            evaluations_used: pending.evaluations,
            samples: config.retain_samples.then(|| samples.clone()),
        });

        if stop {
            let last = n_failures as f64 / n as f64;
            let p_hat = if tie_levels.is_empty() {
                p.powi(level as i32) * last
            } else {
                factors.iter().product::<f64>() * last
            };
            let total_evaluations = records.iter().map(|r| r.evaluations_used).sum();
            return Ok(SsEstimate {
                p_hat,
                levels: level,
                level_probability: p,
                samples_per_level: n,
                thresholds,
                total_samples,
                total_evaluations,
                tie_levels,
                level_records: records,
            });
        }
        let Some(plan) = plan else {
            return Err(Error::BudgetExceeded {
                max_levels: config.max_levels,
                partial: Box::new(records),
            });
        };

        let next_level = level + 1;
        let m = plan.seeds;
        if plan.boundary == BoundaryKind::StrictExceedance {
            warn!(
                "level {next_level}: responses tie at {}; {m} of {n} samples exceed it (wanted {np})",
                plan.threshold
            );
            tie_levels.push(next_level);
        }
        if m == 0 {
            return Err(Error::Stalled {
                level: next_level,
                value: plan.threshold,
                partial: Box::new(records),
            });
        }
        factors.push(plan.factor);
        thresholds.push(plan.threshold);

        let lengths: Vec<usize> = if m == np {
            vec![chain_length; m]
        } else {
            let (base, rem) = (n / m, n % m);
            (0..m).map(|c| base + usize::from(c < rem)).collect()
        };
        if config.adapt {
            if let Some(stats) = records.last().and_then(|r| r.acceptance_stats) {
                proposal = adapt_spread(&stats, &proposal)?;
            }
        }

        let seeds: Vec<Sample> = order[..m].iter().map(|&i| samples[i].clone()).collect();
        drop(samples);
        let level_stream = stream.substream(next_level as u64);
        let chains: Vec<(Vec<Sample>, MmaStats)> = seeds
            .into_par_iter()
            .zip(lengths.into_par_iter())
            .enumerate()
            .map(|(c, (seed, len))| {
                let mut chain_stream = level_stream.substream(c as u64);
                let mut stats = MmaStats::default();
                let chain = run_chain(
                    seed,
                    len,
                    spec,
                    plan.threshold,
                    &proposal,
                    &mut chain_stream,
                    &mut stats,
                )?;
                Ok((chain, stats))
            })
            .collect::<Result<_>>()?;

        let mut stats = MmaStats::default();
        samples = Vec::with_capacity(n);
        for (chain, s) in chains {
            stats.merge(&s);
            samples.extend(chain);
        }
        debug_assert_eq!(samples.len(), n);
        total_samples += (n - m) as u64;
        pending = Pending {
            threshold: Some(plan.threshold),
            factor: Some(plan.factor),
            boundary: plan.boundary,
            stats: Some(stats),
            evaluations: stats.evaluations,
        };
    }
    unreachable!("level loop only exits by returning")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dmc::dmc_estimate;
    use crate::model::{linear_sum_model, PerformanceModel};

    fn linear(d: usize, y: f64) -> FailureSpec {
        FailureSpec::new(linear_sum_model(d).unwrap(), y)
    }

    #[test]
    fn threshold_examples() {
        let ys: Vec<f64> = (1..=10).rev().map(f64::from).collect();
        let sel = select_threshold(&ys, 0.2).unwrap();
        assert_eq!(sel.threshold, 8.5);
        assert_eq!(sel.exceedances, 2);
        assert!(!sel.tie);
        assert_eq!(ys.iter().filter(|&&y| y > sel.threshold).count(), 2);

        let flat = vec![3.0; 10];
        let sel = select_threshold(&flat, 0.2).unwrap();
        assert!(sel.tie);
        assert_eq!(sel.threshold, 3.0);
        assert_eq!(sel.exceedances, 0);

        let partial = [5.0, 4.0, 4.0, 4.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let sel = select_threshold(&partial, 0.2).unwrap();
        assert!(sel.tie);
        assert_eq!(sel.exceedances, 1);

        assert!(select_threshold(&ys, 0.15).is_err());
        assert!(select_threshold(&[1.0, 2.0], 0.5).is_err());
    }

    #[test]
    fn config_validation_messages() {
        let err = SsConfig::default()
            .with_level(0.1, 1005)
            .validate(2)
            .unwrap_err()
            .to_string();
        assert!(err.contains("n·p must be an integer; got n=1005, p=0.1"), "{err}");
        let err = SsConfig::default()
            .with_level(0.15, 1000)
            .validate(2)
            .unwrap_err()
            .to_string();
        assert!(err.contains("1/p must be an integer; got p=0.15"), "{err}");
        assert!(SsConfig::default().with_level(0.3, 10).validate(1).is_err());
        assert!(SsConfig::default().with_level(0.5, 2).validate(1).is_ok());
        let mut c = SsConfig::default();
        c.max_levels = 0;
        assert!(c.validate(1).is_err());
        assert_eq!(SsConfig::default().seeds_per_level().unwrap(), 100);
        assert_eq!(SsConfig::default().chain_length().unwrap(), 10);
    }

    fn sample(point: Vec<f64>, response: f64) -> Sample {
        Sample { point, response }
    }

    fn plan(samples: &[Sample], p: f64) -> LevelPlan {
        let order = descending_order(samples);
        let sorted: Vec<f64> = order.iter().map(|&i| samples[i].response).collect();
        plan_next_level(samples, &order, &sorted, p, None).unwrap()
    }

    #[test]
    fn boundary_classification() {
        let mut samples: Vec<Sample> = (0..10).map(|i| sample(vec![i as f64], i as f64)).collect();
        let pl = plan(&samples, 0.2);
        assert_eq!(pl.boundary, BoundaryKind::Distinct);
        assert_eq!((pl.threshold, pl.seeds, pl.factor), (7.5, 2, 0.2));

        // Copies of one chain state straddle the boundary.
        samples[7] = sample(vec![8.0], 8.0);
        samples[6] = sample(vec![8.0], 8.0);
        let pl = plan(&samples, 0.2);
        assert_eq!(pl.boundary, BoundaryKind::RepeatedState);
        assert_eq!(pl.seeds, 2);
        assert_eq!(pl.factor, 0.2);
        assert!(pl.threshold < 8.0 && pl.threshold.next_up() == 8.0);
        assert!(pl.threshold > 5.0);

        // The same copies sitting on the current level's threshold: stepping
        // below them would not advance, so only the sample above seeds.
        let order = descending_order(&samples);
        let sorted: Vec<f64> = order.iter().map(|&i| samples[i].response).collect();
        let pl = plan_next_level(&samples, &order, &sorted, 0.2, Some(8.0f64.next_down())).unwrap();
        assert_eq!(pl.boundary, BoundaryKind::StrictExceedance);
        assert_eq!((pl.threshold, pl.seeds, pl.factor), (8.0, 1, 0.1));

        // Different inputs share the boundary response.
        samples[6] = sample(vec![-1.0], 8.0);
        let pl = plan(&samples, 0.2);
        assert_eq!(pl.boundary, BoundaryKind::StrictExceedance);
        assert_eq!((pl.threshold, pl.seeds), (8.0, 1));
        assert_eq!(pl.factor, 0.1);
    }

    #[test]
    fn expected_level_examples() {
        let l = expected_levels(1e-10, 0.1).unwrap();
        assert!(l == 9 || l == 10);
        assert_eq!(expected_levels(0.5, 0.1).unwrap(), 0);
        assert_eq!(expected_levels(1e-3 * 1.001, 0.1).unwrap(), 2);
        assert_eq!(expected_levels(1e-3 * 0.999, 0.1).unwrap(), 3);
        assert!(expected_levels(0.0, 0.1).is_err());
    }

    #[test]
    fn stops_at_level_zero_and_matches_dmc() {
        let spec = linear(1, 0.0);
        let config = SsConfig::default();
        let ss = run_subset_simulation(&spec, &config, &mut RandomStream::new(21)).unwrap();
        assert_eq!(ss.levels, 0);
        assert!(ss.thresholds.is_empty());
        let dmc = dmc_estimate(&spec, 1000, &mut RandomStream::new(21)).unwrap();
        assert_eq!(ss.p_hat, dmc.p_hat);
        assert!((ss.p_hat - 0.5).abs() < 0.06);
        assert_eq!(ss.total_samples, 1000);
        assert_eq!(ss.total_evaluations, 1000);
    }

    #[test]
    fn two_dimensional_run_structure() {
        let spec = linear(2, 9.0);
        let config = SsConfig {
            retain_samples: true,
            ..SsConfig::default()
        };
        let est = run_subset_simulation(&spec, &config, &mut RandomStream::new(0)).unwrap();
        let (n, np) = (1000u64, 100u64);
        assert_eq!(est.total_samples, n + est.levels as u64 * (n - np));
        assert_eq!(est.level_records.len(), est.levels + 1);
        assert!(est.thresholds.windows(2).all(|w| w[0] < w[1]));
        assert!(est.thresholds.iter().all(|&t| t < 9.0));
        let nf = est.failure_counts();
        assert!(nf.windows(2).all(|w| w[0] <= w[1]));
        let last = *nf.last().unwrap();
        assert!(last >= 100);
        assert_eq!(est.p_hat, 0.1f64.powi(est.levels as i32) * last as f64 / 1000.0);
        assert!(est.p_hat > 1e-11 && est.p_hat < 1e-9, "{}", est.p_hat);
        assert!(est.total_evaluations <= est.total_samples);
        for (l, rec) in est.level_records.iter().enumerate().skip(1) {
            let t = rec.threshold.unwrap();
            assert_eq!(t, est.thresholds[l - 1]);
            let samples = rec.samples.as_ref().unwrap();
            assert_eq!(samples.len(), 1000);
            assert!(samples.iter().all(|s| s.response > t));
            assert!(rec.sorted_responses.windows(2).all(|w| w[0] >= w[1]));
            let prev = &est.level_records[l - 1].sorted_responses;
            let above = prev.iter().filter(|&&y| y > t).count();
            match rec.boundary {
                BoundaryKind::Distinct => assert_eq!(above, 100),
                BoundaryKind::RepeatedState => {
                    assert!(above > 100);
                    assert_eq!(prev[99], prev[100]);
                }
                BoundaryKind::StrictExceedance => panic!("unexpected strict-exceedance level"),
            }
            assert_eq!(rec.conditional_probability, Some(0.1));
        }
    }

    #[test]
    fn reruns_are_bit_identical() {
        let spec = linear(5, 8.0);
        let config = SsConfig::default().with_level(0.1, 500);
        let a = run_subset_simulation(&spec, &config, &mut RandomStream::new(77)).unwrap();
        let b = run_subset_simulation(&spec, &config, &mut RandomStream::new(77)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.p_hat.to_bits(), b.p_hat.to_bits());
        let c = run_subset_simulation(&spec, &config, &mut RandomStream::new(78)).unwrap();
        assert_ne!(a.p_hat, c.p_hat);
    }

    #[test]
    fn bounded_model_exhausts_levels() {
        // g never exceeds 1, so y* = 2 is unreachable. Responses saturate at
        // 1 and the run stalls on ties or runs out of levels.
        let model =
            PerformanceModel::new(1, "clipped", |x: &[f64]| x[0].min(1.0)).unwrap();
        let spec = FailureSpec::new(model, 2.0);
        let config = SsConfig {
            max_levels: 5,
            ..SsConfig::default().with_level(0.1, 200)
        };
        let err = run_subset_simulation(&spec, &config, &mut RandomStream::new(3)).unwrap_err();
        let partial = err.partial_records().expect("partial records");
        assert!(!partial.is_empty());
        assert!(matches!(err, Error::BudgetExceeded { .. } | Error::Stalled { .. }));

        let config = SsConfig {
            max_levels: 2,
            ..SsConfig::default().with_level(0.1, 200)
        };
        let err =
            run_subset_simulation(&linear(2, 9.0), &config, &mut RandomStream::new(3)).unwrap_err();
        match err {
            Error::BudgetExceeded {
                max_levels,
                partial,
            } => {
                assert_eq!(max_levels, 2);
                assert_eq!(partial.len(), 3);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn discrete_model_uses_realized_tie_fractions() {
        // g = floor(x): heavy ties at integer responses.
        let model = PerformanceModel::new(1, "floor", |x: &[f64]| x[0].floor()).unwrap();
        let spec = FailureSpec::new(model, 2.0);
        let config = SsConfig::default().with_level(0.1, 1000);
        let est = run_subset_simulation(&spec, &config, &mut RandomStream::new(5)).unwrap();
        assert!(!est.tie_levels.is_empty());
        for &l in &est.tie_levels {
            assert_eq!(est.level_records[l].boundary, BoundaryKind::StrictExceedance);
        }
        let product: f64 = est
            .level_records
            .iter()
            .filter_map(|r| r.conditional_probability)
            .product();
        let last = *est.failure_counts().last().unwrap() as f64 / 1000.0;
        assert!((est.p_hat - product * last).abs() <= 1e-15);
        for rec in &est.level_records[1..] {
            let s = rec.acceptance_stats.unwrap();
            assert!(s.chain_steps > 0);
        }
        // Every level still holds exactly n samples.
        assert!(est.level_records.iter().all(|r| r.sorted_responses.len() == 1000));
        // True value: P(floor(x) > 2) = P(x >= 3) ≈ 1.35e-3.
        assert!(est.p_hat > 2e-4 && est.p_hat < 1e-2, "{}", est.p_hat);
    }

    #[test]
    fn adaptation_changes_proposal_between_levels() {
        let spec = linear(2, 9.0);
        let config = SsConfig {
            adapt: true,
            proposal: ProposalSpec::gaussian(5.0),
            ..SsConfig::default()
        };
        let est = run_subset_simulation(&spec, &config, &mut RandomStream::new(8)).unwrap();
        let rates: Vec<f64> = est.level_records[1..]
            .iter()
            .map(|r| r.acceptance_stats.unwrap().acceptance_rate().unwrap())
            .collect();
        assert!(rates.len() >= 3);
        assert!(rates[0] < 0.3);
        assert!(rates.last().unwrap() > &rates[0]);
    }
}
