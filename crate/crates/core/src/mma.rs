//! Modified Metropolis transition kernel for sampling the conditional
//! distribution `π(· | g > b)` of independent inputs.
//!
//! Each step proposes every coordinate independently from a symmetric
//! one-dimensional proposal and accepts it against the ratio of marginal
//! densities. The assembled candidate is then kept only if it still lies in
//! the intermediate failure domain; otherwise the chain repeats its current
//! state.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FailureSpec, InputModel, Sample};
use crate::randmath::RandomStream;

/// Bounds for adapted spreads.
pub const MIN_SPREAD: f64 = 1e-3;
pub const MAX_SPREAD: f64 = 1e3;
/// Multipliers applied by [`adapt_spread`].
pub const SHRINK_FACTOR: f64 = 0.7;
pub const GROW_FACTOR: f64 = 1.3;
/// Target band for the candidate acceptance rate.
pub const TARGET_RATE_LOW: f64 = 0.3;
pub const TARGET_RATE_HIGH: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ProposalKind {
    /// `η ~ N(x, σ²)`.
    #[default]
    Gaussian,
    /// `η ~ U[x - α, x + α]`.
    Uniform,
}

/// Standard deviation (Gaussian) or half-width (uniform), either one value
/// for all coordinates or one per coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Spread {
    Scalar(f64),
    PerCoordinate(Vec<f64>),
}

impl Spread {
    #[inline]
    pub fn at(&self, k: usize) -> f64 {
        match self {
            Spread::Scalar(s) => *s,
            Spread::PerCoordinate(v) => v[k],
        }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Spread {
        match self {
            Spread::Scalar(s) => Spread::Scalar(f(*s)),
            Spread::PerCoordinate(v) => Spread::PerCoordinate(v.iter().map(|s| f(*s)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalSpec {
    pub kind: ProposalKind,
    pub spread: Spread,
}

impl Default for ProposalSpec {
    /// Unit-variance Gaussian.
    fn default() -> Self {
        Self {
            kind: ProposalKind::Gaussian,
            spread: Spread::Scalar(1.0),
        }
    }
}

impl ProposalSpec {
    pub fn gaussian(sigma: f64) -> Self {
        Self {
            kind: ProposalKind::Gaussian,
            spread: Spread::Scalar(sigma),
        }
    }

    pub fn uniform(half_width: f64) -> Self {
        Self {
            kind: ProposalKind::Uniform,
            spread: Spread::Scalar(half_width),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |s: f64| !(s > 0.0 && s.is_finite());
        match &self.spread {
            Spread::Scalar(s) if bad(*s) => Err(Error::config(
                "proposal.spread",
                format!("spread must be positive and finite, got {s}"),
            )),
            Spread::PerCoordinate(v) if v.len() != dim => Err(Error::config(
                "proposal.spread",
                format!("{} spreads given for a {dim}-dimensional model", v.len()),
            )),
            Spread::PerCoordinate(v) => match v.iter().position(|s| bad(*s)) {
                Some(k) => Err(Error::config(
                    "proposal.spread",
                    format!("spread of coordinate {k} must be positive, got {}", v[k]),
                )),
                None => Ok(()),
            },
            Spread::Scalar(_) => Ok(()),
        }
    }

    #[inline]
    fn propose(&self, k: usize, x: f64, stream: &mut RandomStream) -> f64 {
        let s = self.spread.at(k);
        match self.kind {
            ProposalKind::Gaussian => x + s * stream.standard_normal(),
            ProposalKind::Uniform => x + s * (2.0 * stream.uniform01() - 1.0),
        }
    }
}

/// Counters accumulated over one or more chains.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MmaStats {
    pub coordinate_proposals: u64,
    pub coordinate_acceptances: u64,
    /// Steps whose candidate differed from the current state and landed in
    /// the intermediate domain.
    pub candidate_accept_count: u64,
    pub chain_steps: u64,
    pub evaluations: u64,
}

impl MmaStats {
    pub fn merge(&mut self, other: &MmaStats) {
        self.coordinate_proposals += other.coordinate_proposals;
        self.coordinate_acceptances += other.coordinate_acceptances;
        self.candidate_accept_count += other.candidate_accept_count;
        self.chain_steps += other.chain_steps;
        self.evaluations += other.evaluations;
    }

    /// Fraction of chain steps that moved to a new state.
    pub fn acceptance_rate(&self) -> Option<f64> {
        (self.chain_steps > 0).then(|| self.candidate_accept_count as f64 / self.chain_steps as f64)
    }
}

/// `min{1, π_k(η)/π_k(x)}`.
pub fn coordinate_acceptance_probability(inputs: &InputModel, k: usize, eta: f64, x: f64) -> f64 {
    inputs.ln_ratio(k, eta, x).exp().min(1.0)
}

/// One Modified Metropolis transition from `current`, which must satisfy
/// `g > level_threshold`.
///
/// `g` is evaluated at most once, and not at all when every coordinate
/// proposal was rejected.
pub fn mma_step(
    current: &Sample,
    spec: &FailureSpec,
    level_threshold: f64,
    proposal: &ProposalSpec,
    stream: &mut RandomStream,
    stats: &mut MmaStats,
) -> Result<Sample> {
    if !(current.response > level_threshold) {
        return Err(Error::Invariant(format!(
            "chain state has response {} which does not exceed the level threshold {level_threshold}",
            current.response
        )));
    }
    let dim = current.point.len();
    let mut candidate = current.point.clone();
    let mut moved = false;
    for (k, slot) in candidate.iter_mut().enumerate() {
        let x = *slot;
        let eta = proposal.propose(k, x, stream);
        let ln_r = spec.inputs.ln_ratio(k, eta, x);
        if ln_r >= 0.0 || stream.uniform01() < ln_r.exp() {
            *slot = eta;
            moved = true;
            stats.coordinate_acceptances += 1;
        }
    }
    stats.coordinate_proposals += dim as u64;
    stats.chain_steps += 1;
    if !moved {
        return Ok(current.clone());
    }
    let response = spec.model.evaluate(&candidate);
    stats.evaluations += 1;
    if response > level_threshold {
        stats.candidate_accept_count += 1;
        Ok(Sample {
            point: candidate,
            response,
        })
    } else {
        Ok(current.clone())
    }
}

/// Runs a chain of `chain_length` states; element 0 is `seed` itself.
pub fn run_chain(
    seed: Sample,
    chain_length: usize,
    spec: &FailureSpec,
    level_threshold: f64,
    proposal: &ProposalSpec,
    stream: &mut RandomStream,
    stats: &mut MmaStats,
) -> Result<Vec<Sample>> {
    if chain_length == 0 {
        return Err(Error::domain("chain length must be at least 1"));
    }
    if !(seed.response > level_threshold) {
        return Err(Error::Invariant(format!(
            "seed response {} does not exceed the level threshold {level_threshold}",
            seed.response
        )));
    }
    let mut chain = Vec::with_capacity(chain_length);
    chain.push(seed);
    for _ in 1..chain_length {
        let next = mma_step(
            chain.last().expect("chain is non-empty"),
            spec,
            level_threshold,
            proposal,
            stream,
            stats,
        )?;
        chain.push(next);
    }
    Ok(chain)
}

/// Multiplicative spread controller. Shrinks when the candidate acceptance
/// rate is below the target band, grows when above, and clamps the result
/// to `[MIN_SPREAD, MAX_SPREAD]`.
pub fn adapt_spread(stats: &MmaStats, proposal: &ProposalSpec) -> Result<ProposalSpec> {
    let rate = stats
        .acceptance_rate()
        .ok_or_else(|| Error::domain("cannot adapt the proposal before any chain step"))?;
    let factor = if rate < TARGET_RATE_LOW {
        SHRINK_FACTOR
    } else if rate > TARGET_RATE_HIGH {
        GROW_FACTOR
    } else {
        return Ok(proposal.clone());
    };
    Ok(ProposalSpec {
        kind: proposal.kind,
        spread: proposal
            .spread
            .map(|s| (s * factor).clamp(MIN_SPREAD, MAX_SPREAD)),
    })
}
