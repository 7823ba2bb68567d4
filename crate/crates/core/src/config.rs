//! Run configuration: a TOML document, command-line overrides, and the
//! resolved [`RunConfig`] every command runs from.
//!
//! ```toml
//! command = "estimate"
//! seed = 0
//! p_target = 1e-10          # or y_star = 9.0, never both
//!
//! [model]
//! name = "linear_sum"
//! dim = 2
//!
//! [ss]
//! level_probability = 0.1
//! samples_per_level = 1000
//!
//! [ss.proposal]
//! kind = "gaussian"
//! spread = 1.0
//! ```
//!
//! Precedence, highest first: command-line flags, the `SUBSIM_OUT_DIR`
//! environment variable (output directory only), the document, defaults.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::{DmcBudget, SweepSpec};
use crate::mma::{ProposalKind, ProposalSpec, Spread};
use crate::model::threshold_for_probability;
use crate::subset::SsConfig;

pub const OUT_DIR_ENV: &str = "SUBSIM_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";
pub const SWEEP_REPLICATES: usize = 100;
pub const QUICK_SWEEP_REPLICATES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    #[default]
    Estimate,
    Sweep,
    Trace,
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Estimate => "estimate",
            Command::Sweep => "sweep",
            Command::Trace => "trace",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Ss,
    Dmc,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelConfig {
    pub name: String,
    pub dim: usize,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub replicates: usize,
    pub out_dir: PathBuf,
    /// Estimators run by `estimate`. `sweep` always runs both.
    pub method: Method,
    pub quick: bool,
    /// `None` only for `selftest`.
    pub model: Option<ModelConfig>,
    /// Critical threshold, resolved from `p_target` when that was given.
    pub y_star: Option<f64>,
    pub p_target: Option<f64>,
    pub ss: SsConfig,
    /// Direct Monte Carlo sample count for `estimate`. Defaults to the mean
    /// SS budget when `method = "both"`.
    pub dmc_samples: Option<u64>,
    pub sweep: Option<SweepSpec>,
}

impl RunConfig {
    /// The configuration as a TOML document that parses back to `self`.
    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_raw()).expect("configuration serializes to TOML")
    }

    fn to_raw(&self) -> RawConfig {
        let ss = &self.ss;
        RawConfig {
            command: Some(self.command),
            seed: Some(self.seed),
            replicates: Some(self.replicates),
            out_dir: Some(self.out_dir.clone()),
            method: Some(self.method),
            quick: Some(self.quick),
            y_star: self.p_target.is_none().then_some(self.y_star).flatten(),
            p_target: self.p_target,
            dmc_samples: self.dmc_samples,
            model: self.model.as_ref().map(|m| RawModel {
                name: Some(m.name.clone()),
                dim: Some(m.dim),
            }),
            ss: Some(RawSs {
                level_probability: Some(ss.level_probability),
                samples_per_level: Some(ss.samples_per_level),
                adapt: Some(ss.adapt),
                max_levels: Some(ss.max_levels),
                proposal: Some(RawProposal {
                    kind: Some(ss.proposal.kind),
                    spread: Some(ss.proposal.spread.clone()),
                }),
            }),
            sweep: self.sweep.as_ref().map(|s| RawSweep {
                thresholds: Some(s.thresholds.clone()),
                y_min: None,
                y_max: None,
                points: None,
                dmc_budget: Some(match s.dmc_budget {
                    DmcBudget::MatchSs => RawBudget::Named(MATCH_SS.into()),
                    DmcBudget::Fixed(n) => RawBudget::Fixed(n),
                }),
            }),
        }
    }
}

/// Values given on the command line. Each `Some` replaces the document's
/// value.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub replicates: Option<usize>,
    pub quick: bool,
}

const MATCH_SS: &str = "match_ss";

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    replicates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out_dir: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    method: Option<Method>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quick: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_target: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dmc_samples: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    model: Option<RawModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ss: Option<RawSs>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep: Option<RawSweep>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    name: Option<String>,
    dim: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSs {
    level_probability: Option<f64>,
    samples_per_level: Option<usize>,
    adapt: Option<bool>,
    max_levels: Option<usize>,
    proposal: Option<RawProposal>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProposal {
    kind: Option<ProposalKind>,
    spread: Option<Spread>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    #[serde(skip_serializing_if = "Option::is_none")]
    thresholds: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    y_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    dmc_budget: Option<RawBudget>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum RawBudget {
    Fixed(u64),
    Named(String),
}

/// Parses and validates a configuration document with no overrides.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &Overrides::default())
}

/// Parses a document, applies `overrides`, fills defaults and validates.
pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    resolve(raw, overrides)
}

/// Reads a configuration file; `None` starts from an empty document.
pub fn load_config(path: Option<&std::path::Path>, overrides: &Overrides) -> Result<RunConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?,
        None => String::new(),
    };
    parse_config_with(&text, overrides)
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::config(field, format!("must be finite, got {v}")))
    }
}

fn resolve(raw: RawConfig, ov: &Overrides) -> Result<RunConfig> {
    let command = ov.command.or(raw.command).unwrap_or_default();
    let quick = ov.quick || raw.quick.unwrap_or(false);
    let seed = ov.seed.or(raw.seed).unwrap_or(0);
    let out_dir = ov
        .out_dir
        .clone()
        .or(raw.out_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    let default_replicates = match (command, quick) {
        (Command::Sweep, true) => QUICK_SWEEP_REPLICATES,
        (Command::Sweep, false) => SWEEP_REPLICATES,
        _ => 1,
    };
    let replicates = ov.replicates.or(raw.replicates).unwrap_or(default_replicates);
    if replicates == 0 {
        return Err(Error::config("replicates", "must be at least 1"));
    }

    let raw_ss = raw.ss.unwrap_or_default();
    let raw_prop = raw_ss.proposal.unwrap_or_default();
    let defaults = SsConfig::default();
    let ss = SsConfig {
        level_probability: raw_ss.level_probability.unwrap_or(defaults.level_probability),
        samples_per_level: raw_ss.samples_per_level.unwrap_or(defaults.samples_per_level),
        proposal: ProposalSpec {
            kind: raw_prop.kind.unwrap_or_default(),
            spread: raw_prop.spread.unwrap_or(Spread::Scalar(1.0)),
        },
        adapt: raw_ss.adapt.unwrap_or(defaults.adapt),
        max_levels: raw_ss.max_levels.unwrap_or(defaults.max_levels),
        retain_samples: false,
    };

    let model = match raw.model {
        Some(m) => {
            let name = m.name.unwrap_or_else(|| "linear_sum".into());
            if name != "linear_sum" {
                return Err(Error::config(
                    "model.name",
                    format!("unknown model `{name}`; available: linear_sum"),
                ));
            }
            let dim = m
                .dim
                .ok_or_else(|| Error::config("model.dim", "missing"))?;
            if dim == 0 {
                return Err(Error::config("model.dim", "must be at least 1"));
            }
            Some(ModelConfig { name, dim })
        }
        None if command == Command::Selftest => None,
        None => return Err(Error::config("model", "missing [model] table")),
    };

    if let Some(m) = &model {
        ss.validate(m.dim).map_err(|e| match e {
            Error::Config { field, message } => Error::config(format!("ss.{field}"), message),
            other => other,
        })?;
    }

    let (y_star, p_target) = match (raw.y_star, raw.p_target) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "y_star",
                "give either y_star or p_target, not both",
            ))
        }
        (Some(y), None) => (Some(finite("y_star", y)?), None),
        (None, Some(p)) => {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::config("p_target", format!("must lie in (0, 1), got {p}")));
            }
            let dim = model.as_ref().map_or(1, |m| m.dim);
            (Some(threshold_for_probability(dim, p)?), Some(p))
        }
        (None, None) => (None, None),
    };
    match command {
        Command::Estimate | Command::Trace if y_star.is_none() => {
            return Err(Error::config(
                "y_star",
                format!("`{}` needs y_star or p_target", command.name()),
            ))
        }
        Command::Sweep if y_star.is_some() => {
            return Err(Error::config(
                "y_star",
                "sweep takes its thresholds from the [sweep] table",
            ))
        }
        _ => {}
    }

    let method = raw.method.unwrap_or_default();
    if raw.dmc_samples == Some(0) {
        return Err(Error::config("dmc_samples", "must be at least 1"));
    }
    if command == Command::Estimate && method == Method::Dmc && raw.dmc_samples.is_none() {
        return Err(Error::config("dmc_samples", "required when method = \"dmc\""));
    }

    let sweep = match (command, &model) {
        (Command::Sweep, Some(m)) => {
            Some(resolve_sweep(raw.sweep.unwrap_or_default(), m.dim, replicates, &ss)?)
        }
        _ => {
            if raw.sweep.is_some() && command != Command::Selftest {
                log::warn!("[sweep] table ignored by `{}`", command.name());
            }
            None
        }
    };

    Ok(RunConfig {
        command,
        seed,
        replicates,
        out_dir,
        method,
        quick,
        model,
        y_star,
        p_target,
        ss,
        dmc_samples: raw.dmc_samples,
        sweep,
    })
}

fn resolve_sweep(raw: RawSweep, dim: usize, replicates: usize, ss: &SsConfig) -> Result<SweepSpec> {
    let has_range = raw.y_min.is_some() || raw.y_max.is_some() || raw.points.is_some();
    let thresholds = match raw.thresholds {
        Some(_) if has_range => {
            return Err(Error::config(
                "sweep.thresholds",
                "give either thresholds or y_min/y_max/points, not both",
            ))
        }
        Some(t) => t,
        None => {
            let lo = raw.y_min.unwrap_or(0.0);
            let hi = raw.y_max.unwrap_or(200.0);
            let points = raw.points.unwrap_or(41);
            if hi < lo {
                return Err(Error::config(
                    "sweep.y_max",
                    format!("must not be below y_min; got y_min={lo}, y_max={hi}"),
                ));
            }
            SweepSpec::evenly_spaced(lo, hi, points)
        }
    };
    for &y in &thresholds {
        finite("sweep.thresholds", y)?;
    }
    let dmc_budget = match raw.dmc_budget {
        None => DmcBudget::MatchSs,
        Some(RawBudget::Named(s)) if s == MATCH_SS => DmcBudget::MatchSs,
        Some(RawBudget::Named(s)) => {
            return Err(Error::config(
                "sweep.dmc_budget",
                format!("expected \"{MATCH_SS}\" or a sample count, got \"{s}\""),
            ))
        }
        Some(RawBudget::Fixed(0)) => {
            return Err(Error::config("sweep.dmc_budget", "sample count must be positive"))
        }
        Some(RawBudget::Fixed(n)) => DmcBudget::Fixed(n),
    };
    let spec = SweepSpec {
        dim,
        thresholds,
        replicates,
        ss: ss.clone(),
        dmc_budget,
    };
    spec.validate()?;
    Ok(spec)
}
