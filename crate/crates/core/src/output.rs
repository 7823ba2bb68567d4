//! Result files: CSV tables, a JSON summary and a JSON run manifest.
//!
//! Floats are written with 17 significant digits, which round-trips every
//! `f64`. Undefined values are empty cells. Apart from the manifest's wall
//! time, rerunning a configuration reproduces every file byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::experiments::{RunPoint, SweepRow};
use crate::runner::{EstimateOutput, RunOutput, TraceOutput};
use crate::selftest::SelftestReport;
use crate::subset::{BoundaryKind, SsEstimate};

pub const SWEEP_HEADER: [&str; 11] = [
    "y_star",
    "p_true",
    "ss_mean",
    "ss_std",
    "ss_cov",
    "ss_mean_total_samples",
    "dmc_mean",
    "dmc_cov",
    "dmc_cov_theory",
    "replicates",
    "exclusions",
];
pub const LEVELS_HEADER: [&str; 5] = [
    "level",
    "threshold",
    "n_failures",
    "acceptance_rate",
    "evaluations",
];
pub const RESPONSES_HEADER: [&str; 3] = ["level", "rank", "response"];
/// One row per replicate; `ss_mean` repeats the batch mean on every row.
pub const RUNS_HEADER: [&str; 9] = [
    "y_star",
    "p_true",
    "ss_mean",
    "replicate",
    "p_hat",
    "levels",
    "total_samples",
    "total_evaluations",
    "status",
];
/// Sample points of two-dimensional runs.
pub const SAMPLES_HEADER: [&str; 5] = ["level", "index", "x1", "x2", "response"];

pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const LEVELS_FILE: &str = "levels.csv";
pub const RESPONSES_FILE: &str = "responses.csv";
pub const RUNS_FILE: &str = "runs.csv";
pub const SAMPLES_FILE: &str = "samples.csv";
pub const SELFTEST_FILE: &str = "selftest.json";

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn cell(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

fn int_cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_csv<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(err) => Error::io(path, err),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::io(path, std::io::Error::other(e)))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_levels_csv(path: &Path, est: &SsEstimate) -> Result<()> {
    let rows = est.level_records.iter().map(|r| {
        vec![
            r.level.to_string(),
            cell(r.threshold),
            r.n_failures.to_string(),
            cell(r.acceptance_stats.and_then(|s| s.acceptance_rate())),
            r.evaluations_used.to_string(),
        ]
    });
    write_csv(path, &LEVELS_HEADER, rows)
}

pub fn write_responses_csv(path: &Path, est: &SsEstimate) -> Result<()> {
    let rows = est.level_records.iter().flat_map(|r| {
        r.sorted_responses
            .iter()
            .enumerate()
            .map(move |(i, &y)| vec![r.level.to_string(), (i + 1).to_string(), format_float(y)])
    });
    write_csv(path, &RESPONSES_HEADER, rows)
}

/// Writes the retained points of a two-dimensional run. Returns `false`
/// without writing when there are none.
pub fn write_samples_csv(path: &Path, est: &SsEstimate) -> Result<bool> {
    let two_d = est.level_records.iter().all(|r| {
        r.samples
            .as_ref()
            .is_some_and(|s| s.iter().all(|x| x.point.len() == 2))
    });
    if !two_d {
        return Ok(false);
    }
    let rows = est.level_records.iter().flat_map(|r| {
        let samples = r.samples.as_deref().unwrap_or_default();
        samples.iter().enumerate().map(move |(i, s)| {
            vec![
                r.level.to_string(),
                i.to_string(),
                format_float(s.point[0]),
                format_float(s.point[1]),
                format_float(s.response),
            ]
        })
    });
    write_csv(path, &SAMPLES_HEADER, rows)?;
    Ok(true)
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let rows = rows.iter().map(|r| {
        let ss = r.ss.p_hat;
        vec![
            format_float(r.y_star),
            format_float(r.p_true),
            cell(ss.map(|s| s.mean)),
            cell(ss.map(|s| s.std)),
            cell(ss.and_then(|s| s.cov)),
            cell(r.ss.total_samples.map(|s| s.mean)),
            cell(r.dmc.map(|s| s.mean)),
            cell(r.dmc.and_then(|s| s.cov)),
            format_float(r.dmc_cov_theory),
            r.ss.replicates.to_string(),
            r.ss.exclusions.to_string(),
        ]
    });
    write_csv(path, &SWEEP_HEADER, rows)
}

/// Per-replicate rows, each tagged with its threshold, truth and batch mean.
pub fn write_runs_csv<'a, I>(path: &Path, batches: I) -> Result<()>
where
    I: IntoIterator<Item = (f64, f64, Option<f64>, &'a [RunPoint])>,
{
    let rows = batches.into_iter().flat_map(|(y, p_true, mean, points)| {
        points.iter().map(move |pt| {
            vec![
                format_float(y),
                format_float(p_true),
                cell(mean),
                pt.replicate.to_string(),
                cell(pt.p_hat),
                int_cell(pt.levels),
                int_cell(pt.total_samples),
                int_cell(pt.total_evaluations),
                pt.status.clone(),
            ]
        })
    });
    write_csv(path, &RUNS_HEADER, rows)
}

/// Compact view of one run for `summary.json`.
#[derive(Debug, Serialize)]
struct RunDigest<'a> {
    p_hat: f64,
    levels: usize,
    thresholds: &'a [f64],
    n_failures: Vec<usize>,
    conditional_probabilities: Vec<f64>,
    boundaries: Vec<BoundaryKind>,
    tie_levels: &'a [usize],
    total_samples: u64,
    total_evaluations: u64,
}

impl<'a> RunDigest<'a> {
    fn of(est: &'a SsEstimate) -> Self {
        Self {
            p_hat: est.p_hat,
            levels: est.levels,
            thresholds: &est.thresholds,
            n_failures: est.failure_counts(),
            conditional_probabilities: est
                .level_records
                .iter()
                .filter_map(|r| r.conditional_probability)
                .collect(),
            boundaries: est.level_records.iter().skip(1).map(|r| r.boundary).collect(),
            tie_levels: &est.tie_levels,
            total_samples: est.total_samples,
            total_evaluations: est.total_evaluations,
        }
    }
}

#[derive(Serialize)]
struct EstimateSummary<'a> {
    command: &'static str,
    #[serde(flatten)]
    output: &'a EstimateOutput,
    first_run: Option<RunDigest<'a>>,
}

#[derive(Serialize)]
struct TraceSummary<'a> {
    command: &'static str,
    y_star: f64,
    p_true: f64,
    run: RunDigest<'a>,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    command: &'static str,
    rows: Vec<SweepDigest<'a>>,
}

#[derive(Serialize)]
struct SweepDigest<'a> {
    y_star: f64,
    p_true: f64,
    ss: &'a crate::experiments::RunSummary,
    dmc: Option<crate::experiments::SampleStats>,
    dmc_samples: u64,
    dmc_cov_theory: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    seed: u64,
    config: &'a RunConfig,
    /// Re-runnable with `subsim <command> --config`.
    config_toml: String,
    files: Vec<String>,
    wall_time_seconds: f64,
}

/// Writes every result file for `output` into `out_dir` and returns the
/// paths written, manifest last.
pub fn emit_results(
    output: &RunOutput,
    config: &RunConfig,
    wall_time_seconds: f64,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut written: Vec<PathBuf> = Vec::new();
    let mut put = |name: &str| {
        let p = out_dir.join(name);
        written.push(p.clone());
        p
    };
    match output {
        RunOutput::Estimate(est) => emit_estimate(est, &mut put)?,
        RunOutput::Trace(t) => emit_trace(t, &mut put)?,
        RunOutput::Sweep(rows) => emit_sweep(rows, &mut put)?,
        RunOutput::Selftest(report) => emit_selftest(report, &mut put)?,
    }
    let files = written
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: config.command.name(),
        seed: config.seed,
        config,
        config_toml: config.to_toml(),
        files,
        wall_time_seconds,
    };
    let path = out_dir.join(MANIFEST_FILE);
    write_json(&path, &manifest)?;
    written.push(path);
    Ok(written)
}

fn emit_levels(
    est: &SsEstimate,
    put: &mut impl FnMut(&str) -> PathBuf,
) -> Result<()> {
    write_levels_csv(&put(LEVELS_FILE), est)?;
    write_responses_csv(&put(RESPONSES_FILE), est)?;
    if est.level_records.iter().all(|r| r.samples.is_some()) {
        let path = put(SAMPLES_FILE);
        if !write_samples_csv(&path, est)? {
            log::debug!("no two-dimensional samples to write");
        }
    }
    Ok(())
}

fn emit_estimate(out: &EstimateOutput, put: &mut impl FnMut(&str) -> PathBuf) -> Result<()> {
    let first = out.ss.as_ref().and_then(|s| s.first.as_ref());
    write_json(
        &put(SUMMARY_FILE),
        &EstimateSummary {
            command: "estimate",
            output: out,
            first_run: first.map(RunDigest::of),
        },
    )?;
    if let Some(ss) = &out.ss {
        let mean = ss.summary.p_hat.map(|s| s.mean);
        write_runs_csv(
            &put(RUNS_FILE),
            [(out.y_star, out.p_true, mean, ss.points.as_slice())],
        )?;
    }
    if let Some(est) = first {
        emit_levels(est, put)?;
    }
    Ok(())
}

fn emit_trace(t: &TraceOutput, put: &mut impl FnMut(&str) -> PathBuf) -> Result<()> {
    write_json(
        &put(SUMMARY_FILE),
        &TraceSummary {
            command: "trace",
            y_star: t.y_star,
            p_true: t.p_true,
            run: RunDigest::of(&t.trace.estimate),
        },
    )?;
    emit_levels(&t.trace.estimate, put)
}

fn emit_sweep(rows: &[SweepRow], put: &mut impl FnMut(&str) -> PathBuf) -> Result<()> {
    write_json(
        &put(SUMMARY_FILE),
        &SweepSummary {
            command: "sweep",
            rows: rows
                .iter()
                .map(|r| SweepDigest {
                    y_star: r.y_star,
                    p_true: r.p_true,
                    ss: &r.ss,
                    dmc: r.dmc,
                    dmc_samples: r.dmc_samples,
                    dmc_cov_theory: r.dmc_cov_theory,
                })
                .collect(),
        },
    )?;
    write_sweep_csv(&put(SWEEP_FILE), rows)?;
    write_runs_csv(
        &put(RUNS_FILE),
        rows.iter()
            .map(|r| (r.y_star, r.p_true, r.ss_mean(), r.ss_runs.as_slice())),
    )
}

fn emit_selftest(report: &SelftestReport, put: &mut impl FnMut(&str) -> PathBuf) -> Result<()> {
    write_json(&put(SELFTEST_FILE), report)
}
