//! Performance functions, failure domains and input standardization.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::randmath::{normal_isf, normal_ln_pdf, normal_sf, RandomStream};

type ResponseFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// The map `x -> g(x)` from a point in input space to the scalar response.
///
/// Clones share one evaluation counter, so a model handed to several
/// estimators reports the total number of `g` calls made through it.
#[derive(Clone)]
pub struct PerformanceModel {
    dim: usize,
    description: String,
    func: Arc<ResponseFn>,
    evaluations: Arc<AtomicU64>,
}

impl PerformanceModel {
    pub fn new<F>(dim: usize, description: impl Into<String>, func: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        if dim == 0 {
            return Err(Error::domain("performance model dimension must be at least 1"));
        }
        Ok(Self {
            dim,
            description: description.into(),
            func: Arc::new(func),
            evaluations: Arc::new(AtomicU64::new(0)),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    /// Evaluates `g(x)` and bumps the shared counter.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.dim, "point dimension mismatch");
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        (self.func)(x)
    }

    /// Total `g` evaluations made through this model and its clones.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }
}

impl fmt::Debug for PerformanceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PerformanceModel")
            .field("dim", &self.dim)
            .field("description", &self.description)
            .finish_non_exhaustive()
    }
}

/// `g(x) = x_1 + ... + x_d`.
pub fn linear_sum_model(dim: usize) -> Result<PerformanceModel> {
    if dim == 0 {
        return Err(Error::domain("linear_sum model needs dim >= 1"));
    }
    PerformanceModel::new(dim, format!("linear_sum(d={dim})"), |x: &[f64]| {
        x.iter().sum()
    })
}

/// Exact failure probability of the linear-sum model with i.i.d. standard
/// Gaussian inputs: `1 - Φ(y*/√d)`.
pub fn analytic_failure_probability(dim: usize, y_star: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    Ok(normal_sf(y_star / (dim as f64).sqrt()))
}

/// Critical threshold giving the linear-sum model a failure probability of
/// `p_target`: `√d · Φ⁻¹(1 - p_target)`.
pub fn threshold_for_probability(dim: usize, p_target: f64) -> Result<f64> {
    if dim == 0 {
        return Err(Error::domain("dimension must be at least 1"));
    }
    if !(p_target > 0.0 && p_target < 1.0) {
        return Err(Error::domain(format!(
            "target probability must lie in (0, 1), got {p_target}"
        )));
    }
    Ok((dim as f64).sqrt() * normal_isf(p_target)?)
}

/// One-dimensional input marginal used by the sampler: density for the
/// Metropolis ratio and a direct sampler for the unconditional level.
pub trait Marginal: Send + Sync + fmt::Debug {
    fn ln_pdf(&self, x: f64) -> f64;
    fn draw(&self, stream: &mut RandomStream) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StandardGaussian;

impl Marginal for StandardGaussian {
    fn ln_pdf(&self, x: f64) -> f64 {
        normal_ln_pdf(x)
    }

    fn draw(&self, stream: &mut RandomStream) -> f64 {
        stream.standard_normal()
    }
}

/// Joint input distribution. Only products of independent marginals are
/// supported.
#[derive(Debug, Clone, Default)]
pub enum InputModel {
    #[default]
    StandardGaussian,
    Independent(Vec<Arc<dyn Marginal>>),
}

impl InputModel {
    pub fn check_dim(&self, dim: usize) -> Result<()> {
        match self {
            InputModel::StandardGaussian => Ok(()),
            InputModel::Independent(m) if m.len() == dim => Ok(()),
            InputModel::Independent(m) => Err(Error::domain(format!(
                "input model has {} marginals but the performance model has dim {dim}",
                m.len()
            ))),
        }
    }

    /// Fills `out` with one i.i.d. draw. Coordinates are drawn in order.
    pub fn draw_into(&self, stream: &mut RandomStream, out: &mut [f64]) {
        match self {
            InputModel::StandardGaussian => {
                for v in out.iter_mut() {
                    *v = stream.standard_normal();
                }
            }
            InputModel::Independent(m) => {
                for (v, marginal) in out.iter_mut().zip(m) {
                    *v = marginal.draw(stream);
                }
            }
        }
    }

    /// `ln π_k(to) - ln π_k(from)`.
    #[inline]
    pub fn ln_ratio(&self, k: usize, to: f64, from: f64) -> f64 {
        match self {
            InputModel::StandardGaussian => 0.5 * (from * from - to * to),
            InputModel::Independent(m) => m[k].ln_pdf(to) - m[k].ln_pdf(from),
        }
    }
}

/// A performance model paired with its critical threshold `y*`.
#[derive(Debug, Clone)]
pub struct FailureSpec {
    pub model: PerformanceModel,
    pub critical_threshold: f64,
    pub inputs: InputModel,
}

impl FailureSpec {
    pub fn new(model: PerformanceModel, critical_threshold: f64) -> Self {
        Self {
            model,
            critical_threshold,
            inputs: InputModel::StandardGaussian,
        }
    }

    pub fn with_inputs(mut self, inputs: InputModel) -> Result<Self> {
        inputs.check_dim(self.model.dim())?;
        self.inputs = inputs;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.model.dim()
    }

    /// Failure is the strict exceedance `g(x) > y*`.
    pub fn is_failure(&self, s: &Sample) -> bool {
        s.response > self.critical_threshold
    }

    /// Evaluates `g` at `point` and wraps the result.
    pub fn sample_at(&self, point: Vec<f64>) -> Sample {
        let response = self.model.evaluate(&point);
        Sample { point, response }
    }
}

/// `I_F(s)` as 0 or 1.
pub fn indicator(spec: &FailureSpec, s: &Sample) -> u8 {
    u8::from(spec.is_failure(s))
}

/// A point in input space together with its cached response.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub point: Vec<f64>,
    pub response: f64,
}

/// Per-coordinate means and standard deviations of independent physical
/// inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSpec {
    means: Vec<f64>,
    std_devs: Vec<f64>,
}

impl MarginalSpec {
    pub fn new(means: Vec<f64>, std_devs: Vec<f64>) -> Result<Self> {
        if means.len() != std_devs.len() {
            return Err(Error::domain(format!(
                "{} means but {} standard deviations",
                means.len(),
                std_devs.len()
            )));
        }
        if let Some((k, s)) = std_devs
            .iter()
            .enumerate()
            .find(|(_, s)| !(**s > 0.0 && s.is_finite()))
        {
            return Err(Error::domain(format!(
                "standard deviation of coordinate {k} must be positive, got {s}"
            )));
        }
        Ok(Self { means, std_devs })
    }

    pub fn dim(&self) -> usize {
        self.means.len()
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::domain(format!(
                "vector has {} coordinates, marginals describe {}",
                x.len(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// `z_k = (x_k - μ_k) / σ_k`.
    pub fn standardize(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(x.iter()
            .zip(self.means.iter().zip(&self.std_devs))
            .map(|(x, (m, s))| (x - m) / s)
            .collect())
    }

    /// `x_k = z_k σ_k + μ_k`.
    pub fn destandardize(&self, z: &[f64]) -> Result<Vec<f64>> {
        self.check(z)?;
        Ok(z.iter()
            .zip(self.means.iter().zip(&self.std_devs))
            .map(|(z, (m, s))| z * s + m)
            .collect())
    }
}

/// Free-function form of [`MarginalSpec::standardize`].
pub fn standardize(x_physical: &[f64], marginals: &MarginalSpec) -> Result<Vec<f64>> {
    marginals.standardize(x_physical)
}

/// Mapping from physical inputs to standard-Gaussian space.
#[derive(Debug, Clone)]
pub enum InputTransform {
    Independent(MarginalSpec),
    /// Dependent inputs through a Rosenblatt transform. Not implemented.
    Rosenblatt,
    /// Dependent inputs through a Nataf transform. Not implemented.
    Nataf,
}

impl InputTransform {
    pub fn apply(&self, x_physical: &[f64]) -> Result<Vec<f64>> {
        match self {
            InputTransform::Independent(m) => m.standardize(x_physical),
            InputTransform::Rosenblatt | InputTransform::Nataf => Err(Error::domain(
                "dependent-input transforms are not supported; only independent marginals can be standardized",
            )),
        }
    }

    /// Wraps a model defined on physical inputs so it can be evaluated on
    /// standardized points.
    pub fn wrap_model(
        &self,
        description: impl Into<String>,
        physical: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Result<PerformanceModel> {
        let InputTransform::Independent(m) = self else {
            return Err(Error::domain("dependent-input transforms are not supported"));
        };
        let m = m.clone();
        let dim = m.dim();
        PerformanceModel::new(dim, description, move |z: &[f64]| {
            let x = m.destandardize(z).expect("dimension checked by the sampler");
            physical(&x)
        })
    }
}
