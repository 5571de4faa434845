//! Marginal likelihoods of the four model types and grid posteriors.
//!
//! A model pairs a prior on the mean effect δ with a prior on the
//! heterogeneity τ; a point mass on either parameter fixes it. The marginal
//! likelihood `∫∫ L(δ, τ) g(δ) h(τ) dδ dτ` collapses to a closed form, a 1D
//! or a nested 2D integral depending on which parameters are free.
//!
//! Integration runs over the central `1 − 2·tail_mass` prior interval of each
//! free parameter (exact bounds for uniform priors), widened within the
//! support to wherever the likelihood is not negligible. The inner δ integral
//! exploits that the likelihood at fixed τ is Gaussian in δ, which gives
//! exact breakpoints around the likelihood peak.

use serde::{Deserialize, Serialize};

use crate::distributions::PriorSpec;
use crate::error::{Error, Result};
use crate::meta_core::{loglik_random, Comparison, DeltaSlice};
use crate::quadrature::{log_integrate, QuadConfig};

/// The four qualitative hypotheses, identified by which parameters are
/// fixed by point masses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelType {
    /// δ = 0, τ = 0
    #[serde(rename = "fixed_H0")]
    FixedNull,
    /// δ free, τ = 0
    #[serde(rename = "fixed_H1")]
    FixedAlternative,
    /// δ = 0, τ free
    #[serde(rename = "random_H0")]
    RandomNull,
    /// δ free, τ free
    #[serde(rename = "random_H1")]
    RandomAlternative,
}

impl ModelType {
    pub const ALL: [ModelType; 4] = [
        ModelType::FixedNull,
        ModelType::FixedAlternative,
        ModelType::RandomNull,
        ModelType::RandomAlternative,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ModelType::FixedNull => "fixed_H0",
            ModelType::FixedAlternative => "fixed_H1",
            ModelType::RandomNull => "random_H0",
            ModelType::RandomAlternative => "random_H1",
        }
    }

    pub fn has_effect(self) -> bool {
        matches!(self, ModelType::FixedAlternative | ModelType::RandomAlternative)
    }

    pub fn has_heterogeneity(self) -> bool {
        matches!(self, ModelType::RandomNull | ModelType::RandomAlternative)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// One model: priors on δ and τ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub name: String,
    pub delta_prior: PriorSpec,
    pub tau_prior: PriorSpec,
}

impl ModelSpec {
    pub fn new(name: impl Into<String>, delta_prior: PriorSpec, tau_prior: PriorSpec) -> Result<Self> {
        let m = Self { name: name.into(), delta_prior, tau_prior };
        m.validate()?;
        Ok(m)
    }

    /// Builds a model of the given type, replacing fixed parameters by
    /// point masses at zero. The prior of a fixed parameter is ignored.
    pub fn of_type(kind: ModelType, delta_prior: PriorSpec, tau_prior: PriorSpec) -> Result<Self> {
        let zero = PriorSpec::PointMass { value: 0.0 };
        let d = if kind.has_effect() { delta_prior } else { zero };
        let t = if kind.has_heterogeneity() { tau_prior } else { zero };
        Self::new(kind.label(), d, t)
    }

    pub fn validate(&self) -> Result<()> {
        self.delta_prior.validate()?;
        self.tau_prior.validate()?;
        let (lo, _) = self.tau_prior.support_bounds();
        if lo < 0.0 {
            return Err(Error::ParameterDomain(format!(
                "τ prior {} must have non-negative support",
                self.tau_prior
            )));
        }
        Ok(())
    }

    pub fn model_type(&self) -> ModelType {
        match (self.delta_prior.is_point_mass(), self.tau_prior.is_point_mass()) {
            (true, true) => ModelType::FixedNull,
            (false, true) => ModelType::FixedAlternative,
            (true, false) => ModelType::RandomNull,
            (false, false) => ModelType::RandomAlternative,
        }
    }
}

/// Numerical settings for marginal likelihoods and grid posteriors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalSettings {
    /// Outer (or only) integral.
    pub quad: QuadConfig,
    /// Inner δ integral of the 2D case.
    pub inner: QuadConfig,
    /// Prior mass excluded from each tail of the integration range.
    pub tail_mass: f64,
    /// Grid points per free dimension for posterior summaries.
    pub grid_points: usize,
}

impl Default for MarginalSettings {
    fn default() -> Self {
        Self {
            quad: QuadConfig { rel_tol: 1e-8, max_intervals: 4000 },
            inner: QuadConfig { rel_tol: 1e-10, max_intervals: 4000 },
            tail_mass: 1e-7,
            grid_points: 2048,
        }
    }
}

impl MarginalSettings {
    /// Settings with both quadrature tolerances scaled from `tol`.
    pub fn with_tolerance(tol: f64) -> Self {
        let mut s = Self::default();
        s.quad.rel_tol = tol;
        s.inner.rel_tol = (tol * 1e-2).max(1e-13);
        s
    }
}

/// Integration range and breakpoints for one free parameter.
#[derive(Debug, Clone)]
struct Axis {
    prior: PriorSpec,
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
}

impl Axis {
    fn new(prior: PriorSpec, tail: f64) -> Result<Self> {
        let (lo, hi) = match prior {
            PriorSpec::Uniform { lower, upper } => (lower, upper),
            _ => {
                let (s_lo, s_hi) = prior.support_bounds();
                (prior.quantile(tail)?.max(s_lo), prior.quantile(1.0 - tail)?.min(s_hi))
            }
        };
        let mut breaks = Vec::new();
        if !matches!(prior, PriorSpec::Uniform { .. }) {
            for p in [1e-3, 0.5, 1.0 - 1e-3] {
                breaks.push(prior.quantile(p)?);
            }
        }
        Ok(Self { prior, lo, hi, breaks })
    }

    /// Extends the range to `[lo, hi]` within the prior's support, so mass
    /// the data pull into a prior tail is not cut off.
    fn widen(&mut self, lo: f64, hi: f64) {
        let (s_lo, s_hi) = self.prior.support_bounds();
        self.lo = self.lo.min(lo).max(s_lo);
        self.hi = self.hi.max(hi).min(s_hi);
    }
}

/// Likelihood widths beyond which nothing is integrated.
const DATA_REACH: f64 = 40.0;

/// Everything needed to integrate one model against one comparison.
struct Evaluator<'a> {
    comparison: &'a Comparison,
    settings: MarginalSettings,
    delta: Option<Axis>,
    tau: Option<Axis>,
    delta_point: f64,
    tau_point: f64,
}

impl<'a> Evaluator<'a> {
    fn new(model: &ModelSpec, comparison: &'a Comparison, settings: &MarginalSettings) -> Result<Self> {
        model.validate()?;
        let (delta, delta_point) = match model.delta_prior {
            PriorSpec::PointMass { value } => (None, value),
            p => {
                let mut axis = Axis::new(p, settings.tail_mass)?;
                let (y_lo, y_hi, max_se) = data_extent(comparison);
                axis.widen(y_lo - DATA_REACH * max_se, y_hi + DATA_REACH * max_se);
                (Some(axis), f64::NAN)
            }
        };
        let (tau, tau_point) = match model.tau_prior {
            PriorSpec::PointMass { value } => (None, value),
            p => {
                let mut axis = Axis::new(p, settings.tail_mass)?;
                axis.breaks.extend(tau_data_breaks(comparison));
                axis.widen(0.0, crate::reml::tau_max(comparison));
                (Some(axis), f64::NAN)
            }
        };
        Ok(Self { comparison, settings: *settings, delta, tau, delta_point, tau_point })
    }

    /// `ln ∫ L(δ, τ) g(δ) dδ` at fixed τ.
    fn log_delta_integral(&self, tau: f64, cfg: &QuadConfig) -> Result<f64> {
        let slice = DeltaSlice::at(tau, self.comparison);
        match &self.delta {
            None => Ok(slice.eval(self.delta_point)),
            Some(axis) => {
                let sd = slice.precision.sqrt().recip();
                let mut breaks = axis.breaks.clone();
                for m in [-8.0, -3.0, -1.0, 0.0, 1.0, 3.0, 8.0] {
                    breaks.push(slice.mean + m * sd);
                }
                let prior = axis.prior;
                let (s_lo, s_hi) = prior.support_bounds();
                let lo = axis.lo.min(slice.mean - DATA_REACH * sd).max(s_lo);
                let hi = axis.hi.max(slice.mean + DATA_REACH * sd).min(s_hi);
                let r = log_integrate(
                    |d| slice.eval(d) + prior.log_pdf_unchecked(d),
                    lo,
                    hi,
                    &breaks,
                    cfg,
                )?;
                Ok(r.log_value)
            }
        }
    }

    /// `ln ∫ L(δ, τ) h(τ) dτ` at fixed δ.
    fn log_tau_integral(&self, delta: f64, cfg: &QuadConfig) -> Result<f64> {
        match &self.tau {
            None => Ok(loglik_random(delta, self.tau_point, self.comparison)),
            Some(axis) => {
                let prior = axis.prior;
                let c = self.comparison;
                let r = log_integrate(
                    |t| loglik_random(delta, t, c) + prior.log_pdf_unchecked(t),
                    axis.lo,
                    axis.hi,
                    &axis.breaks,
                    cfg,
                )?;
                Ok(r.log_value)
            }
        }
    }

    fn log_marginal(&self) -> Result<f64> {
        let s = &self.settings;
        match &self.tau {
            None => self.log_delta_integral(self.tau_point, &s.quad),
            Some(axis) => {
                if self.delta.is_none() {
                    return self.log_tau_integral(self.delta_point, &s.quad);
                }
                let prior = axis.prior;
                let mut failure: Option<Error> = None;
                let r = log_integrate(
                    |t| match self.log_delta_integral(t, &s.inner) {
                        Ok(v) => v + prior.log_pdf_unchecked(t),
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NAN
                        }
                    },
                    axis.lo,
                    axis.hi,
                    &axis.breaks,
                    &s.quad,
                );
                if let Some(e) = failure {
                    return Err(e);
                }
                Ok(r?.log_value)
            }
        }
    }

    /// Unnormalized log posterior density of one free parameter.
    fn log_posterior(&self, parameter: Parameter, x: f64) -> Result<f64> {
        let cfg = &self.settings.quad;
        match parameter {
            Parameter::Delta => {
                let axis = self.delta.as_ref().expect("checked free");
                let lp = axis.prior.log_pdf_unchecked(x);
                if lp == f64::NEG_INFINITY {
                    return Ok(lp);
                }
                Ok(lp + self.log_tau_integral(x, cfg)?)
            }
            Parameter::Tau => {
                let axis = self.tau.as_ref().expect("checked free");
                let lp = axis.prior.log_pdf_unchecked(x);
                if lp == f64::NEG_INFINITY {
                    return Ok(lp);
                }
                Ok(lp + self.log_delta_integral(x, cfg)?)
            }
        }
    }
}

/// Characteristic τ values of the data, used as extra breakpoints.
fn tau_data_breaks(c: &Comparison) -> Vec<f64> {
    let mut ses: Vec<f64> = c.studies().iter().map(|s| s.se).collect();
    ses.sort_by(f64::total_cmp);
    let se = ses[ses.len() / 2];
    let (spread, _) = spread_and_center(c);
    let mut v: Vec<f64> = [0.1, 0.3, 1.0, 3.0].iter().map(|m| m * se).collect();
    if spread > 0.0 {
        v.push(spread);
    }
    v
}

/// Smallest and largest effect, and the largest standard error.
fn data_extent(c: &Comparison) -> (f64, f64, f64) {
    c.studies().iter().fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, se), s| {
        (lo.min(s.effect), hi.max(s.effect), se.max(s.se))
    })
}

fn spread_and_center(c: &Comparison) -> (f64, f64) {
    let n = c.len() as f64;
    let mean = c.studies().iter().map(|s| s.effect).sum::<f64>() / n;
    let var = c.studies().iter().map(|s| (s.effect - mean).powi(2)).sum::<f64>() / n;
    (var.sqrt(), mean)
}

/// Log marginal likelihood of `model` with default settings.
pub fn log_marginal(model: &ModelSpec, comparison: &Comparison) -> Result<f64> {
    log_marginal_with(model, comparison, &MarginalSettings::default())
}

pub fn log_marginal_with(
    model: &ModelSpec,
    comparison: &Comparison,
    settings: &MarginalSettings,
) -> Result<f64> {
    let v = Evaluator::new(model, comparison, settings)?.log_marginal()?;
    if v.is_nan() || v == f64::INFINITY {
        return Err(Error::NumericDomain(format!("log marginal of {} is {v}", model.name)));
    }
    Ok(v)
}

/// Which parameter a posterior summary refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameter {
    Delta,
    Tau,
}

/// Posterior point and interval summaries computed on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    /// Lower end of the central 95% credible interval.
    pub ci_lower: f64,
    /// Upper end of the central 95% credible interval.
    pub ci_upper: f64,
    /// `(value, normalized density)` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub grid: Vec<(f64, f64)>,
}

/// A normalized density tabulated on increasing abscissae.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    pub x: Vec<f64>,
    pub density: Vec<f64>,
}

impl GridDensity {
    /// Normalizes unnormalized log densities with the trapezoid rule.
    fn from_log(x: Vec<f64>, log_density: &[f64]) -> Result<Self> {
        let max = log_density.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::DegenerateEvidence);
        }
        let raw: Vec<f64> = log_density.iter().map(|l| (l - max).exp()).collect();
        let total = trapezoid(&x, &raw);
        Ok(Self { density: raw.iter().map(|v| v / total).collect(), x })
    }

    pub(crate) fn cdf(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.x.len());
        let mut acc = 0.0;
        out.push(0.0);
        for i in 1..self.x.len() {
            acc += 0.5 * (self.density[i] + self.density[i - 1]) * (self.x[i] - self.x[i - 1]);
            out.push(acc);
        }
        out
    }

    /// Quantile consistent with a piecewise-linear density.
    pub(crate) fn quantile(&self, cdf: &[f64], p: f64) -> f64 {
        let total = *cdf.last().expect("non-empty grid");
        let target = p * total;
        let i = cdf.partition_point(|&c| c < target).clamp(1, cdf.len() - 1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let (f0, f1) = (self.density[i - 1], self.density[i]);
        let h = x1 - x0;
        let need = target - cdf[i - 1];
        // Solve f0·t + (f1 − f0)·t²/(2h) = need for t in [0, h].
        let a = (f1 - f0) / (2.0 * h);
        let t = if a.abs() < 1e-300 || a.abs() * h < 1e-12 * f0.max(f1) {
            if f0 > 0.0 {
                need / f0
            } else {
                h * 0.5
            }
        } else {
            let disc = (f0 * f0 + 4.0 * a * need).max(0.0);
            (2.0 * need) / (f0 + disc.sqrt())
        };
        x0 + t.clamp(0.0, h)
    }

    /// Cumulative probability at `x` under the piecewise-linear density.
    pub(crate) fn cdf_at(&self, cdf: &[f64], x: f64) -> f64 {
        let n = self.x.len();
        if x <= self.x[0] {
            return 0.0;
        }
        if x >= self.x[n - 1] {
            return cdf[n - 1];
        }
        let i = self.x.partition_point(|&v| v <= x).clamp(1, n - 1);
        let (x0, x1) = (self.x[i - 1], self.x[i]);
        let (f0, f1) = (self.density[i - 1], self.density[i]);
        let t = x - x0;
        cdf[i - 1] + f0 * t + 0.5 * (f1 - f0) / (x1 - x0) * t * t
    }

    pub fn summary(&self) -> PosteriorSummary {
        let mean = trapezoid_weighted(&self.x, &self.density, |x| x);
        let var = trapezoid_weighted(&self.x, &self.density, |x| (x - mean) * (x - mean));
        let cdf = self.cdf();
        PosteriorSummary {
            mean,
            median: self.quantile(&cdf, 0.5),
            sd: var.max(0.0).sqrt(),
            ci_lower: self.quantile(&cdf, 0.025),
            ci_upper: self.quantile(&cdf, 0.975),
            grid: self.x.iter().copied().zip(self.density.iter().copied()).collect(),
        }
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    (1..x.len()).map(|i| 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1])).sum()
}

fn trapezoid_weighted<F: Fn(f64) -> f64>(x: &[f64], y: &[f64], g: F) -> f64 {
    (1..x.len())
        .map(|i| 0.5 * (y[i] * g(x[i]) + y[i - 1] * g(x[i - 1])) * (x[i] - x[i - 1]))
        .sum()
}

/// How grid points are spaced.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Spacing {
    Linear,
    /// Uniform in `ln(x − lo + kappa)`, dense near the lower bound; used for τ.
    LogShifted { kappa: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct GridRange {
    lo: f64,
    hi: f64,
    spacing: Spacing,
    /// Lower bound that anchors log spacing.
    anchor: f64,
}

impl GridRange {
    fn points(&self, n: usize) -> Vec<f64> {
        let n = n.max(3);
        match self.spacing {
            Spacing::Linear => {
                (0..n).map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64).collect()
            }
            Spacing::LogShifted { kappa } => {
                let u0 = (self.lo - self.anchor + kappa).ln();
                let u1 = (self.hi - self.anchor + kappa).ln();
                (0..n)
                    .map(|i| {
                        let u = u0 + (u1 - u0) * i as f64 / (n - 1) as f64;
                        (self.anchor + u.exp() - kappa).clamp(self.lo, self.hi)
                    })
                    .collect()
            }
        }
    }

    fn union(&self, other: &GridRange) -> GridRange {
        GridRange { lo: self.lo.min(other.lo), hi: self.hi.max(other.hi), ..*self }
    }
}

const COARSE_POINTS: usize = 257;
// Relative density below which the posterior is treated as negligible.
const LN_NEGLIGIBLE: f64 = -34.5;

/// Finds a grid range holding all non-negligible posterior density.
fn find_range(eval: &Evaluator<'_>, parameter: Parameter) -> Result<GridRange> {
    let (spread, center) = spread_and_center(eval.comparison);
    let max_se = eval.comparison.studies().iter().map(|s| s.se).fold(0.0, f64::max);
    let (axis, mut range) = match parameter {
        Parameter::Delta => {
            let axis = eval.delta.as_ref().ok_or_else(|| {
                Error::UnsupportedOperation("δ is fixed by a point mass in this model".into())
            })?;
            let (fixed_mean, _) = eval.comparison.weighted_mean(0.0);
            let width = 6.0 * (spread + max_se);
            let lo = (fixed_mean.min(center).min(0.0) - width).max(axis.lo);
            let hi = (fixed_mean.max(center).max(0.0) + width).min(axis.hi);
            (axis, GridRange { lo, hi, spacing: Spacing::Linear, anchor: lo })
        }
        Parameter::Tau => {
            let axis = eval.tau.as_ref().ok_or_else(|| {
                Error::UnsupportedOperation("τ is fixed by a point mass in this model".into())
            })?;
            let (s_lo, _) = axis.prior.support_bounds();
            let lo = s_lo.max(0.0);
            let hi = (lo + 4.0 * (spread + max_se)).min(axis.hi);
            let mut ses: Vec<f64> = eval.comparison.studies().iter().map(|s| s.se).collect();
            ses.sort_by(f64::total_cmp);
            let kappa = 0.05 * ses[ses.len() / 2];
            (axis, GridRange { lo, hi, spacing: Spacing::LogShifted { kappa }, anchor: lo })
        }
    };
    let (bound_lo, bound_hi) = match parameter {
        Parameter::Delta => (axis.lo, axis.hi),
        Parameter::Tau => (range.anchor, axis.hi),
    };

    for _ in 0..60 {
        let xs = range.points(COARSE_POINTS);
        let logs = xs.iter().map(|&x| eval.log_posterior(parameter, x)).collect::<Result<Vec<_>>>()?;
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = range.hi - range.lo;
        if max == f64::NEG_INFINITY {
            if range.lo <= bound_lo && range.hi >= bound_hi {
                return Err(Error::DegenerateEvidence);
            }
            range.lo = (range.lo - width).max(bound_lo);
            range.hi = (range.hi + width).min(bound_hi);
            continue;
        }
        let thresh = max + LN_NEGLIGIBLE;
        let open_lo = logs[0] > thresh && range.lo > bound_lo;
        let open_hi = logs[COARSE_POINTS - 1] > thresh && range.hi < bound_hi;
        if !open_lo && !open_hi {
            let first = logs.iter().position(|&l| l > thresh).unwrap_or(0);
            let last = logs.iter().rposition(|&l| l > thresh).unwrap_or(COARSE_POINTS - 1);
            let lo = xs[first.saturating_sub(1)];
            let hi = xs[(last + 1).min(COARSE_POINTS - 1)];
            // Keep the anchor so log spacing stays dense near τ's lower bound.
            return Ok(GridRange { lo, hi, ..range });
        }
        if open_lo {
            range.lo = (range.lo - width).max(bound_lo);
        }
        if open_hi {
            range.hi = match range.spacing {
                Spacing::Linear => (range.hi + width).min(bound_hi),
                Spacing::LogShifted { .. } => (range.hi + 3.0 * width).min(bound_hi),
            };
        }
    }
    Ok(range)
}

fn tabulate(eval: &Evaluator<'_>, parameter: Parameter, xs: &[f64]) -> Result<Vec<f64>> {
    xs.iter().map(|&x| eval.log_posterior(parameter, x)).collect()
}

/// Relative gap between trapezoid and Simpson normalization on a grid,
/// a proxy for discretization error.
fn normalization_error(xs: &[f64], logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let y: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let trap = trapezoid(xs, &y);
    // Simpson on pairs of consecutive intervals (non-uniform form).
    let mut simp = 0.0;
    let mut i = 0;
    while i + 2 < xs.len() {
        let (h0, h1) = (xs[i + 1] - xs[i], xs[i + 2] - xs[i + 1]);
        if h0 > 0.0 && h1 > 0.0 {
            let s = h0 + h1;
            simp += s / 6.0
                * (y[i] * (2.0 - h1 / h0) + y[i + 1] * s * s / (h0 * h1) + y[i + 2] * (2.0 - h0 / h1));
        }
        i += 2;
    }
    if i + 1 < xs.len() {
        simp += 0.5 * (y[i] + y[i + 1]) * (xs[i + 1] - xs[i]);
    }
    ((trap - simp) / trap).abs()
}

/// Grid posterior of `parameter` under `model`.
pub fn posterior_grid(
    model: &ModelSpec,
    comparison: &Comparison,
    parameter: Parameter,
    settings: &MarginalSettings,
) -> Result<GridDensity> {
    mixture_grid(&[(1.0, model)], comparison, parameter, settings)
}

/// Grid posterior summary of `parameter` under `model`.
pub fn posterior_summary(
    model: &ModelSpec,
    comparison: &Comparison,
    parameter: Parameter,
) -> Result<PosteriorSummary> {
    posterior_summary_with(model, comparison, parameter, &MarginalSettings::default())
}

pub fn posterior_summary_with(
    model: &ModelSpec,
    comparison: &Comparison,
    parameter: Parameter,
    settings: &MarginalSettings,
) -> Result<PosteriorSummary> {
    Ok(posterior_grid(model, comparison, parameter, settings)?.summary())
}

/// Posterior of `parameter` under a weighted mixture of models, tabulated on
/// one common grid. Weights need not be normalized.
pub fn mixture_grid(
    components: &[(f64, &ModelSpec)],
    comparison: &Comparison,
    parameter: Parameter,
    settings: &MarginalSettings,
) -> Result<GridDensity> {
    let wmax = components.iter().map(|(w, _)| *w).fold(0.0, f64::max);
    if wmax <= 0.0 {
        return Err(Error::Invalid("mixture needs a positive weight".to_string()));
    }
    let active: Vec<(f64, Evaluator<'_>)> = components
        .iter()
        .filter(|(w, _)| *w > wmax * 1e-15)
        .map(|(w, m)| Ok((*w, Evaluator::new(m, comparison, settings)?)))
        .collect::<Result<_>>()?;

    let mut range: Option<GridRange> = None;
    for (_, eval) in &active {
        let r = find_range(eval, parameter)?;
        range = Some(match range {
            None => r,
            Some(prev) => prev.union(&r),
        });
    }
    let range = range.expect("at least one component");

    let mut n = settings.grid_points;
    let mut xs = range.points(n);
    let mut tables = active
        .iter()
        .map(|(_, e)| tabulate(e, parameter, &xs))
        .collect::<Result<Vec<_>>>()?;
    if tables.iter().any(|t| normalization_error(&xs, t) > 1e-6) {
        n = 2 * n - 1;
        xs = range.points(n);
        tables = active
            .iter()
            .map(|(_, e)| tabulate(e, parameter, &xs))
            .collect::<Result<Vec<_>>>()?;
    }

    let wsum: f64 = active.iter().map(|(w, _)| w).sum();
    let mut density = vec![0.0; xs.len()];
    for ((w, _), logs) in active.iter().zip(&tables) {
        let g = GridDensity::from_log(xs.clone(), logs)?;
        for (d, v) in density.iter_mut().zip(&g.density) {
            *d += w / wsum * v;
        }
    }
    Ok(GridDensity { x: xs, density })
}
