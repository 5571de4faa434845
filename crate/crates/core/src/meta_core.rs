//! Studies, comparisons and the fixed/random-effects likelihoods.
//!
//! Study-level true effects θᵢ never appear explicitly: under the random
//! effects model yᵢ ~ N(θᵢ, seᵢ²) with θᵢ ~ N(δ, τ²), integrating θᵢ out
//! gives yᵢ ~ N(δ, seᵢ² + τ²).

use serde::{Deserialize, Serialize};

use crate::distributions::LN_SQRT_2PI;
use crate::error::{Error, Result};

/// Two-arm summary statistics of a study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawSummary {
    pub n1: f64,
    pub mean1: f64,
    pub sd1: f64,
    pub n2: f64,
    pub mean2: f64,
    pub sd2: f64,
}

impl RawSummary {
    pub fn validate(&self) -> Result<()> {
        let all = [self.n1, self.mean1, self.sd1, self.n2, self.mean2, self.sd2];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Invalid("raw summaries must be finite".to_string()));
        }
        if self.n1 < 2.0 || self.n2 < 2.0 {
            return Err(Error::Invalid(format!(
                "arm sizes must be at least 2, got {} and {}",
                self.n1, self.n2
            )));
        }
        if self.sd1 < 0.0 || self.sd2 < 0.0 {
            return Err(Error::Invalid("arm standard deviations must be non-negative".to_string()));
        }
        if self.sd1 == 0.0 && self.sd2 == 0.0 {
            return Err(Error::DegenerateArm);
        }
        Ok(())
    }
}

/// Cohen's d and its large-sample standard error from two-arm summaries.
///
/// The pooled SD is `sqrt(((n1−1)·sd1² + (n2−1)·sd2²) / (n1 + n2 − 2))` and
/// the variance of d is `(n1+n2)/(n1·n2) + d²/(2·(n1+n2))`. No small-sample
/// (Hedges) correction is applied.
pub fn smd_from_raw(raw: &RawSummary) -> Result<(f64, f64)> {
    raw.validate()?;
    let RawSummary { n1, mean1, sd1, n2, mean2, sd2 } = *raw;
    let pooled = (((n1 - 1.0) * sd1 * sd1 + (n2 - 1.0) * sd2 * sd2) / (n1 + n2 - 2.0)).sqrt();
    let d = (mean1 - mean2) / pooled;
    let var = (n1 + n2) / (n1 * n2) + d * d / (2.0 * (n1 + n2));
    Ok((d, var.sqrt()))
}

/// One study's standardized effect size and its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Study {
    pub effect: f64,
    pub se: f64,
    #[serde(default)]
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<RawSummary>,
}

impl Study {
    pub fn new(effect: f64, se: f64) -> Result<Self> {
        Self::labeled(effect, se, "")
    }

    pub fn labeled(effect: f64, se: f64, label: impl Into<String>) -> Result<Self> {
        let study = Self { effect, se, label: label.into(), raw: None };
        study.validate()?;
        Ok(study)
    }

    /// Builds a study from raw summaries via [`smd_from_raw`].
    pub fn from_raw(raw: RawSummary, label: impl Into<String>) -> Result<Self> {
        let (effect, se) = smd_from_raw(&raw)?;
        Ok(Self { effect, se, label: label.into(), raw: Some(raw) })
    }

    pub fn validate(&self) -> Result<()> {
        if !self.effect.is_finite() {
            return Err(Error::Invalid(format!("effect must be finite, got {}", self.effect)));
        }
        if !(self.se.is_finite() && self.se > 0.0) {
            return Err(Error::Invalid(format!(
                "standard error must be positive and finite, got {}",
                self.se
            )));
        }
        if let Some(raw) = &self.raw {
            raw.validate()?;
        }
        Ok(())
    }
}

/// A set of studies addressing one outcome: the unit of meta-analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subfield: Option<String>,
    studies: Vec<Study>,
}

impl Comparison {
    pub fn new(id: impl Into<String>, studies: Vec<Study>) -> Result<Self> {
        if studies.is_empty() {
            return Err(Error::InsufficientData("a comparison needs at least one study".to_string()));
        }
        for s in &studies {
            s.validate()?;
        }
        Ok(Self { id: id.into(), subfield: None, studies })
    }

    /// Convenience constructor from parallel effect and standard-error slices.
    pub fn from_effects(id: impl Into<String>, effects: &[f64], ses: &[f64]) -> Result<Self> {
        if effects.len() != ses.len() {
            return Err(Error::Invalid(format!(
                "{} effects but {} standard errors",
                effects.len(),
                ses.len()
            )));
        }
        let studies = effects
            .iter()
            .zip(ses)
            .map(|(&y, &se)| Study::new(y, se))
            .collect::<Result<Vec<_>>>()?;
        Self::new(id, studies)
    }

    pub fn with_subfield(mut self, subfield: impl Into<String>) -> Self {
        self.subfield = Some(subfield.into());
        self
    }

    pub fn studies(&self) -> &[Study] {
        &self.studies
    }

    pub fn len(&self) -> usize {
        self.studies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.studies.is_empty()
    }

    /// The comparison restricted to the first `k` studies.
    pub fn prefix(&self, k: usize) -> Result<Self> {
        let k = k.min(self.studies.len());
        let mut c = Comparison::new(self.id.clone(), self.studies[..k].to_vec())?;
        c.subfield = self.subfield.clone();
        Ok(c)
    }

    /// The comparison with studies reordered by `order`, which must be a
    /// permutation of `0..len()`.
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let mut seen = vec![false; self.studies.len()];
        if order.len() != self.studies.len() {
            return Err(Error::Invalid("order must be a permutation of the studies".to_string()));
        }
        for &i in order {
            if i >= seen.len() || seen[i] {
                return Err(Error::Invalid("order must be a permutation of the studies".to_string()));
            }
            seen[i] = true;
        }
        Ok(Self {
            id: self.id.clone(),
            subfield: self.subfield.clone(),
            studies: order.iter().map(|&i| self.studies[i].clone()).collect(),
        })
    }

    /// Inverse-variance weighted mean and total weight at heterogeneity `tau`.
    pub fn weighted_mean(&self, tau: f64) -> (f64, f64) {
        let t2 = tau * tau;
        let (mut sw, mut swy) = (0.0, 0.0);
        for s in &self.studies {
            let w = 1.0 / (s.se * s.se + t2);
            sw += w;
            swy += w * s.effect;
        }
        (swy / sw, sw)
    }
}

/// A study record as read from a corpus, which may be non-estimable
/// (missing or non-finite effect or standard error).
#[derive(Debug, Clone, PartialEq)]
pub enum StudyRecord {
    Estimable(Study),
    NonEstimable { label: String },
}

/// A comparison as ingested from a corpus file, before estimability
/// filtering.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub id: String,
    pub subfield: Option<String>,
    pub records: Vec<StudyRecord>,
}

impl CorpusEntry {
    pub fn from_comparison(c: &Comparison) -> Self {
        Self {
            id: c.id.clone(),
            subfield: c.subfield.clone(),
            records: c.studies.iter().cloned().map(StudyRecord::Estimable).collect(),
        }
    }

    pub fn non_estimable_count(&self) -> usize {
        self.records.iter().filter(|r| matches!(r, StudyRecord::NonEstimable { .. })).count()
    }

    /// The comparison if every study is estimable.
    pub fn to_comparison(&self) -> Option<Comparison> {
        let studies: Option<Vec<Study>> = self
            .records
            .iter()
            .map(|r| match r {
                StudyRecord::Estimable(s) => Some(s.clone()),
                StudyRecord::NonEstimable { .. } => None,
            })
            .collect();
        let mut c = Comparison::new(self.id.clone(), studies?).ok()?;
        c.subfield = self.subfield.clone();
        Some(c)
    }
}

fn normal_log_density(y: f64, mean: f64, var: f64) -> f64 {
    -LN_SQRT_2PI - 0.5 * var.ln() - 0.5 * (y - mean) * (y - mean) / var
}

/// Σᵢ log N(yᵢ; δ, seᵢ²).
pub fn loglik_fixed(delta: f64, comparison: &Comparison) -> f64 {
    comparison
        .studies
        .iter()
        .map(|s| normal_log_density(s.effect, delta, s.se * s.se))
        .sum()
}

/// Σᵢ log N(yᵢ; δ, seᵢ² + τ²), with the study effects integrated out.
pub fn loglik_random(delta: f64, tau: f64, comparison: &Comparison) -> f64 {
    let t2 = tau * tau;
    comparison
        .studies
        .iter()
        .map(|s| normal_log_density(s.effect, delta, s.se * s.se + t2))
        .sum()
}

/// The random-effects log likelihood at fixed τ, written as a Gaussian in δ:
/// `ℓ(δ) = log_peak − ½·precision·(δ − mean)²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct DeltaSlice {
    pub log_peak: f64,
    pub mean: f64,
    pub precision: f64,
}

impl DeltaSlice {
    pub fn at(tau: f64, comparison: &Comparison) -> Self {
        let (mean, precision) = comparison.weighted_mean(tau);
        let t2 = tau * tau;
        let log_peak = comparison
            .studies
            .iter()
            .map(|s| normal_log_density(s.effect, mean, s.se * s.se + t2))
            .sum();
        Self { log_peak, mean, precision }
    }

    #[inline]
    pub fn eval(&self, delta: f64) -> f64 {
        let d = delta - self.mean;
        self.log_peak - 0.5 * self.precision * d * d
    }
}
