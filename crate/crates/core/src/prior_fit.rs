//! Empirical prior fitting from a training corpus.
//!
//! Comparisons with too few studies or with any non-estimable study are
//! dropped, the rest are re-estimated by REML, and candidate δ and τ priors
//! are fitted to the resulting point estimates by maximum likelihood.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::{fit_mle_with, FitFamily, FitOptions, PriorSpec};
use crate::error::{Error, Result};
use crate::meta_core::CorpusEntry;
use crate::reml::reml_fit;

/// Counts describing how a training set was derived from a corpus.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub min_studies: usize,
    pub tau_floor: f64,
    pub input_comparisons: usize,
    pub input_studies: usize,
    pub dropped_non_estimable: usize,
    pub dropped_too_few_studies: usize,
    pub dropped_reml_failure: usize,
    pub retained_comparisons: usize,
    pub retained_studies: usize,
    pub delta_estimates: usize,
    pub tau_estimates: usize,
    pub tau_below_floor: usize,
}

impl Provenance {
    pub fn dropped(&self) -> usize {
        self.dropped_non_estimable + self.dropped_too_few_studies + self.dropped_reml_failure
    }
}

/// REML estimates of one retained comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingEstimate {
    pub id: String,
    pub delta_hat: f64,
    pub tau_hat: f64,
}

/// Point estimates used to fit candidate priors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    pub estimates: Vec<TrainingEstimate>,
    /// δ̂ of every retained comparison.
    pub delta: Vec<f64>,
    /// τ̂ of retained comparisons with τ̂ at or above the floor.
    pub tau: Vec<f64>,
    pub provenance: Provenance,
}

/// Filters a corpus and re-estimates the retained comparisons by REML.
pub fn prepare_training(corpus: &[CorpusEntry], min_studies: usize, tau_floor: f64) -> Result<TrainingSet> {
    if min_studies < 2 {
        return Err(Error::Invalid(format!("min_studies must be at least 2, got {min_studies}")));
    }
    if !(tau_floor.is_finite() && tau_floor >= 0.0) {
        return Err(Error::Invalid(format!("tau_floor must be non-negative, got {tau_floor}")));
    }
    let mut prov = Provenance {
        min_studies,
        tau_floor,
        input_comparisons: corpus.len(),
        input_studies: corpus.iter().map(|e| e.records.len()).sum(),
        ..Provenance::default()
    };

    enum Outcome {
        NonEstimable,
        TooFew,
        Failed,
        Fit(TrainingEstimate, usize),
    }
    let outcomes: Vec<Outcome> = corpus
        .par_iter()
        .map(|entry| {
            if entry.non_estimable_count() > 0 {
                return Outcome::NonEstimable;
            }
            if entry.records.len() < min_studies {
                return Outcome::TooFew;
            }
            let Some(c) = entry.to_comparison() else {
                return Outcome::NonEstimable;
            };
            match reml_fit(&c) {
                Ok(f) => Outcome::Fit(
                    TrainingEstimate { id: entry.id.clone(), delta_hat: f.delta_hat, tau_hat: f.tau_hat },
                    c.len(),
                ),
                Err(e) => {
                    log::warn!("REML failed for comparison {}: {e}", entry.id);
                    Outcome::Failed
                }
            }
        })
        .collect();

    let mut estimates = Vec::new();
    for o in outcomes {
        match o {
            Outcome::NonEstimable => prov.dropped_non_estimable += 1,
            Outcome::TooFew => prov.dropped_too_few_studies += 1,
            Outcome::Failed => prov.dropped_reml_failure += 1,
            Outcome::Fit(est, k) => {
                prov.retained_comparisons += 1;
                prov.retained_studies += k;
                estimates.push(est);
            }
        }
    }
    if estimates.is_empty() {
        return Err(Error::EmptyTraining(format!(
            "no comparison with at least {min_studies} estimable studies among {}",
            corpus.len()
        )));
    }
    let delta: Vec<f64> = estimates.iter().map(|e| e.delta_hat).collect();
    let tau: Vec<f64> = estimates.iter().map(|e| e.tau_hat).filter(|&t| t >= tau_floor).collect();
    prov.delta_estimates = delta.len();
    prov.tau_estimates = tau.len();
    prov.tau_below_floor = delta.len() - tau.len();
    Ok(TrainingSet { estimates, delta, tau, provenance: prov })
}

/// Candidate priors in the canonical layout: δ priors are the default
/// Cauchy, a normal and a Student-t; τ priors are the default uniform, a
/// half-normal, an inverse-gamma and a gamma.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePriorSet {
    pub delta_priors: Vec<PriorSpec>,
    pub tau_priors: Vec<PriorSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Provenance>,
}

impl CandidatePriorSet {
    pub fn new(delta_priors: Vec<PriorSpec>, tau_priors: Vec<PriorSpec>) -> Result<Self> {
        if delta_priors.is_empty() || tau_priors.is_empty() {
            return Err(Error::Invalid("candidate prior lists must be non-empty".to_string()));
        }
        for p in delta_priors.iter().chain(&tau_priors) {
            p.validate()?;
        }
        for t in &tau_priors {
            if t.support_bounds().0 < 0.0 {
                return Err(Error::ParameterDomain(format!("τ prior {t} must have non-negative support")));
            }
        }
        Ok(Self { delta_priors, tau_priors, provenance: None })
    }

    /// The candidate set fitted to the full reference training corpus.
    pub fn reference() -> Self {
        let (d, t) = default_priors();
        Self {
            delta_priors: vec![
                d,
                PriorSpec::Normal { mean: 0.0, sd: 0.56 },
                PriorSpec::StudentT { location: 0.0, scale: 0.33, df: 3.0 },
            ],
            tau_priors: vec![
                t,
                PriorSpec::HalfNormal { sd: 0.57 },
                PriorSpec::InverseGamma { shape: 1.26, scale: 0.24 },
                PriorSpec::Gamma { shape: 1.59, scale: 0.26 },
            ],
            provenance: None,
        }
    }
}

/// The default priors that are never fitted: Cauchy(0, 1/√2) for δ and
/// Uniform(0, 1) for τ.
pub fn default_priors() -> (PriorSpec, PriorSpec) {
    (
        PriorSpec::Cauchy { location: 0.0, scale: std::f64::consts::FRAC_1_SQRT_2 },
        PriorSpec::Uniform { lower: 0.0, upper: 1.0 },
    )
}

/// Fits the candidate set to a training set with location fixed at zero.
pub fn fit_candidates(training: &TrainingSet) -> Result<CandidatePriorSet> {
    let mut set = fit_candidates_with(&training.delta, &training.tau, &FitOptions::default())?;
    set.provenance = Some(training.provenance);
    Ok(set)
}

pub fn fit_candidates_with(delta: &[f64], tau: &[f64], options: &FitOptions) -> Result<CandidatePriorSet> {
    if delta.is_empty() || tau.is_empty() {
        return Err(Error::EmptyTraining("fitting needs δ and τ estimates".to_string()));
    }
    let (d0, t0) = default_priors();
    let delta_priors = vec![
        d0,
        fit_mle_with(FitFamily::Normal, delta, options)?,
        fit_mle_with(FitFamily::StudentT, delta, options)?,
    ];
    let tau_priors = vec![
        t0,
        fit_mle_with(FitFamily::HalfNormal, tau, options)?,
        fit_mle_with(FitFamily::InverseGamma, tau, options)?,
        fit_mle_with(FitFamily::Gamma, tau, options)?,
    ];
    Ok(CandidatePriorSet { delta_priors, tau_priors, provenance: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::meta_core::{Comparison, StudyRecord};

    fn entry(id: &str, ys: &[f64]) -> CorpusEntry {
        let se = vec![0.2; ys.len()];
        CorpusEntry::from_comparison(&Comparison::from_effects(id, ys, &se).unwrap())
    }

    fn spread(k: usize, scale: f64) -> Vec<f64> {
        (0..k).map(|i| scale * ((i as f64 * 1.7).sin())).collect()
    }

    #[test]
    fn study_count_threshold() {
        let corpus: Vec<_> = [3, 9, 10, 12, 15].iter().enumerate().map(|(i, &k)| entry(&i.to_string(), &spread(k, 0.5))).collect();
        let t = prepare_training(&corpus, 10, 0.01).unwrap();
        assert_eq!(t.provenance.retained_comparisons, 3);
        assert_eq!(t.provenance.dropped_too_few_studies, 2);
        assert_eq!(t.provenance.retained_comparisons + t.provenance.dropped(), 5);
        assert_eq!(t.provenance.input_studies, 49);
    }

    #[test]
    fn non_estimable_drops_comparison() {
        let mut e = entry("a", &spread(12, 0.5));
        e.records.push(StudyRecord::NonEstimable { label: "x".into() });
        let corpus = vec![e, entry("b", &spread(12, 0.5))];
        let t = prepare_training(&corpus, 10, 0.01).unwrap();
        assert_eq!(t.provenance.dropped_non_estimable, 1);
        assert_eq!(t.estimates.len(), 1);
    }

    #[test]
    fn tau_floor_only_filters_tau() {
        let corpus = vec![entry("a", &[0.3; 10]), entry("b", &spread(10, 1.0))];
        let t = prepare_training(&corpus, 10, 0.01).unwrap();
        assert_eq!(t.delta.len(), 2);
        assert_eq!(t.tau.len(), 1);
        assert_eq!(t.provenance.tau_below_floor, 1);
    }

    #[test]
    fn empty_training() {
        let corpus = vec![entry("a", &spread(5, 1.0))];
        assert!(matches!(prepare_training(&corpus, 10, 0.01), Err(Error::EmptyTraining(_))));
    }

    #[test]
    fn candidate_layout() {
        let delta: Vec<f64> = spread(200, 0.8);
        let tau: Vec<f64> = (0..200).map(|i| 0.05 + 0.3 * ((i as f64 * 0.37).sin().abs())).collect();
        let set = fit_candidates_with(&delta, &tau, &FitOptions::default()).unwrap();
        let names: Vec<_> = set.delta_priors.iter().chain(&set.tau_priors).map(|p| p.family_name()).collect();
        assert_eq!(names, ["cauchy", "normal", "t", "uniform", "halfnormal", "invgamma", "gamma"]);
    }

    #[test]
    fn single_tau_estimate_is_degenerate() {
        let err = fit_candidates_with(&[0.1, 0.4, -0.2], &[0.3], &FitOptions::default()).unwrap_err();
        assert!(matches!(err, Error::DegenerateData(_)));
    }
}
