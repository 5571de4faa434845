//! Model ensembles, posterior model probabilities and inclusion Bayes factors.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::PriorSpec;
use crate::error::{Error, Result};
use crate::marginal::{
    log_marginal_with, mixture_grid, posterior_summary_with, GridDensity, MarginalSettings,
    ModelSpec, ModelType, Parameter, PosteriorSummary,
};
use crate::meta_core::Comparison;
use crate::quadrature::log_sum_exp;

/// A model together with its prior probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub model: ModelSpec,
    pub prior_prob: f64,
}

/// A set of competing models with prior probabilities summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEnsemble {
    members: Vec<EnsembleMember>,
}

impl ModelEnsemble {
    pub fn new(members: Vec<(ModelSpec, f64)>) -> Result<Self> {
        if members.len() < 2 {
            return Err(Error::InvalidEnsemble(format!(
                "an ensemble needs at least 2 members, got {}",
                members.len()
            )));
        }
        let mut total = 0.0;
        for (m, p) in &members {
            m.validate()?;
            if !(p.is_finite() && *p > 0.0) {
                return Err(Error::InvalidEnsemble(format!("prior probability of {} is {p}", m.name)));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidEnsemble(format!("prior probabilities sum to {total}")));
        }
        Ok(Self {
            members: members
                .into_iter()
                .map(|(model, prior_prob)| EnsembleMember { model, prior_prob })
                .collect(),
        })
    }

    /// Builds an ensemble from positive weights, normalizing them.
    pub fn from_weights(members: Vec<(ModelSpec, f64)>) -> Result<Self> {
        let total: f64 = members.iter().map(|(_, w)| w).sum();
        if !(total.is_finite() && total > 0.0) {
            return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
        }
        Self::new(members.into_iter().map(|(m, w)| (m, w / total)).collect())
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn prior_probs(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.prior_prob).collect()
    }

    pub fn model_types(&self) -> Vec<ModelType> {
        self.members.iter().map(|m| m.model.model_type()).collect()
    }
}

/// How prior probability is spread over the members of a standard ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    /// One quarter per model type, split evenly within each type.
    FourType,
    /// Equal probability for every member.
    Flat,
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "four-type" => Ok(Scheme::FourType),
            "flat" => Ok(Scheme::Flat),
            other => Err(Error::Invalid(format!("unknown scheme `{other}`, expected four-type or flat"))),
        }
    }
}

fn member_name(kind: ModelType, d: Option<&PriorSpec>, t: Option<&PriorSpec>, plain: bool) -> String {
    if plain {
        return kind.label().to_string();
    }
    match (d, t) {
        (Some(d), Some(t)) => format!("{} delta={d} tau={t}", kind.label()),
        (Some(d), None) => format!("{} delta={d}", kind.label()),
        (None, Some(t)) => format!("{} tau={t}", kind.label()),
        (None, None) => kind.label().to_string(),
    }
}

/// All members of the four-type ensemble in canonical order: fixed_H0, then
/// fixed_H1 per δ-prior, random_H0 per τ-prior, and random_H1 per
/// (δ-prior, τ-prior) pair with δ varying slowest.
fn standard_members(delta_priors: &[PriorSpec], tau_priors: &[PriorSpec]) -> Result<Vec<ModelSpec>> {
    if delta_priors.is_empty() || tau_priors.is_empty() {
        return Err(Error::InvalidEnsemble("prior lists must be non-empty".to_string()));
    }
    let plain = delta_priors.len() == 1 && tau_priors.len() == 1;
    let zero = PriorSpec::PointMass { value: 0.0 };
    let mut out = vec![ModelSpec::new(member_name(ModelType::FixedNull, None, None, plain), zero, zero)?];
    for d in delta_priors {
        out.push(ModelSpec::new(member_name(ModelType::FixedAlternative, Some(d), None, plain), *d, zero)?);
    }
    for t in tau_priors {
        out.push(ModelSpec::new(member_name(ModelType::RandomNull, None, Some(t), plain), zero, *t)?);
    }
    out.extend(configuration_members(delta_priors, tau_priors, plain)?);
    Ok(out)
}

fn configuration_members(delta_priors: &[PriorSpec], tau_priors: &[PriorSpec], plain: bool) -> Result<Vec<ModelSpec>> {
    let mut out = Vec::with_capacity(delta_priors.len() * tau_priors.len());
    for d in delta_priors {
        for t in tau_priors {
            let name = member_name(ModelType::RandomAlternative, Some(d), Some(t), plain);
            out.push(ModelSpec::new(name, *d, *t)?);
        }
    }
    Ok(out)
}

/// The four-type ensemble over all candidate priors.
pub fn build_standard_ensemble(
    delta_priors: &[PriorSpec],
    tau_priors: &[PriorSpec],
    scheme: Scheme,
) -> Result<ModelEnsemble> {
    match scheme {
        Scheme::FourType => build_weighted_ensemble(delta_priors, tau_priors, [0.25; 4]),
        Scheme::Flat => {
            let models = standard_members(delta_priors, tau_priors)?;
            let p = 1.0 / models.len() as f64;
            ModelEnsemble::from_weights(models.into_iter().map(|m| (m, p)).collect())
        }
    }
}

/// The four-type ensemble with the given prior probability per model type
/// (order fixed_H0, fixed_H1, random_H0, random_H1), split evenly within
/// each type. Types with probability zero are left out.
pub fn build_weighted_ensemble(
    delta_priors: &[PriorSpec],
    tau_priors: &[PriorSpec],
    type_probs: [f64; 4],
) -> Result<ModelEnsemble> {
    if type_probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
        return Err(Error::InvalidEnsemble(format!("invalid model-type probabilities {type_probs:?}")));
    }
    let total: f64 = type_probs.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidEnsemble(format!("model-type probabilities sum to {total}")));
    }
    let counts = [1, delta_priors.len(), tau_priors.len(), delta_priors.len() * tau_priors.len()];
    let members = standard_members(delta_priors, tau_priors)?
        .into_iter()
        .filter_map(|m| {
            let i = m.model_type().index();
            let p = type_probs[i] / counts[i] as f64;
            (p > 0.0).then_some((m, p))
        })
        .collect();
    ModelEnsemble::new(members)
}

/// Only the random_H1 configurations, each with equal probability. Member
/// `i` is configuration `i + 1` in δ-major order.
pub fn build_configuration_ensemble(delta_priors: &[PriorSpec], tau_priors: &[PriorSpec]) -> Result<ModelEnsemble> {
    if delta_priors.is_empty() || tau_priors.is_empty() {
        return Err(Error::InvalidEnsemble("prior lists must be non-empty".to_string()));
    }
    let models = configuration_members(delta_priors, tau_priors, false)?;
    let p = 1.0 / models.len() as f64;
    ModelEnsemble::from_weights(models.into_iter().map(|m| (m, p)).collect())
}

/// An inclusion Bayes factor together with the probabilities behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InclusionBf {
    /// Bayes factor; `+inf` when it overflows or the excluded set has zero
    /// posterior mass.
    pub bf: f64,
    /// Finite whenever the excluded set has any posterior mass.
    pub log_bf: f64,
    pub prior_prob: f64,
    pub posterior_prob: f64,
    /// `bf` is not representable; read `log_bf` instead.
    pub infinite: bool,
}

/// Inclusion Bayes factor from log prior and log posterior weights, which
/// need not be normalized.
fn inclusion_from_logs(log_prior: &[f64], log_post: &[f64], included: &[bool]) -> Result<InclusionBf> {
    let split = |v: &[f64]| -> (f64, f64) {
        let inc: Vec<f64> = v.iter().zip(included).filter(|(_, &b)| b).map(|(x, _)| *x).collect();
        let exc: Vec<f64> = v.iter().zip(included).filter(|(_, &b)| !b).map(|(x, _)| *x).collect();
        (log_sum_exp(&inc), log_sum_exp(&exc))
    };
    let (pi, po) = split(log_prior);
    let (qi, qo) = split(log_post);
    let log_prior_odds = pi - po;
    let log_bf = if qi == f64::NEG_INFINITY && qo == f64::NEG_INFINITY {
        return Err(Error::DegenerateEvidence);
    } else if qo == f64::NEG_INFINITY {
        f64::INFINITY
    } else {
        qi - qo - log_prior_odds
    };
    let post_total = log_sum_exp(&[qi, qo]);
    let prior_total = log_sum_exp(&[pi, po]);
    let bf = log_bf.exp();
    Ok(InclusionBf {
        bf,
        log_bf,
        prior_prob: (pi - prior_total).exp(),
        posterior_prob: (qi - post_total).exp(),
        infinite: bf == f64::INFINITY,
    })
}

/// Inclusion Bayes factor of the members marked `true` in `included`
/// against the rest.
pub fn inclusion_bf(ensemble: &ModelEnsemble, posterior_probs: &[f64], included: &[bool]) -> Result<InclusionBf> {
    let n = ensemble.len();
    if posterior_probs.len() != n || included.len() != n {
        return Err(Error::Invalid(format!(
            "expected {n} posterior probabilities and partition flags, got {} and {}",
            posterior_probs.len(),
            included.len()
        )));
    }
    if included.iter().all(|&b| b) || !included.iter().any(|&b| b) {
        return Err(Error::Invalid("partition must be non-empty on both sides".to_string()));
    }
    let log_prior: Vec<f64> = ensemble.members().iter().map(|m| m.prior_prob.ln()).collect();
    let log_post: Vec<f64> = posterior_probs.iter().map(|p| p.ln()).collect();
    inclusion_from_logs(&log_prior, &log_post, included)
}

/// The unconditional model-averaged δ posterior, which keeps the point mass
/// at zero contributed by the null models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikeSlabSummary {
    /// Posterior probability of δ = 0.
    pub spike_prob: f64,
    pub mean: f64,
    pub median: f64,
    pub sd: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
}

impl SpikeSlabSummary {
    fn new(spike: f64, slab: &GridDensity) -> Self {
        let s = slab.summary();
        let w = 1.0 - spike;
        let mean = w * s.mean;
        let second = w * (s.sd * s.sd + s.mean * s.mean);
        let cdf = slab.cdf();
        let below = w * slab.cdf_at(&cdf, 0.0);
        let quantile = |p: f64| {
            if p < below {
                slab.quantile(&cdf, p / w)
            } else if p <= below + spike {
                0.0
            } else {
                slab.quantile(&cdf, ((p - spike) / w).min(1.0))
            }
        };
        Self {
            spike_prob: spike,
            mean,
            median: quantile(0.5),
            sd: (second - mean * mean).max(0.0).sqrt(),
            ci_lower: quantile(0.025),
            ci_upper: quantile(0.975),
        }
    }
}

/// Grid summaries of one member's free parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub delta: Option<PosteriorSummary>,
    pub tau: Option<PosteriorSummary>,
}

/// Everything learned from evaluating an ensemble on one comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmaResult {
    pub model_names: Vec<String>,
    pub model_types: Vec<ModelType>,
    pub prior_probs: Vec<f64>,
    pub log_marginals: Vec<f64>,
    pub posterior_probs: Vec<f64>,
    /// `bf_matrix[i][j] = exp(log_marginals[i] − log_marginals[j])`.
    pub bf_matrix: Vec<Vec<f64>>,
    /// Effect present (δ free) against absent; `None` unless both occur.
    pub incl_bf_effect: Option<InclusionBf>,
    /// Heterogeneity present (τ free) against absent.
    pub incl_bf_heterogeneity: Option<InclusionBf>,
    /// δ averaged over members with free δ, weights renormalized within them.
    pub averaged_delta: Option<PosteriorSummary>,
    /// δ averaged over the fixed_H1 members.
    pub fixed_delta: Option<PosteriorSummary>,
    /// δ averaged over the random_H1 members.
    pub random_delta: Option<PosteriorSummary>,
    /// τ averaged over members with free τ.
    pub averaged_tau: Option<PosteriorSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spike_slab_delta: Option<SpikeSlabSummary>,
    pub model_summaries: Vec<ModelSummary>,
}

impl BmaResult {
    /// Sum of posterior probabilities per model type, in [`ModelType::ALL`] order.
    pub fn type_posteriors(&self) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (t, p) in self.model_types.iter().zip(&self.posterior_probs) {
            out[t.index()] += p;
        }
        out
    }
}

/// What [`evaluate_with`] computes besides the evidence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluateOptions {
    pub settings: MarginalSettings,
    /// Compute grid posterior summaries.
    pub summaries: bool,
    /// Also report the unconditional δ average with its spike at zero.
    pub spike_and_slab: bool,
}

impl Default for EvaluateOptions {
    fn default() -> Self {
        Self { settings: MarginalSettings::default(), summaries: true, spike_and_slab: false }
    }
}

impl EvaluateOptions {
    /// Marginal likelihoods and model probabilities only.
    pub fn evidence_only(settings: MarginalSettings) -> Self {
        Self { settings, summaries: false, spike_and_slab: false }
    }
}

/// Evaluates every member on `comparison` with default options.
pub fn evaluate(ensemble: &ModelEnsemble, comparison: &Comparison) -> Result<BmaResult> {
    evaluate_with(ensemble, comparison, &EvaluateOptions::default())
}

pub fn evaluate_with(ensemble: &ModelEnsemble, comparison: &Comparison, options: &EvaluateOptions) -> Result<BmaResult> {
    let settings = &options.settings;
    let log_marginals = ensemble
        .members()
        .par_iter()
        .map(|m| log_marginal_with(&m.model, comparison, settings))
        .collect::<Result<Vec<f64>>>()?;
    let log_prior: Vec<f64> = ensemble.members().iter().map(|m| m.prior_prob.ln()).collect();
    let log_joint: Vec<f64> = log_prior.iter().zip(&log_marginals).map(|(p, l)| p + l).collect();
    let norm = log_sum_exp(&log_joint);
    if norm == f64::NEG_INFINITY {
        return Err(Error::DegenerateEvidence);
    }
    let log_post: Vec<f64> = log_joint.iter().map(|l| l - norm).collect();
    let posterior_probs: Vec<f64> = log_post.iter().map(|l| l.exp()).collect();
    let bf_matrix = log_marginals
        .iter()
        .map(|a| log_marginals.iter().map(|b| (a - b).exp()).collect())
        .collect();

    let types = ensemble.model_types();
    let effect: Vec<bool> = types.iter().map(|t| t.has_effect()).collect();
    let hetero: Vec<bool> = types.iter().map(|t| t.has_heterogeneity()).collect();
    let mixed = |flags: &[bool]| flags.iter().any(|&b| b) && flags.iter().any(|&b| !b);
    let incl_bf_effect =
        if mixed(&effect) { Some(inclusion_from_logs(&log_prior, &log_post, &effect)?) } else { None };
    let incl_bf_heterogeneity =
        if mixed(&hetero) { Some(inclusion_from_logs(&log_prior, &log_post, &hetero)?) } else { None };

    let mut result = BmaResult {
        model_names: ensemble.members().iter().map(|m| m.model.name.clone()).collect(),
        model_types: types.clone(),
        prior_probs: ensemble.prior_probs(),
        log_marginals,
        posterior_probs,
        bf_matrix,
        incl_bf_effect,
        incl_bf_heterogeneity,
        averaged_delta: None,
        fixed_delta: None,
        random_delta: None,
        averaged_tau: None,
        spike_slab_delta: None,
        model_summaries: Vec::new(),
    };
    if !options.summaries && !options.spike_and_slab {
        return Ok(result);
    }

    // Mixture weights relative to the best member of each set, so that the
    // renormalization within the set never underflows.
    let mixture = |keep: &dyn Fn(ModelType) -> bool, parameter: Parameter| -> Result<Option<GridDensity>> {
        let idx: Vec<usize> = (0..types.len()).filter(|&i| keep(types[i])).collect();
        if idx.is_empty() {
            return Ok(None);
        }
        let top = idx.iter().map(|&i| log_post[i]).fold(f64::NEG_INFINITY, f64::max);
        let comps: Vec<(f64, &ModelSpec)> =
            idx.iter().map(|&i| ((log_post[i] - top).exp(), &ensemble.members()[i].model)).collect();
        mixture_grid(&comps, comparison, parameter, settings).map(Some)
    };

    let averaged = mixture(&|t| t.has_effect(), Parameter::Delta)?;
    if options.spike_and_slab {
        if let Some(slab) = &averaged {
            let spike: f64 = types.iter().zip(&result.posterior_probs).filter(|(t, _)| !t.has_effect()).map(|(_, p)| p).sum();
            result.spike_slab_delta = Some(SpikeSlabSummary::new(spike, slab));
        }
    }
    if !options.summaries {
        return Ok(result);
    }
    result.averaged_delta = averaged.map(|g| g.summary());
    result.fixed_delta = mixture(&|t| t == ModelType::FixedAlternative, Parameter::Delta)?.map(|g| g.summary());
    result.random_delta = mixture(&|t| t == ModelType::RandomAlternative, Parameter::Delta)?.map(|g| g.summary());
    result.averaged_tau = mixture(&|t| t.has_heterogeneity(), Parameter::Tau)?.map(|g| g.summary());
    result.model_summaries = ensemble
        .members()
        .par_iter()
        .map(|m| {
            let kind = m.model.model_type();
            let delta = if kind.has_effect() {
                Some(posterior_summary_with(&m.model, comparison, Parameter::Delta, settings)?)
            } else {
                None
            };
            let tau = if kind.has_heterogeneity() {
                Some(posterior_summary_with(&m.model, comparison, Parameter::Tau, settings)?)
            } else {
                None
            };
            Ok(ModelSummary { delta, tau })
        })
        .collect::<Result<_>>()?;
    Ok(result)
}

/// Evaluates marginal likelihoods and model probabilities only.
pub fn evaluate_evidence(ensemble: &ModelEnsemble, comparison: &Comparison, settings: &MarginalSettings) -> Result<BmaResult> {
    evaluate_with(ensemble, comparison, &EvaluateOptions::evidence_only(*settings))
}

/// Evaluates the ensemble on the first `t` studies for `t = 1..=k`, taking
/// studies in the given order.
pub fn sequential_update(
    ensemble: &ModelEnsemble,
    comparison: &Comparison,
    order: &[usize],
    options: &EvaluateOptions,
) -> Result<Vec<BmaResult>> {
    let permuted = comparison.permuted(order)?;
    (1..=permuted.len())
        .map(|t| evaluate_with(ensemble, &permuted.prefix(t)?, options))
        .collect()
}

/// Ranks (1 = best) by descending probability; ties keep member order.
pub fn ranks(probs: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..probs.len()).collect();
    order.sort_by(|&a, &b| probs[b].total_cmp(&probs[a]).then(a.cmp(&b)));
    let mut out = vec![0; probs.len()];
    for (rank, &i) in order.iter().enumerate() {
        out[i] = rank + 1;
    }
    out
}
