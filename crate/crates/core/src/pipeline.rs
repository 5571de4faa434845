//! Corpus-level evaluation of candidate priors: rank tallies per prior
//! configuration, per model type and per parameter prior, and inclusion
//! Bayes factor summaries.
//!
//! Every comparison is evaluated once against the full four-type ensemble;
//! the analyses differ only in how member probabilities are weighted and
//! grouped. Per-comparison work runs in parallel, and averages are summed in
//! sorted order so results do not depend on corpus order or thread count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bma::{build_standard_ensemble, ranks, Scheme};
use crate::error::{Error, Result};
use crate::marginal::{log_marginal_with, MarginalSettings, ModelSpec, ModelType};
use crate::meta_core::Comparison;
use crate::prior_fit::CandidatePriorSet;
use crate::quadrature::log_sum_exp;

/// Which members a configuration ranking covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Restriction {
    /// Only random_H1 configurations, each with equal prior probability.
    RandomAlternativeOnly,
    /// All members of the four-type ensemble with four-type weights.
    FourType,
}

/// Corpus evaluation settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelineOptions {
    pub settings: MarginalSettings,
    /// Comparisons with fewer studies are skipped.
    pub min_studies: usize,
    /// Abort when more than this fraction of comparisons fails.
    pub max_failure_rate: f64,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { settings: MarginalSettings::default(), min_studies: 3, max_failure_rate: 0.01 }
    }
}

/// A comparison whose evaluation failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedComparison {
    pub id: String,
    pub error: String,
}

/// Log marginal likelihoods of every four-type member for each comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEvidence {
    pub members: Vec<ModelSpec>,
    pub delta_priors: usize,
    pub tau_priors: usize,
    /// `(comparison id, log marginals in member order)`, sorted by id.
    pub rows: Vec<(String, Vec<f64>)>,
    pub skipped: usize,
    pub failed: Vec<FailedComparison>,
}

impl CorpusEvidence {
    fn types(&self) -> Vec<ModelType> {
        self.members.iter().map(|m| m.model_type()).collect()
    }

    fn indices_of(&self, kind: ModelType) -> Vec<usize> {
        self.types().iter().enumerate().filter(|(_, &t)| t == kind).map(|(i, _)| i).collect()
    }
}

/// Evaluates the four-type ensemble on every comparison with at least
/// `options.min_studies` studies.
pub fn compute_evidence(
    corpus: &[Comparison],
    candidates: &CandidatePriorSet,
    options: &PipelineOptions,
) -> Result<CorpusEvidence> {
    let ensemble = build_standard_ensemble(&candidates.delta_priors, &candidates.tau_priors, Scheme::FourType)?;
    let members: Vec<ModelSpec> = ensemble.members().iter().map(|m| m.model.clone()).collect();
    let eligible: Vec<&Comparison> = corpus.iter().filter(|c| c.len() >= options.min_studies).collect();
    let skipped = corpus.len() - eligible.len();
    if skipped > 0 {
        log::info!("skipping {skipped} comparisons with fewer than {} studies", options.min_studies);
    }

    let outcomes: Vec<(String, Result<Vec<f64>>)> = eligible
        .par_iter()
        .map(|c| {
            let lm = members
                .iter()
                .map(|m| log_marginal_with(m, c, &options.settings))
                .collect::<Result<Vec<f64>>>();
            (c.id.clone(), lm)
        })
        .collect();

    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (id, r) in outcomes {
        match r {
            Ok(v) if log_sum_exp(&v) > f64::NEG_INFINITY => rows.push((id, v)),
            Ok(_) => failed.push(FailedComparison { id, error: Error::DegenerateEvidence.to_string() }),
            Err(e) => failed.push(FailedComparison { id, error: e.to_string() }),
        }
    }
    rows.sort_by(|a, b| a.0.cmp(&b.0));
    failed.sort_by(|a, b| a.id.cmp(&b.id));
    for f in &failed {
        log::warn!("comparison {} excluded: {}", f.id, f.error);
    }
    let attempted = rows.len() + failed.len();
    if attempted > 0 && failed.len() as f64 > options.max_failure_rate * attempted as f64 {
        return Err(Error::TooManyFailures { failed: failed.len(), total: attempted });
    }
    if rows.is_empty() {
        return Err(Error::EmptyTraining("no comparison could be evaluated".to_string()));
    }
    Ok(CorpusEvidence {
        members,
        delta_priors: candidates.delta_priors.len(),
        tau_priors: candidates.tau_priors.len(),
        rows,
        skipped,
        failed,
    })
}

/// One row of a ranking table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingRow {
    pub label: String,
    /// `rank_counts[r]` = comparisons in which this row ranked `r + 1`.
    pub rank_counts: Vec<usize>,
    pub prior_prob: f64,
    pub avg_posterior_prob: f64,
}

/// Rank tallies and average posterior probabilities over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankingTable {
    pub rows: Vec<RankingRow>,
    pub evaluated: usize,
    pub skipped: usize,
    pub failed: Vec<FailedComparison>,
}

/// Posterior probabilities from log marginals and prior probabilities.
fn posteriors(log_marginals: &[f64], priors: &[f64]) -> Vec<f64> {
    let joint: Vec<f64> = log_marginals.iter().zip(priors).map(|(l, p)| l + p.ln()).collect();
    let norm = log_sum_exp(&joint);
    joint.iter().map(|j| (j - norm).exp()).collect()
}

/// Builds a table from per-comparison probability vectors, one entry per row.
fn tabulate(labels: Vec<String>, priors: Vec<f64>, per_comparison: &[Vec<f64>], evidence: &CorpusEvidence) -> RankingTable {
    let n_rows = labels.len();
    let mut counts = vec![vec![0usize; n_rows]; n_rows];
    let mut columns = vec![Vec::with_capacity(per_comparison.len()); n_rows];
    for probs in per_comparison {
        for (row, rank) in ranks(probs).into_iter().enumerate() {
            counts[row][rank - 1] += 1;
        }
        for (row, p) in probs.iter().enumerate() {
            columns[row].push(*p);
        }
    }
    let n = per_comparison.len() as f64;
    let rows = labels
        .into_iter()
        .zip(priors)
        .zip(counts)
        .zip(columns)
        .map(|(((label, prior_prob), rank_counts), mut col)| {
            col.sort_by(f64::total_cmp);
            RankingRow { label, rank_counts, prior_prob, avg_posterior_prob: col.iter().sum::<f64>() / n }
        })
        .collect();
    RankingTable {
        rows,
        evaluated: per_comparison.len(),
        skipped: evidence.skipped,
        failed: evidence.failed.clone(),
    }
}

/// Ranks prior configurations by posterior probability in each comparison.
pub fn rank_configurations(
    corpus: &[Comparison],
    candidates: &CandidatePriorSet,
    restriction: Restriction,
    options: &PipelineOptions,
) -> Result<RankingTable> {
    Ok(rank_configurations_from(&compute_evidence(corpus, candidates, options)?, restriction))
}

pub fn rank_configurations_from(evidence: &CorpusEvidence, restriction: Restriction) -> RankingTable {
    let (idx, priors): (Vec<usize>, Vec<f64>) = match restriction {
        Restriction::RandomAlternativeOnly => {
            let idx = evidence.indices_of(ModelType::RandomAlternative);
            let p = 1.0 / idx.len() as f64;
            let priors = vec![p; idx.len()];
            (idx, priors)
        }
        Restriction::FourType => {
            let counts = [1, evidence.delta_priors, evidence.tau_priors, evidence.delta_priors * evidence.tau_priors];
            let priors = evidence.types().iter().map(|t| 0.25 / counts[t.index()] as f64).collect();
            ((0..evidence.members.len()).collect(), priors)
        }
    };
    let labels = idx.iter().map(|&i| evidence.members[i].name.clone()).collect();
    let per: Vec<Vec<f64>> = evidence
        .rows
        .iter()
        .map(|(_, lm)| {
            let sub: Vec<f64> = idx.iter().map(|&i| lm[i]).collect();
            posteriors(&sub, &priors)
        })
        .collect();
    tabulate(labels, priors, &per, evidence)
}

/// Posterior probability of each model type under four-type weights,
/// summed over its member configurations.
pub fn average_model_types(
    corpus: &[Comparison],
    candidates: &CandidatePriorSet,
    options: &PipelineOptions,
) -> Result<RankingTable> {
    Ok(average_model_types_from(&compute_evidence(corpus, candidates, options)?))
}

pub fn average_model_types_from(evidence: &CorpusEvidence) -> RankingTable {
    let four = rank_configurations_from(evidence, Restriction::FourType);
    let types = evidence.types();
    let priors = vec![0.25; 4];
    let per: Vec<Vec<f64>> = evidence
        .rows
        .iter()
        .map(|(_, lm)| {
            let probs = posteriors(lm, &four.rows.iter().map(|r| r.prior_prob).collect::<Vec<_>>());
            let mut out = vec![0.0; 4];
            for (t, p) in types.iter().zip(probs) {
                out[t.index()] += p;
            }
            out
        })
        .collect();
    let labels = ModelType::ALL.iter().map(|t| t.label().to_string()).collect();
    tabulate(labels, priors, &per, evidence)
}

/// Rankings of each δ prior and each τ prior within random_H1, with the
/// other parameter's priors averaged out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterPriorTables {
    pub delta: RankingTable,
    pub tau: RankingTable,
}

pub fn average_parameter_priors(
    corpus: &[Comparison],
    candidates: &CandidatePriorSet,
    options: &PipelineOptions,
) -> Result<ParameterPriorTables> {
    Ok(average_parameter_priors_from(&compute_evidence(corpus, candidates, options)?))
}

pub fn average_parameter_priors_from(evidence: &CorpusEvidence) -> ParameterPriorTables {
    let idx = evidence.indices_of(ModelType::RandomAlternative);
    let (nd, nt) = (evidence.delta_priors, evidence.tau_priors);
    let flat = vec![1.0 / idx.len() as f64; idx.len()];
    let mut per_delta = Vec::with_capacity(evidence.rows.len());
    let mut per_tau = Vec::with_capacity(evidence.rows.len());
    for (_, lm) in &evidence.rows {
        let sub: Vec<f64> = idx.iter().map(|&i| lm[i]).collect();
        let probs = posteriors(&sub, &flat);
        let mut d = vec![0.0; nd];
        let mut t = vec![0.0; nt];
        for (j, p) in probs.iter().enumerate() {
            d[j / nt] += p;
            t[j % nt] += p;
        }
        per_delta.push(d);
        per_tau.push(t);
    }
    let first = &evidence.members[idx[0]..];
    let delta_labels = (0..nd).map(|i| first[i * nt].delta_prior.to_string()).collect();
    let tau_labels = (0..nt).map(|j| first[j].tau_prior.to_string()).collect();
    ParameterPriorTables {
        delta: tabulate(delta_labels, vec![1.0 / nd as f64; nd], &per_delta, evidence),
        tau: tabulate(tau_labels, vec![1.0 / nt as f64; nt], &per_tau, evidence),
    }
}

/// Inclusion Bayes factors of one comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonInclusion {
    pub id: String,
    pub log_bf_effect: f64,
    pub log_bf_heterogeneity: f64,
}

/// How many comparisons favour inclusion of a parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceCounts {
    /// Inclusion Bayes factor above 1.
    pub evidence_for: usize,
    /// Inclusion Bayes factor at most 1.
    pub evidence_against: usize,
}

/// Corpus summary of inclusion Bayes factors under four-type ensembles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionSummary {
    pub evaluated: usize,
    pub effect: EvidenceCounts,
    pub heterogeneity: EvidenceCounts,
    /// Per-comparison log Bayes factors, sorted by comparison id.
    pub comparisons: Vec<ComparisonInclusion>,
    pub skipped: usize,
    pub failed: Vec<FailedComparison>,
}

pub fn corpus_inclusion_summary(
    corpus: &[Comparison],
    candidates: &CandidatePriorSet,
    options: &PipelineOptions,
) -> Result<InclusionSummary> {
    Ok(corpus_inclusion_summary_from(&compute_evidence(corpus, candidates, options)?))
}

pub fn corpus_inclusion_summary_from(evidence: &CorpusEvidence) -> InclusionSummary {
    let types = evidence.types();
    let counts = [1, evidence.delta_priors, evidence.tau_priors, evidence.delta_priors * evidence.tau_priors];
    let log_prior: Vec<f64> = types.iter().map(|t| (0.25 / counts[t.index()] as f64).ln()).collect();
    let log_incl = |lm: &[f64], keep: fn(ModelType) -> bool| -> f64 {
        let (mut inc, mut exc) = (Vec::new(), Vec::new());
        let (mut pin, mut pex) = (Vec::new(), Vec::new());
        for ((t, l), p) in types.iter().zip(lm).zip(&log_prior) {
            if keep(*t) {
                inc.push(l + p);
                pin.push(*p);
            } else {
                exc.push(l + p);
                pex.push(*p);
            }
        }
        (log_sum_exp(&inc) - log_sum_exp(&exc)) - (log_sum_exp(&pin) - log_sum_exp(&pex))
    };
    let comparisons: Vec<ComparisonInclusion> = evidence
        .rows
        .iter()
        .map(|(id, lm)| ComparisonInclusion {
            id: id.clone(),
            log_bf_effect: log_incl(lm, ModelType::has_effect),
            log_bf_heterogeneity: log_incl(lm, ModelType::has_heterogeneity),
        })
        .collect();
    let count = |f: fn(&ComparisonInclusion) -> f64| {
        let evidence_for = comparisons.iter().filter(|c| f(c) > 0.0).count();
        EvidenceCounts { evidence_for, evidence_against: comparisons.len() - evidence_for }
    };
    InclusionSummary {
        evaluated: comparisons.len(),
        effect: count(|c| c.log_bf_effect),
        heterogeneity: count(|c| c.log_bf_heterogeneity),
        comparisons,
        skipped: evidence.skipped,
        failed: evidence.failed.clone(),
    }
}
