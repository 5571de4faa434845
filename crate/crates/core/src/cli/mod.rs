//! The `bma-meta` command-line tool.

pub mod args;
mod forest;
pub mod io;
pub mod report;

use std::path::Path;

use serde::Serialize;

pub use args::Cli;
use args::{AnalyzeArgs, CatalogCommand, Command, FitPriorsArgs, RankArgs, RankMode, SchemeArg};
pub use forest::forest_svg;
use io::ColumnMap;

use crate::bma::{
    build_standard_ensemble, build_weighted_ensemble, evaluate_with, sequential_update, EvaluateOptions,
    InclusionBf, Scheme, SpikeSlabSummary,
};
use crate::catalog;
use crate::distributions::{FitOptions, PriorSpec};
use crate::error::{Error, Result};
use crate::marginal::{MarginalSettings, ModelType, PosteriorSummary};
use crate::pipeline::{self, PipelineOptions};
use crate::prior_fit::{fit_candidates_with, prepare_training, CandidatePriorSet};

/// Runs one parsed command line.
pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Analyze(a) => {
            let (json, svg) = analyze(a)?;
            if let (Some(path), Some(svg)) = (&a.forest, svg) {
                write_file(path, &svg)?;
            }
            emit(&json, a.out.as_deref())
        }
        Command::FitPriors(a) => emit(&fit_priors(a)?, a.out.as_deref()),
        Command::Rank(a) => emit(&rank(a)?, a.out.as_deref()),
        Command::Catalog { command } => emit(&catalog_json(command)?, None),
    }
}

fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", path.display())))
}

fn emit(json: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => write_file(path, json),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(json.as_bytes())
                .map_err(|e| Error::Invalid(format!("cannot write to stdout: {e}")))
        }
    }
}

fn settings(tol: Option<f64>) -> Result<MarginalSettings> {
    match tol {
        None => Ok(MarginalSettings::default()),
        Some(t) if t > 0.0 && t < 0.1 => Ok(MarginalSettings::with_tolerance(t)),
        Some(t) => Err(Error::Invalid(format!("--tol must be in (0, 0.1), got {t}"))),
    }
}

#[derive(Serialize)]
struct SubfieldInfo {
    requested: String,
    topic: String,
    unmatched: bool,
}

#[derive(Serialize)]
struct PriorsInfo {
    delta: Vec<PriorSpec>,
    tau: Vec<PriorSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subfield: Option<SubfieldInfo>,
}

/// Resolves δ and τ candidates from the command line. Without explicit
/// priors the pooled catalog entry is used.
fn resolve_priors(a: &AnalyzeArgs) -> Result<PriorsInfo> {
    if let Some(topic) = &a.subfield {
        let found = catalog::lookup(topic);
        if found.unmatched {
            log::warn!("subfield `{topic}` not in catalog; using the pooled estimate");
        }
        return Ok(PriorsInfo {
            delta: vec![found.entry.delta_prior],
            tau: vec![found.entry.tau_prior],
            subfield: Some(SubfieldInfo { requested: topic.clone(), topic: found.entry.topic, unmatched: found.unmatched }),
        });
    }
    let pooled = &catalog::catalog().pooled;
    let parse = |specs: &[String], default: PriorSpec| -> Result<Vec<PriorSpec>> {
        if specs.is_empty() {
            return Ok(vec![default]);
        }
        specs.iter().map(|s| s.parse()).collect()
    };
    let delta = parse(&a.delta_priors, pooled.delta_prior)?;
    let tau = parse(&a.tau_priors, pooled.tau_prior)?;
    if delta.iter().any(PriorSpec::is_point_mass) || tau.iter().any(PriorSpec::is_point_mass) {
        return Err(Error::Invalid(
            "candidate priors must be continuous; null models are added automatically".to_string(),
        ));
    }
    Ok(PriorsInfo { delta, tau, subfield: None })
}

fn parse_model_priors(text: &str) -> Result<[f64; 4]> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Invalid(format!("`{}` is not a probability in --model-priors", s.trim())))
        })
        .collect::<Result<_>>()?;
    if values.len() != 4 {
        return Err(Error::Invalid(format!("--model-priors needs 4 values, got {}", values.len())));
    }
    if values.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::Invalid("model prior probabilities must be positive".to_string()));
    }
    let total: f64 = values.iter().sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::Invalid(format!("model prior probabilities sum to {total}, not 1")));
    }
    Ok([values[0] / total, values[1] / total, values[2] / total, values[3] / total])
}

#[derive(Serialize)]
struct ModelReport {
    name: String,
    model_type: ModelType,
    delta_prior: PriorSpec,
    tau_prior: PriorSpec,
    prior_prob: f64,
    log_marginal: f64,
    posterior_prob: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    delta: Option<PosteriorSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tau: Option<PosteriorSummary>,
}

#[derive(Serialize)]
struct Inclusion {
    effect: Option<InclusionBf>,
    heterogeneity: Option<InclusionBf>,
}

#[derive(Serialize)]
struct Estimates {
    averaged_delta: Option<PosteriorSummary>,
    fixed_delta: Option<PosteriorSummary>,
    random_delta: Option<PosteriorSummary>,
    averaged_tau: Option<PosteriorSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spike_slab_delta: Option<SpikeSlabSummary>,
}

#[derive(Serialize)]
struct SequentialStep {
    studies: usize,
    posterior_probs: Vec<f64>,
    log_bf_effect: Option<f64>,
    log_bf_heterogeneity: Option<f64>,
}

#[derive(Serialize)]
struct AnalysisReport {
    input: String,
    studies: usize,
    priors: PriorsInfo,
    scheme: String,
    models: Vec<ModelReport>,
    bf_matrix: Vec<Vec<f64>>,
    model_type_posteriors: [f64; 4],
    inclusion: Inclusion,
    estimates: Estimates,
    #[serde(skip_serializing_if = "Option::is_none")]
    sequential: Option<Vec<SequentialStep>>,
}

/// Runs `analyze`, returning the JSON report and the forest plot if requested.
pub fn analyze(a: &AnalyzeArgs) -> Result<(String, Option<String>)> {
    let map = ColumnMap::parse(a.map.as_deref())?;
    let id = a.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let comparison = io::read_comparison(&read_file(&a.input)?, &id, &map)?;
    let priors = resolve_priors(a)?;
    let (ensemble, scheme) = match &a.model_priors {
        Some(text) => (build_weighted_ensemble(&priors.delta, &priors.tau, parse_model_priors(text)?)?, "custom"),
        None => match a.scheme {
            SchemeArg::FourType => (build_standard_ensemble(&priors.delta, &priors.tau, Scheme::FourType)?, "four-type"),
            SchemeArg::Flat => (build_standard_ensemble(&priors.delta, &priors.tau, Scheme::Flat)?, "flat"),
        },
    };
    let options = EvaluateOptions { settings: settings(a.tol)?, summaries: true, spike_and_slab: a.spike_slab };
    let mut result = evaluate_with(&ensemble, &comparison, &options)?;
    log::info!("evaluated {} models on {} studies", ensemble.len(), comparison.len());

    let sequential = if a.sequential {
        let order: Vec<usize> = (0..comparison.len()).collect();
        let steps = sequential_update(&ensemble, &comparison, &order, &EvaluateOptions::evidence_only(options.settings))?;
        Some(
            steps
                .into_iter()
                .enumerate()
                .map(|(t, r)| SequentialStep {
                    studies: t + 1,
                    log_bf_effect: r.incl_bf_effect.map(|b| b.log_bf),
                    log_bf_heterogeneity: r.incl_bf_heterogeneity.map(|b| b.log_bf),
                    posterior_probs: r.posterior_probs,
                })
                .collect(),
        )
    } else {
        None
    };

    let svg = a.forest.as_ref().map(|_| {
        forest_svg(&comparison, result.fixed_delta.as_ref(), result.random_delta.as_ref(), result.averaged_delta.as_ref())
    });

    let strip = |s: Option<PosteriorSummary>| {
        s.map(|mut s| {
            if !a.grid {
                s.grid.clear();
            }
            s
        })
    };
    let summaries = std::mem::take(&mut result.model_summaries);
    let models = ensemble
        .members()
        .iter()
        .enumerate()
        .map(|(i, m)| ModelReport {
            name: m.model.name.clone(),
            model_type: result.model_types[i],
            delta_prior: m.model.delta_prior,
            tau_prior: m.model.tau_prior,
            prior_prob: m.prior_prob,
            log_marginal: result.log_marginals[i],
            posterior_prob: result.posterior_probs[i],
            delta: strip(summaries.get(i).and_then(|s| s.delta.clone())),
            tau: strip(summaries.get(i).and_then(|s| s.tau.clone())),
        })
        .collect();
    let report = AnalysisReport {
        input: a.input.display().to_string(),
        studies: comparison.len(),
        priors,
        scheme: scheme.to_string(),
        models,
        model_type_posteriors: result.type_posteriors(),
        bf_matrix: result.bf_matrix,
        inclusion: Inclusion { effect: result.incl_bf_effect, heterogeneity: result.incl_bf_heterogeneity },
        estimates: Estimates {
            averaged_delta: strip(result.averaged_delta),
            fixed_delta: strip(result.fixed_delta),
            random_delta: strip(result.random_delta),
            averaged_tau: strip(result.averaged_tau),
            spike_slab_delta: result.spike_slab_delta,
        },
        sequential,
    };
    Ok((report::to_json(&report)?, svg))
}

/// Runs `fit-priors`, returning the candidate set as JSON.
pub fn fit_priors(a: &FitPriorsArgs) -> Result<String> {
    let map = ColumnMap::parse(a.map.as_deref())?;
    let corpus = io::read_corpus(&read_file(&a.corpus)?, &map)?;
    let training = prepare_training(&corpus, a.min_studies, a.tau_floor)?;
    let p = &training.provenance;
    log::info!(
        "retained {} of {} comparisons ({} τ estimates at or above {})",
        p.retained_comparisons,
        p.input_comparisons,
        p.tau_estimates,
        p.tau_floor
    );
    let options = FitOptions { fix_location_zero: !a.free_location };
    let mut set = fit_candidates_with(&training.delta, &training.tau, &options)?;
    set.provenance = Some(training.provenance);
    report::to_json(&set)
}

#[derive(Serialize)]
struct RankReport<T: Serialize> {
    mode: &'static str,
    candidates: CandidatePriorSet,
    non_estimable: usize,
    result: T,
}

/// Runs `rank`, returning the selected table as JSON.
pub fn rank(a: &RankArgs) -> Result<String> {
    let map = ColumnMap::parse(a.map.as_deref())?;
    let entries = io::read_corpus(&read_file(&a.corpus)?, &map)?;
    let candidates = match &a.candidates {
        Some(path) => {
            let text = read_file(path)?;
            let set: CandidatePriorSet = serde_json::from_str(&text)
                .map_err(|e| Error::Parse { line: e.line(), message: e.to_string() })?;
            CandidatePriorSet::new(set.delta_priors, set.tau_priors)?
        }
        None => CandidatePriorSet::reference(),
    };
    let mut comparisons = Vec::with_capacity(entries.len());
    let mut non_estimable = 0;
    for e in &entries {
        match e.to_comparison() {
            Some(c) => comparisons.push(c),
            None => {
                log::warn!("comparison {} has non-estimable studies and is excluded", e.id);
                non_estimable += 1;
            }
        }
    }
    if !(0.0..=1.0).contains(&a.max_failure_rate) {
        return Err(Error::Invalid(format!("--max-failure-rate must be in [0, 1], got {}", a.max_failure_rate)));
    }
    let options = PipelineOptions { settings: settings(a.tol)?, min_studies: a.min_studies, max_failure_rate: a.max_failure_rate };
    let evidence = pipeline::compute_evidence(&comparisons, &candidates, &options)?;
    let json = match a.mode {
        RankMode::Configs => report::to_json(&RankReport {
            mode: "configs",
            candidates,
            non_estimable,
            result: pipeline::rank_configurations_from(&evidence, pipeline::Restriction::RandomAlternativeOnly),
        }),
        RankMode::ModelTypes => report::to_json(&RankReport {
            mode: "model-types",
            candidates,
            non_estimable,
            result: pipeline::average_model_types_from(&evidence),
        }),
        RankMode::ParameterPriors => report::to_json(&RankReport {
            mode: "parameter-priors",
            candidates,
            non_estimable,
            result: pipeline::average_parameter_priors_from(&evidence),
        }),
        RankMode::Inclusion => report::to_json(&RankReport {
            mode: "inclusion",
            candidates,
            non_estimable,
            result: pipeline::corpus_inclusion_summary_from(&evidence),
        }),
    }?;
    Ok(json)
}

fn catalog_json(command: &CatalogCommand) -> Result<String> {
    match command {
        CatalogCommand::List => report::to_json(catalog::catalog()),
        CatalogCommand::Show { topic } => {
            let found = catalog::lookup(topic);
            if found.unmatched {
                log::warn!("subfield `{topic}` not in catalog; showing the pooled estimate");
            }
            report::to_json(&found)
        }
    }
}
