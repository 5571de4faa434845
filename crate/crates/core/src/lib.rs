//! Bayesian model-averaged meta-analysis of standardized mean differences.
//!
//! A comparison is analyzed under four models that switch the overall
//! effect δ and the heterogeneity τ on or off. Their marginal likelihoods
//! weigh them into posterior probabilities, inclusion Bayes factors and
//! model-averaged estimates.
//!
//! ```
//! use bma_meta::bma::{build_standard_ensemble, evaluate, Scheme};
//! use bma_meta::catalog::lookup;
//! use bma_meta::meta_core::Comparison;
//!
//! let c = Comparison::from_effects("c", &[0.9, 1.4, 0.2, 1.1, 0.6], &[0.3, 0.25, 0.4, 0.2, 0.35])?;
//! let priors = lookup("oral health").entry;
//! let ens = build_standard_ensemble(&[priors.delta_prior], &[priors.tau_prior], Scheme::FourType)?;
//! let r = evaluate(&ens, &c)?;
//! assert!(r.incl_bf_effect.unwrap().posterior_prob > 0.9);
//! # Ok::<(), bma_meta::error::Error>(())
//! ```
//!
//! Module map:
//!
//! - [`distributions`]: prior families, their text form and MLE fits
//! - [`meta_core`]: studies, comparisons and the normal likelihood
//! - [`marginal`]: marginal likelihoods and grid posteriors of one model
//! - [`bma`]: ensembles, Bayes factors and averaged estimates
//! - [`reml`]: restricted maximum likelihood for τ
//! - [`prior_fit`]: candidate priors fitted to a training corpus
//! - [`pipeline`]: corpus-wide rankings of priors and model types
//! - [`catalog`]: the embedded subfield prior table
//! - [`cli`]: the `bma-meta` binary

pub mod bma;
pub mod catalog;
pub mod distributions;
pub mod error;
pub mod marginal;
pub mod meta_core;
pub mod optim;
pub mod pipeline;
pub mod prior_fit;
pub mod quadrature;
pub mod reml;
pub mod simulate;
pub mod cli;

// The guide's code listings run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/data.md")]
    struct Data;
    #[doc = include_str!("../../../book/src/priors.md")]
    struct Priors;
    #[doc = include_str!("../../../book/src/models.md")]
    struct Models;
    #[doc = include_str!("../../../book/src/averaging.md")]
    struct Averaging;
    #[doc = include_str!("../../../book/src/reml.md")]
    struct Reml;
    #[doc = include_str!("../../../book/src/fitting.md")]
    struct Fitting;
    #[doc = include_str!("../../../book/src/corpus.md")]
    struct Corpus;
    #[doc = include_str!("../../../book/src/catalog.md")]
    struct Catalog;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
