use bma_meta::bma::{build_configuration_ensemble, build_standard_ensemble, evaluate_evidence, Scheme};
use bma_meta::distributions::PriorSpec;
use bma_meta::marginal::MarginalSettings;
use bma_meta::meta_core::Comparison;
use bma_meta::pipeline::{
    average_model_types_from, average_parameter_priors_from, compute_evidence, corpus_inclusion_summary_from,
    rank_configurations_from, PipelineOptions, Restriction,
};
use bma_meta::prior_fit::CandidatePriorSet;
use bma_meta::simulate::{simulate_corpus, Design};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn corpus(seed: u64, n: usize) -> Vec<Comparison> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    simulate_corpus(
        &mut rng,
        n,
        &PriorSpec::student_t(0.0, 0.33, 3.0).unwrap(),
        &PriorSpec::inverse_gamma(1.26, 0.24).unwrap(),
        &Design { studies: (2, 12), se: (0.1, 0.4) },
    )
    .unwrap()
}

#[test]
fn corpus_order_does_not_matter() {
    let cands = CandidatePriorSet::reference();
    let options = PipelineOptions::default();
    let c = corpus(1, 24);
    let mut shuffled = c.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(99));
    let a = compute_evidence(&c, &cands, &options).unwrap();
    let b = compute_evidence(&shuffled, &cands, &options).unwrap();
    assert_eq!(a, b);
    assert_eq!(rank_configurations_from(&a, Restriction::FourType), rank_configurations_from(&b, Restriction::FourType));
}

#[test]
fn thread_count_does_not_matter() {
    let cands = CandidatePriorSet::reference();
    let options = PipelineOptions::default();
    let c = corpus(2, 16);
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| average_model_types_from(&compute_evidence(&c, &cands, &options).unwrap()))
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn averages_agree_with_single_comparison_evaluation() {
    let cands = CandidatePriorSet::reference();
    let options = PipelineOptions::default();
    let c = corpus(3, 10);
    let evidence = compute_evidence(&c, &cands, &options).unwrap();
    let table = rank_configurations_from(&evidence, Restriction::RandomAlternativeOnly);
    let types = average_model_types_from(&evidence);
    let inclusion = corpus_inclusion_summary_from(&evidence);

    let configs = build_configuration_ensemble(&cands.delta_priors, &cands.tau_priors).unwrap();
    let four = build_standard_ensemble(&cands.delta_priors, &cands.tau_priors, Scheme::FourType).unwrap();
    let mut sorted = c.clone();
    sorted.retain(|x| x.len() >= options.min_studies);
    sorted.sort_by(|a, b| a.id.cmp(&b.id));
    assert_eq!(table.evaluated, sorted.len());
    assert_eq!(table.skipped, c.len() - sorted.len());

    let mut config_sums = vec![0.0; 12];
    let mut type_sums = [0.0; 4];
    for (cmp, row) in sorted.iter().zip(&inclusion.comparisons) {
        let r = evaluate_evidence(&configs, cmp, &MarginalSettings::default()).unwrap();
        for (s, p) in config_sums.iter_mut().zip(&r.posterior_probs) {
            *s += p;
        }
        let r4 = evaluate_evidence(&four, cmp, &MarginalSettings::default()).unwrap();
        for (s, p) in type_sums.iter_mut().zip(r4.type_posteriors()) {
            *s += p;
        }
        assert_eq!(row.id, cmp.id);
        assert!((row.log_bf_effect - r4.incl_bf_effect.unwrap().log_bf).abs() < 1e-9);
        assert!((row.log_bf_heterogeneity - r4.incl_bf_heterogeneity.unwrap().log_bf).abs() < 1e-9);
    }
    let n = sorted.len() as f64;
    for (row, s) in table.rows.iter().zip(&config_sums) {
        assert!((row.avg_posterior_prob - s / n).abs() < 1e-12);
    }
    for (row, s) in types.rows.iter().zip(&type_sums) {
        assert!((row.avg_posterior_prob - s / n).abs() < 1e-12);
    }
}

#[test]
fn tables_are_consistent() {
    let cands = CandidatePriorSet::reference();
    let evidence = compute_evidence(&corpus(4, 20), &cands, &PipelineOptions::default()).unwrap();
    let n = evidence.rows.len();
    for table in [
        rank_configurations_from(&evidence, Restriction::RandomAlternativeOnly),
        rank_configurations_from(&evidence, Restriction::FourType),
        average_model_types_from(&evidence),
    ] {
        let total: f64 = table.rows.iter().map(|r| r.avg_posterior_prob).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let priors: f64 = table.rows.iter().map(|r| r.prior_prob).sum();
        assert!((priors - 1.0).abs() < 1e-12);
        for r in &table.rows {
            assert_eq!(r.rank_counts.iter().sum::<usize>(), n);
        }
        // Every rank position is taken once per comparison.
        for rank in 0..table.rows.len() {
            assert_eq!(table.rows.iter().map(|r| r.rank_counts[rank]).sum::<usize>(), n);
        }
    }
    let params = average_parameter_priors_from(&evidence);
    assert_eq!(params.delta.rows.len(), 3);
    assert_eq!(params.tau.rows.len(), 4);
    let configs = rank_configurations_from(&evidence, Restriction::RandomAlternativeOnly);
    for (i, row) in params.delta.rows.iter().enumerate() {
        let s: f64 = configs.rows[i * 4..(i + 1) * 4].iter().map(|r| r.avg_posterior_prob).sum();
        assert!((row.avg_posterior_prob - s).abs() < 1e-12);
    }
    let inc = corpus_inclusion_summary_from(&evidence);
    assert_eq!(inc.effect.evidence_for + inc.effect.evidence_against, n);
}

#[test]
fn effects_far_from_zero_favor_inclusion() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let c = simulate_corpus(
        &mut rng,
        12,
        &PriorSpec::point(1.0).unwrap(),
        &PriorSpec::point(0.0).unwrap(),
        &Design { studies: (8, 12), se: (0.1, 0.2) },
    )
    .unwrap();
    let evidence = compute_evidence(&c, &CandidatePriorSet::reference(), &PipelineOptions::default()).unwrap();
    let inc = corpus_inclusion_summary_from(&evidence);
    assert_eq!(inc.effect.evidence_for, 12);
    let types = average_model_types_from(&evidence);
    let best = types.rows.iter().max_by(|a, b| a.avg_posterior_prob.total_cmp(&b.avg_posterior_prob)).unwrap();
    assert_eq!(best.label, "fixed_H1");
}
