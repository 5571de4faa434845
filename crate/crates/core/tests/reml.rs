mod common;

use bma_meta::error::Error;
use bma_meta::meta_core::Comparison;
use bma_meta::reml::{reml_fit, restricted_loglik, tau_max};
use bma_meta::simulate::{simulate_comparison, Design};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Restricted log-likelihood from its textbook form, up to a constant.
fn objective(tau: f64, c: &Comparison) -> f64 {
    let w: Vec<f64> = c.studies().iter().map(|s| 1.0 / (s.se * s.se + tau * tau)).collect();
    let sw: f64 = w.iter().sum();
    let mu = w.iter().zip(c.studies()).map(|(w, s)| w * s.effect).sum::<f64>() / sw;
    let q: f64 = w.iter().zip(c.studies()).map(|(w, s)| w * (s.effect - mu).powi(2)).sum();
    0.5 * (w.iter().map(|w| w.ln()).sum::<f64>() - sw.ln() - q)
}

#[test]
fn objective_matches_textbook_form() {
    let c = Comparison::from_effects("a", &[0.1, 0.5, -0.2, 0.9], &[0.2, 0.3, 0.25, 0.4]).unwrap();
    let offset = restricted_loglik(0.0, &c) - objective(0.0, &c);
    for tau in [0.05, 0.3, 1.0, 4.0] {
        assert!((restricted_loglik(tau, &c) - objective(tau, &c) - offset).abs() < 1e-12);
    }
}

#[test]
fn matches_fine_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (i, tau) in [0.0, 0.1, 0.3, 0.6, 1.2].into_iter().enumerate() {
        let c = simulate_comparison(&mut rng, format!("g{i}"), 0.2, tau, &Design::fixed(15, (0.1, 0.3))).unwrap();
        let fit = reml_fit(&c).unwrap();
        let upper = tau_max(&c);
        let n = 100_000;
        let best = (0..n)
            .map(|j| upper * j as f64 / (n - 1) as f64)
            .max_by(|a, b| objective(*a, &c).total_cmp(&objective(*b, &c)))
            .unwrap();
        assert!((fit.tau_hat - best).abs() <= upper / (n - 1) as f64 + 1e-9, "{} vs {best}", fit.tau_hat);
        let (mu, wsum) = c.weighted_mean(fit.tau_hat);
        assert!((fit.delta_hat - mu).abs() < 1e-12);
        assert!((fit.se_delta - wsum.sqrt().recip()).abs() < 1e-12);
        assert!(fit.converged);
    }
}

#[test]
fn homogeneous_effects_give_zero() {
    let c = Comparison::from_effects("h", &[0.3, 0.31, 0.29, 0.3, 0.3], &[0.2, 0.25, 0.3, 0.2, 0.22]).unwrap();
    assert_eq!(reml_fit(&c).unwrap().tau_hat, 0.0);
}

#[test]
fn one_study_is_not_enough() {
    let c = Comparison::from_effects("one", &[0.3], &[0.2]).unwrap();
    assert!(matches!(reml_fit(&c), Err(Error::InsufficientData(_))));
}

fn comparison() -> impl Strategy<Value = Comparison> {
    proptest::collection::vec((-2.0f64..2.0, 0.05f64..1.0), 2..15).prop_map(|rows| {
        let (y, se): (Vec<f64>, Vec<f64>) = rows.into_iter().unzip();
        Comparison::from_effects("p", &y, &se).unwrap()
    })
}

proptest! {
    #[test]
    fn estimate_is_a_global_maximum(c in comparison()) {
        let fit = reml_fit(&c).unwrap();
        let best = restricted_loglik(fit.tau_hat, &c);
        let upper = tau_max(&c);
        for j in 0..=1000 {
            let t = upper * j as f64 / 1000.0;
            prop_assert!(restricted_loglik(t, &c) <= best + 1e-9);
        }
    }

    #[test]
    fn translation_equivariance(c in comparison(), shift in -5.0f64..5.0) {
        let moved: Vec<f64> = c.studies().iter().map(|s| s.effect + shift).collect();
        let ses: Vec<f64> = c.studies().iter().map(|s| s.se).collect();
        let a = reml_fit(&c).unwrap();
        let b = reml_fit(&Comparison::from_effects("m", &moved, &ses).unwrap()).unwrap();
        prop_assert!((a.tau_hat - b.tau_hat).abs() < 1e-10);
        prop_assert!((b.delta_hat - a.delta_hat - shift).abs() < 1e-10);
    }

    #[test]
    fn scale_equivariance(c in comparison(), k in 0.2f64..5.0) {
        let y: Vec<f64> = c.studies().iter().map(|s| s.effect * k).collect();
        let ses: Vec<f64> = c.studies().iter().map(|s| s.se * k).collect();
        let a = reml_fit(&c).unwrap();
        let b = reml_fit(&Comparison::from_effects("s", &y, &ses).unwrap()).unwrap();
        prop_assert!((b.tau_hat - k * a.tau_hat).abs() < 1e-8 * (1.0 + k));
    }

    #[test]
    fn order_invariance(c in comparison()) {
        let order: Vec<usize> = (0..c.len()).rev().collect();
        let a = reml_fit(&c).unwrap();
        let b = reml_fit(&c.permuted(&order).unwrap()).unwrap();
        prop_assert!((a.tau_hat - b.tau_hat).abs() < 1e-10);
    }
}
