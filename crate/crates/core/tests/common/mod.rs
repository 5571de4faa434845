//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's densities, likelihoods or samplers, so
//! agreement with the library is evidence rather than a tautology.

#![allow(dead_code)]

use bma_meta::distributions::PriorSpec;
use bma_meta::meta_core::Comparison;
use rand::Rng;
use rand_distr::{Cauchy, Distribution, Gamma, Normal, StudentT};

pub const LN_2PI: f64 = 1.837_877_066_409_345_5;

/// Σ log N(yᵢ; δ, seᵢ² + τ²) written out directly.
pub fn loglik(delta: f64, tau: f64, c: &Comparison) -> f64 {
    c.studies()
        .iter()
        .map(|s| {
            let v = s.se * s.se + tau * tau;
            -0.5 * (LN_2PI + v.ln() + (s.effect - delta).powi(2) / v)
        })
        .sum()
}

/// One draw from a prior, via `rand_distr` directly.
pub fn draw<R: Rng>(p: &PriorSpec, rng: &mut R) -> f64 {
    match *p {
        PriorSpec::PointMass { value } => value,
        PriorSpec::Uniform { lower, upper } => rng.random_range(lower..upper),
        PriorSpec::Normal { mean, sd } => Normal::new(mean, sd).unwrap().sample(rng),
        PriorSpec::HalfNormal { sd } => Normal::new(0.0, sd).unwrap().sample(rng).abs(),
        PriorSpec::Cauchy { location, scale } => Cauchy::new(location, scale).unwrap().sample(rng),
        PriorSpec::StudentT { location, scale, df } => location + scale * StudentT::new(df).unwrap().sample(rng),
        PriorSpec::Gamma { shape, scale } => Gamma::new(shape, scale).unwrap().sample(rng),
        PriorSpec::InverseGamma { shape, scale } => scale / Gamma::new(shape, 1.0).unwrap().sample(rng),
    }
}

/// Prior Monte Carlo estimate of the log marginal likelihood and its
/// delta-method standard error.
pub fn mc_log_marginal<R: Rng>(delta: &PriorSpec, tau: &PriorSpec, c: &Comparison, n: usize, rng: &mut R) -> (f64, f64) {
    let ll: Vec<f64> = (0..n)
        .map(|_| {
            let d = draw(delta, rng);
            let t = draw(tau, rng);
            loglik(d, t, c)
        })
        .collect();
    let max = ll.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = ll.iter().map(|l| (l - max).exp()).collect();
    let mean = w.iter().sum::<f64>() / n as f64;
    let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (max + mean.ln(), (var / n as f64).sqrt() / mean)
}

/// Prior density written out from the textbook formulas.
pub fn density(p: &PriorSpec, x: f64) -> f64 {
    use statrs::function::gamma::gamma;
    use std::f64::consts::PI;
    match *p {
        PriorSpec::PointMass { .. } => f64::NAN,
        PriorSpec::Uniform { lower, upper } => {
            if (lower..=upper).contains(&x) {
                1.0 / (upper - lower)
            } else {
                0.0
            }
        }
        PriorSpec::Normal { mean, sd } => (-(x - mean).powi(2) / (2.0 * sd * sd)).exp() / (sd * (2.0 * PI).sqrt()),
        PriorSpec::HalfNormal { sd } => {
            if x < 0.0 {
                0.0
            } else {
                2.0 * (-(x * x) / (2.0 * sd * sd)).exp() / (sd * (2.0 * PI).sqrt())
            }
        }
        PriorSpec::Cauchy { location, scale } => 1.0 / (PI * scale * (1.0 + ((x - location) / scale).powi(2))),
        PriorSpec::StudentT { location, scale, df } => {
            let z = (x - location) / scale;
            gamma((df + 1.0) / 2.0) / (gamma(df / 2.0) * (df * PI).sqrt() * scale)
                * (1.0 + z * z / df).powf(-(df + 1.0) / 2.0)
        }
        PriorSpec::Gamma { shape, scale } => {
            if x <= 0.0 {
                0.0
            } else {
                x.powf(shape - 1.0) * (-x / scale).exp() / (gamma(shape) * scale.powf(shape))
            }
        }
        PriorSpec::InverseGamma { shape, scale } => {
            if x <= 0.0 {
                0.0
            } else {
                scale.powf(shape) / gamma(shape) * x.powf(-shape - 1.0) * (-scale / x).exp()
            }
        }
    }
}

/// Midpoint rule on `[a, b]` with `n` cells.
pub fn midpoint<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    (0..n).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

/// `∫ f` over the real line via `x = s·t/(1 − t²)`, `t ∈ (−1, 1)`.
pub fn integrate_real_line<F: Fn(f64) -> f64>(f: F, s: f64, n: usize) -> f64 {
    midpoint(
        |t| {
            let d = 1.0 - t * t;
            f(s * t / d) * s * (1.0 + t * t) / (d * d)
        },
        -1.0,
        1.0,
        n,
    )
}

/// `∫ f` over `[0, ∞)` via `x = s·t/(1 − t)`, `t ∈ [0, 1)`.
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, s: f64, n: usize) -> f64 {
    midpoint(|t| f(s * t / (1.0 - t)) * s / ((1.0 - t) * (1.0 - t)), 0.0, 1.0, n)
}

/// Bisection for a root of an increasing function.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Candidate priors fitted to the reference training corpus.
pub fn reference_delta_priors() -> Vec<PriorSpec> {
    vec![
        PriorSpec::cauchy(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap(),
        PriorSpec::normal(0.0, 0.56).unwrap(),
        PriorSpec::student_t(0.0, 0.33, 3.0).unwrap(),
    ]
}

pub fn reference_tau_priors() -> Vec<PriorSpec> {
    vec![
        PriorSpec::uniform(0.0, 1.0).unwrap(),
        PriorSpec::half_normal(0.57).unwrap(),
        PriorSpec::inverse_gamma(1.26, 0.24).unwrap(),
        PriorSpec::gamma(1.59, 0.26).unwrap(),
    ]
}

/// A small random comparison with `k` studies.
pub fn random_comparison<R: Rng>(rng: &mut R, id: &str, k: usize) -> Comparison {
    let delta = rng.random_range(-0.8..0.8);
    let tau = rng.random_range(0.0..0.4);
    let n = Normal::new(0.0, 1.0).unwrap();
    let mut ys = Vec::with_capacity(k);
    let mut ses = Vec::with_capacity(k);
    for _ in 0..k {
        let se = rng.random_range(0.15..0.5);
        ys.push(delta + tau * n.sample(rng) + se * n.sample(rng));
        ses.push(se);
    }
    Comparison::from_effects(id, &ys, &ses).unwrap()
}
