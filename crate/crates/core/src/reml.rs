//! Restricted maximum likelihood for the random-effects model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meta_core::Comparison;
use crate::optim::golden_section;

/// REML estimates for one comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemlFit {
    pub delta_hat: f64,
    pub tau_hat: f64,
    pub se_delta: f64,
    pub converged: bool,
    pub iterations: usize,
}

const SCAN_POINTS: usize = 1000;
const TOL: f64 = 1e-8;

/// Restricted log likelihood `ℓ_R` as a function of τ, up to a constant.
pub fn restricted_loglik(tau: f64, comparison: &Comparison) -> f64 {
    let t2 = tau * tau;
    let (mu, wsum) = comparison.weighted_mean(tau);
    let mut acc = 0.0;
    for s in comparison.studies() {
        let v = s.se * s.se + t2;
        let r = s.effect - mu;
        acc += v.ln() + r * r / v;
    }
    -0.5 * (acc + wsum.ln())
}

/// Derivative of `ℓ_R` with respect to τ².
fn score(tau: f64, comparison: &Comparison) -> f64 {
    let t2 = tau * tau;
    let (mu, wsum) = comparison.weighted_mean(tau);
    let (mut w2r2, mut w2) = (0.0, 0.0);
    for s in comparison.studies() {
        let w = 1.0 / (s.se * s.se + t2);
        let r = s.effect - mu;
        w2r2 += w * w * r * r;
        w2 += w * w;
    }
    0.5 * (w2r2 + w2 / wsum - wsum)
}

/// Upper end of the τ search interval: ten times the largest deviation
/// from the median effect plus the largest standard error.
pub fn tau_max(comparison: &Comparison) -> f64 {
    let mut ys: Vec<f64> = comparison.studies().iter().map(|s| s.effect).collect();
    ys.sort_by(f64::total_cmp);
    let n = ys.len();
    let median = if n % 2 == 1 { ys[n / 2] } else { 0.5 * (ys[n / 2 - 1] + ys[n / 2]) };
    let dev = ys.iter().map(|y| (y - median).abs()).fold(0.0, f64::max);
    let se = comparison.studies().iter().map(|s| s.se).fold(0.0, f64::max);
    10.0 * dev + se
}

/// Fits δ and τ by REML.
///
/// A scan over `[0, τ_max]` brackets the maximum, golden-section search
/// narrows it, and a bisection on the score equation finishes at machine
/// precision. A maximum at the boundary returns τ = 0 exactly.
pub fn reml_fit(comparison: &Comparison) -> Result<RemlFit> {
    let k = comparison.len();
    if k < 2 {
        return Err(Error::InsufficientData(format!(
            "REML needs at least 2 studies, comparison {} has {k}",
            comparison.id
        )));
    }
    let upper = tau_max(comparison);
    let step = upper / (SCAN_POINTS - 1) as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..SCAN_POINTS {
        let v = restricted_loglik(i as f64 * step, comparison);
        if v > best {
            best = v;
            best_i = i;
        }
    }

    let lo = best_i.saturating_sub(1) as f64 * step;
    let hi = ((best_i + 1).min(SCAN_POINTS - 1)) as f64 * step;
    let m = golden_section(|t| -restricted_loglik(t, comparison), lo, hi, TOL, 200);
    let mut tau = m.x;
    let mut iterations = m.iterations;

    // Polish on the score, which is positive below the maximum. Golden
    // section only resolves the flat top to about √ε, so the bracket widens
    // until the score changes sign across it.
    if tau > 0.0 {
        let mut width = 4.0 * TOL;
        let (mut a, mut b) = ((tau - width).max(0.0), tau + width);
        while !(score(a, comparison) > 0.0 && score(b, comparison) < 0.0) && width < step {
            width *= 2.0;
            (a, b) = ((tau - width).max(0.0), tau + width);
        }
        if score(a, comparison) > 0.0 && score(b, comparison) < 0.0 {
            for _ in 0..100 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if score(mid, comparison) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
                iterations += 1;
            }
            tau = 0.5 * (a + b);
        }
    }
    // ℓ_R is flat in τ near 0, so the boundary is decided by the sign of the
    // score in τ² rather than by comparing nearly equal values.
    let boundary = best_i <= 1 && score(0.0, comparison) <= 0.0;
    if boundary || restricted_loglik(0.0, comparison) >= restricted_loglik(tau, comparison) {
        tau = 0.0;
    }

    let (delta_hat, wsum) = comparison.weighted_mean(tau);
    Ok(RemlFit {
        delta_hat,
        tau_hat: tau,
        se_delta: wsum.sqrt().recip(),
        converged: m.converged,
        iterations,
    })
}
