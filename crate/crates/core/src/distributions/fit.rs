//! Maximum-likelihood fitting of prior families to a sample of estimates.
//!
//! Normal and half-normal fits have closed forms. Student-t, gamma and
//! inverse-gamma fits minimize the negative log likelihood over log-scaled
//! parameters with Nelder–Mead, restarted from three moment-based guesses.

use serde::{Deserialize, Serialize};

use super::PriorSpec;
use crate::error::{Error, Result};
use crate::optim::nelder_mead;

/// Families that [`fit_mle`] can estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitFamily {
    Normal,
    StudentT,
    HalfNormal,
    Gamma,
    InverseGamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FitOptions {
    /// Hold the location of Normal and Student-t fits at zero.
    pub fix_location_zero: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { fix_location_zero: true }
    }
}

/// Sum of log densities of `data` under `spec`.
pub fn log_likelihood(spec: &PriorSpec, data: &[f64]) -> Result<f64> {
    spec.validate()?;
    Ok(data.iter().map(|&x| spec.log_pdf_unchecked(x)).sum())
}

/// Fits `family` to `data` with default options (zero location).
pub fn fit_mle(family: FitFamily, data: &[f64]) -> Result<PriorSpec> {
    fit_mle_with(family, data, &FitOptions::default())
}

pub fn fit_mle_with(family: FitFamily, data: &[f64], options: &FitOptions) -> Result<PriorSpec> {
    check_data(family, data)?;
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let second_moment = data.iter().map(|x| x * x).sum::<f64>() / n;

    match family {
        FitFamily::Normal if options.fix_location_zero => PriorSpec::normal(0.0, second_moment.sqrt()),
        FitFamily::Normal => PriorSpec::normal(mean, var.sqrt()),
        FitFamily::HalfNormal => PriorSpec::half_normal(second_moment.sqrt()),
        FitFamily::StudentT => fit_student_t(data, options.fix_location_zero, mean, var),
        FitFamily::Gamma => {
            let shape = mean * mean / var;
            let starts = [shape, 0.5 * shape, 2.0 * shape]
                .map(|k| vec![k.ln(), (mean / k).ln()]);
            let best = minimize_restarts(&starts, |p| {
                neg_ll(&PriorSpec::Gamma { shape: p[0].exp(), scale: p[1].exp() }, data)
            });
            PriorSpec::gamma(best[0].exp(), best[1].exp())
        }
        FitFamily::InverseGamma => {
            // Moment guess from the reciprocals, which are gamma distributed.
            let inv_mean = data.iter().map(|x| 1.0 / x).sum::<f64>() / n;
            let inv_var = data.iter().map(|x| (1.0 / x - inv_mean).powi(2)).sum::<f64>() / n;
            let shape = inv_mean * inv_mean / inv_var;
            let direct_shape = if var > 0.0 { mean * mean / var + 2.0 } else { shape };
            let starts = [shape, direct_shape, 0.5 * shape + 0.5]
                .map(|a| vec![a.ln(), (a / inv_mean).ln()]);
            let best = minimize_restarts(&starts, |p| {
                neg_ll(&PriorSpec::InverseGamma { shape: p[0].exp(), scale: p[1].exp() }, data)
            });
            PriorSpec::inverse_gamma(best[0].exp(), best[1].exp())
        }
    }
}

fn fit_student_t(data: &[f64], fix_location: bool, mean: f64, var: f64) -> Result<PriorSpec> {
    let mut sorted: Vec<f64> = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let center = if fix_location { 0.0 } else { median };
    let mut deviations: Vec<f64> = data.iter().map(|x| (x - center).abs()).collect();
    deviations.sort_by(f64::total_cmp);
    let mad = deviations[deviations.len() / 2].max(1e-12) / 0.674_489_750_196_081_7;
    let sd = if fix_location { (var + mean * mean).sqrt() } else { var.sqrt() };

    let guesses: [(f64, f64); 3] = [(mad, 3.0), (sd, 30.0), (0.5 * (mad + sd), 1.0)];
    let starts: Vec<Vec<f64>> = guesses
        .iter()
        .map(|&(s, df)| {
            let mut p = vec![s.ln(), df.ln()];
            if !fix_location {
                p.push(center);
            }
            p
        })
        .collect();
    let best = minimize_restarts(&starts, |p| {
        let location = if fix_location { 0.0 } else { p[2] };
        let df = p[1].exp().clamp(1e-3, 1e7);
        neg_ll(&PriorSpec::StudentT { location, scale: p[0].exp(), df }, data)
    });
    let location = if fix_location { 0.0 } else { best[2] };
    PriorSpec::student_t(location, best[0].exp(), best[1].exp().clamp(1e-3, 1e7))
}

fn neg_ll(spec: &PriorSpec, data: &[f64]) -> f64 {
    let ll: f64 = data.iter().map(|&x| spec.log_pdf_unchecked(x)).sum();
    if ll.is_finite() {
        -ll
    } else {
        f64::INFINITY
    }
}

/// Runs Nelder–Mead from each start, then once more from the overall best
/// point, and returns the minimizer.
fn minimize_restarts<F: FnMut(&[f64]) -> f64>(starts: &[Vec<f64>], mut f: F) -> Vec<f64> {
    let mut best: Option<(Vec<f64>, f64)> = None;
    for start in starts {
        if start.iter().any(|v| !v.is_finite()) {
            continue;
        }
        let m = nelder_mead(&mut f, start, 0.3, 1e-9, 1e-14, 20_000);
        if best.as_ref().is_none_or(|(_, v)| m.value < *v) {
            best = Some((m.x, m.value));
        }
    }
    let (x, _) = best.expect("at least one finite start");
    nelder_mead(&mut f, &x, 0.05, 1e-10, 1e-14, 5_000).x
}

fn check_data(family: FitFamily, data: &[f64]) -> Result<()> {
    if data.is_empty() {
        return Err(Error::DegenerateData("no observations".to_string()));
    }
    if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
        return Err(Error::OutOfSupport(format!("non-finite observation {bad}")));
    }
    let lower_ok = |x: f64| match family {
        FitFamily::Normal | FitFamily::StudentT => true,
        FitFamily::HalfNormal => x >= 0.0,
        FitFamily::Gamma | FitFamily::InverseGamma => x > 0.0,
    };
    if let Some(bad) = data.iter().find(|&&x| !lower_ok(x)) {
        return Err(Error::OutOfSupport(format!("{bad} is outside the {family:?} support")));
    }
    let first = data[0];
    if data.iter().all(|&x| x == first) {
        return Err(Error::DegenerateData(format!(
            "{} observation(s) with zero variance",
            data.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn draws(spec: PriorSpec, n: usize, seed: u64) -> Vec<f64> {
        spec.sample(&mut ChaCha8Rng::seed_from_u64(seed), n).unwrap()
    }

    fn within(actual: f64, target: f64, frac: f64) -> bool {
        ((actual - target) / target).abs() <= frac
    }

    #[test]
    fn constant_data_is_degenerate() {
        let err = fit_mle(FitFamily::Normal, &[1.0, 1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::DegenerateData(_)));
        assert!(matches!(
            fit_mle(FitFamily::InverseGamma, &[0.3]).unwrap_err(),
            Error::DegenerateData(_)
        ));
    }

    #[test]
    fn out_of_support_data_is_rejected() {
        let err = fit_mle(FitFamily::Gamma, &[0.1, -0.2, 0.3]).unwrap_err();
        assert!(matches!(err, Error::OutOfSupport(_)));
        assert!(fit_mle(FitFamily::Normal, &[0.1, f64::NAN]).is_err());
    }

    #[test]
    fn gamma_recovers_parameters() {
        let data = draws(PriorSpec::gamma(1.59, 0.26).unwrap(), 2000, 11);
        let PriorSpec::Gamma { shape, scale } = fit_mle(FitFamily::Gamma, &data).unwrap() else {
            panic!()
        };
        assert!(within(shape, 1.59, 0.10), "shape {shape}");
        assert!(within(scale, 0.26, 0.10), "scale {scale}");
    }

    #[test]
    fn student_t_recovers_scale_at_zero_location() {
        let data = draws(PriorSpec::student_t(0.0, 0.33, 3.0).unwrap(), 2000, 12);
        let PriorSpec::StudentT { location, scale, .. } =
            fit_mle(FitFamily::StudentT, &data).unwrap()
        else {
            panic!()
        };
        assert_eq!(location, 0.0);
        assert!(within(scale, 0.33, 0.10), "scale {scale}");
    }

    #[test]
    fn student_t_free_location() {
        let data = draws(PriorSpec::student_t(0.4, 0.33, 4.0).unwrap(), 3000, 13);
        let opts = FitOptions { fix_location_zero: false };
        let PriorSpec::StudentT { location, scale, .. } =
            fit_mle_with(FitFamily::StudentT, &data, &opts).unwrap()
        else {
            panic!()
        };
        assert!((location - 0.4).abs() < 0.03, "location {location}");
        assert!(within(scale, 0.33, 0.10));
    }

    #[test]
    fn inverse_gamma_recovers_parameters() {
        let data = draws(PriorSpec::inverse_gamma(1.26, 0.24).unwrap(), 4000, 14);
        let PriorSpec::InverseGamma { shape, scale } =
            fit_mle(FitFamily::InverseGamma, &data).unwrap()
        else {
            panic!()
        };
        assert!(within(shape, 1.26, 0.10), "shape {shape}");
        assert!(within(scale, 0.24, 0.10), "scale {scale}");
    }

    #[test]
    fn normal_and_half_normal_closed_forms() {
        let data = [-0.5, 0.25, 1.0, 0.0];
        let PriorSpec::Normal { mean, sd } = fit_mle(FitFamily::Normal, &data).unwrap() else {
            panic!()
        };
        assert_eq!(mean, 0.0);
        assert!((sd - (1.3125f64 / 4.0).sqrt()).abs() < 1e-15);
        let abs: Vec<f64> = data.iter().map(|x: &f64| x.abs()).collect();
        let PriorSpec::HalfNormal { sd: hsd } = fit_mle(FitFamily::HalfNormal, &abs).unwrap() else {
            panic!()
        };
        assert!((hsd - sd).abs() < 1e-15);
    }

    /// The fitted log likelihood dominates a 100×100 parameter grid around
    /// the optimum and the generating parameters.
    #[test]
    fn fits_dominate_parameter_grid() {
        type Build = fn(f64, f64) -> PriorSpec;
        let cases: [(FitFamily, PriorSpec, Build); 3] = [
            (FitFamily::Gamma, PriorSpec::gamma(1.59, 0.26).unwrap(), |a, b| {
                PriorSpec::Gamma { shape: a, scale: b }
            }),
            (FitFamily::InverseGamma, PriorSpec::inverse_gamma(1.26, 0.24).unwrap(), |a, b| {
                PriorSpec::InverseGamma { shape: a, scale: b }
            }),
            (FitFamily::StudentT, PriorSpec::student_t(0.0, 0.33, 3.0).unwrap(), |s, df| {
                PriorSpec::StudentT { location: 0.0, scale: s, df }
            }),
        ];
        for (family, truth, build) in cases {
            let data = draws(truth, 500, 21);
            let fitted = fit_mle(family, &data).unwrap();
            let best = log_likelihood(&fitted, &data).unwrap();
            assert!(best >= log_likelihood(&truth, &data).unwrap() - 1e-9);
            let (a0, b0) = match fitted {
                PriorSpec::Gamma { shape, scale } | PriorSpec::InverseGamma { shape, scale } => {
                    (shape, scale)
                }
                PriorSpec::StudentT { scale, df, .. } => (scale, df),
                _ => unreachable!(),
            };
            for i in 0..100 {
                for j in 0..100 {
                    let a = a0 * (0.8 + 0.4 * i as f64 / 99.0);
                    let b = b0 * (0.8 + 0.4 * j as f64 / 99.0);
                    let ll = log_likelihood(&build(a, b), &data).unwrap();
                    assert!(best >= ll - 1e-9, "{family:?}: grid point ({a}, {b}) beats fit");
                }
            }
        }
    }
}
