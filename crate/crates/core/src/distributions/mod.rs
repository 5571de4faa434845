//! Prior distribution families for the effect size and heterogeneity
//! parameters.
//!
//! Every family is described by a [`PriorSpec`]. Densities are evaluated in
//! log space; CDFs use closed forms or regularized incomplete gamma/beta
//! functions; quantiles are found by bisection on the CDF.
//!
//! Parametrizations:
//!
//! * `Gamma(shape, scale)`: density ∝ x^(shape−1)·exp(−x/scale)
//! * `InverseGamma(shape, scale)`: density ∝ x^(−shape−1)·exp(−scale/x)
//! * `StudentT(location, scale, df)`: location–scale t
//! * `HalfNormal(sd)`: zero-truncated normal with standard deviation `sd`

mod fit;
mod parse;

pub use fit::{fit_mle, fit_mle_with, log_likelihood, FitFamily, FitOptions};

use std::f64::consts::{LN_2, PI};
use std::fmt;

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Gamma, Normal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::{beta::beta_reg, erf, gamma};

use crate::error::{Error, Result};

pub(crate) const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// A parameterized prior distribution over δ or τ (or a point mass).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum PriorSpec {
    PointMass { value: f64 },
    Uniform { lower: f64, upper: f64 },
    Normal { mean: f64, sd: f64 },
    HalfNormal { sd: f64 },
    Cauchy { location: f64, scale: f64 },
    StudentT { location: f64, scale: f64, df: f64 },
    Gamma { shape: f64, scale: f64 },
    InverseGamma { shape: f64, scale: f64 },
}

/// Support of a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    RealLine,
    NonNegative,
    Interval,
    Point,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("{name} must be positive and finite, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("{name} must be finite, got {v}")))
    }
}

impl PriorSpec {
    pub fn point(value: f64) -> Result<Self> {
        Self::PointMass { value }.validated()
    }
    pub fn uniform(lower: f64, upper: f64) -> Result<Self> {
        Self::Uniform { lower, upper }.validated()
    }
    pub fn normal(mean: f64, sd: f64) -> Result<Self> {
        Self::Normal { mean, sd }.validated()
    }
    pub fn half_normal(sd: f64) -> Result<Self> {
        Self::HalfNormal { sd }.validated()
    }
    pub fn cauchy(location: f64, scale: f64) -> Result<Self> {
        Self::Cauchy { location, scale }.validated()
    }
    pub fn student_t(location: f64, scale: f64, df: f64) -> Result<Self> {
        Self::StudentT { location, scale, df }.validated()
    }
    pub fn gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::Gamma { shape, scale }.validated()
    }
    pub fn inverse_gamma(shape: f64, scale: f64) -> Result<Self> {
        Self::InverseGamma { shape, scale }.validated()
    }

    fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Checks the parameter constraints of the family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::PointMass { value } => finite("value", value),
            Self::Uniform { lower, upper } => {
                finite("lower", lower)?;
                finite("upper", upper)?;
                if upper > lower {
                    Ok(())
                } else {
                    Err(Error::ParameterDomain(format!(
                        "uniform upper bound {upper} must exceed lower bound {lower}"
                    )))
                }
            }
            Self::Normal { mean, sd } => finite("mean", mean).and(positive("sd", sd)),
            Self::HalfNormal { sd } => positive("sd", sd),
            Self::Cauchy { location, scale } => {
                finite("location", location).and(positive("scale", scale))
            }
            Self::StudentT { location, scale, df } => finite("location", location)
                .and(positive("scale", scale))
                .and(positive("df", df)),
            Self::Gamma { shape, scale } | Self::InverseGamma { shape, scale } => {
                positive("shape", shape).and(positive("scale", scale))
            }
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            Self::PointMass { .. } => "point",
            Self::Uniform { .. } => "uniform",
            Self::Normal { .. } => "normal",
            Self::HalfNormal { .. } => "halfnormal",
            Self::Cauchy { .. } => "cauchy",
            Self::StudentT { .. } => "t",
            Self::Gamma { .. } => "gamma",
            Self::InverseGamma { .. } => "invgamma",
        }
    }

    pub fn support(&self) -> Support {
        match self {
            Self::PointMass { .. } => Support::Point,
            Self::Uniform { .. } => Support::Interval,
            Self::Normal { .. } | Self::Cauchy { .. } | Self::StudentT { .. } => Support::RealLine,
            Self::HalfNormal { .. } | Self::Gamma { .. } | Self::InverseGamma { .. } => {
                Support::NonNegative
            }
        }
    }

    /// Closed support bounds `(lower, upper)`, possibly infinite.
    pub fn support_bounds(&self) -> (f64, f64) {
        match *self {
            Self::PointMass { value } => (value, value),
            Self::Uniform { lower, upper } => (lower, upper),
            Self::Normal { .. } | Self::Cauchy { .. } | Self::StudentT { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            _ => (0.0, f64::INFINITY),
        }
    }

    pub fn is_point_mass(&self) -> bool {
        matches!(self, Self::PointMass { .. })
    }

    /// Natural-log density at `x`; `-inf` outside the support.
    ///
    /// A point mass returns 0 at its value and `-inf` elsewhere.
    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.log_pdf_unchecked(x))
    }

    /// [`log_pdf`](Self::log_pdf) without parameter validation, for hot loops
    /// over an already validated spec.
    pub(crate) fn log_pdf_unchecked(&self, x: f64) -> f64 {
        match *self {
            Self::PointMass { value } => {
                if x == value {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Self::Uniform { lower, upper } => {
                if x >= lower && x <= upper {
                    -(upper - lower).ln()
                } else {
                    f64::NEG_INFINITY
                }
            }
            Self::Normal { mean, sd } => {
                let z = (x - mean) / sd;
                -sd.ln() - LN_SQRT_2PI - 0.5 * z * z
            }
            Self::HalfNormal { sd } => {
                if x < 0.0 {
                    return f64::NEG_INFINITY;
                }
                let z = x / sd;
                LN_2 - sd.ln() - LN_SQRT_2PI - 0.5 * z * z
            }
            Self::Cauchy { location, scale } => {
                let z = (x - location) / scale;
                -(PI * scale).ln() - z.mul_add(z, 1.0).ln()
            }
            Self::StudentT { location, scale, df } => {
                let z = (x - location) / scale;
                gamma::ln_gamma(0.5 * (df + 1.0))
                    - gamma::ln_gamma(0.5 * df)
                    - 0.5 * (df * PI).ln()
                    - scale.ln()
                    - 0.5 * (df + 1.0) * (z * z / df).ln_1p()
            }
            Self::Gamma { shape, scale } => {
                if x < 0.0 {
                    return f64::NEG_INFINITY;
                }
                if x == 0.0 {
                    return match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => -scale.ln(),
                        _ => f64::NEG_INFINITY,
                    };
                }
                (shape - 1.0) * x.ln() - x / scale - gamma::ln_gamma(shape) - shape * scale.ln()
            }
            Self::InverseGamma { shape, scale } => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                shape * scale.ln() - gamma::ln_gamma(shape) - (shape + 1.0) * x.ln() - scale / x
            }
        }
    }

    /// Cumulative distribution function.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.validate()?;
        Ok(self.cdf_unchecked(x))
    }

    pub(crate) fn cdf_unchecked(&self, x: f64) -> f64 {
        if x.is_nan() {
            return f64::NAN;
        }
        match *self {
            Self::PointMass { value } => {
                if x >= value {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Uniform { lower, upper } => ((x - lower) / (upper - lower)).clamp(0.0, 1.0),
            Self::Normal { mean, sd } => {
                0.5 * erf::erfc(-(x - mean) / (sd * std::f64::consts::SQRT_2))
            }
            Self::HalfNormal { sd } => {
                if x <= 0.0 {
                    0.0
                } else {
                    erf::erf(x / (sd * std::f64::consts::SQRT_2))
                }
            }
            Self::Cauchy { location, scale } => 0.5 + ((x - location) / scale).atan() / PI,
            Self::StudentT { location, scale, df } => {
                let z = (x - location) / scale;
                if z.is_infinite() {
                    return if z > 0.0 { 1.0 } else { 0.0 };
                }
                let tail = 0.5 * beta_reg(0.5 * df, 0.5, df / (df + z * z));
                if z <= 0.0 {
                    tail
                } else {
                    1.0 - tail
                }
            }
            Self::Gamma { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma::gamma_lr(shape, x / scale)
                }
            }
            Self::InverseGamma { shape, scale } => {
                if x <= 0.0 {
                    0.0
                } else if x.is_infinite() {
                    1.0
                } else {
                    gamma::gamma_ur(shape, scale / x)
                }
            }
        }
    }

    /// Survival function `1 − CDF(x)`, computed without cancellation where a
    /// complementary form exists.
    pub(crate) fn sf_unchecked(&self, x: f64) -> f64 {
        match *self {
            Self::Normal { mean, sd } => 0.5 * erf::erfc((x - mean) / (sd * std::f64::consts::SQRT_2)),
            Self::HalfNormal { sd } => {
                if x <= 0.0 {
                    1.0
                } else {
                    erf::erfc(x / (sd * std::f64::consts::SQRT_2))
                }
            }
            Self::Cauchy { location, scale } => 0.5 - ((x - location) / scale).atan() / PI,
            Self::StudentT { location, scale, df } => {
                let spec = Self::StudentT { location: -location, scale, df };
                spec.cdf_unchecked(-x)
            }
            Self::Gamma { shape, scale } => {
                if x <= 0.0 {
                    1.0
                } else if x.is_infinite() {
                    0.0
                } else {
                    gamma::gamma_ur(shape, x / scale)
                }
            }
            Self::InverseGamma { shape, scale } => {
                if x <= 0.0 {
                    1.0
                } else if x.is_infinite() {
                    0.0
                } else {
                    gamma::gamma_lr(shape, scale / x)
                }
            }
            _ => 1.0 - self.cdf_unchecked(x),
        }
    }

    /// Inverse CDF. Errors for a point mass or `p` outside (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        self.validate()?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ParameterDomain(format!("probability must lie in (0, 1), got {p}")));
        }
        match *self {
            Self::PointMass { .. } => Err(Error::UnsupportedOperation(
                "quantile of a point mass".to_string(),
            )),
            Self::Uniform { lower, upper } => Ok(lower + p * (upper - lower)),
            Self::Cauchy { location, scale } => Ok(location + scale * (PI * (p - 0.5)).tan()),
            Self::Normal { mean, sd } => {
                let z = standard_quantile(p, |z| Self::Normal { mean: 0.0, sd: 1.0 }.tail(z));
                Ok(mean + sd * z)
            }
            Self::StudentT { location, scale, df } => {
                let z = standard_quantile(p, |z| {
                    Self::StudentT { location: 0.0, scale: 1.0, df }.tail(z)
                });
                Ok(location + scale * z)
            }
            Self::HalfNormal { .. } | Self::Gamma { .. } | Self::InverseGamma { .. } => {
                Ok(positive_quantile(self, p))
            }
        }
    }

    /// `(CDF(x), 1 − CDF(x))` with each side accurate in its own tail.
    fn tail(&self, x: f64) -> (f64, f64) {
        (self.cdf_unchecked(x), self.sf_unchecked(x))
    }

    /// Draws `n` i.i.d. values.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let mut sampler = self.sampler();
        Ok((0..n).map(|_| sampler(rng)).collect())
    }

    /// A reusable single-draw closure over a validated spec.
    pub(crate) fn sampler<R: Rng + ?Sized>(&self) -> Box<dyn FnMut(&mut R) -> f64> {
        match *self {
            Self::PointMass { value } => Box::new(move |_| value),
            Self::Uniform { lower, upper } => {
                Box::new(move |rng: &mut R| lower + (upper - lower) * rng.random::<f64>())
            }
            Self::Normal { mean, sd } => {
                let d = Normal::new(mean, sd).expect("validated");
                Box::new(move |rng: &mut R| d.sample(rng))
            }
            Self::HalfNormal { sd } => {
                let d = Normal::new(0.0, sd).expect("validated");
                Box::new(move |rng: &mut R| d.sample(rng).abs())
            }
            Self::Cauchy { location, scale } => {
                let d = Cauchy::new(location, scale).expect("validated");
                Box::new(move |rng: &mut R| d.sample(rng))
            }
            Self::StudentT { location, scale, df } => {
                let d = StudentT::new(df).expect("validated");
                Box::new(move |rng: &mut R| location + scale * d.sample(rng))
            }
            Self::Gamma { shape, scale } => {
                let d = Gamma::new(shape, scale).expect("validated");
                Box::new(move |rng: &mut R| d.sample(rng))
            }
            Self::InverseGamma { shape, scale } => {
                let d = Gamma::new(shape, 1.0).expect("validated");
                Box::new(move |rng: &mut R| scale / d.sample(rng))
            }
        }
    }
}

/// Quantile of a standardized symmetric distribution by bisection.
///
/// `tail(z)` returns `(CDF(z), 1 − CDF(z))`. Bisection runs in the tail that
/// is numerically accurate, so extreme probabilities keep full relative
/// precision.
fn standard_quantile<F: Fn(f64) -> (f64, f64)>(p: f64, tail: F) -> f64 {
    if p == 0.5 {
        return 0.0;
    }
    // Work with the lower tail and reflect; the distribution is symmetric.
    let (q, sign) = if p < 0.5 { (p, 1.0) } else { (1.0 - p, -1.0) };
    let mut hi = 0.0_f64;
    let mut lo = -1.0_f64;
    while tail(lo).0 > q {
        hi = lo;
        lo *= 2.0;
        if lo < -1e300 {
            break;
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if tail(mid).0 > q {
            hi = mid;
        } else {
            lo = mid;
        }
        if (hi - lo) <= 1e-15 * hi.abs().max(1e-300) {
            break;
        }
    }
    sign * 0.5 * (lo + hi)
}

/// Quantile of a family on the positive half-line, by bisection in log x.
fn positive_quantile(spec: &PriorSpec, p: f64) -> f64 {
    let below = |x: f64| {
        if p <= 0.5 {
            spec.cdf_unchecked(x) < p
        } else {
            spec.sf_unchecked(x) > 1.0 - p
        }
    };
    let mut lo = -1.0_f64;
    let mut hi = 1.0_f64;
    while below(hi.exp()) {
        lo = hi;
        hi *= 2.0;
        if hi > 700.0 {
            break;
        }
    }
    while !below(lo.exp()) {
        hi = lo;
        lo *= 2.0;
        if lo < -700.0 {
            break;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi || hi - lo < 1e-15 {
            break;
        }
        if below(mid.exp()) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi)).exp()
}

/// Writes a real so that it always carries a decimal point, matching the
/// prior grammar.
pub(crate) fn fmt_real(v: f64) -> String {
    let s = format!("{v:?}");
    if s.contains('.') || s.contains("inf") || s.contains("NaN") {
        s
    } else if let Some((mantissa, exp)) = s.split_once('e') {
        format!("{mantissa}.0e{exp}")
    } else {
        format!("{s}.0")
    }
}

impl fmt::Display for PriorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = fmt_real;
        match *self {
            Self::PointMass { value } => write!(f, "point({})", r(value)),
            Self::Uniform { lower, upper } => write!(f, "uniform({},{})", r(lower), r(upper)),
            Self::Normal { mean, sd } => write!(f, "normal({},{})", r(mean), r(sd)),
            Self::HalfNormal { sd } => write!(f, "halfnormal({})", r(sd)),
            Self::Cauchy { location, scale } => {
                write!(f, "cauchy({},{})", r(location), r(scale))
            }
            Self::StudentT { location, scale, df } => {
                write!(f, "t({},{},{})", r(location), r(scale), r(df))
            }
            Self::Gamma { shape, scale } => write!(f, "gamma({},{})", r(shape), r(scale)),
            Self::InverseGamma { shape, scale } => {
                write!(f, "invgamma({},{})", r(shape), r(scale))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_continuous() -> Vec<PriorSpec> {
        vec![
            PriorSpec::uniform(0.0, 1.0).unwrap(),
            PriorSpec::normal(0.0, 0.56).unwrap(),
            PriorSpec::half_normal(0.57).unwrap(),
            PriorSpec::cauchy(0.0, std::f64::consts::FRAC_1_SQRT_2).unwrap(),
            PriorSpec::student_t(0.0, 0.33, 3.0).unwrap(),
            PriorSpec::student_t(0.2, 0.51, 5.0).unwrap(),
            PriorSpec::gamma(1.59, 0.26).unwrap(),
            PriorSpec::gamma(0.7, 2.0).unwrap(),
            PriorSpec::inverse_gamma(1.26, 0.24).unwrap(),
            PriorSpec::inverse_gamma(1.79, 0.28).unwrap(),
        ]
    }

    #[test]
    fn normal_log_density_at_mean() {
        let spec = PriorSpec::normal(0.0, 0.56).unwrap();
        let expected = -(0.56f64).ln() - 0.5 * (2.0 * PI).ln();
        assert!((spec.log_pdf(0.0).unwrap() - expected).abs() < 1e-14);
        assert!((expected - (-0.3391)).abs() < 1e-4);
    }

    #[test]
    fn uniform_and_half_normal_support() {
        let u = PriorSpec::uniform(0.0, 1.0).unwrap();
        assert_eq!(u.log_pdf(0.5).unwrap(), 0.0);
        let h = PriorSpec::half_normal(0.57).unwrap();
        assert_eq!(h.log_pdf(-0.1).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn point_mass_log_density() {
        let p = PriorSpec::point(0.0).unwrap();
        assert_eq!(p.log_pdf(0.0).unwrap(), 0.0);
        assert_eq!(p.log_pdf(1e-300).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(matches!(PriorSpec::normal(0.0, 0.0), Err(Error::ParameterDomain(_))));
        assert!(PriorSpec::uniform(1.0, 1.0).is_err());
        assert!(PriorSpec::student_t(0.0, 1.0, -1.0).is_err());
        assert!(PriorSpec::gamma(f64::NAN, 1.0).is_err());
        let bad = PriorSpec::Normal { mean: 0.0, sd: -1.0 };
        assert!(bad.log_pdf(0.0).is_err());
    }

    #[test]
    fn simple_quantiles() {
        assert_eq!(PriorSpec::uniform(0.0, 1.0).unwrap().quantile(0.25).unwrap(), 0.25);
        assert_eq!(PriorSpec::normal(0.0, 0.56).unwrap().quantile(0.5).unwrap(), 0.0);
        let p = PriorSpec::point(0.0).unwrap();
        assert!(matches!(p.quantile(0.5), Err(Error::UnsupportedOperation(_))));
        assert!(PriorSpec::normal(0.0, 1.0).unwrap().quantile(1.0).is_err());
    }

    #[test]
    fn normal_quantile_known_value() {
        let z = PriorSpec::normal(0.0, 1.0).unwrap().quantile(0.975).unwrap();
        assert!((z - 1.959_963_984_540_054).abs() < 1e-9);
    }

    #[test]
    fn quantile_inverts_cdf_in_central_mass() {
        for spec in all_continuous() {
            for i in 1..200 {
                let p = 0.005 + 0.99 * i as f64 / 200.0;
                let x = spec.quantile(p).unwrap();
                let back = spec.quantile(spec.cdf(x).unwrap()).unwrap();
                assert!(
                    (back - x).abs() <= 1e-8 * x.abs().max(1.0),
                    "{spec}: {x} vs {back}"
                );
            }
        }
    }

    #[test]
    fn extreme_quantiles_are_accurate() {
        for spec in all_continuous() {
            for p in [1e-7, 1.0 - 1e-7] {
                let x = spec.quantile(p).unwrap();
                let achieved = if p < 0.5 { spec.cdf(x).unwrap() } else { spec.sf_unchecked(x) };
                let target = if p < 0.5 { p } else { 1.0 - p };
                assert!(((achieved - target) / target).abs() < 1e-6, "{spec} p={p}: {achieved}");
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_under_seed() {
        for spec in all_continuous() {
            let a = spec.sample(&mut ChaCha8Rng::seed_from_u64(9), 50).unwrap();
            let b = spec.sample(&mut ChaCha8Rng::seed_from_u64(9), 50).unwrap();
            assert_eq!(a, b);
        }
        let p = PriorSpec::point(0.0).unwrap();
        assert_eq!(p.sample(&mut ChaCha8Rng::seed_from_u64(1), 3).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn uniform_sample_mean() {
        let u = PriorSpec::uniform(0.0, 1.0).unwrap();
        let xs = u.sample(&mut ChaCha8Rng::seed_from_u64(42), 100_000).unwrap();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        assert!((mean - 0.5).abs() < 0.01);
    }

    #[test]
    fn student_t_sample_median() {
        let t = PriorSpec::student_t(0.0, 0.33, 3.0).unwrap();
        let mut xs = t.sample(&mut ChaCha8Rng::seed_from_u64(42), 100_000).unwrap();
        xs.sort_by(f64::total_cmp);
        assert!(xs[50_000].abs() < 0.01);
    }

    #[test]
    fn samples_follow_cdf() {
        // Kolmogorov-Smirnov distance against the analytic CDF.
        for spec in all_continuous() {
            let mut xs = spec.sample(&mut ChaCha8Rng::seed_from_u64(3), 20_000).unwrap();
            xs.sort_by(f64::total_cmp);
            let n = xs.len() as f64;
            let d = xs
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    let f = spec.cdf(x).unwrap();
                    (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
                })
                .fold(0.0, f64::max);
            assert!(d < 0.015, "{spec}: KS distance {d}");
        }
    }

    #[test]
    fn display_uses_grammar() {
        let t = PriorSpec::student_t(0.0, 0.51, 5.0).unwrap();
        assert_eq!(t.to_string(), "t(0.0,0.51,5.0)");
        assert_eq!(t.to_string().parse::<PriorSpec>().unwrap(), t);
    }
}
