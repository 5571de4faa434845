//! Synthetic comparisons drawn from the random-effects model.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::distributions::PriorSpec;
use crate::error::{Error, Result};
use crate::meta_core::{Comparison, Study};

/// Study counts and standard errors of simulated comparisons.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Design {
    /// Inclusive range of studies per comparison.
    pub studies: (usize, usize),
    /// Standard errors are drawn uniformly from this range.
    pub se: (f64, f64),
}

impl Default for Design {
    fn default() -> Self {
        Self { studies: (10, 30), se: (0.1, 0.3) }
    }
}

impl Design {
    pub fn fixed(k: usize, se: (f64, f64)) -> Self {
        Self { studies: (k, k), se }
    }

    fn validate(&self) -> Result<()> {
        let (k0, k1) = self.studies;
        let (s0, s1) = self.se;
        if k0 == 0 || k0 > k1 {
            return Err(Error::Invalid(format!("invalid study range {k0}..={k1}")));
        }
        if !(s0 > 0.0 && s0 <= s1 && s1.is_finite()) {
            return Err(Error::Invalid(format!("invalid standard-error range [{s0}, {s1}]")));
        }
        Ok(())
    }
}

/// One comparison with true mean `delta` and heterogeneity `tau`:
/// `θᵢ ~ N(δ, τ²)` and `yᵢ ~ N(θᵢ, seᵢ²)`.
pub fn simulate_comparison<R: Rng + ?Sized>(
    rng: &mut R,
    id: impl Into<String>,
    delta: f64,
    tau: f64,
    design: &Design,
) -> Result<Comparison> {
    design.validate()?;
    if !(delta.is_finite() && tau.is_finite() && tau >= 0.0) {
        return Err(Error::Invalid(format!("invalid true values δ={delta}, τ={tau}")));
    }
    let k = rng.random_range(design.studies.0..=design.studies.1);
    let std = Normal::new(0.0, 1.0).expect("unit normal");
    let studies = (0..k)
        .map(|i| {
            let se = if design.se.0 == design.se.1 { design.se.0 } else { rng.random_range(design.se.0..design.se.1) };
            let theta = delta + tau * std.sample(rng);
            Study::labeled(theta + se * std.sample(rng), se, format!("study {}", i + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    Comparison::new(id, studies)
}

/// `n` comparisons whose true δ and τ are drawn from the given priors.
/// Point masses give fixed values.
pub fn simulate_corpus<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    delta_prior: &PriorSpec,
    tau_prior: &PriorSpec,
    design: &Design,
) -> Result<Vec<Comparison>> {
    let draw = |p: &PriorSpec, rng: &mut R| -> Result<f64> {
        match p {
            PriorSpec::PointMass { value } => Ok(*value),
            _ => Ok(p.sample(rng, 1)?[0]),
        }
    };
    (0..n)
        .map(|i| {
            let d = draw(delta_prior, rng)?;
            let t = draw(tau_prior, rng)?;
            simulate_comparison(rng, format!("c{:04}", i + 1), d, t, design)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_design() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = Design { studies: (3, 5), se: (0.1, 0.2) };
        let corpus = simulate_corpus(&mut rng, 50, &PriorSpec::point(0.0).unwrap(), &PriorSpec::gamma(1.59, 0.26).unwrap(), &d).unwrap();
        assert_eq!(corpus.len(), 50);
        for c in &corpus {
            assert!((3..=5).contains(&c.len()));
            assert!(c.studies().iter().all(|s| (0.1..0.2).contains(&s.se)));
        }
    }

    #[test]
    fn seeded_runs_repeat() {
        let d = Design::default();
        let a = simulate_comparison(&mut ChaCha8Rng::seed_from_u64(9), "a", 0.3, 0.2, &d).unwrap();
        let b = simulate_comparison(&mut ChaCha8Rng::seed_from_u64(9), "a", 0.3, 0.2, &d).unwrap();
        assert_eq!(a, b);
    }
}
