//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature of functions given
//! in log space.
//!
//! Integrands are supplied as `ln f(x)` and the result is `ln ∫ f`. All node
//! values are exponentiated relative to a running maximum, so likelihoods
//! of several hundred log units never underflow. Stored partial results are
//! rescaled whenever a larger node value appears.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_814_172_777,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances for [`log_integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    /// Relative error target on the integral, which is also the absolute
    /// error target on its logarithm.
    pub rel_tol: f64,
    /// Maximum number of subintervals before giving up.
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-8, max_intervals: 4000 }
    }
}

/// `ln ∫ f` together with its estimated relative error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogIntegral {
    pub log_value: f64,
    pub rel_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

struct Integrator<F> {
    log_f: F,
    shift: f64,
    heap: BinaryHeap<Piece>,
}

impl<F: FnMut(f64) -> f64> Integrator<F> {
    /// Evaluates the 21-point rule on `[a, b]`, returning the Kronrod
    /// estimate and `|K − G|` in units of `exp(self.shift)`.
    fn rule(&mut self, a: f64, b: f64) -> Result<Piece> {
        let center = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut logs = [0.0f64; 21];
        for (i, &x) in XGK.iter().enumerate() {
            if i < 10 {
                logs[2 * i] = self.eval(center - half * x)?;
                logs[2 * i + 1] = self.eval(center + half * x)?;
            } else {
                logs[20] = self.eval(center)?;
            }
        }
        // Endpoint values only feed the error estimate, so a singular endpoint
        // is tolerated there.
        let edge_logs = [a, b].map(|x| {
            let v = (self.log_f)(x);
            if v.is_finite() {
                v
            } else {
                f64::NEG_INFINITY
            }
        });
        let local_max = logs.iter().chain(&edge_logs).copied().fold(f64::NEG_INFINITY, f64::max);
        if local_max.is_finite() && (self.shift == f64::NEG_INFINITY || local_max > self.shift + 30.0) {
            self.rescale(local_max);
        }
        let s = self.shift;
        let e = |l: f64| if l == f64::NEG_INFINITY { 0.0 } else { (l - s).exp() };
        let mut kronrod = WGK[10] * e(logs[20]);
        let mut gauss = 0.0;
        for i in 0..10 {
            let pair = e(logs[2 * i]) + e(logs[2 * i + 1]);
            kronrod += WGK[i] * pair;
            if i % 2 == 1 {
                gauss += WG[i / 2] * pair;
            }
        }
        let value = kronrod * half;
        let mut error = ((kronrod - gauss) * half).abs();
        // A peak narrower than the node spacing shows up only at an endpoint.
        let edge = e(edge_logs[0]).max(e(edge_logs[1])) * (b - a);
        if edge > 50.0 * value {
            error = error.max(edge);
        }
        Ok(Piece { a, b, value, error })
    }

    fn eval(&mut self, x: f64) -> Result<f64> {
        let v = (self.log_f)(x);
        if v.is_nan() || v == f64::INFINITY {
            return Err(Error::NumericDomain(format!("log integrand is {v} at {x}")));
        }
        Ok(v)
    }

    fn rescale(&mut self, new_shift: f64) {
        let factor = if self.shift == f64::NEG_INFINITY { 0.0 } else { (self.shift - new_shift).exp() };
        let pieces: Vec<Piece> = self.heap.drain().collect();
        for mut p in pieces {
            p.value *= factor;
            p.error *= factor;
            self.heap.push(p);
        }
        self.shift = new_shift;
    }
}

/// Computes `ln ∫_a^b exp(log_f(x)) dx`.
///
/// `breakpoints` inside `(a, b)` seed the initial partition; place them at
/// features of the integrand (modes, scale points) that a coarse rule could
/// miss. Returns `-inf` when the integrand is zero everywhere it was sampled.
pub fn log_integrate<F: FnMut(f64) -> f64>(
    log_f: F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    config: &QuadConfig,
) -> Result<LogIntegral> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::NumericDomain(format!("integration bounds [{a}, {b}] must be finite")));
    }
    if a >= b {
        return Ok(LogIntegral { log_value: f64::NEG_INFINITY, rel_error: 0.0, intervals: 0 });
    }
    let mut points: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    points.push(a);
    points.push(b);
    points.sort_by(f64::total_cmp);
    points.dedup();

    let mut integ = Integrator { log_f, shift: f64::NEG_INFINITY, heap: BinaryHeap::new() };
    for w in points.windows(2) {
        let piece = integ.rule(w[0], w[1])?;
        integ.heap.push(piece);
    }

    loop {
        let (total, err) = integ.heap.iter().fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error));
        let intervals = integ.heap.len();
        if total <= 0.0 {
            if err == 0.0 {
                return Ok(LogIntegral { log_value: f64::NEG_INFINITY, rel_error: 0.0, intervals });
            }
        } else if err <= config.rel_tol * total || err <= f64::EPSILON * 4.0 * total {
            return Ok(LogIntegral {
                log_value: integ.shift + total.ln(),
                rel_error: err / total,
                intervals,
            });
        }
        let worst = integ.heap.pop().expect("non-empty partition");
        if intervals >= config.max_intervals {
            return Err(Error::Convergence { lower: worst.a, upper: worst.b, error: err / total.max(f64::MIN_POSITIVE) });
        }
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in floating point.
            return Err(Error::Convergence { lower: worst.a, upper: worst.b, error: err / total.max(f64::MIN_POSITIVE) });
        }
        // Push `left` before evaluating `right` so that a shift raised by
        // the right half rescales it along with the rest of the heap.
        let left = integ.rule(worst.a, mid)?;
        integ.heap.push(left);
        let right = integ.rule(mid, worst.b)?;
        integ.heap.push(right);
    }
}

/// Log-sum-exp of a slice; `-inf` for an empty slice or all `-inf` entries.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
