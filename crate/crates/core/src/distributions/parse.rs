//! Text grammar for priors: `t(location,scale,df)`, `normal(mean,sd)`,
//! `cauchy(location,scale)`, `halfnormal(sd)`, `gamma(shape,scale)`,
//! `invgamma(shape,scale)`, `uniform(lower,upper)`, `point(value)`.
//!
//! Family names are case-insensitive and every number must carry a decimal
//! point.

use std::str::FromStr;

use super::PriorSpec;
use crate::error::Error;

fn real(token: &str) -> Result<f64, Error> {
    let t = token.trim();
    if !t.contains('.') {
        return Err(Error::Invalid(format!(
            "number `{t}` must contain a decimal point"
        )));
    }
    t.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Invalid(format!("`{t}` is not a finite number")))
}

impl FromStr for PriorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, rest) = s
            .split_once('(')
            .ok_or_else(|| Error::Invalid(format!("prior `{s}` is missing `(`")))?;
        let args = rest
            .strip_suffix(')')
            .ok_or_else(|| Error::Invalid(format!("prior `{s}` is missing `)`")))?;
        let values = if args.trim().is_empty() {
            Vec::new()
        } else {
            args.split(',').map(real).collect::<Result<Vec<_>, _>>()?
        };
        let name = name.trim().to_ascii_lowercase();
        let arity = match name.as_str() {
            "point" | "halfnormal" => 1,
            "normal" | "cauchy" | "gamma" | "invgamma" | "uniform" => 2,
            "t" => 3,
            other => return Err(Error::Invalid(format!("unknown prior family `{other}`"))),
        };
        if values.len() != arity {
            return Err(Error::Invalid(format!(
                "`{name}` takes {arity} argument(s), got {}",
                values.len()
            )));
        }
        let v = &values;
        match name.as_str() {
            "point" => PriorSpec::point(v[0]),
            "halfnormal" => PriorSpec::half_normal(v[0]),
            "normal" => PriorSpec::normal(v[0], v[1]),
            "cauchy" => PriorSpec::cauchy(v[0], v[1]),
            "gamma" => PriorSpec::gamma(v[0], v[1]),
            "invgamma" => PriorSpec::inverse_gamma(v[0], v[1]),
            "uniform" => PriorSpec::uniform(v[0], v[1]),
            _ => PriorSpec::student_t(v[0], v[1], v[2]),
        }
    }
}
