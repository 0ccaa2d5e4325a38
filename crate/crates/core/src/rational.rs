//! Exact rational scalar used for every coordinate, dimension and profit.

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

/// Exact rational number. All geometry is done in this type; there is no
/// floating-point path.
pub type Q = Ratio<i128>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i128, d: i128) -> Q {
    Q::new(n, d)
}

/// Renders as `"p/q"` with `q > 0`, always including the denominator.
pub fn format_q(v: &Q) -> String {
    format!("{}/{}", v.numer(), v.denom())
}

/// Accepts `"p/q"`, `"p"` or a plain decimal such as `"0.55"`.
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let d: i128 = d.trim().parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        if d == 0 {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(Q::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 30 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal {s:?}"));
        }
        let neg = int.starts_with('-');
        let int_part: i128 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| format!("bad decimal {s:?}"))?
        };
        let scale = 10i128.pow(frac.len() as u32);
        let frac_part: i128 = frac.parse().map_err(|_| format!("bad decimal {s:?}"))?;
        let mag = int_part.abs() * scale + frac_part;
        return Ok(Q::new(if neg { -mag } else { mag }, scale));
    }
    s.parse::<i128>()
        .map(Q::from_integer)
        .map_err(|_| format!("bad rational {s:?}"))
}

pub fn to_f64(v: &Q) -> f64 {
    v.numer().to_f64().unwrap_or(f64::NAN) / v.denom().to_f64().unwrap_or(f64::NAN)
}

/// Nearest rational with the given denominator (ties away from zero).
pub fn round_to_denominator(x: f64, den: i128) -> Q {
    Q::new((x * den as f64).round() as i128, den)
}

/// Rounds a rational to the nearest multiple of `1/den`.
pub fn snap(v: &Q, den: i128) -> Q {
    let scaled = v * q(den);
    let floor = scaled.floor();
    let frac = scaled - floor;
    let r = if frac * q(2) >= Q::one() { floor + Q::one() } else { floor };
    r / q(den)
}

/// Least common multiple of the denominators of `values` (1 for an empty slice).
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Q>) -> i128 {
    values.into_iter().fold(1i128, |acc, v| acc.lcm(v.denom()))
}

pub fn is_positive(v: &Q) -> bool {
    v.is_positive()
}

pub fn is_zero(v: &Q) -> bool {
    v.is_zero()
}

pub mod serde_q {
    use super::*;

    pub fn serialize<S: Serializer>(v: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(v))
    }

    /// Accepts the string forms of [`parse_q`] as well as JSON numbers.
    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Text(s) => s,
            Raw::Int(i) => i.to_string(),
            Raw::Float(f) => f.to_string(),
        };
        parse_q(&text).map_err(serde::de::Error::custom)
    }
}
