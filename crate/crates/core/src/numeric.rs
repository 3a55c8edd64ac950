//! Exact-rational helpers shared across the crate.
//!
//! All quantities that the library promises to compute exactly are carried as
//! [`Rat`] (arbitrary-precision rationals). Floating point only enters at
//! report boundaries and inside explicitly approximate code paths.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

pub type Rat = BigRational;

/// `n` as a rational.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// `n/d` as a reduced rational.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_zero() -> Rat {
    Rat::zero()
}

pub fn rat_one() -> Rat {
    Rat::one()
}

/// Nearest f64 of a rational (for report rendering).
pub fn rat_to_f64(r: &Rat) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to log-space when numerator/denominator each overflow f64.
        let sign = if r.is_negative() { -1.0 } else { 1.0 };
        let lg = log10_bigint(&r.numer().abs()) - log10_bigint(&r.denom().abs());
        sign * 10f64.powf(lg)
    })
}

/// Exact rational value of a finite f64.
pub fn f64_to_rat(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

/// Parse `"3/4"`, `"-1.25"`, `"2"`, or `"2.5e-3"` into an exact rational.
///
/// Decimal literals are read digit-for-digit; no float round-trip is involved.
pub fn parse_rational(s: &str) -> Result<Rat, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| ParseRationalError::Malformed(s.to_owned()))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| ParseRationalError::Malformed(s.to_owned()))?;
        if d.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_owned()));
        }
        return Ok(Rat::new(n, d));
    }
    parse_decimal(s).ok_or_else(|| ParseRationalError::Malformed(s.to_owned()))
}

fn parse_decimal(s: &str) -> Option<Rat> {
    let (mantissa, exp10) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i64 = s[pos + 1..].parse().ok()?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let value: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().ok()?
    };
    let scale = exp10 - frac_part.len() as i64;
    let mut r = Rat::from_integer(value * BigInt::from(sign));
    if scale >= 0 {
        r *= Rat::from_integer(BigInt::from(10u32).pow(scale as u32));
    } else {
        r /= Rat::from_integer(BigInt::from(10u32).pow((-scale) as u32));
    }
    Some(r)
}

/// log10 of a positive big integer, accurate to f64 precision.
pub fn log10_bigint(n: &BigInt) -> f64 {
    assert!(n.is_positive(), "log10 of non-positive integer");
    let bits = n.bits();
    if bits <= 53 {
        return n.to_f64().expect("small BigInt fits f64").log10();
    }
    let shift = bits - 53;
    let top: BigInt = n >> shift;
    let mantissa = top.to_f64().expect("53-bit value fits f64");
    mantissa.log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// log10 of a positive rational.
pub fn log10_rat(r: &Rat) -> f64 {
    assert!(r.is_positive(), "log10 of non-positive rational");
    log10_bigint(r.numer()) - log10_bigint(r.denom())
}

/// Scientific `mantissa * 10^exp10` rendering for values too large for f64.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SciValue {
    pub mantissa: f64,
    pub exp10: i64,
}

impl SciValue {
    pub fn from_log10(log10: f64) -> Self {
        let exp10 = log10.floor() as i64;
        SciValue {
            mantissa: 10f64.powf(log10 - exp10 as f64),
            exp10,
        }
    }

    pub fn to_f64(&self) -> Option<f64> {
        let v = self.mantissa * 10f64.powi(self.exp10 as i32);
        v.is_finite().then_some(v)
    }
}

impl std::fmt::Display for SciValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.6}e{}", self.mantissa, self.exp10)
    }
}

/// Render a rational as `"num/den"` (or `"num"` for integers).
pub fn rat_string(r: &Rat) -> String {
    r.to_string()
}
