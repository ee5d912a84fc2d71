//! Exact rationals: parsing, `a/b` rendering and probability grids.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{input, Result};

pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Renders `value` as `numerator/denominator`, always with the denominator.
pub fn format_ratio(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Parses `a/b`, an integer, or a plain decimal such as `0.125`.
///
/// Decimals convert exactly: `0.125` is `125/1000 = 1/8`.
pub fn parse_ratio(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return input("empty number");
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad(s))?;
        let b: BigInt = b.trim().parse().map_err(|_| bad(s))?;
        if b.is_zero() {
            return input(format!("zero denominator in `{s}`"));
        }
        return Ok(BigRational::new(a, b));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if (int_part.is_empty() && frac_part.is_empty())
        || !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return Err(bad(s));
    }
    let digits = format!("{int_part}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad(s))?
    };
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let value = BigRational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn bad(s: &str) -> crate::Error {
    crate::Error::Input(format!("cannot parse `{s}` as a rational or decimal"))
}

/// Parses a probability and checks it lies in `[0, 1]`.
pub fn parse_probability(text: &str) -> Result<Rational> {
    let p = parse_ratio(text)?;
    if p.is_negative() || p > Rational::one() {
        return input(format!("probability `{}` outside [0,1]", text.trim()));
    }
    Ok(p)
}

/// The grid `{0, 1/(k-1), ..., 1}` with `k` points.
pub fn probability_grid(k: usize) -> Result<Vec<Rational>> {
    match k {
        0 => input("probability grid needs at least one point"),
        1 => Ok(vec![Rational::zero()]),
        _ => Ok((0..k).map(|i| rational(i as i64, (k - 1) as i64)).collect()),
    }
}
