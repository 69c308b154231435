//! Exact rational scalars.
//!
//! Every coordinate, bound and mixing weight in the engine is a
//! [`BigRational`] kept in lowest terms, so no computation ever rounds.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

/// `n / d`, reduced. Panics when `d == 0`.
pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn half() -> Scalar {
    ratio(1, 2)
}

/// Parses `-3`, `0.75`, `3/5` or `-1.5/2` into an exact rational.
pub fn parse_scalar(text: &str) -> Option<Scalar> {
    let text = text.trim();
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_decimal(num)?;
        let den = parse_decimal(den)?;
        if den.is_zero() {
            return None;
        }
        return Some(num / den);
    }
    parse_decimal(text)
}

fn parse_decimal(text: &str) -> Option<Scalar> {
    let (negative, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    if body.is_empty() {
        return None;
    }
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let denom = BigInt::from(10u32).pow(frac.len() as u32);
    let value = Scalar::new(numer, denom);
    Some(if negative { -value } else { value })
}

/// Always `num/den` (or a bare integer). Used by machine-readable output.
pub fn fmt_exact(x: &Scalar) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Terminating decimal when one exists (`3/4` prints as `0.75`), otherwise `num/den`.
pub fn fmt_decimal(x: &Scalar) -> String {
    let den = x.denom().clone();
    let mut rest = den.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return fmt_exact(x);
    }
    let places = twos.max(fives);
    if places == 0 {
        return x.numer().to_string();
    }
    let scaled = x.numer().abs() * BigInt::from(10u32).pow(places) / &den;
    let digits = format!("{:0>width$}", scaled.to_string(), width = places as usize + 1);
    let (whole, frac) = digits.split_at(digits.len() - places as usize);
    let frac = frac.trim_end_matches('0');
    let sign = if x.is_negative() { "-" } else { "" };
    format!("{sign}{whole}.{frac}")
}
