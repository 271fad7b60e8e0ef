//! Exact rational numbers: parsing from `p/q` and decimal literals, and
//! canonical printing.

use alloc::format;
use alloc::string::{String, ToString};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `p/q`, an integer, or a decimal literal such as `0.9` (read exactly
/// as 9/10). A leading sign is accepted.
pub fn parse(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::InvalidRational(text.to_string());
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num.trim()).ok_or_else(bad)?;
        let den = parse_int(den.trim()).ok_or_else(bad)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (negative, body) = match s.as_bytes()[0] {
        b'-' => (true, &s[1..]),
        b'+' => (false, &s[1..]),
        _ => (false, s),
    };
    let (whole, frac) = match body.split_once('.') {
        Some((w, f)) => (w, f),
        None => (body, ""),
    };
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    let all_digits = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(whole) || !all_digits(frac) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac.len());
    let value = Rational::new(numer, denom);
    Ok(if negative { -value } else { value })
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s
        .strip_prefix('-')
        .or_else(|| s.strip_prefix('+'))
        .unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal expansion. Returns the digits and whether they are exact; a
/// non-terminating expansion is rounded half away from zero at `places`.
pub fn to_decimal(r: &Rational, places: usize) -> (String, bool) {
    let terminates = {
        let mut d = r.denom().clone();
        for p in [2u32, 5] {
            let p = BigInt::from(p);
            while (&d % &p).is_zero() {
                d /= &p;
            }
        }
        d.is_one()
    };
    let sign = if r.is_negative() { "-" } else { "" };
    let abs = r.abs();
    let mut places_used = places;
    if terminates {
        // smallest number of places that represents the value exactly
        let mut k = 0usize;
        let mut scaled = abs.clone();
        while !scaled.is_integer() {
            scaled *= int(10);
            k += 1;
        }
        if k <= places {
            places_used = k;
        }
    }
    let scale = num_traits::pow(BigInt::from(10u32), places_used);
    let scaled = &abs * Rational::from_integer(scale.clone());
    let exact = scaled.is_integer();
    let rounded = (scaled + ratio(1, 2)).floor().to_integer();
    let (whole, frac) = rounded.div_rem(&scale);
    let text = if places_used == 0 {
        format!("{sign}{whole}")
    } else {
        let frac = frac.to_string();
        let pad = places_used - frac.len();
        format!("{sign}{whole}.{}{frac}", "0".repeat(pad))
    };
    (text, exact)
}
