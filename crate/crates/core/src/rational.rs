//! The exact scalar used everywhere: an arbitrary-precision fraction.
//!
//! Values are stored in lowest terms with a positive denominator; the text
//! form is `"p/q"`, or `"n"` when the value is integral.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::ParseError;

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text form.
pub fn to_text(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the canonical text form. Non-reduced fractions, signed or zero
/// denominators and stray whitespace are rejected so that parsing followed
/// by [`to_text`] is the identity on accepted strings.
pub fn parse(s: &str) -> Result<Rational, ParseError> {
    let bad = || ParseError::Rational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer = parse_int(num).ok_or_else(bad)?;
    let denom = match den {
        None => BigInt::one(),
        Some(d) => {
            if d.starts_with(['-', '+']) {
                return Err(bad());
            }
            let d = parse_int(d).ok_or_else(bad)?;
            if d.is_zero() || d.is_one() {
                return Err(bad());
            }
            d
        }
    };
    let r = Rational::new(numer.clone(), denom.clone());
    if r.numer() != &numer || r.denom() != &denom || (numer.is_zero() && den.is_some()) {
        return Err(bad());
    }
    Ok(r)
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    // no leading zeros, and no "-0"
    if digits.len() > 1 && digits.starts_with('0') {
        return None;
    }
    let v = BigInt::from_str(s).ok()?;
    if v.is_zero() && s.starts_with('-') {
        return None;
    }
    Some(v)
}

/// Returns the value as an integer if its denominator is one.
pub fn as_integer(r: &Rational) -> Option<BigInt> {
    r.is_integer().then(|| r.numer().clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_forms() {
        assert_eq!(to_text(&frac(6, -4)), "-3/2");
        assert_eq!(to_text(&int(0)), "0");
        assert_eq!(to_text(&int(-7)), "-7");
        assert_eq!(parse("-3/2").unwrap(), frac(-3, 2));
        assert_eq!(parse("12").unwrap(), int(12));
    }

    #[test]
    fn rejects_non_canonical() {
        for s in ["2/4", "1/-2", "3/1", "0/5", "-0", "007", "1/0", "", "a/b", " 1", "+1"] {
            assert!(parse(s).is_err(), "{s:?} should be rejected");
        }
    }
}
