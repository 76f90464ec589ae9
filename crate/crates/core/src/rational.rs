//! Exact rational helpers: parsing, rendering, and small conversions.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number used for every payoff, welfare, and risk value.
pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn one() -> Rational {
    Rational::one()
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Parses `"p/q"`, integers, and plain decimals (`"0.55"`, `"-1.5"`, `"2e-3"`)
/// into an exact rational. Decimals are read digit-for-digit, so `"0.1"` is `1/10`.
pub fn parse(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((n, d)) = s.split_once('/') {
        let n = parse(n)?;
        let d = parse(d)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let exp: i32 = s[pos + 1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
            (&s[..pos], exp)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(Error::Parse(format!("not a number: {s:?}")));
    }
    let joined = format!("{whole}{frac}");
    let numer: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().map_err(|_| Error::Parse(format!("not a number: {s:?}")))?
    };
    let scale = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Renders a rational as `p/q` (or just `p` for integers).
pub fn to_fraction(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Renders a rational as a decimal with `sig` significant digits, rounded half
/// away from zero, trailing zeros trimmed.
pub fn to_decimal(q: &Rational, sig: usize) -> String {
    if q.is_zero() {
        return "0".into();
    }
    let negative = q.is_negative();
    let a = q.abs();
    // Find the decimal exponent e with 10^e <= a < 10^(e+1).
    let ten = Rational::from_integer(BigInt::from(10));
    let mut e: i64 = 0;
    let mut probe = a.clone();
    while probe >= ten {
        probe /= &ten;
        e += 1;
    }
    while probe < Rational::one() {
        probe *= &ten;
        e -= 1;
    }
    // Scale so that the integer part carries exactly `sig` digits.
    let shift = sig as i64 - 1 - e;
    let scaled = if shift >= 0 {
        &a * Rational::from_integer(num_traits::pow(BigInt::from(10), shift as usize))
    } else {
        &a / Rational::from_integer(num_traits::pow(BigInt::from(10), (-shift) as usize))
    };
    let (quot, rem) = scaled.numer().div_rem(scaled.denom());
    let mut digits = quot;
    if rem * BigInt::from(2) >= *scaled.denom() {
        digits += 1;
    }
    let mut text = digits.to_str_radix(10);
    let mut shift = shift;
    if text.len() > sig {
        // Rounding carried into a new leading digit.
        text.pop();
        shift -= 1;
    }
    let body = if shift <= 0 {
        let zeros = "0".repeat((-shift) as usize);
        format!("{text}{zeros}")
    } else if (shift as usize) < text.len() {
        let split = text.len() - shift as usize;
        let (i, f) = text.split_at(split);
        let f = f.trim_end_matches('0');
        if f.is_empty() {
            i.to_string()
        } else {
            format!("{i}.{f}")
        }
    } else {
        let zeros = "0".repeat(shift as usize - text.len());
        let f = format!("{zeros}{text}");
        format!("0.{}", f.trim_end_matches('0'))
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Numerator and denominator as `i128`, for the scaled-integer fast paths.
pub(crate) fn as_i128_pair(q: &Rational) -> Result<(i128, i128)> {
    let n = q.numer().to_i128().ok_or(Error::Overflow)?;
    let d = q.denom().to_i128().ok_or(Error::Overflow)?;
    // Scores multiply these by counts up to a few hundred; keep headroom.
    const LIMIT: i128 = 1 << 100;
    if n.abs() > LIMIT || d > LIMIT {
        return Err(Error::Overflow);
    }
    Ok((n, d))
}

pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}

pub fn is_positive(q: &Rational) -> bool {
    q.numer().sign() == Sign::Plus
}

/// Serde adapter writing rationals as `"p/q"` strings and reading anything [`parse`] accepts.
pub mod fraction {
    use super::{parse, to_fraction, Rational};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&to_fraction(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse(&t).map_err(D::Error::custom),
            Raw::Int(v) => Ok(super::int(v)),
            // Shortest round-trip text, so 0.1 reads as 1/10.
            Raw::Float(v) => parse(&v.to_string()).map_err(D::Error::custom),
        }
    }

    /// Same adapter for sequences.
    pub mod vec {
        use super::super::{to_fraction, Rational};
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(to_fraction))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            #[derive(Deserialize)]
            struct Item(#[serde(with = "super")] Rational);
            Ok(Vec::<Item>::deserialize(d)?.into_iter().map(|i| i.0).collect())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse("0.55").unwrap(), ratio(11, 20));
        assert_eq!(parse("1/4").unwrap(), ratio(1, 4));
        assert_eq!(parse("-1.5").unwrap(), ratio(-3, 2));
        assert_eq!(parse("2e-3").unwrap(), ratio(1, 500));
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse(".5").unwrap(), ratio(1, 2));
        assert!(parse("abc").is_err());
        assert!(parse("1/0").is_err());
        assert!(parse("").is_err());
    }

    #[test]
    fn renders_fraction_and_decimal() {
        assert_eq!(to_fraction(&ratio(6, 4)), "3/2");
        assert_eq!(to_fraction(&int(2)), "2");
        assert_eq!(to_decimal(&ratio(1, 3), 17), "0.33333333333333333");
        assert_eq!(to_decimal(&ratio(2, 3), 17), "0.66666666666666667");
        assert_eq!(to_decimal(&ratio(3, 5), 17), "0.6");
        assert_eq!(to_decimal(&ratio(-7, 15), 5), "-0.46667");
        assert_eq!(to_decimal(&int(120), 17), "120");
        assert_eq!(to_decimal(&ratio(999_999, 1_000_000), 3), "1");
        assert_eq!(to_decimal(&ratio(1, 400), 17), "0.0025");
    }
}
