//! Exact rational scalars.
//!
//! Every coefficient in the crate is a [`Scalar`], an arbitrary-precision
//! reduced fraction. Serialized form is the string `"p/q"` (or `"p"` for
//! integers); floating point is never accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{JetError, Result};

pub type Scalar = BigRational;

/// A point of the coordinate chart.
pub type Point = Vec<Scalar>;

pub fn int(v: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Scalar {
    Scalar::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

pub fn origin(n: usize) -> Point {
    vec![Scalar::zero(); n]
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`. Decimal points and exponents are rejected.
pub fn parse(s: &str) -> Result<Scalar> {
    let t = s.trim();
    let bad = || JetError::Parse(format!("not an exact rational: {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let ok = |x: &str| {
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !ok(num) || !ok(den) {
        return Err(bad());
    }
    let p: BigInt = num.parse().map_err(|_| bad())?;
    let q: BigInt = den.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(JetError::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Scalar::new(p, q))
}

pub fn format(s: &Scalar) -> String {
    s.to_string()
}

/// Serde adapter: scalars as `"p/q"` strings.
pub mod serde_scalar {
    use super::*;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter for `Vec<Scalar>`.
pub mod serde_scalars {
    use super::*;
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for x in v {
            seq.serialize_element(&format(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Scalar>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter().map(|s| parse(s).map_err(D::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_integers() {
        assert_eq!(parse("3/6").unwrap(), frac(1, 2));
        assert_eq!(parse("-4").unwrap(), int(-4));
        assert_eq!(parse(" 2 / -4 ").unwrap(), frac(-1, 2));
    }

    #[test]
    fn rejects_floats_and_garbage() {
        for s in ["0.5", "1e3", "", "a/b", "1/0", "--1"] {
            assert!(parse(s).is_err(), "{s}");
        }
    }

    #[test]
    fn format_round_trips() {
        for v in [frac(-7, 3), int(0), int(12)] {
            assert_eq!(parse(&format(&v)).unwrap(), v);
        }
    }
}
