//! Exact rational scalars and points, plus their JSON encoding.
//!
//! Rationals serialize as `"p/q"` strings (or `"p"` for integers). The reader
//! also accepts JSON integers, exact decimal strings such as `"0.25"`, and
//! `[p, q]` pairs.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;
pub type Point = Vec<Rational>;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn point(coords: &[(i64, i64)]) -> Point {
    coords.iter().map(|&(p, q)| ratio(p, q)).collect()
}

pub fn int_point(coords: &[i64]) -> Point {
    coords.iter().map(|&c| int(c)).collect()
}

/// Parses `"p/q"`, `"p"`, or an exact decimal such as `"-1.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let err = || Error::Parse(format!("invalid rational `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        let digits = format!("{whole_digits}{frac}");
        let mut num = BigInt::from_str(&digits).map_err(|_| err())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(Rational::new(num, den));
    }
    let p = BigInt::from_str(s).map_err(|_| err())?;
    Ok(Rational::from_integer(p))
}

pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator or denominator overflowed f64; fall back to a scaled ratio
        let n = q.numer().bits() as i64;
        let d = q.denom().bits() as i64;
        let shift = (n.max(d) - 900).max(0) as usize;
        let num = (q.numer() >> shift).to_f64().unwrap_or(0.0);
        let den = (q.denom() >> shift).to_f64().unwrap_or(1.0);
        num / den
    })
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Point {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(s: &Rational, a: &[Rational]) -> Point {
    a.iter().map(|x| s * x).collect()
}

pub fn neg(a: &[Rational]) -> Point {
    a.iter().map(|x| -x).collect()
}

pub fn zeros(dim: usize) -> Point {
    vec![Rational::zero(); dim]
}

pub fn centroid(points: &[Point]) -> Point {
    let dim = points.first().map_or(0, Vec::len);
    let mut acc = zeros(dim);
    for p in points {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
    }
    let n = int(points.len() as i64);
    acc.into_iter().map(|a| a / &n).collect()
}

pub fn squared_distance(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| {
        let d = x - y;
        acc + &d * &d
    })
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    let k = k.min(n - k.min(n));
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn abs(q: &Rational) -> Rational {
    q.abs()
}

/// JSON wrapper used by the serde helper modules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum QRepr {
    Int(i64),
    Str(String),
    Pair(i64, i64),
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        match QRepr::deserialize(d)? {
            QRepr::Int(n) => Ok(Q(int(n))),
            QRepr::Str(s) => parse_rational(&s).map(Q).map_err(D::Error::custom),
            QRepr::Pair(_, 0) => Err(D::Error::custom("zero denominator")),
            QRepr::Pair(p, q) => Ok(Q(ratio(p, q))),
        }
    }
}

pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        Q(q.clone()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        Q::deserialize(d).map(|q| q.0)
    }
}

pub mod serde_point {
    use super::*;

    pub fn serialize<S: Serializer>(p: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Q> = p.iter().cloned().map(Q).collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Point, D::Error> {
        let v = Vec::<Q>::deserialize(d)?;
        Ok(v.into_iter().map(|q| q.0).collect())
    }
}

pub mod serde_points {
    use super::*;

    pub fn serialize<S: Serializer>(ps: &[Point], s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<Vec<Q>> = ps
            .iter()
            .map(|p| p.iter().cloned().map(Q).collect())
            .collect();
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Point>, D::Error> {
        let v = Vec::<Vec<Q>>::deserialize(d)?;
        Ok(v.into_iter()
            .map(|p| p.into_iter().map(|q| q.0).collect())
            .collect())
    }
}
