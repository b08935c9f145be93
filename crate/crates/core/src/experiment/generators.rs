//! Named body generators.
//!
//! Random bodies use ChaCha8 seeded with `seed` (as a little-endian `u64`
//! through `SeedableRng::seed_from_u64`); coordinates are `k/64` with `k`
//! uniform in `[-64, 64]`.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, ConvexBody};
use crate::rational::{int, ratio, Point, Rational};

/// A generator name with integer parameters, written `cube(2)` or `cube:2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub generator: String,
    #[serde(default)]
    pub params: Vec<u64>,
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("bad generator spec {s:?}"));
        let (name, rest) = if let Some(open) = s.find('(') {
            let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
            (&s[..open], inner.split(',').collect::<Vec<_>>())
        } else {
            let mut parts = s.split(':');
            let name = parts.next().ok_or_else(bad)?;
            (name, parts.collect())
        };
        let params = rest
            .iter()
            .map(|p| p.trim())
            .filter(|p| !p.is_empty())
            .map(|p| p.trim_start_matches("seed=").parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { generator: name.trim().to_string(), params })
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.params.iter().map(u64::to_string).collect();
        write!(f, "{}({})", self.generator, params.join(","))
    }
}

fn param(spec: &GeneratorSpec, i: usize) -> Result<usize> {
    spec.params
        .get(i)
        .map(|&p| p as usize)
        .ok_or_else(|| Error::Parse(format!("{} needs parameter {}", spec.generator, i + 1)))
}

/// Builds the body named by `spec`. `random_hull(d, m)` without a third
/// parameter draws with `default_seed`.
pub fn generate_body(spec: &GeneratorSpec, default_seed: u64) -> Result<ConvexBody> {
    match spec.generator.as_str() {
        "simplex" => simplex(param(spec, 0)?),
        "cube" => cube(param(spec, 0)?),
        "cross_polytope" => cross_polytope(param(spec, 0)?),
        "regular_polygon" => regular_polygon(param(spec, 0)?),
        "random_hull" => {
            let seed = spec.params.get(2).copied().unwrap_or(default_seed);
            random_hull(param(spec, 0)?, param(spec, 1)?, seed)
        }
        other => Err(Error::UnknownGenerator(other.to_string())),
    }
}

fn unit(d: usize, i: usize, value: i64) -> Point {
    (0..d).map(|j| if j == i { int(value) } else { int(0) }).collect()
}

/// Standard simplex `conv{0, e_1, ..., e_d}`.
pub fn simplex(d: usize) -> Result<ConvexBody> {
    let mut pts = vec![vec![int(0); d]];
    pts.extend((0..d).map(|i| unit(d, i, 1)));
    convex_hull(&pts, d)
}

/// Unit cube `[0, 1]^d`.
pub fn cube(d: usize) -> Result<ConvexBody> {
    if d == 0 || d > 16 {
        return Err(Error::DomainError(format!("cube dimension {d} out of range")));
    }
    let pts: Vec<Point> = (0..1u32 << d)
        .map(|mask| (0..d).map(|i| int(i64::from(mask >> i & 1))).collect())
        .collect();
    convex_hull(&pts, d)
}

/// `conv{±e_i}`.
pub fn cross_polytope(d: usize) -> Result<ConvexBody> {
    let pts: Vec<Point> = (0..d).flat_map(|i| [unit(d, i, 1), unit(d, i, -1)]).collect();
    convex_hull(&pts, d)
}

/// `k` rational points on the unit circle near the regular `k`-gon: the
/// half-angle tangent is rounded to a multiple of `1/1000` and mapped by
/// `t ↦ ((1 − t²)/(1 + t²), 2t/(1 + t²))`.
pub fn regular_polygon(k: usize) -> Result<ConvexBody> {
    if k < 3 {
        return Err(Error::DomainError(format!("a polygon needs at least 3 vertices, got {k}")));
    }
    let pts: Vec<Point> = (0..k)
        .map(|j| {
            let half = std::f64::consts::PI * j as f64 / k as f64;
            if 2 * j == k {
                return vec![int(-1), int(0)];
            }
            let t = ratio((half.tan() * 1000.0).round() as i64, 1000);
            let one = Rational::from_integer(1.into());
            let den = &one + &t * &t;
            vec![(&one - &t * &t) / &den, int(2) * &t / &den]
        })
        .collect();
    convex_hull(&pts, 2)
}

/// Hull of `m` seeded random points, redrawing until full-dimensional.
pub fn random_hull(d: usize, m: usize, seed: u64) -> Result<ConvexBody> {
    if d == 0 || m <= d {
        return Err(Error::DomainError(format!("random_hull needs m > d >= 1, got d = {d}, m = {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pts: Vec<Point> = (0..m)
            .map(|_| (0..d).map(|_| ratio(rng.gen_range(-64..=64), 64)).collect())
            .collect();
        match convex_hull(&pts, d) {
            Ok(body) => return Ok(body),
            Err(Error::DegenerateInput(_)) => continue,
            Err(e) => return Err(e),
        }
    }
}
