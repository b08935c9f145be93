use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Halfspace};
use crate::linalg::{determinant, identity, inverse, mat_mul, mat_vec, transpose, Matrix};
use crate::rational::{add, dot, int, scale, serde_point, serde_points, serde_rational, Point, Rational};

/// `x ↦ matrix · x + translation` with an invertible matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AffineMap {
    #[serde(with = "serde_points")]
    matrix: Matrix,
    #[serde(with = "serde_point")]
    translation: Point,
}

impl AffineMap {
    pub fn new(matrix: Matrix, translation: Point) -> Result<Self> {
        let d = matrix.len();
        if translation.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: translation.len() });
        }
        if let Some(row) = matrix.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, found: row.len() });
        }
        if determinant(&matrix).is_zero() {
            return Err(Error::SingularMap);
        }
        Ok(Self { matrix, translation })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: identity(dim), translation: vec![Rational::zero(); dim] }
    }

    pub fn translation_by(t: Point) -> Self {
        Self { matrix: identity(t.len()), translation: t }
    }

    /// Uniform scaling by `factor` about the origin.
    pub fn scaling(dim: usize, factor: &Rational) -> Result<Self> {
        let m = identity(dim)
            .into_iter()
            .map(|row| row.into_iter().map(|x| x * factor).collect())
            .collect();
        Self::new(m, vec![Rational::zero(); dim])
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn translation(&self) -> &Point {
        &self.translation
    }

    pub fn determinant(&self) -> Rational {
        determinant(&self.matrix)
    }

    pub fn apply_point(&self, p: &[Rational]) -> Point {
        add(&mat_vec(&self.matrix, p), &self.translation)
    }

    pub fn inverse(&self) -> Self {
        let inv = inverse(&self.matrix).expect("matrix checked invertible at construction");
        let t = mat_vec(&inv, &self.translation).into_iter().map(|x| -x).collect();
        Self { matrix: inv, translation: t }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &AffineMap) -> Self {
        Self {
            matrix: mat_mul(&self.matrix, &other.matrix),
            translation: self.apply_point(&other.translation),
        }
    }

    /// Image body with both representations transported.
    pub fn apply(&self, body: &ConvexBody) -> Result<ConvexBody> {
        if body.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: body.dim() });
        }
        let mapped: Vec<Point> = body.vertices().iter().map(|v| self.apply_point(v)).collect();
        let mut order: Vec<usize> = (0..mapped.len()).collect();
        order.sort_by(|&a, &b| mapped[a].cmp(&mapped[b]));
        let new_index: HashMap<usize, usize> = order.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let vertices: Vec<Point> = order.iter().map(|&i| mapped[i].clone()).collect();

        // n·x >= o with x = M⁻¹(y − c) becomes (M⁻ᵀ n)·y >= o + (M⁻ᵀ n)·c
        let inv_t = transpose(&inverse(&self.matrix).expect("invertible"));
        let mut facets: Vec<Halfspace> = body
            .facets()
            .iter()
            .map(|h| {
                let normal = mat_vec(&inv_t, &h.normal);
                let offset = &h.offset + dot(&normal, &self.translation);
                Halfspace::new(normal, offset).canonical()
            })
            .collect();
        facets.sort();

        let mut boundary: Vec<Vec<usize>> = body
            .boundary()
            .iter()
            .map(|s| {
                let mut s: Vec<usize> = s.iter().map(|v| new_index[v]).collect();
                s.sort_unstable();
                s
            })
            .collect();
        boundary.sort();
        Ok(ConvexBody::from_parts(body.dim(), vertices, facets, boundary))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_rational(self) -> Rational {
        int(self.as_i64())
    }

    pub fn from_i64(s: i64) -> Result<Self> {
        match s {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("sign must be +1 or -1, got {other}"))),
        }
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+" | "+1" | "1" | "plus" => Ok(Sign::Plus),
            "-" | "-1" | "minus" => Ok(Sign::Minus),
            other => Err(Error::Parse(format!("invalid sign `{other}`"))),
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.as_i64())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Sign::from_i64(v).map_err(serde::de::Error::custom)
    }
}

/// The body `translation + sign · ratio · K` for a base body `K`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homothet {
    #[serde(with = "serde_point")]
    pub translation: Point,
    #[serde(with = "serde_rational")]
    pub ratio: Rational,
    pub sign: Sign,
}

impl Homothet {
    pub fn new(translation: Point, ratio: Rational, sign: Sign) -> Result<Self> {
        if ratio <= Rational::zero() || ratio > Rational::one() {
            return Err(Error::DomainError(format!("homothety ratio {ratio} outside (0, 1]")));
        }
        Ok(Self { translation, ratio, sign })
    }

    pub fn signed_ratio(&self) -> Rational {
        &self.ratio * self.sign.as_rational()
    }

    pub fn as_map(&self) -> AffineMap {
        let d = self.translation.len();
        let m = scale(&self.signed_ratio(), &vec![Rational::one(); d]);
        let matrix = (0..d)
            .map(|i| (0..d).map(|j| if i == j { m[i].clone() } else { Rational::zero() }).collect())
            .collect();
        AffineMap { matrix, translation: self.translation.clone() }
    }

    /// Facet inequalities of the homothet of `base`.
    pub fn halfspaces(&self, base: &ConvexBody) -> Vec<Halfspace> {
        // σ n·(x − t) >= λ o
        let s = self.sign.as_rational();
        base.facets()
            .iter()
            .map(|h| {
                let normal: Point = h.normal.iter().map(|x| x * &s).collect();
                let offset = &self.ratio * &h.offset + dot(&normal, &self.translation);
                Halfspace::new(normal, offset)
            })
            .collect()
    }

    pub fn contains(&self, base: &ConvexBody, p: &[Rational]) -> bool {
        self.halfspaces(base).iter().all(|h| h.contains(p))
    }

    pub fn realize(&self, base: &ConvexBody) -> Result<ConvexBody> {
        self.as_map().apply(base)
    }
}
