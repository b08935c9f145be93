//! Closed-form covering-number bounds.
//!
//! Covering density is bounded by `d ln d + ln ln d + 5d` (natural
//! logarithms throughout). Combined with the ratio `vol(K − L)/vol(L)` this
//! bounds `N(K, L)`; for `L = ±λK` the volume ratio is at most
//! `λ^{-d} binom(2d, d)` (positive copies, by the Rogers–Shephard inequality)
//! and exactly `λ^{-d} 2^d` (negative copies, since `K + K = 2K`).
//!
//! Volume ratios stay exact rationals until the final multiplication by the
//! density factor.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{minkowski_difference, AffineMap, ConvexBody, Sign};
use crate::rational::{binomial, serde_rational, to_f64, Rational};

fn require_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::DomainError(format!("bound needs d >= 2, got {d}")));
    }
    Ok(())
}

fn require_ratio(lambda: &Rational) -> Result<()> {
    if !lambda.is_positive() || *lambda >= Rational::one() {
        return Err(Error::DomainError(format!("lambda {lambda} outside (0, 1)")));
    }
    Ok(())
}

/// Upper bound on the translative covering density of any body in `R^d`.
pub fn rogers_theta_bound(d: usize) -> Result<f64> {
    require_dim(d)?;
    let d = d as f64;
    Ok(d * d.ln() + d.ln().ln() + 5.0 * d)
}

/// Exact `vol(K − L) / vol(L)`.
pub fn difference_volume_ratio(k: &ConvexBody, l: &ConvexBody) -> Result<Rational> {
    let diff = minkowski_difference(k, l)?;
    Ok(diff.volume() / l.volume())
}

/// `vol(K − L)/vol(L) · Θ-bound(d)`, an upper bound on `N(K, L)`.
pub fn rz_bound(k: &ConvexBody, l: &ConvexBody) -> Result<f64> {
    if k.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: k.dim(), found: l.dim() });
    }
    let theta = rogers_theta_bound(k.dim())?;
    Ok(to_f64(&difference_volume_ratio(k, l)?) * theta)
}

/// Upper bound on `N(K, σλK)` valid for every body in `R^d`.
pub fn homothety_bound(d: usize, lambda: &Rational, sign: Sign) -> Result<f64> {
    require_dim(d)?;
    require_ratio(lambda)?;
    let volume_factor = match sign {
        Sign::Plus => Rational::from_integer(binomial(2 * d as u64, d as u64)),
        Sign::Minus => Rational::from_integer(num_traits::pow(BigInt::from(2), d)),
    };
    let exact = num_traits::pow(lambda.recip(), d) * volume_factor;
    Ok(to_f64(&exact) * rogers_theta_bound(d)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RogersShephard {
    #[serde(with = "serde_rational")]
    pub ratio: Rational,
    pub bound: u64,
    pub tight: bool,
}

/// Exact `vol(K − K)/vol(K)` against `binom(2d, d)`.
pub fn rogers_shephard_check(k: &ConvexBody) -> RogersShephard {
    let d = k.dim() as u64;
    let ratio = difference_volume_ratio(k, k).expect("same dimension");
    let bound = binomial(2 * d, d);
    let tight = ratio == Rational::from_integer(bound.clone());
    RogersShephard { ratio, bound: u64::try_from(bound).expect("d <= 6 keeps binom(2d, d) small"), tight }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JlConstant {
    /// `1 − 1/((d + 1) d^d)`.
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    /// `d^d`: any `k + l` exceeding it admits a cover by `k` copies of `λK`
    /// and `l` copies of `−λK`.
    pub threshold: u64,
}

/// The Januszewski–Lassak ratio for mixed-sign covers.
pub fn jl_lambda(d: usize) -> Result<JlConstant> {
    if d < 1 {
        return Err(Error::DomainError("d must be positive".into()));
    }
    let dd = num_traits::pow(BigInt::from(d), d);
    let lambda = Rational::one() - Rational::new(BigInt::one(), BigInt::from(d + 1) * &dd);
    let threshold = u64::try_from(dd).map_err(|_| Error::DomainError(format!("d^d overflows for d = {d}")))?;
    Ok(JlConstant { lambda, threshold })
}

/// Growth order of the half-ratio bounds: `8^d √d ln d` for positive copies
/// and `4^d d ln d` for negative copies. No constant is implied.
pub fn bound_order(d: usize, sign: Sign) -> Result<f64> {
    require_dim(d)?;
    let df = d as f64;
    Ok(match sign {
        Sign::Plus => 8f64.powi(d as i32) * df.sqrt() * df.ln(),
        Sign::Minus => 4f64.powi(d as i32) * df * df.ln(),
    })
}

/// One row of the bound comparison for a body at ratio `lambda`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub dim: usize,
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    pub sign: Sign,
    pub theta_bound: f64,
    /// `vol(K − σλK)/vol(λK) · Θ-bound`, the body-specific bound.
    pub rz_bound: f64,
    /// Universal bound for positive copies.
    pub plus_bound: f64,
    /// Universal bound for negative copies.
    pub minus_bound: f64,
    /// The universal bound matching `sign`.
    pub homothety_bound: f64,
    pub order: f64,
    pub computed_upper: Option<usize>,
    pub jl_lambda: f64,
    pub jl_threshold: u64,
    #[serde(with = "serde_rational")]
    pub rs_ratio: Rational,
    pub rs_bound: u64,
    pub rs_tight: bool,
    pub log_base: String,
}

impl BoundReport {
    pub fn new(body: &ConvexBody, lambda: &Rational, sign: Sign, computed_upper: Option<usize>) -> Result<Self> {
        let d = body.dim();
        let scaled = AffineMap::scaling(d, &(lambda * sign.as_rational()))?.apply(body)?;
        let rs = rogers_shephard_check(body);
        let jl = jl_lambda(d)?;
        let plus_bound = homothety_bound(d, lambda, Sign::Plus)?;
        let minus_bound = homothety_bound(d, lambda, Sign::Minus)?;
        Ok(Self {
            dim: d,
            lambda: lambda.clone(),
            sign,
            theta_bound: rogers_theta_bound(d)?,
            rz_bound: rz_bound(body, &scaled)?,
            plus_bound,
            minus_bound,
            homothety_bound: if sign == Sign::Plus { plus_bound } else { minus_bound },
            order: bound_order(d, sign)?,
            computed_upper,
            jl_lambda: to_f64(&jl.lambda),
            jl_threshold: jl.threshold,
            rs_ratio: rs.ratio,
            rs_bound: rs.bound,
            rs_tight: rs.tight,
            log_base: "e".into(),
        })
    }

    /// Whether the computed cover size respects the universal bound.
    pub fn dominated(&self) -> bool {
        self.computed_upper.is_none_or(|n| (n as f64) <= self.homothety_bound)
    }

    pub fn csv_header() -> &'static str {
        "dim,lambda,sign,theta_bound,rz_bound,plus_bound,minus_bound,homothety_bound,order,computed_upper,jl_lambda,jl_threshold,rs_ratio,rs_bound,rs_tight,log_base"
    }

    pub fn to_csv_row(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.serialize(self).expect("flat record");
        let bytes = w.into_inner().expect("in-memory writer");
        String::from_utf8(bytes).expect("utf8").trim_end().to_string()
    }
}
