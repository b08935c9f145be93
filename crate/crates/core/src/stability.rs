//! Transfer of homothetic covers between affinely close bodies.
//!
//! A sandwich `(a, T, f)` for bodies `L`, `K` asserts
//! `L − a ⊆ T(K) ⊆ f (L − a)`. A cover of `K` by `n` copies of `σλK` then
//! yields a cover of `L` by `n` copies of `σ f λ L`.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{verify_cover, Cover, CoverageResult};
use crate::error::{Error, Result};
use crate::geometry::{AffineMap, BodyJson, ConvexBody, Homothet};
use crate::linalg::{inverse, mat_mul, Matrix};
use crate::rational::{add, dot, int, scale, serde_point, serde_rational, sub, Point, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sandwich {
    pub l: ConvexBody,
    pub k: ConvexBody,
    pub a: Point,
    pub map: AffineMap,
    pub factor: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SandwichJson {
    pub l: BodyJson,
    pub k: BodyJson,
    #[serde(with = "serde_point")]
    pub a: Point,
    pub map: AffineMap,
    #[serde(with = "serde_rational")]
    pub factor: Rational,
}

fn inside_all(body: &ConvexBody, points: &[Point], shift: &[Rational], factor: &Rational) -> bool {
    // points ⊆ factor·(body − shift)
    body.facets().iter().all(|h| {
        let rhs = factor * (&h.offset - dot(&h.normal, shift));
        points.iter().all(|p| dot(&h.normal, p) >= rhs)
    })
}

impl Sandwich {
    /// `T(K)`.
    pub fn image(&self) -> Result<ConvexBody> {
        self.map.apply(&self.k)
    }

    /// Same sandwich with a larger factor.
    pub fn with_factor(&self, factor: Rational) -> Result<Self> {
        if factor < self.factor {
            return Err(Error::DomainError(format!("factor {factor} below {}", self.factor)));
        }
        Ok(Self { factor, ..self.clone() })
    }

    /// Chains `L ~ K` (self) with `K ~ M` (other) into `L ~ M` with the
    /// product factor.
    pub fn compose(&self, other: &Sandwich) -> Result<Sandwich> {
        if self.k != other.l {
            return Err(Error::DomainError("sandwiches do not share a middle body".into()));
        }
        let f1 = &self.factor;
        let f2 = &other.factor;
        let f = f1 * f2;
        // T1(T2 M + b) ⊆ f2 (T1 K − g) + g ⊆ f (L − a) − (f2 − 1) g, so shifting by h
        // with (f2 − 1) g + h = f h recentres it.
        let g = self.map.apply_point(&other.a);
        let h = if f.is_one() {
            vec![Rational::zero(); g.len()]
        } else {
            scale(&((f2 - Rational::one()) / (&f - Rational::one())), &g)
        };
        let map = AffineMap::translation_by(h.iter().map(|x| -x).collect())
            .compose(&self.map)
            .compose(&AffineMap::translation_by(other.a.clone()))
            .compose(&other.map);
        Ok(Sandwich { l: self.l.clone(), k: other.k.clone(), a: add(&self.a, &h), map, factor: f })
    }

    pub fn to_json(&self) -> SandwichJson {
        SandwichJson {
            l: self.l.to_json(),
            k: self.k.to_json(),
            a: self.a.clone(),
            map: self.map.clone(),
            factor: self.factor.clone(),
        }
    }

    pub fn from_json(json: &SandwichJson) -> Result<Self> {
        let l = ConvexBody::from_json(&json.l)?;
        let k = ConvexBody::from_json(&json.k)?;
        for found in [k.dim(), json.a.len(), json.map.dim()] {
            if found != l.dim() {
                return Err(Error::DimensionMismatch { expected: l.dim(), found });
            }
        }
        Ok(Sandwich { l, k, a: json.a.clone(), map: json.map.clone(), factor: json.factor.clone() })
    }
}

/// Exact check of `L − a ⊆ T(K) ⊆ factor · (L − a)`.
pub fn verify_sandwich(s: &Sandwich) -> Result<bool> {
    let d = s.l.dim();
    for found in [s.k.dim(), s.a.len(), s.map.dim()] {
        if found != d {
            return Err(Error::DimensionMismatch { expected: d, found });
        }
    }
    if s.factor < Rational::one() {
        return Ok(false);
    }
    let image = s.image()?;
    let shifted: Vec<Point> = s.l.vertices().iter().map(|v| sub(v, &s.a)).collect();
    let zero = vec![Rational::zero(); d];
    Ok(inside_all(&image, &shifted, &zero, &Rational::one())
        && inside_all(&s.l, image.vertices(), &s.a, &s.factor))
}

/// Ratio slack for transferring covers at ratio `λ` within additive error `ε`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityBudget {
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    #[serde(with = "serde_rational")]
    pub epsilon: Rational,
    /// Chosen slack `ε/(4λ)`.
    #[serde(with = "serde_rational")]
    pub delta: Rational,
    /// Largest slack `ε/(2λ)` for which `(1 + δ)λ` stays below `λ + ε/2`.
    #[serde(with = "serde_rational")]
    pub delta_sup: Rational,
}

impl StabilityBudget {
    /// Largest admissible sandwich factor, `1 + δ`.
    pub fn max_factor(&self) -> Rational {
        Rational::one() + &self.delta
    }

    /// Ratio of the transferred cover at the largest admissible factor.
    pub fn transferred_ratio(&self) -> Rational {
        self.max_factor() * &self.lambda
    }
}

pub fn delta_for_epsilon(lambda: &Rational, epsilon: &Rational) -> Result<StabilityBudget> {
    if !lambda.is_positive() || *lambda > Rational::one() {
        return Err(Error::DomainError(format!("lambda {lambda} outside (0, 1]")));
    }
    if !epsilon.is_positive() {
        return Err(Error::DomainError("epsilon must be positive".into()));
    }
    Ok(StabilityBudget {
        lambda: lambda.clone(),
        epsilon: epsilon.clone(),
        delta: epsilon / (int(4) * lambda),
        delta_sup: epsilon / (int(2) * lambda),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transfer {
    pub cover: Cover,
    pub result: CoverageResult,
}

/// Maps a cover of `K` by copies of `σλK` to a cover of `L` by copies of
/// `σμL` with `μ = factor · λ`, and verifies it.
pub fn transfer_cover(cover: &Cover, sandwich: &Sandwich, max_depth: usize) -> Result<Transfer> {
    if cover.base() != &sandwich.k {
        return Err(Error::DomainError("cover base differs from the sandwich body K".into()));
    }
    if !verify_sandwich(sandwich)? {
        return Err(Error::SandwichInvalid);
    }
    let lambda = cover.ratio();
    let mu = &sandwich.factor * lambda;
    if mu >= Rational::one() {
        return Err(Error::RatioOverflow(mu.to_string()));
    }
    // t + σλK maps to t̄ + σλT(K) with t̄ = M t + (1 − σλ)c; then σλT(K) ⊆ σμ(L − a).
    let c = sandwich.map.translation();
    let homothets = cover
        .homothets()
        .iter()
        .map(|h| {
            let s = h.signed_ratio();
            let linear = sub(&sandwich.map.apply_point(&h.translation), c);
            let t_bar = add(&linear, &scale(&(Rational::one() - &s), c));
            let sm = &mu * h.sign.as_rational();
            let t = sub(&add(&t_bar, &sandwich.a), &scale(&sm, &sandwich.a));
            Homothet::new(t, mu.clone(), h.sign)
        })
        .collect::<Result<Vec<_>>>()?;
    let cover = Cover::new(sandwich.l.clone(), homothets)?;
    let result = verify_cover(&sandwich.l, &cover, max_depth)?;
    Ok(Transfer { cover, result })
}

/// Tightest sandwich for a fixed linear part: the image is recentred at its
/// vertex centroid, `a` is the vertex centroid of `L`, and the image is
/// scaled so that it just contains `L − a`.
pub fn minimal_sandwich(l: &ConvexBody, k: &ConvexBody, map: &AffineMap) -> Result<Sandwich> {
    if l.dim() != k.dim() || map.dim() != l.dim() {
        return Err(Error::DimensionMismatch { expected: l.dim(), found: k.dim().max(map.dim()) });
    }
    let a = l.centroid();
    let image = map.apply(k)?;
    let recentre = AffineMap::translation_by(image.centroid().iter().map(|x| -x).collect());
    let centred_map = recentre.compose(map);
    let centred = recentre.apply(&image)?;
    let shifted: Vec<Point> = l.vertices().iter().map(|v| sub(v, &a)).collect();

    // largest s with s(L − a) ⊆ image: facets have o < 0 since 0 is interior
    let mut s1: Option<Rational> = None;
    for h in centred.facets() {
        for v in &shifted {
            let nv = dot(&h.normal, v);
            if nv.is_negative() {
                let bound = &h.offset / nv;
                if s1.as_ref().is_none_or(|s| bound < *s) {
                    s1 = Some(bound);
                }
            }
        }
    }
    // smallest s with image ⊆ s(L − a)
    let mut s2 = Rational::zero();
    let l_shifted = AffineMap::translation_by(a.iter().map(|x| -x).collect()).apply(l)?;
    for h in l_shifted.facets() {
        for w in centred.vertices() {
            let bound = dot(&h.normal, w) / &h.offset;
            if bound > s2 {
                s2 = bound;
            }
        }
    }
    let s1 = s1.expect("a full-dimensional body has vertices on both sides of each facet normal");
    let map = AffineMap::scaling(l.dim(), &s1.recip())?.compose(&centred_map);
    Ok(Sandwich { l: l.clone(), k: k.clone(), a, map, factor: s2 / s1 })
}

/// Best sandwich over candidate linear parts, parallel over candidates; the
/// first candidate wins ties. Fails with [`Error::NoCandidate`] when none
/// reaches a factor below `cap`.
pub fn bm_upper_bound(l: &ConvexBody, k: &ConvexBody, candidates: &[AffineMap], cap: &Rational) -> Result<Sandwich> {
    let results: Vec<Result<Sandwich>> = candidates.par_iter().map(|m| minimal_sandwich(l, k, m)).collect();
    let mut best: Option<Sandwich> = None;
    for r in results {
        let s = r?;
        if best.as_ref().is_none_or(|b| s.factor < b.factor) {
            best = Some(s);
        }
    }
    match best {
        Some(s) if s.factor < *cap => Ok(s),
        _ => Err(Error::NoCandidate),
    }
}

/// Affine maps sending an affinely independent `d + 1` vertices of `K` to
/// ordered `d + 1`-tuples of vertices of `L`; at most `limit` maps.
pub fn vertex_candidates(l: &ConvexBody, k: &ConvexBody, limit: usize) -> Vec<AffineMap> {
    let d = k.dim();
    let basis = independent_vertices(k);
    let k0 = &k.vertices()[basis[0]];
    let kmat: Matrix = columns(basis[1..].iter().map(|&i| sub(&k.vertices()[i], k0)).collect());
    let kinv = inverse(&kmat).expect("independent vertices");
    let m = l.vertices().len();
    let mut out = Vec::new();
    let mut tuple = Vec::with_capacity(d + 1);
    fn walk(m: usize, size: usize, tuple: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if tuple.len() == size {
            return visit(tuple);
        }
        for i in 0..m {
            if tuple.contains(&i) {
                continue;
            }
            tuple.push(i);
            let more = walk(m, size, tuple, visit);
            tuple.pop();
            if !more {
                return false;
            }
        }
        true
    }
    walk(m, d + 1, &mut tuple, &mut |t: &[usize]| {
        let l0 = &l.vertices()[t[0]];
        let lmat = columns(t[1..].iter().map(|&i| sub(&l.vertices()[i], l0)).collect());
        let matrix = mat_mul(&lmat, &kinv);
        let shift = sub(l0, &crate::linalg::mat_vec(&matrix, k0));
        if let Ok(map) = AffineMap::new(matrix, shift) {
            out.push(map);
        }
        out.len() < limit
    });
    out
}

/// Diagonal scalings with entries in `{2/3, 1, 3/2}` composed with
/// elementary shears of size `±1/2`, the identity first.
pub fn grid_candidates(d: usize) -> Vec<AffineMap> {
    let steps = [int(1), Rational::new(2.into(), 3.into()), Rational::new(3.into(), 2.into())];
    let mut diagonals: Vec<Vec<Rational>> = vec![vec![]];
    for _ in 0..d {
        diagonals = diagonals
            .into_iter()
            .flat_map(|p| steps.iter().map(move |s| [p.clone(), vec![s.clone()]].concat()))
            .collect();
    }
    let mut shears: Vec<Matrix> = vec![crate::linalg::identity(d)];
    for i in 0..d {
        for j in 0..d {
            if i == j {
                continue;
            }
            for s in [Rational::new(1.into(), 2.into()), Rational::new((-1).into(), 2.into())] {
                let mut m = crate::linalg::identity(d);
                m[i][j] = s;
                shears.push(m);
            }
        }
    }
    let mut out = Vec::new();
    for shear in &shears {
        for diag in &diagonals {
            let m: Matrix = shear
                .iter()
                .map(|row| row.iter().zip(diag).map(|(x, s)| x * s).collect())
                .collect();
            out.push(AffineMap::new(m, vec![Rational::zero(); d]).expect("invertible"));
        }
    }
    out
}

fn columns(cols: Vec<Point>) -> Matrix {
    let d = cols.len();
    (0..d).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect()
}

fn independent_vertices(k: &ConvexBody) -> Vec<usize> {
    let v = k.vertices();
    let mut span = crate::linalg::SpanTracker::new();
    let mut out = vec![0];
    for (i, p) in v.iter().enumerate().skip(1) {
        if span.try_add(&sub(p, &v[0])) {
            out.push(i);
            if out.len() == k.dim() + 1 {
                break;
            }
        }
    }
    out
}
