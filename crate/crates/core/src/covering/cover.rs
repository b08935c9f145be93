use std::collections::{HashMap, VecDeque};

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Halfspace, Homothet, Sign};
use crate::rational::{centroid, int, serde_point, serde_points, squared_distance, Point, Rational};

/// A family of homothets of one base body, all sharing one ratio.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cover {
    base: ConvexBody,
    homothets: Vec<Homothet>,
}

impl Cover {
    pub fn new(base: ConvexBody, homothets: Vec<Homothet>) -> Result<Self> {
        let Some(first) = homothets.first() else {
            return Err(Error::DomainError("a cover needs at least one homothet".into()));
        };
        if homothets.iter().any(|h| h.ratio != first.ratio) {
            return Err(Error::RatioMismatch);
        }
        if let Some(h) = homothets.iter().find(|h| h.translation.len() != base.dim()) {
            return Err(Error::DimensionMismatch { expected: base.dim(), found: h.translation.len() });
        }
        Ok(Self { base, homothets })
    }

    /// The single homothet `K` itself, which always covers `K`.
    pub fn trivial(base: ConvexBody) -> Self {
        let t = vec![int(0); base.dim()];
        let h = Homothet::new(t, Rational::one(), Sign::Plus).expect("ratio 1");
        Self { base, homothets: vec![h] }
    }

    pub fn base(&self) -> &ConvexBody {
        &self.base
    }

    pub fn homothets(&self) -> &[Homothet] {
        &self.homothets
    }

    pub fn len(&self) -> usize {
        self.homothets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.homothets.is_empty()
    }

    pub fn ratio(&self) -> &Rational {
        &self.homothets[0].ratio
    }

    /// Rescales every homothet to `ratio` keeping its fixed point
    /// `t / (1 − σλ)`; a corner copy `(1 − λ)v + λK` stays anchored at `v`.
    pub fn rescaled_about_fixed_points(&self, ratio: &Rational) -> Result<Self> {
        let homothets = self
            .homothets
            .iter()
            .map(|h| {
                let one = Rational::one();
                let old = &one - h.signed_ratio();
                let new = &one - ratio * h.sign.as_rational();
                let t = h.translation.iter().map(|x| x / &old * &new).collect();
                Homothet::new(t, ratio.clone(), h.sign)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.base.clone(), homothets)
    }

    pub fn to_json(&self) -> CoverJson {
        CoverJson { base: self.base.to_json(), homothets: self.homothets.clone() }
    }

    pub fn from_json(json: &CoverJson) -> Result<Self> {
        Self::new(ConvexBody::from_json(&json.base)?, json.homothets.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverJson {
    pub base: crate::geometry::BodyJson,
    pub homothets: Vec<Homothet>,
}

/// One cell of a coverage certificate: a simplex whose vertices all lie in
/// the assigned homothet.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertifiedCell {
    #[serde(with = "serde_points")]
    pub simplex: Vec<Point>,
    pub homothet: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageResult {
    Covered { cells: Vec<CertifiedCell> },
    Uncovered {
        #[serde(with = "serde_point")]
        witness: Point,
    },
    Unknown {
        #[serde(with = "serde_points")]
        simplex: Vec<Point>,
    },
}

impl CoverageResult {
    pub fn is_covered(&self) -> bool {
        matches!(self, CoverageResult::Covered { .. })
    }

    pub fn cells(&self) -> Option<&[CertifiedCell]> {
        match self {
            CoverageResult::Covered { cells } => Some(cells),
            _ => None,
        }
    }
}

/// Splits the longest edge at its midpoint. Among equally long edges the one
/// with the lexicographically smallest endpoint pair is chosen.
pub(crate) fn bisect(simplex: &[Point]) -> (Vec<Point>, Vec<Point>) {
    let mut best: Option<(usize, usize, Rational)> = None;
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let len = squared_distance(&simplex[i], &simplex[j]);
            let replace = match &best {
                None => true,
                Some((bi, bj, bl)) => {
                    len > *bl || (len == *bl && edge_key(simplex, i, j) < edge_key(simplex, *bi, *bj))
                }
            };
            if replace {
                best = Some((i, j, len));
            }
        }
    }
    let (i, j, _) = best.expect("simplex has an edge");
    let two = int(2);
    let mid: Point = simplex[i].iter().zip(&simplex[j]).map(|(a, b)| (a + b) / &two).collect();
    let mut left = simplex.to_vec();
    left[j] = mid.clone();
    let mut right = simplex.to_vec();
    right[i] = mid;
    (left, right)
}

fn edge_key(s: &[Point], i: usize, j: usize) -> (&Point, &Point) {
    if s[i] <= s[j] {
        (&s[i], &s[j])
    } else {
        (&s[j], &s[i])
    }
}

fn inside(hs: &[Halfspace], p: &[Rational]) -> bool {
    hs.iter().all(|h| h.contains(p))
}

/// Decides whether the homothets of `cover` cover `target` by certified
/// subdivision.
///
/// A simplex is certified when one homothet contains all of its vertices. An
/// uncertified simplex whose vertex or centroid escapes every homothet yields
/// an exact witness; otherwise its longest edge is bisected. Simplices are
/// refined breadth first, so every witness visible above the depth limit is
/// found before the first simplex at `max_depth` ends the search with
/// `Unknown`.
pub fn verify_cover(target: &ConvexBody, cover: &Cover, max_depth: usize) -> Result<CoverageResult> {
    if target.dim() != cover.base().dim() {
        return Err(Error::DimensionMismatch { expected: target.dim(), found: cover.base().dim() });
    }
    if max_depth == 0 {
        return Err(Error::DomainError("max_depth must be at least 1".into()));
    }
    let homothet_hs: Vec<Vec<Halfspace>> =
        cover.homothets().iter().map(|h| h.halfspaces(cover.base())).collect();
    // vertices are shared by neighbouring simplices
    let mut seen: HashMap<Point, Vec<bool>> = HashMap::new();
    let mut member = |p: &Point| -> Vec<bool> {
        seen.entry(p.clone())
            .or_insert_with(|| homothet_hs.iter().map(|hs| inside(hs, p)).collect())
            .clone()
    };

    let mut queue: VecDeque<(Vec<Point>, usize)> = target.triangulate().into_iter().map(|s| (s, 0)).collect();
    let mut cells = Vec::new();

    while let Some((simplex, depth)) = queue.pop_front() {
        let membership: Vec<Vec<bool>> = simplex.iter().map(&mut member).collect();
        if let Some(j) = (0..homothet_hs.len()).find(|&j| membership.iter().all(|m| m[j])) {
            cells.push(CertifiedCell { simplex, homothet: j });
            continue;
        }
        if let Some(k) = membership.iter().position(|m| !m.iter().any(|&b| b)) {
            return Ok(CoverageResult::Uncovered { witness: simplex[k].clone() });
        }
        let c = centroid(&simplex);
        if !homothet_hs.iter().any(|hs| inside(hs, &c)) {
            return Ok(CoverageResult::Uncovered { witness: c });
        }
        if depth + 1 >= max_depth {
            return Ok(CoverageResult::Unknown { simplex });
        }
        let (left, right) = bisect(&simplex);
        queue.push_back((left, depth + 1));
        queue.push_back((right, depth + 1));
    }
    Ok(CoverageResult::Covered { cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int_point, point, ratio, scale};

    fn square() -> ConvexBody {
        ConvexBody::from_points(&[
            int_point(&[0, 0]),
            int_point(&[1, 0]),
            int_point(&[0, 1]),
            int_point(&[1, 1]),
        ])
        .unwrap()
    }

    fn triangle() -> ConvexBody {
        ConvexBody::from_points(&[int_point(&[0, 0]), int_point(&[1, 0]), int_point(&[0, 1])]).unwrap()
    }

    fn corner_cover(k: &ConvexBody, lambda: Rational) -> Cover {
        let one_minus = Rational::one() - &lambda;
        let hs = k
            .vertices()
            .iter()
            .map(|v| Homothet::new(scale(&one_minus, v), lambda.clone(), Sign::Plus).unwrap())
            .collect();
        Cover::new(k.clone(), hs).unwrap()
    }

    #[test]
    fn quadrants_cover_square() {
        let sq = square();
        let res = verify_cover(&sq, &corner_cover(&sq, ratio(1, 2)), 12).unwrap();
        let cells = res.cells().expect("covered");
        let mut used: Vec<usize> = cells.iter().map(|c| c.homothet).collect();
        used.sort_unstable();
        used.dedup();
        assert_eq!(used, vec![0, 1, 2, 3]);
        assert_eq!(cells.len(), 8);
    }

    #[test]
    fn corner_copies_of_triangle() {
        let t = triangle();
        let res = verify_cover(&t, &corner_cover(&t, ratio(3, 5)), 20).unwrap();
        assert_eq!(res, CoverageResult::Uncovered { witness: point(&[(1, 3), (1, 3)]) });
        let res = verify_cover(&t, &corner_cover(&t, ratio(7, 10)), 20).unwrap();
        assert!(res.is_covered());
        // at the threshold the centroid is on all three boundaries
        let res = verify_cover(&t, &corner_cover(&t, ratio(2, 3)), 10).unwrap();
        assert!(matches!(res, CoverageResult::Unknown { .. }));
    }

    #[test]
    fn mixed_ratios_rejected() {
        let t = triangle();
        let a = Homothet::new(int_point(&[0, 0]), ratio(1, 2), Sign::Plus).unwrap();
        let b = Homothet::new(int_point(&[0, 0]), ratio(1, 3), Sign::Plus).unwrap();
        assert_eq!(Cover::new(t, vec![a, b]).unwrap_err(), Error::RatioMismatch);
    }

    #[test]
    fn bisection_is_order_independent() {
        let s = vec![int_point(&[0, 0]), int_point(&[2, 0]), int_point(&[0, 2])];
        let (l, r) = bisect(&s);
        assert!(l.contains(&int_point(&[1, 1])) && r.contains(&int_point(&[1, 1])));
        let square_cell = [int_point(&[0, 0]), int_point(&[1, 0]), int_point(&[1, 1]), int_point(&[0, 1])];
        let (l2, _) = bisect(&square_cell[..3]);
        assert!(l2.contains(&point(&[(1, 2), (1, 2)])));
    }

    #[test]
    fn rescaling_keeps_corner_anchor() {
        let t = triangle();
        let c = corner_cover(&t, ratio(7, 10));
        let r = c.rescaled_about_fixed_points(&ratio(4, 5)).unwrap();
        assert_eq!(r, corner_cover(&t, ratio(4, 5)));
    }
}
