use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, Halfspace};
use crate::linalg::{determinant, rank};
use crate::rational::{centroid, factorial, serde_points, sub, Point, Rational};

/// A full-dimensional convex polytope held in vertex and facet form.
///
/// Vertices are sorted lexicographically and are all extreme points. Facets
/// are canonical (primitive integer normal, inward orientation) and sorted.
/// `boundary` triangulates the boundary by `dim`-subsets of vertex indices.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Halfspace>,
    boundary: Vec<Vec<usize>>,
}

impl PartialEq for ConvexBody {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices && self.facets == other.facets
    }
}

impl Eq for ConvexBody {}

impl ConvexBody {
    pub(crate) fn from_parts(
        dim: usize,
        vertices: Vec<Point>,
        facets: Vec<Halfspace>,
        boundary: Vec<Vec<usize>>,
    ) -> Self {
        Self { dim, vertices, facets, boundary }
    }

    pub fn from_points(points: &[Point]) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::DegenerateInput("empty point set".into()))?;
        convex_hull(points, dim)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace] {
        &self.facets
    }

    pub fn boundary(&self) -> &[Vec<usize>] {
        &self.boundary
    }

    /// Closed membership test.
    pub fn contains(&self, p: &[Rational]) -> bool {
        self.facets.iter().all(|h| h.contains(p))
    }

    pub fn on_boundary(&self, p: &[Rational]) -> bool {
        self.contains(p) && self.facets.iter().any(|h| h.is_tight(p))
    }

    /// Average of the vertices; an interior point.
    pub fn centroid(&self) -> Point {
        centroid(&self.vertices)
    }

    pub fn facet_vertices(&self, facet: usize) -> Vec<&Point> {
        let h = &self.facets[facet];
        self.vertices.iter().filter(|v| h.is_tight(v)).collect()
    }

    pub fn facet_centroids(&self) -> Vec<Point> {
        (0..self.facets.len())
            .map(|f| {
                let pts: Vec<Point> = self.facet_vertices(f).into_iter().cloned().collect();
                centroid(&pts)
            })
            .collect()
    }

    /// Exact volume by a fan of simplices from the vertex centroid over the
    /// boundary triangulation.
    pub fn volume(&self) -> Rational {
        let c = self.centroid();
        let sum = self.boundary.iter().fold(Rational::zero(), |acc, simplex| {
            let rows: Vec<Point> = simplex.iter().map(|&v| sub(&self.vertices[v], &c)).collect();
            acc + determinant(&rows).abs()
        });
        sum / Rational::from_integer(factorial(self.dim))
    }

    /// Pulling triangulation from the first vertex: one full-dimensional
    /// simplex per boundary simplex not lying in a hyperplane through it.
    pub fn triangulate(&self) -> Vec<Vec<Point>> {
        let apex = &self.vertices[0];
        self.boundary
            .iter()
            .filter(|s| !s.contains(&0))
            .filter_map(|s| {
                let rows: Vec<Point> = s.iter().map(|&v| sub(&self.vertices[v], apex)).collect();
                if determinant(&rows).is_zero() {
                    return None;
                }
                let mut simplex = vec![apex.clone()];
                simplex.extend(s.iter().map(|&v| self.vertices[v].clone()));
                Some(simplex)
            })
            .collect()
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices[1..] {
            for k in 0..self.dim {
                if v[k] < lo[k] {
                    lo[k] = v[k].clone();
                }
                if v[k] > hi[k] {
                    hi[k] = v[k].clone();
                }
            }
        }
        (lo, hi)
    }

    /// Cross-validates the two representations.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::DegenerateInput(msg));
        for (vi, v) in self.vertices.iter().enumerate() {
            if let Some(fi) = self.facets.iter().position(|h| !h.contains(v)) {
                return fail(format!("vertex {vi} violates facet {fi}"));
            }
            let tight: Vec<Point> = self
                .facets
                .iter()
                .filter(|h| h.is_tight(v))
                .map(|h| h.normal.clone())
                .collect();
            if rank(&tight) != self.dim {
                return fail(format!("vertex {vi} is not extreme"));
            }
        }
        for (fi, h) in self.facets.iter().enumerate() {
            if h.canonical() != *h {
                return fail(format!("facet {fi} is not canonical"));
            }
            let tight: Vec<&Point> = self.vertices.iter().filter(|v| h.is_tight(v)).collect();
            if tight.len() < self.dim {
                return fail(format!("facet {fi} is tight at fewer than {} vertices", self.dim));
            }
            let diffs: Vec<Point> = tight[1..].iter().map(|v| sub(v, tight[0])).collect();
            if rank(&diffs) != self.dim - 1 {
                return fail(format!("facet {fi} is not spanned by its vertices"));
            }
        }
        if !self.volume().is_positive() {
            return fail("body has zero volume".into());
        }
        Ok(())
    }

    pub fn to_json(&self) -> BodyJson {
        BodyJson { dim: self.dim, vertices: self.vertices.clone() }
    }

    pub fn from_json(json: &BodyJson) -> Result<Self> {
        convex_hull(&json.vertices, json.dim)
    }
}

/// On-disk body format: `{"dim": d, "vertices": [["p/q", ...], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BodyJson {
    pub dim: usize,
    #[serde(with = "serde_points")]
    pub vertices: Vec<Point>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, int_point, point, ratio};

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

    #[test]
    fn volumes() {
        assert_eq!(square().volume(), int(1));
        assert_eq!(triangle().volume(), ratio(1, 2));
        let mut cross = Vec::new();
        for k in 0..3 {
            for s in [-1, 1] {
                let mut p = vec![0; 3];
                p[k] = s;
                cross.push(int_point(&p));
            }
        }
        let octa = ConvexBody::from_points(&cross).unwrap();
        assert_eq!(octa.volume(), ratio(4, 3));
        assert_eq!(octa.facets().len(), 8);
    }

    #[test]
    fn containment_is_closed() {
        let sq = square();
        assert!(sq.contains(&point(&[(1, 2), (1, 2)])));
        assert!(!sq.contains(&int_point(&[2, 0])));
        assert!(sq.contains(&int_point(&[1, 0])));
        assert!(sq.on_boundary(&point(&[(1, 2), (0, 1)])));
    }

    #[test]
    fn triangulation_tiles_the_body() {
        for body in [square(), triangle()] {
            let total = body.triangulate().iter().fold(Rational::zero(), |acc, s| {
                let rows: Vec<Point> = s[1..].iter().map(|v| sub(v, &s[0])).collect();
                acc + determinant(&rows).abs() / int(2)
            });
            assert_eq!(total, body.volume());
        }
        assert_eq!(square().triangulate().len(), 2);
    }

    #[test]
    fn json_round_trip() {
        let sq = square();
        let s = serde_json::to_string(&sq.to_json()).unwrap();
        assert_eq!(s, r#"{"dim":2,"vertices":[["0","0"],["0","1"],["1","0"],["1","1"]]}"#);
        let back = ConvexBody::from_json(&serde_json::from_str(&s).unwrap()).unwrap();
        assert_eq!(back, sq);
        let loose: BodyJson = serde_json::from_str(r#"{"dim":2,"vertices":[[0,0],["1/2",0],[0,"0.5"]]}"#).unwrap();
        assert_eq!(ConvexBody::from_json(&loose).unwrap().volume(), ratio(1, 8));
    }
}
