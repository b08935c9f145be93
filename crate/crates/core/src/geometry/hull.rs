//! Incremental beneath-beyond convex hull in exact arithmetic.
//!
//! The boundary is kept as a simplicial complex of `d`-subsets of input
//! indices. A facet whose hyperplane contains the inserted point is removed
//! together with the strictly visible ones when it is reachable from them, so
//! every cone over a horizon ridge is full-dimensional.

use std::collections::{HashMap, HashSet};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Halfspace};
use crate::linalg::{nullspace, rank, SpanTracker};
use crate::rational::{centroid, dot, sub, Point};

#[derive(Clone, Debug)]
struct SimplexFacet {
    verts: Vec<usize>,
    plane: Halfspace,
}

fn plane_through(points: &[Point], verts: &[usize], interior: &[crate::rational::Rational]) -> Halfspace {
    let dim = interior.len();
    let base = &points[verts[0]];
    let rows: Vec<Point> = verts[1..].iter().map(|&v| sub(&points[v], base)).collect();
    let mut ns = nullspace(&rows, dim);
    debug_assert_eq!(ns.len(), 1, "facet simplex must span a hyperplane");
    let normal = ns.swap_remove(0);
    let offset = dot(&normal, base);
    let plane = Halfspace::new(normal, offset);
    if plane.eval(interior).is_negative() {
        Halfspace::new(
            plane.normal.iter().map(|x| -x).collect(),
            -plane.offset,
        )
    } else {
        plane
    }
}

fn ridges(verts: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..verts.len()).map(move |skip| {
        verts
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != skip)
            .map(|(_, &v)| v)
            .collect()
    })
}

/// Runs beneath-beyond over `points` (deduplicated, lexicographically sorted).
fn hull_pass(points: &[Point], dim: usize) -> Result<Vec<SimplexFacet>> {
    let mut tracker = SpanTracker::new();
    let mut simplex = vec![0usize];
    for (i, p) in points.iter().enumerate().skip(1) {
        if tracker.rank() == dim {
            break;
        }
        if tracker.try_add(&sub(p, &points[0])) {
            simplex.push(i);
        }
    }
    if tracker.rank() < dim {
        return Err(Error::DegenerateInput(format!(
            "points span an affine subspace of dimension {} < {dim}",
            tracker.rank()
        )));
    }
    let simplex_points: Vec<Point> = simplex.iter().map(|&i| points[i].clone()).collect();
    let interior = centroid(&simplex_points);

    let mut facets: Vec<SimplexFacet> = (0..=dim)
        .map(|skip| {
            let verts: Vec<usize> = simplex
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &v)| v)
                .collect();
            let plane = plane_through(points, &verts, &interior);
            SimplexFacet { verts, plane }
        })
        .collect();

    let in_simplex: HashSet<usize> = simplex.iter().copied().collect();
    for (i, p) in points.iter().enumerate() {
        if in_simplex.contains(&i) {
            continue;
        }
        let evals: Vec<_> = facets.iter().map(|f| f.plane.eval(p)).collect();
        if !evals.iter().any(|e| e.is_negative()) {
            continue;
        }

        let mut ridge_map: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
        for (fi, f) in facets.iter().enumerate() {
            for r in ridges(&f.verts) {
                ridge_map.entry(r).or_default().push(fi);
            }
        }

        let mut removed = vec![false; facets.len()];
        let mut stack: Vec<usize> = Vec::new();
        for (fi, e) in evals.iter().enumerate() {
            if e.is_negative() {
                removed[fi] = true;
                stack.push(fi);
            }
        }
        while let Some(fi) = stack.pop() {
            for r in ridges(&facets[fi].verts) {
                for &g in &ridge_map[&r] {
                    if !removed[g] && !evals[g].is_positive() {
                        removed[g] = true;
                        stack.push(g);
                    }
                }
            }
        }

        let mut new_facets = Vec::new();
        for (fi, f) in facets.iter().enumerate() {
            if !removed[fi] {
                continue;
            }
            for r in ridges(&f.verts) {
                let kept_neighbour = ridge_map[&r].iter().any(|&g| g != fi && !removed[g]);
                if kept_neighbour {
                    let mut verts = r.clone();
                    verts.push(i);
                    verts.sort_unstable();
                    let plane = plane_through(points, &verts, &interior);
                    new_facets.push(SimplexFacet { verts, plane });
                }
            }
        }

        let mut next: Vec<SimplexFacet> = facets
            .into_iter()
            .zip(removed)
            .filter(|(_, r)| !r)
            .map(|(f, _)| f)
            .collect();
        next.extend(new_facets);
        facets = next;
    }
    Ok(facets)
}

fn canonical_planes(facets: &[SimplexFacet]) -> Vec<Halfspace> {
    let mut planes: Vec<Halfspace> = facets.iter().map(|f| f.plane.canonical()).collect();
    planes.sort();
    planes.dedup();
    planes
}

fn is_extreme(p: &[crate::rational::Rational], planes: &[Halfspace], dim: usize) -> bool {
    let tight: Vec<Point> = planes
        .iter()
        .filter(|h| h.is_tight(p))
        .map(|h| h.normal.clone())
        .collect();
    tight.len() >= dim && rank(&tight) == dim
}

/// Convex hull of `points` in dimension `dim`, with a minimal vertex list,
/// a canonical facet list and a simplicial boundary over the vertices.
pub fn convex_hull(points: &[Point], dim: usize) -> Result<ConvexBody> {
    if dim == 0 {
        return Err(Error::DegenerateInput("dimension must be positive".into()));
    }
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: p.len() });
        }
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < dim + 1 {
        return Err(Error::DegenerateInput(format!(
            "need at least {} distinct points, got {}",
            dim + 1,
            pts.len()
        )));
    }

    let facets = hull_pass(&pts, dim)?;
    let planes = canonical_planes(&facets);
    let used: HashSet<usize> = facets.iter().flat_map(|f| f.verts.iter().copied()).collect();
    let all_extreme = used.iter().all(|&i| is_extreme(&pts[i], &planes, dim));

    let (pts, facets, planes) = if all_extreme {
        (pts, facets, planes)
    } else {
        let mut extreme: Vec<Point> = used
            .iter()
            .filter(|&&i| is_extreme(&pts[i], &planes, dim))
            .map(|&i| pts[i].clone())
            .collect();
        extreme.sort();
        let facets = hull_pass(&extreme, dim)?;
        let planes = canonical_planes(&facets);
        (extreme, facets, planes)
    };

    let mut used: Vec<usize> = facets
        .iter()
        .flat_map(|f| f.verts.iter().copied())
        .collect::<HashSet<_>>()
        .into_iter()
        .collect();
    used.sort_unstable();
    let remap: HashMap<usize, usize> = used.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let vertices: Vec<Point> = used.iter().map(|&i| pts[i].clone()).collect();
    let mut boundary: Vec<Vec<usize>> = facets
        .iter()
        .map(|f| f.verts.iter().map(|v| remap[v]).collect())
        .collect();
    boundary.sort();

    Ok(ConvexBody::from_parts(dim, vertices, planes, boundary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int_point, point, ratio};

    #[test]
    fn interior_point_dropped() {
        let pts = vec![
            int_point(&[0, 0]),
            int_point(&[1, 0]),
            int_point(&[0, 1]),
            point(&[(1, 4), (1, 4)]),
        ];
        let t = convex_hull(&pts, 2).unwrap();
        assert_eq!(t.vertices().len(), 3);
        assert_eq!(t.facets().len(), 3);
        assert_eq!(t.volume(), ratio(1, 2));
    }

    #[test]
    fn square_has_four_facets() {
        let pts = vec![
            int_point(&[0, 0]),
            int_point(&[1, 0]),
            int_point(&[0, 1]),
            int_point(&[1, 1]),
        ];
        let sq = convex_hull(&pts, 2).unwrap();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.facets().len(), 4);
        sq.validate().unwrap();
    }

    #[test]
    fn collinear_boundary_points_are_not_vertices() {
        // midpoints of edges and a point on the line through an edge, inserted
        // in an order that makes a boundary point temporarily extreme
        let pts = vec![
            int_point(&[0, 0]),
            int_point(&[1, 0]),
            int_point(&[2, 0]),
            int_point(&[0, 2]),
            int_point(&[1, 1]),
            int_point(&[2, 2]),
            int_point(&[0, 1]),
        ];
        let sq = convex_hull(&pts, 2).unwrap();
        assert_eq!(sq.vertices().len(), 4);
        assert_eq!(sq.volume(), crate::rational::int(4));
        sq.validate().unwrap();
    }

    #[test]
    fn cube_with_face_points() {
        let mut pts = Vec::new();
        for x in 0..=2 {
            for y in 0..=2 {
                for z in 0..=2 {
                    pts.push(int_point(&[x, y, z]));
                }
            }
        }
        let c = convex_hull(&pts, 3).unwrap();
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        assert_eq!(c.volume(), crate::rational::int(8));
        c.validate().unwrap();
    }

    #[test]
    fn one_dimensional_segment() {
        let pts = vec![int_point(&[3]), int_point(&[-1]), int_point(&[1])];
        let s = convex_hull(&pts, 1).unwrap();
        assert_eq!(s.vertices(), &[int_point(&[-1]), int_point(&[3])]);
        assert_eq!(s.volume(), crate::rational::int(4));
    }

    #[test]
    fn degenerate_input_rejected() {
        let pts = vec![int_point(&[0, 0]), int_point(&[1, 1]), int_point(&[2, 2])];
        assert!(matches!(convex_hull(&pts, 2), Err(Error::DegenerateInput(_))));
        let pts = vec![int_point(&[0, 0, 0]), int_point(&[1, 0, 0]), int_point(&[0, 1, 0]), int_point(&[1, 1, 0])];
        assert!(matches!(convex_hull(&pts, 3), Err(Error::DegenerateInput(_))));
        assert!(matches!(
            convex_hull(&[int_point(&[0, 0]), int_point(&[1])], 2),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
