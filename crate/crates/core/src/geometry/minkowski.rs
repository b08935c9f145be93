use crate::error::{Error, Result};
use crate::geometry::{convex_hull, ConvexBody};
use crate::rational::{add, neg, Point};

/// `A + B`: the hull of all pairwise vertex sums.
pub fn minkowski_sum(a: &ConvexBody, b: &ConvexBody) -> Result<ConvexBody> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let sums: Vec<Point> = a
        .vertices()
        .iter()
        .flat_map(|u| b.vertices().iter().map(move |v| add(u, v)))
        .collect();
    convex_hull(&sums, a.dim())
}

/// Point reflection `−K`.
pub fn negate(k: &ConvexBody) -> ConvexBody {
    let pts: Vec<Point> = k.vertices().iter().map(|v| neg(v)).collect();
    convex_hull(&pts, k.dim()).expect("reflection of a full-dimensional body")
}

/// `K − L`.
pub fn minkowski_difference(k: &ConvexBody, l: &ConvexBody) -> Result<ConvexBody> {
    minkowski_sum(k, &negate(l))
}

/// The difference body `K − K`.
pub fn difference_body(k: &ConvexBody) -> ConvexBody {
    minkowski_difference(k, k).expect("same dimension")
}
