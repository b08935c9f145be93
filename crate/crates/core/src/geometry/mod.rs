//! Exact convex-polytope calculus: hulls, dual representations, Minkowski
//! operations, affine images, volumes and containment.

mod affine;
mod body;
mod feasibility;
mod halfspace;
mod hull;
mod minkowski;

pub use affine::{AffineMap, Homothet, Sign};
pub use body::{BodyJson, ConvexBody};
pub use feasibility::{find_point, intersect_nonempty, Feasibility, HPolytope};
pub use halfspace::Halfspace;
pub use hull::convex_hull;
pub use minkowski::{difference_body, minkowski_difference, minkowski_sum, negate};
