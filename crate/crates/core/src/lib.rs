//! Exact covering of convex polytopes by smaller homothetic copies.
//!
//! The crate brackets the homothety constant `λ(K, n)` (the infimum ratio at
//! which `n` translates of `λK` cover `K`), certifies and refutes candidate
//! covers with replayable exact certificates, evaluates closed-form covering
//! number bounds, and transfers covers between affinely close bodies.

pub mod bounds;
pub mod covering;
pub mod error;
pub mod experiment;
pub mod geometry;
pub mod linalg;
pub mod rational;
pub mod stability;

pub use error::{Error, Result};
pub use geometry::{AffineMap, ConvexBody, Halfspace, Homothet, Sign};
pub use rational::{Point, Rational};
