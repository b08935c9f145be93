//! Exact feasibility of finite systems of linear inequalities.
//!
//! The system `A x >= b` is decided by a dictionary simplex on
//! `max −w  s.t.  A x + w·1 >= b, w >= 0` with `x = u − v` split into
//! nonnegative parts. Bland's rule keeps the pivoting finite in exact
//! arithmetic; the system is feasible iff the optimum is `w = 0`.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Halfspace;
use crate::rational::{Point, Rational};

/// An intersection of halfspaces, possibly unbounded or empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HPolytope {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl HPolytope {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        if let Some(h) = halfspaces.iter().find(|h| h.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: h.dim() });
        }
        Ok(Self { dim, halfspaces })
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        self.halfspaces.iter().all(|h| h.contains(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Point),
    Empty,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// Decides whether the conjunction of all systems has a common point.
pub fn intersect_nonempty(systems: &[HPolytope]) -> Result<Feasibility> {
    let Some(first) = systems.first() else {
        return Err(Error::DegenerateInput("no systems given".into()));
    };
    let dim = first.dim;
    if let Some(s) = systems.iter().find(|s| s.dim != dim) {
        return Err(Error::DimensionMismatch { expected: dim, found: s.dim });
    }
    let all: Vec<Halfspace> = systems.iter().flat_map(|s| s.halfspaces.iter().cloned()).collect();
    Ok(match find_point(dim, &all) {
        Some(p) => Feasibility::Feasible(p),
        None => Feasibility::Empty,
    })
}

struct Dictionary {
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    constants: Vec<Rational>,
    coefs: Vec<Vec<Rational>>,
    obj_constant: Rational,
    obj: Vec<Rational>,
}

impl Dictionary {
    fn pivot(&mut self, row: usize, col: usize) {
        let a = self.coefs[row][col].clone();
        let inv = a.recip();
        let leaving = self.basic[row];
        let entering = self.nonbasic[col];

        let c_r = -&self.constants[row] * &inv;
        let mut row_coefs: Vec<Rational> = self.coefs[row].iter().map(|x| -x * &inv).collect();
        row_coefs[col] = inv;
        self.constants[row] = c_r.clone();
        self.coefs[row] = row_coefs.clone();
        self.basic[row] = entering;
        self.nonbasic[col] = leaving;

        for i in 0..self.basic.len() {
            if i == row {
                continue;
            }
            let c = self.coefs[i][col].clone();
            if c.is_zero() {
                continue;
            }
            self.constants[i] += &c * &c_r;
            for (j, rc) in row_coefs.iter().enumerate() {
                if j == col {
                    self.coefs[i][j] = &c * rc;
                } else if !rc.is_zero() {
                    self.coefs[i][j] += &c * rc;
                }
            }
        }
        let c = self.obj[col].clone();
        if !c.is_zero() {
            self.obj_constant += &c * &c_r;
            for (j, rc) in row_coefs.iter().enumerate() {
                if j == col {
                    self.obj[j] = &c * rc;
                } else if !rc.is_zero() {
                    self.obj[j] += &c * rc;
                }
            }
        }
    }

    /// Bland's rule maximization; returns false if unbounded.
    fn optimize(&mut self) -> bool {
        loop {
            let entering = self
                .obj
                .iter()
                .enumerate()
                .filter(|(_, c)| c.is_positive())
                .min_by_key(|&(j, _)| self.nonbasic[j])
                .map(|(j, _)| j);
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.basic.len() {
                let a = &self.coefs[i][col];
                if !a.is_negative() {
                    continue;
                }
                let ratio = &self.constants[i] / -a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basic[i] < self.basic[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            let Some((row, _)) = best else {
                return false;
            };
            self.pivot(row, col);
        }
    }
}

/// A point satisfying every halfspace, or `None` if the system is empty.
pub fn find_point(dim: usize, halfspaces: &[Halfspace]) -> Option<Point> {
    let m = halfspaces.len();
    // all offsets nonpositive: the origin works
    if halfspaces.iter().all(|h| !h.offset.is_positive()) {
        return Some(vec![Rational::zero(); dim]);
    }
    let w = 2 * dim;
    let n = 2 * dim + 1;
    let coefs: Vec<Vec<Rational>> = halfspaces
        .iter()
        .map(|h| {
            let mut row: Vec<Rational> = Vec::with_capacity(n);
            row.extend(h.normal.iter().cloned());
            row.extend(h.normal.iter().map(|x| -x));
            row.push(Rational::one());
            row
        })
        .collect();
    let mut obj = vec![Rational::zero(); n];
    obj[w] = -Rational::one();
    let mut dict = Dictionary {
        basic: (n..n + m).collect(),
        nonbasic: (0..n).collect(),
        constants: halfspaces.iter().map(|h| -&h.offset).collect(),
        coefs,
        obj_constant: Rational::zero(),
        obj,
    };
    let start = (0..m)
        .min_by(|&a, &b| dict.constants[a].cmp(&dict.constants[b]).then(a.cmp(&b)))
        .expect("nonempty system");
    dict.pivot(start, w);
    let bounded = dict.optimize();
    debug_assert!(bounded, "objective -w is bounded above by zero");
    if !dict.obj_constant.is_zero() {
        return None;
    }
    let mut values = vec![Rational::zero(); n + m];
    for (i, &b) in dict.basic.iter().enumerate() {
        values[b] = dict.constants[i].clone();
    }
    let x: Point = (0..dim).map(|k| &values[k] - &values[dim + k]).collect();
    debug_assert!(halfspaces.iter().all(|h| h.contains(&x)));
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, int_point};

    fn hs(normal: &[i64], offset: i64) -> Halfspace {
        Halfspace::new(int_point(normal), int(offset))
    }

    #[test]
    fn one_dimensional_cases() {
        let a = HPolytope::new(1, vec![hs(&[1], 0)]).unwrap();
        let b = HPolytope::new(1, vec![hs(&[-1], -1)]).unwrap();
        assert!(intersect_nonempty(&[a, b]).unwrap().is_feasible());
        let c = HPolytope::new(1, vec![hs(&[1], 1)]).unwrap();
        let d = HPolytope::new(1, vec![hs(&[-1], 0)]).unwrap();
        assert_eq!(intersect_nonempty(&[c, d]).unwrap(), Feasibility::Empty);
    }

    #[test]
    fn returned_point_is_feasible() {
        // 1 <= x <= 2, 3 <= y <= 5, x + y >= 6
        let sys = vec![hs(&[1, 0], 1), hs(&[-1, 0], -2), hs(&[0, 1], 3), hs(&[0, -1], -5), hs(&[1, 1], 6)];
        let p = find_point(2, &sys).unwrap();
        assert!(sys.iter().all(|h| h.contains(&p)));
        let mut infeasible = sys.clone();
        infeasible.push(hs(&[-1, -1], -3));
        assert!(find_point(2, &infeasible).is_none());
    }

    #[test]
    fn unbounded_and_degenerate_systems() {
        assert!(find_point(3, &[hs(&[1, 1, 1], 5)]).is_some());
        // a single point: x = 2, y = 2 written with redundant rows
        let sys = vec![hs(&[1, 0], 2), hs(&[-1, 0], -2), hs(&[0, 1], 2), hs(&[0, -1], -2), hs(&[1, 1], 4), hs(&[-1, -1], -4)];
        assert_eq!(find_point(2, &sys).unwrap(), int_point(&[2, 2]));
    }

    #[test]
    fn mismatched_dimensions() {
        assert!(HPolytope::new(2, vec![hs(&[1], 0)]).is_err());
        let a = HPolytope::new(1, vec![]).unwrap();
        let b = HPolytope::new(2, vec![]).unwrap();
        assert!(intersect_nonempty(&[a, b]).is_err());
    }
}
