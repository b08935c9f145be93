use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::rational::{dot, serde_point, serde_rational, Point, Rational};

/// The closed halfspace `normal · x >= offset`; the normal points into the body.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(with = "serde_point")]
    pub normal: Point,
    #[serde(with = "serde_rational")]
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: Point, offset: Rational) -> Self {
        Self { normal, offset }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// Slack of `p`: nonnegative iff `p` lies in the halfspace.
    pub fn eval(&self, p: &[Rational]) -> Rational {
        dot(&self.normal, p) - &self.offset
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        !self.eval(p).is_negative()
    }

    pub fn is_tight(&self, p: &[Rational]) -> bool {
        self.eval(p).is_zero()
    }

    /// Rescales by a positive factor so that normal and offset are coprime integers.
    pub fn canonical(&self) -> Self {
        let denom_lcm = self
            .normal
            .iter()
            .chain(std::iter::once(&self.offset))
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let ints: Vec<BigInt> = self
            .normal
            .iter()
            .chain(std::iter::once(&self.offset))
            .map(|q| (q * Rational::from_integer(denom_lcm.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if g.is_zero() {
            return self.clone();
        }
        let mut scaled: Vec<Rational> = ints
            .into_iter()
            .map(|x| Rational::from_integer(x / &g))
            .collect();
        let offset = scaled.pop().expect("offset entry");
        Self { normal: scaled, offset }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn canonical_form_is_primitive_and_keeps_orientation() {
        let h = Halfspace::new(vec![ratio(-2, 3), ratio(4, 3)], ratio(2, 3));
        let c = h.canonical();
        assert_eq!(c.normal, vec![int(-1), int(2)]);
        assert_eq!(c.offset, int(1));
        let p = vec![int(0), int(1)];
        assert_eq!(h.contains(&p), c.contains(&p));
        assert!(c.is_tight(&[int(1), int(1)]));
    }
}
