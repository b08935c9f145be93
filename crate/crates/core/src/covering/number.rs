use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::covering::{
    lattice_cover, search_cover, verify_cover, CertifiedCell, Cover, CoverageResult, SearchConfig, SearchOutcome,
};
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Sign};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoveringNumberConfig {
    /// Largest `n` tried before giving up.
    pub max_n: usize,
    pub search: SearchConfig,
}

impl Default for CoveringNumberConfig {
    fn default() -> Self {
        Self { max_n: 16, search: SearchConfig::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoveringNumber {
    /// Size of the certified cover: an upper bound on `N(K, σλK)`.
    pub n: usize,
    /// `⌈λ^{-d}⌉`, below which no cover can exist by volume.
    pub volume_lower_bound: usize,
    pub cover: Cover,
    pub cells: Vec<CertifiedCell>,
}

/// `⌈λ^{-d}⌉`.
pub fn volume_lower_bound(lambda: &Rational, dim: usize) -> Result<usize> {
    let inv = num_traits::pow(lambda.recip(), dim);
    let (q, r) = inv.numer().div_rem(inv.denom());
    let ceil = if r.is_zero() { q } else { q + 1 };
    ceil.to_usize()
        .ok_or_else(|| Error::DomainError(format!("volume bound {ceil} does not fit in usize")))
}

/// Certified cover of `body` by few translates of `sign · lambda · body`.
///
/// The overlapping lattice cover gives a first certified answer. Searches
/// then run for `n` from the volume bound upwards, below both that answer
/// and `max_n`, and the first success replaces it. Search is not monotone in
/// `n`, so small counts are tried first.
pub fn covering_number_upper(
    body: &ConvexBody,
    lambda: &Rational,
    sign: Sign,
    config: &CoveringNumberConfig,
) -> Result<CoveringNumber> {
    if *lambda <= Rational::zero() || *lambda >= Rational::one() {
        return Err(Error::DomainError(format!("lambda {lambda} outside (0, 1)")));
    }
    let start = volume_lower_bound(lambda, body.dim())?;
    if start > config.max_n {
        return Err(Error::BudgetExceeded(format!(
            "volume bound {start} exceeds the limit of {} translates",
            config.max_n
        )));
    }
    let attempt = |n: usize| -> Result<Option<(Cover, Vec<CertifiedCell>)>> {
        match search_cover(body, n, lambda, sign, &config.search) {
            Ok(SearchOutcome::Found { cover, cells }) => Ok(Some((cover, cells))),
            Ok(SearchOutcome::NotFound) | Err(Error::BudgetExceeded(_)) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let lattice = lattice_cover(body, lambda, sign)?;
    let mut best = match verify_cover(body, &lattice, LATTICE_DEPTH)? {
        CoverageResult::Covered { cells } => Some((lattice, cells)),
        _ => None,
    };
    let stop = best.as_ref().map_or(config.max_n, |(c, _)| (c.len() - 1).min(config.max_n));
    for n in start..=stop {
        if let Some(found) = attempt(n)? {
            best = Some(found);
            break;
        }
    }
    let Some((cover, cells)) = best else {
        return Err(Error::BudgetExceeded(format!(
            "no certified cover with at most {} translates",
            config.max_n
        )));
    };
    Ok(CoveringNumber { n: cover.len(), volume_lower_bound: start, cover, cells })
}

/// The lattice cover overlaps everywhere, so this depth is never reached in
/// practice.
const LATTICE_DEPTH: usize = 40;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int_point, ratio};

    #[test]
    fn volume_bound() {
        assert_eq!(volume_lower_bound(&ratio(1, 2), 2).unwrap(), 4);
        assert_eq!(volume_lower_bound(&ratio(2, 3), 2).unwrap(), 3);
        assert_eq!(volume_lower_bound(&ratio(3, 5), 3).unwrap(), 5);
    }

    #[test]
    fn square_half() {
        let sq = ConvexBody::from_points(&[
            int_point(&[0, 0]),
            int_point(&[1, 0]),
            int_point(&[0, 1]),
            int_point(&[1, 1]),
        ])
        .unwrap();
        let cfg = CoveringNumberConfig::default();
        assert_eq!(covering_number_upper(&sq, &ratio(1, 2), Sign::Plus, &cfg).unwrap().n, 4);
        assert_eq!(covering_number_upper(&sq, &ratio(1, 2), Sign::Minus, &cfg).unwrap().n, 4);
    }
}
