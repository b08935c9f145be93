use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::covering::{
    search_cover, verify_cover, witness_lower_bound, CertifiedCell, Cover, SearchConfig, SearchOutcome,
    WitnessOutcome, WitnessSet,
};
use crate::error::{Error, Result};
use crate::geometry::{ConvexBody, Sign};
use crate::rational::{int, ratio, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LambdaConfig {
    #[serde(with = "crate::rational::serde_rational")]
    pub tol: Rational,
    pub sign: Sign,
    pub max_probes: usize,
    pub witness_budget: usize,
    pub max_witnesses: usize,
    pub search: SearchConfig,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        Self {
            tol: ratio(1, 100),
            sign: Sign::Plus,
            max_probes: 40,
            witness_budget: 200_000,
            max_witnesses: 12,
            search: SearchConfig::default(),
        }
    }
}

/// Witness set that admits no assignment at `lambda`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LowerProof {
    pub lambda: Rational,
    pub n: usize,
    pub sign: Sign,
    pub witnesses: WitnessSet,
}

/// Cover together with its subdivision certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpperProof {
    pub cover: Cover,
    pub cells: Vec<CertifiedCell>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProbeOutcome {
    Refuted,
    Covered,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Probe {
    #[serde(with = "crate::rational::serde_rational")]
    pub lambda: Rational,
    pub outcome: ProbeOutcome,
}

/// `lo < λ(K, n) <= hi`, each endpoint carrying a replayable proof. When no
/// lower proof was found `lo` is 0; `hi` starts at 1 with the trivial cover.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bracket {
    pub n: usize,
    pub sign: Sign,
    pub lo: Rational,
    pub hi: Rational,
    pub lo_proof: Option<LowerProof>,
    pub hi_proof: UpperProof,
    pub converged: bool,
    pub probes: Vec<Probe>,
}

impl Bracket {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, lambda: &Rational) -> bool {
        self.lo < *lambda && *lambda <= self.hi
    }
}

fn probe(body: &ConvexBody, n: usize, lambda: &Rational, witness_sets: &[WitnessSet], cfg: &LambdaConfig) -> Result<(ProbeOutcome, Option<LowerProof>, Option<UpperProof>)> {
    for ws in witness_sets.iter().filter(|w| w.len() > n) {
        match witness_lower_bound(body, ws, n, lambda, cfg.sign, cfg.witness_budget) {
            Ok(WitnessOutcome::Infeasible) => {
                let proof = LowerProof { lambda: lambda.clone(), n, sign: cfg.sign, witnesses: ws.clone() };
                return Ok((ProbeOutcome::Refuted, Some(proof), None));
            }
            Ok(WitnessOutcome::Feasible { .. }) | Err(Error::BudgetExceeded(_)) => {}
            Err(e) => return Err(e),
        }
    }
    match search_cover(body, n, lambda, cfg.sign, &cfg.search) {
        Ok(SearchOutcome::Found { cover, cells }) => {
            Ok((ProbeOutcome::Covered, None, Some(UpperProof { cover, cells })))
        }
        Ok(SearchOutcome::NotFound) | Err(Error::BudgetExceeded(_)) => Ok((ProbeOutcome::Inconclusive, None, None)),
        Err(e) => Err(e),
    }
}

/// Brackets `λ(K, n)` by bisection: each probe first tries the automatic
/// witness sets (raising `lo` on a refutation), then searches for a cover
/// (lowering `hi`). Inconclusive probes push later probes towards `hi`.
pub fn lambda_of(body: &ConvexBody, n: usize, config: &LambdaConfig) -> Result<Bracket> {
    if n == 0 {
        return Err(Error::DomainError("n must be positive".into()));
    }
    if !config.tol.is_positive() {
        return Err(Error::DomainError("tolerance must be positive".into()));
    }
    let trivial = Cover::trivial(body.clone());
    let cells = verify_cover(body, &trivial, 1)?
        .cells()
        .map(<[CertifiedCell]>::to_vec)
        .expect("a body covers itself");
    let mut hi = Rational::one();
    let mut hi_proof = UpperProof { cover: trivial, cells };
    let mut lo = Rational::zero();
    let mut lo_proof = None;
    let mut floor = Rational::zero();
    let mut probes = Vec::new();
    let witness_sets = WitnessSet::auto_sequence(body, config.max_witnesses);

    for _ in 0..config.max_probes {
        if &hi - &lo <= config.tol || &hi - &floor <= config.tol {
            break;
        }
        let lambda = (&floor + &hi) / int(2);
        let (outcome, lower, upper) = probe(body, n, &lambda, &witness_sets, config)?;
        match outcome {
            ProbeOutcome::Refuted => {
                lo = lambda.clone();
                floor = lambda.clone();
                lo_proof = lower;
            }
            ProbeOutcome::Covered => {
                hi = lambda.clone();
                hi_proof = upper.expect("covered probe carries a cover");
            }
            ProbeOutcome::Inconclusive => floor = lambda.clone(),
        }
        probes.push(Probe { lambda, outcome });
    }
    let converged = &hi - &lo <= config.tol;
    Ok(Bracket { n, sign: config.sign, lo, hi, lo_proof, hi_proof, converged, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int_point;

    #[test]
    fn square_with_four() {
        let sq = ConvexBody::from_points(&[
            int_point(&[0, 0]),
            int_point(&[1, 0]),
            int_point(&[0, 1]),
            int_point(&[1, 1]),
        ])
        .unwrap();
        let b = lambda_of(&sq, 4, &LambdaConfig::default()).unwrap();
        assert!(b.converged);
        assert!(b.contains(&ratio(1, 2)));
        assert_eq!(b.hi, ratio(1, 2));
        assert!(b.lo_proof.is_some());
    }

    #[test]
    fn single_translate_collapses_to_one() {
        let t = ConvexBody::from_points(&[int_point(&[0, 0]), int_point(&[1, 0]), int_point(&[0, 1])]).unwrap();
        let b = lambda_of(&t, 1, &LambdaConfig::default()).unwrap();
        assert_eq!(b.hi, Rational::one());
        assert!(b.converged);
        assert!(b.lo > ratio(99, 100));
    }

    #[test]
    fn bad_arguments() {
        let t = ConvexBody::from_points(&[int_point(&[0, 0]), int_point(&[1, 0]), int_point(&[0, 1])]).unwrap();
        assert!(lambda_of(&t, 0, &LambdaConfig::default()).is_err());
        let cfg = LambdaConfig { tol: Rational::zero(), ..LambdaConfig::default() };
        assert!(lambda_of(&t, 3, &cfg).is_err());
    }
}
