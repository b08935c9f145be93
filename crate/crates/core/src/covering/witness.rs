//! Sound lower bounds on `λ(K, n)` from finite point sets.
//!
//! If no `n` translates of `σλK` can cover a finite set `W ⊆ K`, then no `n`
//! translates cover `K` either, so `λ(K, n) > λ`. A group `S ⊆ W` fits in one
//! translate `t + σλK` iff `⋂_{w∈S} (w − σλK)` is nonempty, which is an exact
//! linear feasibility question in `t`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{find_point, ConvexBody, Halfspace, Sign};
use crate::rational::{dot, serde_points, Point, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSet {
    #[serde(with = "serde_points")]
    points: Vec<Point>,
}

impl WitnessSet {
    /// Checks that every point lies in `body`.
    pub fn new(body: &ConvexBody, points: Vec<Point>) -> Result<Self> {
        if let Some(i) = points.iter().position(|p| p.len() != body.dim() || !body.contains(p)) {
            return Err(Error::DomainError(format!("witness {i} is not a point of the body")));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Vertices, then the centroid, then facet centroids; at most `max_points`
    /// points taken in that order. Returns the nested sequence of candidate
    /// sets used for automatic lower bounds.
    pub fn auto_sequence(body: &ConvexBody, max_points: usize) -> Vec<WitnessSet> {
        let mut stages: Vec<Vec<Point>> = Vec::new();
        let vertices: Vec<Point> = body.vertices().to_vec();
        stages.push(vertices.clone());
        let mut with_centroid = vertices;
        with_centroid.push(body.centroid());
        stages.push(with_centroid.clone());
        let mut with_facets = with_centroid;
        with_facets.extend(body.facet_centroids());
        stages.push(with_facets);

        let mut out: Vec<WitnessSet> = Vec::new();
        for mut pts in stages {
            if pts.len() > max_points {
                // extra points take at most half of the room
                let mut extra = pts.split_off(body.vertices().len());
                extra.truncate(max_points / 2);
                pts.truncate(max_points - extra.len());
                pts.extend(extra);
            }
            if out.last().map(|w| w.points != pts).unwrap_or(true) {
                out.push(WitnessSet { points: pts });
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    /// Each group of witness indices fits in the translate at the paired position.
    Feasible { groups: Vec<Vec<usize>>, translations: Vec<Point> },
    /// No assignment exists: a proof that `λ(K, n) > λ`.
    Infeasible,
}

impl WitnessOutcome {
    pub fn is_infeasible(&self) -> bool {
        matches!(self, WitnessOutcome::Infeasible)
    }
}

/// Halfspaces in the translation variable `t` whose common solutions are the
/// `t` with `w ∈ t + σλK` for every listed `w`.
pub fn group_constraints(body: &ConvexBody, points: &[&Point], lambda: &Rational, sign: Sign) -> Vec<Halfspace> {
    // σ n·(w − t) >= λ o  ⇔  (−σ n)·t >= λ o − σ n·w
    let s = sign.as_rational();
    let mut out = Vec::with_capacity(points.len() * body.facets().len());
    for w in points {
        for h in body.facets() {
            let sn: Point = h.normal.iter().map(|x| x * &s).collect();
            let normal: Point = sn.iter().map(|x| -x).collect();
            let offset = lambda * &h.offset - dot(&sn, w);
            out.push(Halfspace::new(normal, offset));
        }
    }
    out
}

struct Search<'a> {
    body: &'a ConvexBody,
    points: &'a [Point],
    lambda: &'a Rational,
    slot_signs: &'a [Sign],
    cache: HashMap<(u64, Sign), Option<Point>>,
    nodes: usize,
    budget: usize,
}

impl Search<'_> {
    fn group_point(&mut self, mask: u64, sign: Sign) -> Option<Point> {
        if let Some(hit) = self.cache.get(&(mask, sign)) {
            return hit.clone();
        }
        let members: Vec<&Point> = (0..self.points.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| &self.points[i])
            .collect();
        let hs = group_constraints(self.body, &members, self.lambda, sign);
        let res = find_point(self.body.dim(), &hs);
        self.cache.insert((mask, sign), res.clone());
        res
    }

    fn assign(&mut self, next: usize, slots: &mut Vec<u64>) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "witness enumeration exceeded {} nodes",
                self.budget
            )));
        }
        if next == self.points.len() {
            return Ok(true);
        }
        let bit = 1u64 << next;
        for slot in 0..slots.len() {
            let sign = self.slot_signs[slot];
            if slots[slot] == 0 {
                // open only the first empty slot of each sign
                let first_empty = (0..slots.len())
                    .find(|&s| slots[s] == 0 && self.slot_signs[s] == sign)
                    .expect("slot itself is empty");
                if first_empty != slot {
                    continue;
                }
            }
            let mask = slots[slot] | bit;
            if self.group_point(mask, sign).is_none() {
                continue;
            }
            slots[slot] = mask;
            if self.assign(next + 1, slots)? {
                return Ok(true);
            }
            slots[slot] &= !bit;
        }
        Ok(false)
    }
}

/// Decides whether translates `t_i + σ_i λK` (one per entry of `signs`) can
/// cover every witness point.
pub fn witness_lower_bound_signed(
    body: &ConvexBody,
    witnesses: &WitnessSet,
    lambda: &Rational,
    signs: &[Sign],
    budget: usize,
) -> Result<WitnessOutcome> {
    if witnesses.len() > 63 {
        return Err(Error::DomainError("at most 63 witness points are supported".into()));
    }
    if signs.is_empty() {
        return Ok(if witnesses.is_empty() {
            WitnessOutcome::Feasible { groups: vec![], translations: vec![] }
        } else {
            WitnessOutcome::Infeasible
        });
    }
    let mut slot_signs = signs.to_vec();
    slot_signs.sort();
    let mut search = Search {
        body,
        points: witnesses.points(),
        lambda,
        slot_signs: &slot_signs,
        cache: HashMap::new(),
        nodes: 0,
        budget,
    };
    let mut slots = vec![0u64; slot_signs.len()];
    if !search.assign(0, &mut slots)? {
        return Ok(WitnessOutcome::Infeasible);
    }
    let mut groups = Vec::new();
    let mut translations = Vec::new();
    for (slot, &mask) in slots.iter().enumerate() {
        if mask == 0 {
            continue;
        }
        let t = search
            .group_point(mask, slot_signs[slot])
            .expect("assigned groups are feasible");
        groups.push((0..witnesses.len()).filter(|i| mask >> i & 1 == 1).collect());
        translations.push(t);
    }
    Ok(WitnessOutcome::Feasible { groups, translations })
}

/// [`witness_lower_bound_signed`] with `n` translates of one sign.
pub fn witness_lower_bound(
    body: &ConvexBody,
    witnesses: &WitnessSet,
    n: usize,
    lambda: &Rational,
    sign: Sign,
    budget: usize,
) -> Result<WitnessOutcome> {
    witness_lower_bound_signed(body, witnesses, lambda, &vec![sign; n], budget)
}
