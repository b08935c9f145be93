//! Certificate files and their independent replay.
//!
//! The checker rebuilds every body from its vertex list and re-derives each
//! inclusion with exact arithmetic. Homothet membership is tested by pulling
//! the point back into the base body instead of through homothet halfspaces;
//! coverage is accepted when the cells lie in the target, are pairwise
//! interior-disjoint, and their volumes add up to the target's volume.
//! Lower-bound proofs are replayed by dynamic programming over witness
//! subsets rather than by the backtracking search that produced them.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::covering::{Bracket, CertifiedCell, Cover, CoverJson, CoverageResult};
use crate::error::{Error, Result};
use crate::geometry::{intersect_nonempty, AffineMap, BodyJson, ConvexBody, Feasibility, HPolytope, Homothet, Sign};
use crate::linalg::{determinant, identity, nullspace};
use crate::rational::{
    dot, factorial, format_rational, serde_point, serde_points, serde_rational, sub, Point, Rational,
};
use crate::stability::{Sandwich, SandwichJson, Transfer};

/// Cover of a target body with its cell decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCert {
    pub target: BodyJson,
    pub cover: CoverJson,
    pub cells: Vec<CertifiedCell>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LowerCert {
    #[serde(with = "serde_rational")]
    pub lambda: Rational,
    #[serde(with = "serde_points")]
    pub witnesses: Vec<Point>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Certificate {
    Cover(CoverCert),
    Uncovered {
        target: BodyJson,
        cover: CoverJson,
        #[serde(with = "serde_point")]
        witness: Point,
    },
    Bracket {
        body: BodyJson,
        n: usize,
        sign: Sign,
        #[serde(with = "serde_rational")]
        lo: Rational,
        #[serde(with = "serde_rational")]
        hi: Rational,
        lower: Option<LowerCert>,
        upper: CoverCert,
    },
    Sandwich(SandwichJson),
    Transfer { sandwich: SandwichJson, source: CoverCert, target: CoverCert },
}

impl Certificate {
    pub fn from_cover(target: &ConvexBody, cover: &Cover, cells: &[CertifiedCell]) -> Self {
        Certificate::Cover(cover_cert(target, cover, cells))
    }

    pub fn from_bracket(body: &ConvexBody, bracket: &Bracket) -> Self {
        Certificate::Bracket {
            body: body.to_json(),
            n: bracket.n,
            sign: bracket.sign,
            lo: bracket.lo.clone(),
            hi: bracket.hi.clone(),
            lower: bracket.lo_proof.as_ref().map(|p| LowerCert {
                lambda: p.lambda.clone(),
                witnesses: p.witnesses.points().to_vec(),
            }),
            upper: cover_cert(body, &bracket.hi_proof.cover, &bracket.hi_proof.cells),
        }
    }

    /// `None` unless the transferred cover was certified.
    pub fn from_transfer(source: &Cover, source_cells: &[CertifiedCell], sandwich: &Sandwich, transfer: &Transfer) -> Option<Self> {
        let CoverageResult::Covered { cells } = &transfer.result else {
            return None;
        };
        Some(Certificate::Transfer {
            sandwich: sandwich.to_json(),
            source: cover_cert(&sandwich.k, source, source_cells),
            target: cover_cert(&sandwich.l, &transfer.cover, cells),
        })
    }
}

fn cover_cert(target: &ConvexBody, cover: &Cover, cells: &[CertifiedCell]) -> CoverCert {
    CoverCert { target: target.to_json(), cover: cover.to_json(), cells: cells.to_vec() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "lowercase")]
pub enum CheckResult {
    Valid,
    Invalid(String),
}

impl CheckResult {
    pub fn is_valid(&self) -> bool {
        matches!(self, CheckResult::Valid)
    }
}

type Check = std::result::Result<(), String>;

/// Parses and replays a certificate; malformed input is an [`Error::Parse`].
pub fn check_certificate_str(text: &str) -> Result<CheckResult> {
    let cert: Certificate = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    check_certificate(&cert)
}

pub fn check_certificate(cert: &Certificate) -> Result<CheckResult> {
    let outcome = match cert {
        Certificate::Cover(c) => check_cover(c).map(|_| ()),
        Certificate::Uncovered { target, cover, witness } => check_uncovered(target, cover, witness),
        Certificate::Bracket { body, n, sign, lo, hi, lower, upper } => {
            check_bracket(body, *n, *sign, lo, hi, lower.as_ref(), upper)
        }
        Certificate::Sandwich(s) => check_sandwich(s).map(|_| ()),
        Certificate::Transfer { sandwich, source, target } => check_transfer(sandwich, source, target),
    };
    Ok(match outcome {
        Ok(()) => CheckResult::Valid,
        Err(reason) => CheckResult::Invalid(reason),
    })
}

fn rebuild(json: &BodyJson, what: &str) -> std::result::Result<ConvexBody, String> {
    let body = ConvexBody::from_json(json).map_err(|e| format!("{what}: {e}"))?;
    if body.vertices().len() != json.vertices.len() {
        return Err(format!("{what}: listed points are not all vertices"));
    }
    Ok(body)
}

/// `p ∈ t + σλK` iff `σ(p − t)/λ ∈ K`.
fn homothet_contains(base: &ConvexBody, h: &Homothet, p: &[Rational]) -> bool {
    let s = h.signed_ratio();
    let pulled: Point = p.iter().zip(&h.translation).map(|(x, t)| (x - t) / &s).collect();
    base.contains(&pulled)
}

fn simplex_volume(simplex: &[Point]) -> Rational {
    let d = simplex.len() - 1;
    let rows: Vec<Point> = simplex[1..].iter().map(|v| sub(v, &simplex[0])).collect();
    determinant(&rows).abs() / Rational::from_integer(factorial(d))
}

/// Ratio and size of a replayed cover.
fn check_cover(c: &CoverCert) -> std::result::Result<(Rational, usize, ConvexBody, Cover), String> {
    let target = rebuild(&c.target, "target")?;
    let base = rebuild(&c.cover.base, "cover base")?;
    let d = target.dim();
    if base.dim() != d {
        return Err("cover base and target differ in dimension".into());
    }
    let cover = Cover::from_json(&c.cover).map_err(|e| format!("cover: {e}"))?;
    let hs = cover.homothets();
    if let Some(i) = hs.iter().position(|h| !h.ratio.is_positive() || h.ratio > Rational::one()) {
        return Err(format!("homothet {i}: ratio outside (0, 1]"));
    }
    let mut total = Rational::zero();
    for (ci, cell) in c.cells.iter().enumerate() {
        if cell.simplex.len() != d + 1 || cell.simplex.iter().any(|v| v.len() != d) {
            return Err(format!("cell {ci}: not a {d}-simplex"));
        }
        let Some(h) = hs.get(cell.homothet) else {
            return Err(format!("cell {ci}: homothet {} does not exist", cell.homothet));
        };
        for (vi, v) in cell.simplex.iter().enumerate() {
            if !target.contains(v) {
                return Err(format!("cell {ci}: vertex {vi} lies outside the target"));
            }
            if !homothet_contains(&base, h, v) {
                return Err(format!("cell {ci}: vertex {vi} is not in homothet {}", cell.homothet));
            }
        }
        total += simplex_volume(&cell.simplex);
    }
    let vol = target.volume();
    if total != vol {
        return Err(format!(
            "cell volumes sum to {} but the target has volume {}",
            format_rational(&total),
            format_rational(&vol)
        ));
    }
    if let Some((i, j)) = overlapping_pair(&c.cells) {
        return Err(format!("cells {i} and {j} overlap"));
    }
    Ok((cover.ratio().clone(), cover.len(), target, cover))
}

/// Separating-axis test: two simplices have disjoint interiors iff some
/// hyperplane spanned by `d − 1` of their edge directions separates them.
fn overlapping_pair(cells: &[CertifiedCell]) -> Option<(usize, usize)> {
    let boxes: Vec<(Point, Point)> = cells.iter().map(|c| bbox(&c.simplex)).collect();
    for i in 0..cells.len() {
        for j in i + 1..cells.len() {
            let (lo_i, hi_i) = &boxes[i];
            let (lo_j, hi_j) = &boxes[j];
            let apart = (0..lo_i.len()).any(|k| hi_i[k] <= lo_j[k] || hi_j[k] <= lo_i[k]);
            if apart {
                continue;
            }
            if !separated(&cells[i].simplex, &cells[j].simplex) {
                return Some((i, j));
            }
        }
    }
    None
}

fn bbox(points: &[Point]) -> (Point, Point) {
    let mut lo = points[0].clone();
    let mut hi = points[0].clone();
    for p in points {
        for k in 0..p.len() {
            if p[k] < lo[k] {
                lo[k] = p[k].clone();
            }
            if p[k] > hi[k] {
                hi[k] = p[k].clone();
            }
        }
    }
    (lo, hi)
}

fn edges(s: &[Point]) -> Vec<Point> {
    let mut out = Vec::new();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            out.push(sub(&s[j], &s[i]));
        }
    }
    out
}

fn separated(a: &[Point], b: &[Point]) -> bool {
    let d = a[0].len();
    if simplex_volume(a).is_zero() || simplex_volume(b).is_zero() {
        return true;
    }
    let dirs: Vec<Point> = edges(a).into_iter().chain(edges(b)).collect();
    let mut chosen = Vec::with_capacity(d - 1);
    fn walk(dirs: &[Point], start: usize, need: usize, chosen: &mut Vec<usize>, a: &[Point], b: &[Point]) -> bool {
        if chosen.len() == need {
            let rows: Vec<Point> = chosen.iter().map(|&i| dirs[i].clone()).collect();
            let d = a[0].len();
            let normals = if rows.is_empty() { identity(d) } else { nullspace(&rows, d) };
            if normals.len() != 1 && !rows.is_empty() {
                return false;
            }
            return normals.iter().any(|n| splits(n, a, b));
        }
        for i in start..dirs.len() {
            chosen.push(i);
            if walk(dirs, i + 1, need, chosen, a, b) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    walk(&dirs, 0, d - 1, &mut chosen, a, b)
}

fn splits(n: &[Rational], a: &[Point], b: &[Point]) -> bool {
    let pa: Vec<Rational> = a.iter().map(|p| dot(n, p)).collect();
    let pb: Vec<Rational> = b.iter().map(|p| dot(n, p)).collect();
    let (amin, amax) = (pa.iter().min().unwrap(), pa.iter().max().unwrap());
    let (bmin, bmax) = (pb.iter().min().unwrap(), pb.iter().max().unwrap());
    amax <= bmin || bmax <= amin
}

fn check_uncovered(target: &BodyJson, cover: &CoverJson, witness: &[Rational]) -> Check {
    let target = rebuild(target, "target")?;
    let base = rebuild(&cover.base, "cover base")?;
    if witness.len() != target.dim() || !target.contains(witness) {
        return Err("witness is not a point of the target".into());
    }
    if let Some(i) = cover.homothets.iter().position(|h| homothet_contains(&base, h, witness)) {
        return Err(format!("witness lies in homothet {i}"));
    }
    Ok(())
}

/// Whether some `t` has `w ∈ t + σλK` for every `w` in the group, i.e.
/// `⋂ (w − σλK)` is nonempty.
fn group_fits(body: &ConvexBody, group: &[&Point], lambda: &Rational, sign: Sign) -> Result<bool> {
    let d = body.dim();
    let s = -(lambda * sign.as_rational());
    let systems = group
        .iter()
        .map(|w| {
            let m: Vec<Point> = identity(d).into_iter().map(|r| r.into_iter().map(|x| x * &s).collect()).collect();
            let image = AffineMap::new(m, (*w).clone())?.apply(body)?;
            HPolytope::new(d, image.facets().to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(matches!(intersect_nonempty(&systems)?, Feasibility::Feasible(_)))
}

/// Fewest groups needed to split the witnesses into translates of `σλK`.
fn min_groups(body: &ConvexBody, witnesses: &[Point], lambda: &Rational, sign: Sign) -> Result<usize> {
    let m = witnesses.len();
    let full = (1usize << m) - 1;
    let mut fits = vec![false; full + 1];
    fits[0] = true;
    for mask in 1..=full {
        // a group fits only if every group with one point fewer does
        if (0..m).any(|i| mask >> i & 1 == 1 && !fits[mask & !(1 << i)]) {
            continue;
        }
        let group: Vec<&Point> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| &witnesses[i]).collect();
        fits[mask] = group_fits(body, &group, lambda, sign)?;
    }
    let mut best = vec![usize::MAX; full + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub = rest;
        loop {
            let group = sub | low;
            if fits[group] && best[mask ^ group] != usize::MAX {
                best[mask] = best[mask].min(best[mask ^ group] + 1);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    Ok(best[full])
}

fn check_lower(body: &ConvexBody, n: usize, sign: Sign, lower: &LowerCert) -> Check {
    if lower.witnesses.len() > 16 {
        return Err("lower proof has more than 16 witnesses".into());
    }
    if let Some(i) = lower.witnesses.iter().position(|w| w.len() != body.dim() || !body.contains(w)) {
        return Err(format!("lower proof: witness {i} is not a point of the body"));
    }
    let groups = min_groups(body, &lower.witnesses, &lower.lambda, sign).map_err(|e| format!("lower proof: {e}"))?;
    if groups <= n {
        return Err(format!(
            "lower proof: {n} translates at ratio {} cover the witnesses",
            format_rational(&lower.lambda)
        ));
    }
    Ok(())
}

fn check_bracket(
    body: &BodyJson,
    n: usize,
    sign: Sign,
    lo: &Rational,
    hi: &Rational,
    lower: Option<&LowerCert>,
    upper: &CoverCert,
) -> Check {
    let k = rebuild(body, "body")?;
    if lo >= hi {
        return Err("bracket is empty".into());
    }
    match lower {
        Some(l) if l.lambda != *lo => return Err("lower proof ratio differs from lo".into()),
        Some(l) => check_lower(&k, n, sign, l)?,
        None if !lo.is_zero() => return Err("positive lo without a lower proof".into()),
        None => {}
    }
    if rebuild(&upper.target, "upper target")? != k || rebuild(&upper.cover.base, "upper base")? != k {
        return Err("upper proof covers a different body".into());
    }
    let (ratio, size, _, cover) = check_cover(upper).map_err(|e| format!("upper proof: {e}"))?;
    if ratio != *hi {
        return Err("upper proof ratio differs from hi".into());
    }
    if size > n {
        return Err(format!("upper proof uses {size} homothets, more than {n}"));
    }
    if *hi < Rational::one() && cover.homothets().iter().any(|h| h.sign != sign) {
        return Err("upper proof uses homothets of the wrong sign".into());
    }
    Ok(())
}

fn check_sandwich(s: &SandwichJson) -> std::result::Result<(ConvexBody, ConvexBody), String> {
    let l = rebuild(&s.l, "L")?;
    let k = rebuild(&s.k, "K")?;
    let d = l.dim();
    if k.dim() != d || s.a.len() != d || s.map.dim() != d {
        return Err("sandwich dimensions disagree".into());
    }
    if s.factor < Rational::one() {
        return Err("factor below 1".into());
    }
    let image_pts: Vec<Point> = k.vertices().iter().map(|v| s.map.apply_point(v)).collect();
    let image = crate::geometry::convex_hull(&image_pts, d).map_err(|e| format!("T(K): {e}"))?;
    if let Some(i) = l.vertices().iter().position(|v| !image.contains(&sub(v, &s.a))) {
        return Err(format!("vertex {i} of L − a is outside T(K)"));
    }
    // q ∈ f(L − a) iff q/f + a ∈ L
    if let Some(i) = image_pts.iter().position(|q| {
        let back: Point = q.iter().zip(&s.a).map(|(x, a)| x / &s.factor + a).collect();
        !l.contains(&back)
    }) {
        return Err(format!("image of vertex {i} of K is outside factor · (L − a)"));
    }
    Ok((l, k))
}

fn check_transfer(s: &SandwichJson, source: &CoverCert, target: &CoverCert) -> Check {
    let (l, k) = check_sandwich(s).map_err(|e| format!("sandwich: {e}"))?;
    if rebuild(&source.target, "source target")? != k {
        return Err("source cover is not a cover of K".into());
    }
    if rebuild(&target.target, "transferred target")? != l {
        return Err("transferred cover is not a cover of L".into());
    }
    let (lambda, n, _, _) = check_cover(source).map_err(|e| format!("source cover: {e}"))?;
    let (mu, m, _, _) = check_cover(target).map_err(|e| format!("transferred cover: {e}"))?;
    if m > n {
        return Err("transferred cover has more homothets than the source".into());
    }
    if mu > &s.factor * &lambda {
        return Err("transferred ratio exceeds factor · λ".into());
    }
    Ok(())
}
