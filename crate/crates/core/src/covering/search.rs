//! Constructive search for covers by `n` translates of `σλK`.
//!
//! Candidate translations come from the corner family, a uniform grid over
//! the translations whose homothet meets `K`, and witness-centred copies. A
//! set cover over a finite mesh of points of `K` picks at most `n` candidates;
//! exact verification either certifies the pick or returns an uncovered
//! point, which joins the mesh before the next round. A pick that only
//! touches along a seam, so that subdivision cannot settle it, switches the
//! level to counting interior points only.

use num_traits::{Signed, ToPrimitive, One, Zero};
use serde::{Deserialize, Serialize};

use crate::covering::{verify_cover, CertifiedCell, Cover, CoverageResult};
use crate::error::{Error, Result};
use crate::geometry::{find_point, ConvexBody, Halfspace, Homothet, Sign};
use crate::rational::{add, centroid, int, neg, ratio, scale, sub, Point, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Total verify-refute-augment rounds across all grid levels.
    pub budget: usize,
    /// Subdivision depth handed to `verify_cover`.
    pub max_depth: usize,
    /// Grid resolutions tried in order; 0 means corner placements only.
    pub grid_levels: Vec<usize>,
    /// Upper limit on grid candidates per level; larger levels are skipped.
    pub max_grid_candidates: usize,
    /// Exact set cover is used when greedy fails and these limits hold.
    pub exact_max_n: usize,
    pub exact_max_mesh: usize,
    pub exact_node_limit: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            budget: 400,
            max_depth: 30,
            grid_levels: vec![0, 4, 8, 16],
            max_grid_candidates: 6000,
            exact_max_n: 6,
            exact_max_mesh: 64,
            exact_node_limit: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Found { cover: Cover, cells: Vec<CertifiedCell> },
    /// The candidate family was exhausted; not a proof of impossibility.
    NotFound,
}

impl SearchOutcome {
    pub fn cover(&self) -> Option<&Cover> {
        match self {
            SearchOutcome::Found { cover, .. } => Some(cover),
            SearchOutcome::NotFound => None,
        }
    }
}

/// Translations of the corner family: homothets sharing a vertex with `K`.
pub fn corner_translations(body: &ConvexBody, lambda: &Rational, sign: Sign) -> Vec<Point> {
    let mut out = Vec::new();
    match sign {
        Sign::Plus => {
            let s = Rational::one() - lambda;
            for v in body.vertices() {
                out.push(scale(&s, v));
            }
        }
        Sign::Minus => {
            // homothet vertex −λu + t placed on vertex v of K
            for v in body.vertices() {
                for u in body.vertices() {
                    out.push(add(v, &scale(lambda, u)));
                }
            }
        }
    }
    dedup_stable(out)
}

/// Uniform grid with `resolution + 1` points per axis over the box of
/// translations whose homothet can meet `K`.
pub fn grid_translations(body: &ConvexBody, lambda: &Rational, sign: Sign, resolution: usize) -> Vec<Point> {
    if resolution == 0 {
        return Vec::new();
    }
    let (lo, hi) = body.bounding_box();
    let (glo, ghi): (Point, Point) = match sign {
        Sign::Plus => (sub(&lo, &scale(lambda, &hi)), sub(&hi, &scale(lambda, &lo))),
        Sign::Minus => (add(&lo, &scale(lambda, &lo)), add(&hi, &scale(lambda, &hi))),
    };
    let r = int(resolution as i64);
    let axes: Vec<Vec<Rational>> = (0..body.dim())
        .map(|k| {
            let step = (&ghi[k] - &glo[k]) / &r;
            (0..=resolution).map(|i| &glo[k] + &step * int(i as i64)).collect()
        })
        .collect();
    product(&axes)
}

/// A cover with overlap everywhere: each homothet contains an axis-parallel
/// cube around the image of the centroid, and the cubes tile the bounding
/// box of `K` with strictly overlapping neighbours. Homothets whose cube
/// misses `K` are dropped. Large, but always settled by `verify_cover`.
pub fn lattice_cover(body: &ConvexBody, lambda: &Rational, sign: Sign) -> Result<Cover> {
    if *lambda <= Rational::zero() || *lambda > Rational::one() {
        return Err(Error::DomainError(format!("lambda {lambda} outside (0, 1]")));
    }
    let d = body.dim();
    let c = body.centroid();
    // half side of the largest cube around c inside K
    let half = body
        .facets()
        .iter()
        .map(|h| h.eval(&c) / h.normal.iter().map(|x| x.abs()).sum::<Rational>())
        .min()
        .expect("a body has facets");
    let side = int(2) * lambda * &half;
    let (lo, hi) = body.bounding_box();
    let axes: Vec<Vec<Rational>> = (0..d)
        .map(|k| {
            let width = &hi[k] - &lo[k];
            let m = (&width / &side).floor() + Rational::one();
            let step = &width / &m;
            let count = m.to_integer().to_usize().expect("small lattice");
            (0..count).map(|i| &lo[k] + &step * (int(i as i64) + ratio(1, 2))).collect()
        })
        .collect();
    let r = &side / int(2);
    let offset = scale(&(lambda * sign.as_rational()), &c);
    let mut homothets = Vec::new();
    for q in product(&axes) {
        let mut cube = body.facets().to_vec();
        for k in 0..d {
            let mut e = vec![Rational::zero(); d];
            e[k] = Rational::one();
            cube.push(Halfspace::new(e.clone(), &q[k] - &r));
            cube.push(Halfspace::new(neg(&e), -(&q[k] + &r)));
        }
        if find_point(d, &cube).is_some() {
            homothets.push(Homothet::new(sub(&q, &offset), lambda.clone(), sign)?);
        }
    }
    Cover::new(body.clone(), homothets)
}

fn product(axes: &[Vec<Rational>]) -> Vec<Point> {
    let mut out: Vec<Point> = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn dedup_stable(points: Vec<Point>) -> Vec<Point> {
    let mut seen = std::collections::HashSet::new();
    points.into_iter().filter(|p| seen.insert(p.clone())).collect()
}

struct Candidates {
    translations: Vec<Point>,
    halfspaces: Vec<Vec<Halfspace>>,
    /// covers[c][m]: candidate c contains mesh point m
    covers: Vec<Vec<bool>>,
    /// Count only points in the interior of a candidate.
    strict: bool,
}

fn hits(hs: &[Halfspace], p: &[Rational], strict: bool) -> bool {
    if strict {
        hs.iter().all(|h| h.eval(p) > Rational::zero())
    } else {
        hs.iter().all(|h| h.contains(p))
    }
}

impl Candidates {
    fn new(body: &ConvexBody, lambda: &Rational, sign: Sign, translations: Vec<Point>) -> Self {
        let halfspaces = translations
            .iter()
            .map(|t| {
                Homothet::new(t.clone(), lambda.clone(), sign)
                    .expect("ratio validated")
                    .halfspaces(body)
            })
            .collect();
        Self { covers: vec![Vec::new(); translations.len()], translations, halfspaces, strict: false }
    }

    fn push(&mut self, body: &ConvexBody, lambda: &Rational, sign: Sign, t: Point, mesh: &[Point]) {
        if self.translations.contains(&t) {
            return;
        }
        let hs = Homothet::new(t.clone(), lambda.clone(), sign)
            .expect("ratio validated")
            .halfspaces(body);
        self.covers.push(mesh.iter().map(|p| hits(&hs, p, self.strict)).collect());
        self.halfspaces.push(hs);
        self.translations.push(t);
    }

    fn extend_mesh(&mut self, points: &[Point]) {
        for (c, hs) in self.halfspaces.iter().enumerate() {
            let have = self.covers[c].len();
            for p in &points[have..] {
                self.covers[c].push(hits(hs, p, self.strict));
            }
        }
    }

    /// Switches to interior coverage so that the next picks overlap with slack.
    fn make_strict(&mut self, mesh: &[Point]) {
        self.strict = true;
        for c in &mut self.covers {
            c.clear();
        }
        self.extend_mesh(mesh);
    }
}

/// Largest-uncovered-count-first greedy; ties go to the lower index.
fn greedy_cover(covers: &[Vec<bool>], mesh_len: usize, n: usize) -> Option<Vec<usize>> {
    let mut uncovered = vec![true; mesh_len];
    let mut left = mesh_len;
    let mut picked = Vec::new();
    while left > 0 && picked.len() < n {
        let (best, gain) = covers
            .iter()
            .enumerate()
            .map(|(c, cov)| (c, cov.iter().zip(&uncovered).filter(|(a, b)| **a && **b).count()))
            .fold((usize::MAX, 0), |acc, (c, g)| if g > acc.1 { (c, g) } else { acc });
        if gain == 0 {
            return None;
        }
        for (u, &cv) in uncovered.iter_mut().zip(&covers[best]) {
            if cv && *u {
                *u = false;
                left -= 1;
            }
        }
        picked.push(best);
    }
    (left == 0).then_some(picked)
}

/// Exact set cover with at most `n` sets by branching on the first uncovered
/// point. Dominated candidates are dropped first.
fn exact_cover(covers: &[Vec<bool>], mesh_len: usize, n: usize, node_limit: usize) -> Option<Vec<usize>> {
    let mut kept: Vec<usize> = Vec::new();
    'outer: for c in 0..covers.len() {
        if !covers[c].iter().any(|&b| b) {
            continue;
        }
        for &k in &kept {
            if covers[c].iter().zip(&covers[k]).all(|(a, b)| !*a || *b) {
                continue 'outer;
            }
        }
        kept.retain(|&k| !covers[k].iter().zip(&covers[c]).all(|(a, b)| !*a || *b));
        kept.push(c);
    }
    kept.sort_unstable();

    fn go(
        covers: &[Vec<bool>],
        kept: &[usize],
        count: &mut [usize],
        n: usize,
        picked: &mut Vec<usize>,
        nodes: &mut usize,
        limit: usize,
    ) -> bool {
        *nodes += 1;
        if *nodes > limit {
            return false;
        }
        let Some(first) = count.iter().position(|&c| c == 0) else {
            return true;
        };
        if picked.len() == n {
            return false;
        }
        let mut options: Vec<(usize, usize)> = kept
            .iter()
            .filter(|&&c| covers[c][first])
            .map(|&c| (c, covers[c].iter().zip(count.iter()).filter(|(a, k)| **a && **k == 0).count()))
            .collect();
        options.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (c, _) in options {
            for (k, &cv) in count.iter_mut().zip(&covers[c]) {
                if cv {
                    *k += 1;
                }
            }
            picked.push(c);
            if go(covers, kept, count, n, picked, nodes, limit) {
                return true;
            }
            picked.pop();
            for (k, &cv) in count.iter_mut().zip(&covers[c]) {
                if cv {
                    *k -= 1;
                }
            }
        }
        false
    }

    let mut count = vec![0usize; mesh_len];
    let mut picked = Vec::new();
    let mut nodes = 0;
    go(covers, &kept, &mut count, n, &mut picked, &mut nodes, node_limit).then_some(picked)
}

pub(crate) fn initial_mesh(body: &ConvexBody) -> Vec<Point> {
    let mut mesh = body.vertices().to_vec();
    mesh.push(body.centroid());
    mesh.extend(body.facet_centroids());
    dedup_stable(mesh)
}

/// Searches for a cover of `body` by `n` translates of `sign · lambda · body`.
///
/// `Ok(NotFound)` means every grid level ran out of candidate sets that cover
/// the current mesh; `Err(BudgetExceeded)` means the round budget ran out first.
pub fn search_cover(
    body: &ConvexBody,
    n: usize,
    lambda: &Rational,
    sign: Sign,
    config: &SearchConfig,
) -> Result<SearchOutcome> {
    if n == 0 {
        return Err(Error::DomainError("n must be positive".into()));
    }
    if *lambda <= Rational::zero() || *lambda >= Rational::one() {
        return Err(Error::DomainError(format!("lambda {lambda} outside (0, 1)")));
    }
    let corners = corner_translations(body, lambda, sign);
    let center_offset = scale(&(lambda * sign.as_rational()), &body.centroid());
    let mut mesh = initial_mesh(body);
    let mut witness_translations: Vec<Point> = Vec::new();
    let mut rounds = 0usize;

    for &level in &config.grid_levels {
        let grid_size = (level + 1).checked_pow(body.dim() as u32).unwrap_or(usize::MAX);
        if level > 0 && grid_size > config.max_grid_candidates {
            continue;
        }
        let mut translations = corners.clone();
        translations.extend(grid_translations(body, lambda, sign, level));
        translations.extend(witness_translations.iter().cloned());
        let mut cands = Candidates::new(body, lambda, sign, dedup_stable(translations));
        cands.extend_mesh(&mesh);

        loop {
            let picked = greedy_cover(&cands.covers, mesh.len(), n).or_else(|| {
                (n <= config.exact_max_n && mesh.len() <= config.exact_max_mesh)
                    .then(|| exact_cover(&cands.covers, mesh.len(), n, config.exact_node_limit))
                    .flatten()
            });
            let Some(mut picked) = picked else {
                break;
            };
            rounds += 1;
            if rounds > config.budget {
                return Err(Error::BudgetExceeded(format!(
                    "search_cover used {} rounds without a certified cover",
                    config.budget
                )));
            }
            picked.sort_unstable();
            let homothets = picked
                .iter()
                .map(|&c| Homothet::new(cands.translations[c].clone(), lambda.clone(), sign))
                .collect::<Result<Vec<_>>>()?;
            let cover = Cover::new(body.clone(), homothets)?;
            match verify_cover(body, &cover, config.max_depth)? {
                CoverageResult::Covered { cells } => return Ok(SearchOutcome::Found { cover, cells }),
                CoverageResult::Uncovered { witness } => {
                    let t = sub(&witness, &center_offset);
                    mesh.push(witness);
                    cands.extend_mesh(&mesh);
                    cands.push(body, lambda, sign, t.clone(), &mesh);
                    witness_translations.push(t);
                }
                // a tight seam: retry the level asking for overlap
                CoverageResult::Unknown { simplex } if !cands.strict => {
                    let c = centroid(&simplex);
                    let t = sub(&c, &center_offset);
                    mesh.push(c);
                    cands.make_strict(&mesh);
                    cands.push(body, lambda, sign, t.clone(), &mesh);
                    witness_translations.push(t);
                }
                CoverageResult::Unknown { .. } => break,
            }
        }
    }
    Ok(SearchOutcome::NotFound)
}
