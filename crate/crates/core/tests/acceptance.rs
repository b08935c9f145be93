//! End-to-end acceptance run: one line per criterion, non-zero exit on any
//! failure. Tolerances and time limits are pinned below.

mod common;

use std::time::{Duration, Instant};

use homcover::bounds::{homothety_bound, rogers_shephard_check};
use homcover::covering::{
    covering_number_upper, lambda_of, verify_cover, witness_lower_bound, Bracket, CertifiedCell, Cover,
    CoveringNumberConfig, LambdaConfig, WitnessSet,
};
use homcover::experiment::{
    best_sandwich, check_certificate, cross_polytope, cube, random_hull, regular_polygon, simplex, Certificate,
    CheckResult,
};
use homcover::geometry::{minkowski_sum, AffineMap, ConvexBody, Homothet, Sign};
use homcover::rational::{binomial, int, ratio, scale, Point, Rational};
use homcover::stability::{delta_for_epsilon, transfer_cover};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BRACKET_TOL: (i64, i64) = (1, 100);
const BOUND_REL_TOL: f64 = 1e-9;
const SQUARE_LIMIT: Duration = Duration::from_secs(10);
const TRIANGLE_LIMIT: Duration = Duration::from_secs(30);
const TRANSFER_LIMIT: Duration = Duration::from_secs(60);
const DEPTH: usize = 30;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn config() -> LambdaConfig {
    LambdaConfig { tol: ratio(BRACKET_TOL.0, BRACKET_TOL.1), ..LambdaConfig::default() }
}

fn with_centroid(k: &ConvexBody) -> Vec<Point> {
    let mut pts = k.vertices().to_vec();
    pts.push(k.centroid());
    pts
}

fn corner_cover(k: &ConvexBody, lambda: &Rational) -> Cover {
    let s = Rational::one() - lambda;
    let hs = k.vertices().iter().map(|v| Homothet::new(scale(&s, v), lambda.clone(), Sign::Plus).unwrap()).collect();
    Cover::new(k.clone(), hs).unwrap()
}

fn cells_of(k: &ConvexBody, cover: &Cover) -> Result<Vec<CertifiedCell>, String> {
    verify_cover(k, cover, DEPTH)
        .map_err(|e| e.to_string())?
        .cells()
        .map(<[CertifiedCell]>::to_vec)
        .ok_or_else(|| format!("cover at {} not certified", cover.ratio()))
}

fn linf(p: &Point, q: &Point) -> Rational {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).max().unwrap()
}

/// Smallest λ at which two points fit in one translate of `λT`, `T` the unit
/// triangle: `p − q` must lie in `λ(T − T)`, the hexagon `|x|, |y|, |x + y| <= λ`.
fn triangle_pair(p: &Point, q: &Point) -> Rational {
    let (x, y) = (&p[0] - &q[0], &p[1] - &q[1]);
    [x.abs(), y.abs(), (&x + &y).abs()].into_iter().max().unwrap()
}

/// With more points than copies two share a copy, so the least pair
/// requirement above `lambda` refutes it.
fn pigeonhole_refutes(pts: &[Point], lambda: &Rational, pair: impl Fn(&Point, &Point) -> Rational) -> bool {
    let mut least: Option<Rational> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let need = pair(&pts[i], &pts[j]);
            least = Some(least.map_or(need.clone(), |l| l.min(need)));
        }
    }
    least.is_some_and(|l| l > *lambda)
}

fn replay(cert: &Certificate, what: &str) -> Result<(), String> {
    match check_certificate(cert).map_err(|e| e.to_string())? {
        CheckResult::Valid => Ok(()),
        CheckResult::Invalid(r) => Err(format!("{what}: {r}")),
    }
}

fn bracket_summary(b: &Bracket) -> String {
    format!("({}, {}]", b.lo, b.hi)
}

struct Emitted(Vec<(String, Certificate)>);

impl Emitted {
    fn push(&mut self, what: impl Into<String>, cert: Certificate) {
        self.0.push((what.into(), cert));
    }
}

fn square_bracket(out: &mut Emitted) -> Outcome {
    let start = Instant::now();
    let sq = cube(2).unwrap();
    let b = lambda_of(&sq, 4, &config()).map_err(|e| e.to_string())?;
    ensure(b.contains(&ratio(1, 2)), || format!("bracket {} misses 1/2", bracket_summary(&b)))?;
    ensure(b.lo_proof.is_some(), || "no lower proof".into())?;

    let pts = with_centroid(&sq);
    let ws = WitnessSet::new(&sq, pts.clone()).unwrap();
    let at = ratio(49, 100);
    let ours = witness_lower_bound(&sq, &ws, 4, &at, Sign::Plus, 1_000_000).map_err(|e| e.to_string())?;
    // K − K = [−1, 1]², so a pair shares a copy iff its sup distance is at most λ
    ensure(ours.is_infeasible() && pigeonhole_refutes(&pts, &at, linf), || "witness set not refuted at 49/100".into())?;
    let planes = common::halfplanes2(sq.vertices());
    ensure(!common::exhaustive_fits(&planes, &pts, 4, &at, 1), || "oracle disagrees at 49/100".into())?;

    let quadrants = corner_cover(&sq, &ratio(1, 2));
    let cells = cells_of(&sq, &quadrants)?;
    out.push("square quadrants", Certificate::from_cover(&sq, &quadrants, &cells));
    out.push("square bracket", Certificate::from_bracket(&sq, &b));
    let took = start.elapsed();
    ensure(took <= SQUARE_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("bracket {} in {took:.1?}", bracket_summary(&b)))
}

fn triangle_bracket(out: &mut Emitted) -> Outcome {
    let start = Instant::now();
    let t = simplex(2).unwrap();
    let b = lambda_of(&t, 3, &config()).map_err(|e| e.to_string())?;
    ensure(b.contains(&ratio(2, 3)), || format!("bracket {} misses 2/3", bracket_summary(&b)))?;

    let pts = with_centroid(&t);
    let ws = WitnessSet::new(&t, pts.clone()).unwrap();
    let at = ratio(13, 20);
    let ours = witness_lower_bound(&t, &ws, 3, &at, Sign::Plus, 1_000_000).map_err(|e| e.to_string())?;
    ensure(ours.is_infeasible() && pigeonhole_refutes(&pts, &at, triangle_pair), || "not refuted at 13/20".into())?;
    let planes = common::halfplanes2(t.vertices());
    ensure(!common::exhaustive_fits(&planes, &pts, 3, &at, 1), || "oracle disagrees at 13/20".into())?;

    let above = ratio(2, 3) + ratio(1, 100);
    let corners = corner_cover(&t, &above);
    let cells = cells_of(&t, &corners)?;
    out.push("triangle corners", Certificate::from_cover(&t, &corners, &cells));
    out.push("triangle bracket", Certificate::from_bracket(&t, &b));
    let took = start.elapsed();
    ensure(took <= TRIANGLE_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("bracket {} in {took:.1?}", bracket_summary(&b)))
}

fn three_squares() -> Outcome {
    let sq = cube(2).unwrap();
    let at = ratio(99, 100);
    let ws = WitnessSet::new(&sq, sq.vertices().to_vec()).unwrap();
    let ours = witness_lower_bound(&sq, &ws, 3, &at, Sign::Plus, 1_000_000).map_err(|e| e.to_string())?;
    // two vertices of the square sit at sup distance 1
    ensure(ours.is_infeasible() && pigeonhole_refutes(sq.vertices(), &at, linf), || "feasible".into())?;
    let planes = common::halfplanes2(sq.vertices());
    ensure(!common::exhaustive_fits(&planes, sq.vertices(), 3, &at, 1), || "oracle disagrees".into())?;
    Ok("4 vertices infeasible for 3 copies at 99/100".into())
}

fn rogers_shephard() -> Outcome {
    let exact = [
        (simplex(2).unwrap(), int(6)),
        (simplex(3).unwrap(), int(20)),
        (cube(2).unwrap(), int(4)),
        (cube(3).unwrap(), int(8)),
        (cross_polytope(2).unwrap(), int(4)),
        (cross_polytope(3).unwrap(), int(8)),
    ];
    for (k, want) in &exact {
        let got = rogers_shephard_check(k).ratio;
        ensure(got == *want, || format!("ratio {got} where {want} was expected"))?;
    }
    let mut checked = 0;
    for d in [2usize, 3] {
        let cap = Rational::from_integer(binomial(2 * d as u64, d as u64));
        for seed in 0..10 {
            let k = random_hull(d, 9, seed).unwrap();
            let r = rogers_shephard_check(&k).ratio;
            ensure(r <= cap, || format!("random_hull({d}, 9, seed={seed}) ratio {r} above {cap}"))?;
            checked += 1;
        }
    }
    Ok(format!("6 exact ratios, {checked} random bodies within binom(2d, d)"))
}

fn sum_volume() -> Outcome {
    let mut count = 0;
    for d in [2usize, 3] {
        for seed in 0..100 {
            let k = random_hull(d, 4 + (seed as usize % 6), seed).unwrap();
            let ratio = minkowski_sum(&k, &k).unwrap().volume() / k.volume();
            let want = Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(2), d));
            ensure(ratio == want, || format!("d = {d}, seed {seed}: vol(K + K)/vol(K) = {ratio}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} bodies give exactly 2^d"))
}

fn dominance() -> Outcome {
    let theta2 = 2.0 * 2f64.ln() + 2f64.ln().ln() + 10.0;
    let spot = homothety_bound(2, &ratio(1, 2), Sign::Plus).map_err(|e| e.to_string())?;
    let expected = 24.0 * theta2;
    ensure(((spot - expected) / expected).abs() <= BOUND_REL_TOL, || format!("spot value {spot}, expected {expected}"))?;
    ensure((spot - 264.5).abs() < 0.05, || format!("spot value {spot} not near 264.5"))?;

    let corpus = [
        ("cube(2)", cube(2).unwrap()),
        ("simplex(2)", simplex(2).unwrap()),
        ("cross_polytope(2)", cross_polytope(2).unwrap()),
        ("regular_polygon(5)", regular_polygon(5).unwrap()),
        ("random_hull(2, 8, 2)", random_hull(2, 8, 2).unwrap()),
        ("cube(3)", cube(3).unwrap()),
    ];
    let half = ratio(1, 2);
    let cfg = CoveringNumberConfig::default();
    let mut square_plus = 0;
    let mut rows = Vec::new();
    for (name, k) in &corpus {
        for sign in [Sign::Plus, Sign::Minus] {
            let found = covering_number_upper(k, &half, sign, &cfg).map_err(|e| format!("{name}: {e}"))?;
            let cert = Certificate::from_cover(k, &found.cover, &found.cells);
            replay(&cert, name)?;
            let bound = homothety_bound(k.dim(), &half, sign).unwrap();
            ensure((found.n as f64) <= bound, || format!("{name} {sign:?}: {} above {bound}", found.n))?;
            if *name == "cube(2)" && sign == Sign::Plus {
                square_plus = found.n;
            }
            rows.push(found.n.to_string());
        }
    }
    ensure(square_plus == 4, || format!("N(square, square/2) = {square_plus}"))?;
    Ok(format!("spot {spot:.4}, counts {}", rows.join(" ")))
}

fn near_square(rng: &mut ChaCha8Rng) -> ConvexBody {
    let pts: Vec<Point> = [(0, 0), (1, 0), (1, 1), (0, 1)]
        .iter()
        .map(|&(x, y)| vec![int(x) + ratio(rng.gen_range(-5..=5), 1000), int(y) + ratio(rng.gen_range(-5..=5), 1000)])
        .collect();
    ConvexBody::from_points(&pts).unwrap()
}

fn transfer_pipeline(out: &mut Emitted) -> Outcome {
    let start = Instant::now();
    let k = cube(2).unwrap();
    let lambda = ratio(51, 100);
    let epsilon = ratio(1, 10);
    let budget = delta_for_epsilon(&lambda, &epsilon).map_err(|e| e.to_string())?;
    ensure(budget.delta == ratio(5, 102), || format!("delta {}", budget.delta))?;
    let target = budget.transferred_ratio();
    ensure(target == ratio(107, 200), || format!("transferred ratio {target}"))?;
    ensure(target < &lambda + &epsilon / int(2), || "(1 + δ)λ not below λ + ε/2".into())?;

    let cover = corner_cover(&k, &lambda);
    let cells = cells_of(&k, &cover)?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..20 {
        let l = near_square(&mut rng);
        let s = best_sandwich(&l, &k, 200).map_err(|e| format!("body {i}: {e}"))?;
        ensure(s.factor <= budget.max_factor(), || format!("body {i}: factor {}", s.factor))?;
        let relaxed = s.with_factor(budget.max_factor()).map_err(|e| e.to_string())?;
        let t = transfer_cover(&cover, &relaxed, DEPTH).map_err(|e| format!("body {i}: {e}"))?;
        ensure(t.result.is_covered(), || format!("body {i}: transferred cover not certified"))?;
        ensure(*t.cover.ratio() == target, || format!("body {i}: ratio {}", t.cover.ratio()))?;
        let cert = Certificate::from_transfer(&cover, &cells, &relaxed, &t).unwrap();
        out.push(format!("transfer {i}"), cert);
        out.push(format!("sandwich {i}"), Certificate::Sandwich(relaxed.to_json()));
    }
    let took = start.elapsed();
    ensure(took <= TRANSFER_LIMIT, || format!("took {took:?}"))?;
    Ok(format!("20 bodies certified at 107/200 in {took:.1?}"))
}

fn affine_invariance(out: &mut Emitted) -> Outcome {
    let t = simplex(2).unwrap();
    let band = ratio(BRACKET_TOL.0, BRACKET_TOL.1);
    let (lo_edge, hi_edge) = (ratio(2, 3) - &band, ratio(2, 3) + &band);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut done = 0;
    while done < 10 {
        let m: Vec<Vec<Rational>> = (0..2).map(|_| (0..2).map(|_| int(rng.gen_range(-3..=3))).collect()).collect();
        if (&m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]).is_zero() {
            continue;
        }
        let shift = (0..2).map(|_| ratio(rng.gen_range(-10..=10), 3)).collect();
        let map = AffineMap::new(m, shift).map_err(|e| e.to_string())?;
        let image = map.apply(&t).map_err(|e| e.to_string())?;
        let b = lambda_of(&image, 3, &config()).map_err(|e| e.to_string())?;
        ensure(b.lo < hi_edge && b.hi >= lo_edge, || format!("map {done}: bracket {}", bracket_summary(&b)))?;
        out.push(format!("affine bracket {done}"), Certificate::from_bracket(&image, &b));
        done += 1;
    }
    Ok("10 images overlap [2/3 − 1/100, 2/3 + 1/100]".into())
}

fn expect_invalid(cert: &Certificate, what: &str, needle: &str) -> Result<String, String> {
    match check_certificate(cert).map_err(|e| e.to_string())? {
        CheckResult::Valid => Err(format!("{what}: perturbed certificate accepted")),
        CheckResult::Invalid(r) if r.contains(needle) => Ok(r),
        CheckResult::Invalid(r) => Err(format!("{what}: reason {r:?} does not mention {needle:?}")),
    }
}

fn perturbations(emitted: &Emitted) -> Result<usize, String> {
    let find = |what: &str| emitted.0.iter().find(|(w, _)| w == what).map(|(_, c)| c.clone()).unwrap();
    let mut count = 0;

    // move one quadrant by 1/10
    let Certificate::Cover(mut c) = find("square quadrants") else { unreachable!() };
    c.cover.homothets[0].translation[0] += ratio(1, 10);
    expect_invalid(&Certificate::Cover(c.clone()), "shifted homothet", "homothet 0")?;
    count += 1;

    // drop a cell
    let Certificate::Cover(mut c) = find("square quadrants") else { unreachable!() };
    c.cells.pop();
    expect_invalid(&Certificate::Cover(c), "missing cell", "volume")?;
    count += 1;

    // claim the lower proof at a ratio where the witnesses fit
    let Certificate::Bracket { body, n, sign, hi, lower, upper, .. } = find("triangle bracket") else { unreachable!() };
    let mut lower = lower.ok_or("triangle bracket has no lower proof")?;
    let moved = &hi - ratio(1, 1000);
    lower.lambda = moved.clone();
    let raised = Certificate::Bracket { body, n, sign, lo: moved, hi, lower: Some(lower), upper };
    expect_invalid(&raised, "raised lower proof", "lower proof")?;
    count += 1;

    // squeeze a sandwich below its true factor
    let Certificate::Sandwich(mut s) = find("sandwich 0") else { unreachable!() };
    s.factor = Rational::one();
    expect_invalid(&Certificate::Sandwich(s), "squeezed sandwich", "outside")?;
    count += 1;

    // move a transferred homothet
    let Certificate::Transfer { sandwich, source, mut target } = find("transfer 0") else { unreachable!() };
    target.cover.homothets[1].translation[1] -= ratio(1, 10);
    expect_invalid(&Certificate::Transfer { sandwich, source, target }, "shifted transfer", "homothet 1")?;
    count += 1;

    // an upper proof that uses more copies than the bracket allows
    let Certificate::Bracket { body, sign, lo, hi, lower, upper, .. } = find("square bracket") else { unreachable!() };
    let fewer = Certificate::Bracket { body, n: 3, sign, lo, hi, lower, upper };
    expect_invalid(&fewer, "too many copies", "homothets")?;
    count += 1;
    Ok(count)
}

fn main() {
    let mut emitted = Emitted(Vec::new());
    let mut results: Vec<(usize, &str, Outcome)> = vec![
        (1, "square bracket", square_bracket(&mut emitted)),
        (2, "triangle bracket", triangle_bracket(&mut emitted)),
        (3, "three squares refuted", three_squares()),
        (4, "difference body ratios", rogers_shephard()),
        (5, "sum body volume", sum_volume()),
        (6, "bound dominance", dominance()),
        (7, "stability transfer", transfer_pipeline(&mut emitted)),
        (8, "affine invariance", affine_invariance(&mut emitted)),
    ];

    let replayed: Result<String, String> = (|| {
        for (what, cert) in &emitted.0 {
            replay(cert, what)?;
        }
        let broken = perturbations(&emitted)?;
        Ok(format!("{} certificates replayed, {broken} perturbations rejected", emitted.0.len()))
    })();
    results.push((9, "certificate replay", replayed));

    let mut failed = 0;
    for (id, name, outcome) in &results {
        match outcome {
            Ok(note) => println!("criterion {id} PASS  {name}: {note}"),
            Err(why) => {
                failed += 1;
                println!("criterion {id} FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", results.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", results.len());
}
