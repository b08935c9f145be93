//! Test oracles written without the library's geometry code.
#![allow(dead_code)]

use homcover::rational::{int, Rational};
use num_traits::{Signed, Zero};

pub type P = Vec<Rational>;

fn cross(o: &P, a: &P, b: &P) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Counter-clockwise hull by the monotone chain, collinear points dropped.
pub fn hull2(points: &[P]) -> Vec<P> {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<P> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= Rational::zero() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<P> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= Rational::zero() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area of the hull.
pub fn area2(points: &[P]) -> Rational {
    let h = hull2(points);
    let mut s = Rational::zero();
    for i in 0..h.len() {
        let j = (i + 1) % h.len();
        s += &h[i][0] * &h[j][1] - &h[j][0] * &h[i][1];
    }
    s.abs() / int(2)
}

/// Inward halfplanes `n·x >= o` of the hull's edges.
pub fn halfplanes2(points: &[P]) -> Vec<(P, Rational)> {
    let h = hull2(points);
    (0..h.len())
        .map(|i| {
            let a = &h[i];
            let b = &h[(i + 1) % h.len()];
            // counter-clockwise: interior on the left of a→b
            let n = vec![-(&b[1] - &a[1]), &b[0] - &a[0]];
            let o = &n[0] * &a[0] + &n[1] * &a[1];
            (n, o)
        })
        .collect()
}

fn sub3(a: &P, b: &P) -> P {
    (0..3).map(|i| &a[i] - &b[i]).collect()
}

fn cross3(a: &P, b: &P) -> P {
    vec![
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot3(a: &P, b: &P) -> Rational {
    (0..3).map(|i| &a[i] * &b[i]).sum()
}

/// Volume of the hull of points in general enough position: facet planes by
/// brute force over triples, each facet triangulated after projecting away
/// its dominant normal coordinate, pyramids from the mean point.
pub fn volume3(points: &[P]) -> Rational {
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let m = pts.len();
    let c: P = (0..3)
        .map(|k| pts.iter().map(|p| p[k].clone()).sum::<Rational>() / int(m as i64))
        .collect();
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut vol = Rational::zero();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let n = cross3(&sub3(&pts[j], &pts[i]), &sub3(&pts[k], &pts[i]));
                if n.iter().all(|x| x.is_zero()) {
                    continue;
                }
                let side: Vec<Rational> = pts.iter().map(|p| dot3(&n, &sub3(p, &pts[i]))).collect();
                let pos = side.iter().any(|s| s.is_positive());
                let neg = side.iter().any(|s| s.is_negative());
                if pos && neg {
                    continue;
                }
                let on: Vec<usize> = (0..m).filter(|&q| side[q].is_zero()).collect();
                if seen.contains(&on) {
                    continue;
                }
                seen.push(on.clone());
                let drop = (0..3).max_by(|&a, &b| n[a].abs().cmp(&n[b].abs())).unwrap();
                let keep: Vec<usize> = (0..3).filter(|&a| a != drop).collect();
                let projected: Vec<P> = on.iter().map(|&q| keep.iter().map(|&a| pts[q][a].clone()).collect()).collect();
                let ring = hull2(&projected);
                let lift = |p2: &P| -> P {
                    on.iter()
                        .map(|&q| &pts[q])
                        .find(|p| keep.iter().zip(p2).all(|(&a, v)| p[a] == *v))
                        .unwrap()
                        .clone()
                };
                let ring3: Vec<P> = ring.iter().map(lift).collect();
                for t in 1..ring3.len() - 1 {
                    let det = dot3(&sub3(&ring3[0], &c), &cross3(&sub3(&ring3[t], &c), &sub3(&ring3[t + 1], &c)));
                    vol += det.abs() / int(6);
                }
            }
        }
    }
    vol
}

/// Fourier–Motzkin feasibility of `a·x >= b` over the rationals.
pub fn fm_feasible(mut rows: Vec<(P, Rational)>, dim: usize) -> bool {
    for var in (0..dim).rev() {
        let mut keep = Vec::new();
        let mut lower = Vec::new();
        let mut upper = Vec::new();
        for (a, b) in rows {
            if a[var].is_positive() {
                lower.push((a, b));
            } else if a[var].is_negative() {
                upper.push((a, b));
            } else {
                keep.push((a, b));
            }
        }
        for (al, bl) in &lower {
            for (au, bu) in &upper {
                let sl = au[var].abs();
                let su = al[var].clone();
                let a: P = al.iter().zip(au).map(|(x, y)| x * &sl + y * &su).collect();
                keep.push((a, bl * &sl + bu * &su));
            }
        }
        rows = keep;
    }
    rows.iter().all(|(_, b)| !b.is_positive())
}

/// Whether some assignment of `witnesses` to `n` groups lets every group fit
/// in one translate of `σλK`, with `K` given by inward halfplanes.
pub fn exhaustive_fits(
    halfplanes: &[(P, Rational)],
    witnesses: &[P],
    n: usize,
    lambda: &Rational,
    sigma: i64,
) -> bool {
    let dim = witnesses[0].len();
    let s = int(sigma);
    let group_fits = |group: &[&P]| -> bool {
        let mut rows = Vec::new();
        for w in group {
            for (nrm, o) in halfplanes {
                // σ n·(w − t) >= λ o
                let a: P = nrm.iter().map(|x| -(x * &s)).collect();
                let wn: Rational = nrm.iter().zip(w.iter()).map(|(x, y)| x * y).sum();
                rows.push((a, lambda * o - &s * wn));
            }
        }
        fm_feasible(rows, dim)
    };
    let m = witnesses.len();
    let total = n.pow(m as u32);
    'assign: for code in 0..total {
        let mut c = code;
        let mut groups: Vec<Vec<&P>> = vec![Vec::new(); n];
        for w in witnesses {
            groups[c % n].push(w);
            c /= n;
        }
        for g in &groups {
            if !g.is_empty() && !group_fits(g) {
                continue 'assign;
            }
        }
        return true;
    }
    false
}
