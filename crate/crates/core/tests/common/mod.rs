//! Independent reference solvers and small helpers shared by the integration tests.
#![allow(dead_code)]

use elsis::rng::SimRng;
use std::f64::consts::PI;

/// Univariate EL by plain bisection on `sum g/(1+lambda g) = 0` over the open
/// interval `(-1/max g, -1/min g)`. `None` when zero is outside the hull.
pub fn bisection_uni(g: &[f64]) -> Option<(f64, f64)> {
    let (lo, hi) = g.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if lo >= 0.0 || hi <= 0.0 {
        return None;
    }
    let f = |l: f64| g.iter().map(|&v| v / (1.0 + l * v)).sum::<f64>();
    let (mut a, mut b) = (-1.0 / hi, -1.0 / lo);
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if f(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let l = 0.5 * (a + b);
    Some((l, 2.0 * g.iter().map(|&v| (l * v).ln_1p()).sum::<f64>()))
}

/// Whether zero lies strictly inside the convex hull of 2-D points: every angular
/// gap between consecutive points is below pi.
pub fn zero_inside_hull_2d(rows: &[[f64; 2]]) -> bool {
    let mut ang: Vec<f64> = rows.iter().filter(|r| r[0] != 0.0 || r[1] != 0.0).map(|r| r[1].atan2(r[0])).collect();
    if ang.len() < 3 {
        return false;
    }
    ang.sort_by(f64::total_cmp);
    let mut max_gap = ang[0] + 2.0 * PI - ang[ang.len() - 1];
    for w in ang.windows(2) {
        max_gap = max_gap.max(w[1] - w[0]);
    }
    max_gap < PI - 1e-9
}

fn dual2(rows: &[[f64; 2]], l: [f64; 2]) -> f64 {
    let mut s = 0.0;
    for r in rows {
        let t = 1.0 + l[0] * r[0] + l[1] * r[1];
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        s += t.ln();
    }
    2.0 * s
}

/// Bivariate EL ratio by grid search of the dual over `[-0.9, 0.9]^2` after scaling
/// the rows to unit maximum norm, refined by cyclic coordinate bisection on the
/// partial derivatives. The caller guarantees zero is inside the hull.
pub fn grid_bivariate(rows: &[[f64; 2]]) -> f64 {
    let s = rows.iter().map(|r| r[0].hypot(r[1])).fold(0.0, f64::max);
    let g: Vec<[f64; 2]> = rows.iter().map(|r| [r[0] / s, r[1] / s]).collect();
    let step = 0.01;
    let mut best = ([0.0, 0.0], dual2(&g, [0.0, 0.0]));
    let k = (0.9 / step) as i64;
    for a in -k..=k {
        for b in -k..=k {
            let l = [a as f64 * step, b as f64 * step];
            let v = dual2(&g, l);
            if v > best.1 {
                best = (l, v);
            }
        }
    }
    coordinate_ascent(&g, best.0)
}

/// Cyclic coordinate bisection on the bivariate dual from a feasible start.
pub fn coordinate_ascent(g: &[[f64; 2]], start: [f64; 2]) -> f64 {
    let mut l = start;
    for _ in 0..5000 {
        let prev = l;
        for c in 0..2 {
            let (mut lo, mut hi) = (-1e6, 1e6);
            for r in g {
                let rest = 1.0 + l[1 - c] * r[1 - c];
                if r[c] > 0.0 {
                    lo = f64::max(lo, -rest / r[c]);
                } else if r[c] < 0.0 {
                    hi = f64::min(hi, -rest / r[c]);
                }
            }
            let deriv = |x: f64| {
                let mut t = l;
                t[c] = x;
                g.iter().map(|r| r[c] / (1.0 + t[0] * r[0] + t[1] * r[1])).sum::<f64>()
            };
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if deriv(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            l[c] = 0.5 * (a + b);
        }
        if (l[0] - prev[0]).abs() + (l[1] - prev[1]).abs() < 1e-15 {
            break;
        }
    }
    dual2(g, l)
}

/// Deterministic normal draws for test fixtures.
pub fn normals(rng: &mut SimRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.normal()).collect()
}
