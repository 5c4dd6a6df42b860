//! Profile EL ratios: one constraint fixed, nuisance parameters minimized out.
//!
//! The general form handles estimating functions that are affine in the nuisance
//! parameter, `g_i(theta) = a_i - B_i theta`. The mean-shift profile is the special
//! case `B_i = [0; I]`; regression-type conditional screening uses the rank-one
//! form `B_i = u_i v_i'`.

use super::multivariate::{check_second_moment, newton_step, solve_multi_from};
use super::{solve_lambda_uni, ElConfig, ElSolution};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use nalgebra::{DMatrix, DVector};

const MAX_HALVINGS: usize = 50;
/// Newton decrement below which the outer minimization stops.
const DECREMENT_TOL: f64 = 1e-12;

/// Per-row Jacobian `B_i` of an affine estimating function `a_i - B_i theta`.
#[derive(Debug, Clone)]
pub enum LinearJacobian {
    /// The same `r x q` matrix for every row.
    Shared(DMatrix<f64>),
    /// `B_i = u_i v_i'` with `u: n x r` and `v: n x q`.
    RankOne { u: DMatrix<f64>, v: DMatrix<f64> },
    /// One `r x q` matrix per row.
    PerRow(Vec<DMatrix<f64>>),
}

impl LinearJacobian {
    fn nuisance_dim(&self) -> usize {
        match self {
            LinearJacobian::Shared(b) => b.ncols(),
            LinearJacobian::RankOne { v, .. } => v.ncols(),
            LinearJacobian::PerRow(rows) => rows.first().map_or(0, |b| b.ncols()),
        }
    }

    fn check(&self, n: usize, r: usize) -> Result<()> {
        let ok = match self {
            LinearJacobian::Shared(b) => b.nrows() == r,
            LinearJacobian::RankOne { u, v } => u.nrows() == n && u.ncols() == r && v.nrows() == n,
            LinearJacobian::PerRow(rows) => {
                rows.len() == n && rows.iter().all(|b| b.nrows() == r && b.ncols() == rows[0].ncols())
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::DimensionMismatch("jacobian does not match estimating-function shape".into()))
        }
    }

    fn row(&self, i: usize) -> DMatrix<f64> {
        match self {
            LinearJacobian::Shared(b) => b.clone(),
            LinearJacobian::RankOne { u, v } => u.row(i).transpose() * v.row(i),
            LinearJacobian::PerRow(rows) => rows[i].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileOutcome {
    pub value: ExtReal,
    /// Minimizing nuisance parameter (the starting point when `value` is infinite).
    pub theta: Vec<f64>,
    pub iterations: usize,
}

fn residuals(base: &DMatrix<f64>, jac: &LinearJacobian, theta: &DVector<f64>) -> DMatrix<f64> {
    let mut z = base.clone();
    match jac {
        LinearJacobian::Shared(b) => {
            let shift = b * theta;
            for k in 0..z.ncols() {
                let s = shift[k];
                z.column_mut(k).add_scalar_mut(-s);
            }
        }
        LinearJacobian::RankOne { u, v } => {
            let vt = v * theta;
            for k in 0..z.ncols() {
                for i in 0..z.nrows() {
                    z[(i, k)] -= u[(i, k)] * vt[i];
                }
            }
        }
        LinearJacobian::PerRow(rows) => {
            for (i, b) in rows.iter().enumerate() {
                let shift = b * theta;
                for k in 0..z.ncols() {
                    z[(i, k)] -= shift[k];
                }
            }
        }
    }
    z
}

/// Minimizes the EL ratio of `a_i - B_i theta` over `theta`, starting at `theta0`.
///
/// The ratio is evaluated by the multivariate dual solver; the outer iteration is
/// Newton on `theta` using the implicit derivative of the multiplier, falling back
/// to a Gauss-Newton Hessian when the exact one is not positive definite.
///
/// When zero is outside the hull at `theta0`, the adjusted ratio (which adds the
/// pseudo-row `-a * mean(g(theta))` and is finite everywhere) is minimized first
/// and the exact minimization restarts from its minimizer. `+inf` is returned
/// only if that point is infeasible too.
pub fn profile_el_linear(
    base: &DMatrix<f64>,
    jacobian: &LinearJacobian,
    theta0: &[f64],
    config: &ElConfig,
) -> Result<ProfileOutcome> {
    let (n, r) = base.shape();
    jacobian.check(n, r)?;
    let q = jacobian.nuisance_dim();
    if theta0.len() != q {
        return Err(Error::DimensionMismatch(format!("theta0 has {} entries, expected {q}", theta0.len())));
    }
    if n <= r {
        return Err(Error::DegenerateInput(format!("need n > r, got n = {n}, r = {r}")));
    }

    let z0 = residuals(base, jacobian, &DVector::from_column_slice(theta0));
    if z0.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite estimating-function value".into()));
    }
    check_second_moment(&z0)?;
    if let Some(out) = minimize(base, jacobian, theta0, config)? {
        return Ok(out);
    }
    let infinite = ProfileOutcome { value: ExtReal::Infinite, theta: theta0.to_vec(), iterations: 0 };
    if q == 0 {
        return Ok(infinite);
    }
    let (abase, ajac) = adjusted(base, jacobian);
    let Some(adj) = minimize(&abase, &ajac, theta0, config)? else {
        return Ok(infinite);
    };
    Ok(minimize(base, jacobian, &adj.theta, config)?.unwrap_or(infinite))
}

/// Appends the row `-a * mean(g_i(theta))`, `a = max(1, log(n) / 2)`.
fn adjusted(base: &DMatrix<f64>, jac: &LinearJacobian) -> (DMatrix<f64>, LinearJacobian) {
    let (n, r) = base.shape();
    let a = (0.5 * (n as f64).ln()).max(1.0);
    let mut abase = base.clone().insert_row(n, 0.0);
    let mean: DVector<f64> = base.row_sum().transpose() / n as f64;
    abase.set_row(n, &(-a * mean).transpose());
    let mut rows: Vec<DMatrix<f64>> = (0..n).map(|i| jac.row(i)).collect();
    let q = jac.nuisance_dim();
    let bbar = rows.iter().fold(DMatrix::zeros(r, q), |acc, b| acc + b) / n as f64;
    rows.push(-a * bbar);
    (abase, LinearJacobian::PerRow(rows))
}

/// Newton minimization from `theta0`; `None` when the ratio at `theta0` is `+inf`.
fn minimize(
    base: &DMatrix<f64>,
    jacobian: &LinearJacobian,
    theta0: &[f64],
    config: &ElConfig,
) -> Result<Option<ProfileOutcome>> {
    let q = jacobian.nuisance_dim();
    let mut theta = DVector::from_column_slice(theta0);
    let mut z = residuals(base, jacobian, &theta);
    let mut sol = solve_multi_from(&z, None, config)?;
    if sol.log_ratio.is_infinite() {
        return Ok(None);
    }
    if q == 0 {
        return Ok(Some(ProfileOutcome { value: sol.log_ratio, theta: vec![], iterations: 0 }));
    }

    let mut value = sol.log_ratio.to_f64();
    let mut iterations = 0;
    while iterations < config.max_iterations {
        let (grad, hess) = derivatives(&z, jacobian, &sol);
        let step = newton_step(&hess, &grad);
        let decrement = grad.dot(&step);
        if !(decrement > DECREMENT_TOL) {
            break;
        }
        iterations += 1;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = &theta - &step * t;
            let zc = residuals(base, jacobian, &cand);
            let sc = solve_multi_from(&zc, Some(&sol.lambda), config)?;
            if let ExtReal::Finite(v) = sc.log_ratio {
                if v <= value - 1e-4 * t * decrement {
                    accepted = Some((cand, zc, sc, v));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, zc, sc, v)) = accepted else {
            break;
        };
        let gain = value - v;
        theta = cand;
        z = zc;
        sol = sc;
        value = v;
        if gain <= 1e-14 * value.max(1.0) {
            break;
        }
    }

    Ok(Some(ProfileOutcome {
        value: ExtReal::Finite(value.max(0.0)),
        theta: theta.iter().copied().collect(),
        iterations,
    }))
}

fn scale_rows(m: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut col in out.column_iter_mut() {
        col.component_mul_assign(w);
    }
    out
}

/// Gradient and Hessian of `theta -> 2 sum log(1 + lambda(theta)' z_i(theta))`.
fn derivatives(z: &DMatrix<f64>, jac: &LinearJacobian, sol: &ElSolution) -> (DVector<f64>, DMatrix<f64>) {
    let r = z.ncols();
    let lambda = DVector::from_column_slice(&sol.lambda);
    let inv = (z * &lambda).map(|v| 1.0 / (1.0 + v));
    let inv2 = inv.component_mul(&inv);
    let zs = scale_rows(z, &inv);
    let nv = zs.tr_mul(&zs);

    // `c` is the theta-derivative of sum z_i / d_i; `jbar` is sum B_i / d_i;
    // `rest(dl)` is the Hessian given dl = d lambda / d theta (up to sign).
    let (grad, c, jbar, rest): (DVector<f64>, DMatrix<f64>, DMatrix<f64>, Box<dyn Fn(&DMatrix<f64>) -> DMatrix<f64> + '_>) =
        match jac {
            LinearJacobian::Shared(b) => {
                let bl = b.tr_mul(&lambda);
                let s1 = inv.sum();
                let s2 = inv2.sum();
                let zbar = z.tr_mul(&inv2);
                let c = -b * s1 + &zbar * bl.transpose();
                let jbar = b * s1;
                let grad = &bl * (-2.0 * s1);
                let rest = move |dl: &DMatrix<f64>| {
                    let dd = dl.tr_mul(&zbar) * 2.0 - &bl * (2.0 * s2);
                    -b.tr_mul(dl) * (2.0 * s1) + &bl * dd.transpose()
                };
                (grad, c, jbar, Box::new(rest))
            }
            LinearJacobian::RankOne { u, v } => {
                let s = u * &lambda;
                let w = scale_rows(z, &s.component_mul(&inv2)) - scale_rows(u, &inv);
                let c = w.tr_mul(v);
                let jbar = scale_rows(u, &inv).tr_mul(v);
                let grad = v.tr_mul(&s.component_mul(&inv)) * -2.0;
                let rest = move |dl: &DMatrix<f64>| {
                    let first = scale_rows(&(u * dl), &(&inv * 2.0));
                    let dd = z * dl - scale_rows(v, &s);
                    let second = scale_rows(&dd, &(s.component_mul(&inv2) * 2.0));
                    v.tr_mul(&(second - first))
                };
                (grad, c, jbar, Box::new(rest))
            }
            LinearJacobian::PerRow(rows) => {
                let q = jac.nuisance_dim();
                let mut c = DMatrix::<f64>::zeros(r, q);
                let mut jbar = DMatrix::<f64>::zeros(r, q);
                let mut grad = DVector::<f64>::zeros(q);
                let mut bls = Vec::with_capacity(rows.len());
                for (i, b) in rows.iter().enumerate() {
                    let zi = z.row(i).transpose();
                    let bl = b.tr_mul(&lambda);
                    c -= b * inv[i];
                    c.ger(inv2[i], &zi, &bl, 1.0);
                    jbar += b * inv[i];
                    grad.axpy(-2.0 * inv[i], &bl, 1.0);
                    bls.push(bl);
                }
                let rest = move |dl: &DMatrix<f64>| {
                    let mut h = DMatrix::<f64>::zeros(q, q);
                    for (i, (b, bl)) in rows.iter().zip(&bls).enumerate() {
                        h -= b.tr_mul(dl) * (2.0 * inv[i]);
                        let dd = dl.tr_mul(&z.row(i).transpose()) - bl;
                        h.ger(2.0 * inv2[i], bl, &dd, 1.0);
                    }
                    h
                };
                (grad, c, jbar, Box::new(rest))
            }
        };

    let exact = nv.clone().cholesky().map(|ch| {
        let h = rest(&ch.solve(&c));
        (&h + h.transpose()) * 0.5
    });
    let hess = match exact {
        Some(h) if h.clone().cholesky().is_some() => h,
        _ => {
            let vinv = nv.clone().try_inverse().unwrap_or_else(|| DMatrix::identity(r, r));
            (jbar.transpose() * vinv * &jbar) * 2.0
        }
    };
    (grad, hess)
}

/// EL ratio for the mean of column `fixed_component` (0-based) fixed at
/// `fixed_value`, minimized over the means of all remaining columns.
///
/// Nuisance columns that are affinely dependent on the fixed column and earlier
/// nuisance columns carry no constraint and are dropped first. Returns `+inf` when
/// no admissible mean has the fixed coordinate inside the hull.
pub fn profile_el_ratio(
    g: &DMatrix<f64>,
    fixed_component: usize,
    fixed_value: f64,
    config: &ElConfig,
) -> Result<ExtReal> {
    let (n, r) = g.shape();
    if r < 2 || n <= r {
        return Err(Error::DegenerateInput(format!("need n > r >= 2, got n = {n}, r = {r}")));
    }
    if fixed_component >= r {
        return Err(Error::InvalidArgument(format!("fixed component {fixed_component} out of range 0..{r}")));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite estimating-function value".into()));
    }

    let fixed: Vec<f64> = g.column(fixed_component).iter().map(|v| v - fixed_value).collect();
    let nuisance = independent_nuisance(g, fixed_component);
    if nuisance.is_empty() {
        return Ok(solve_lambda_uni(&fixed, config)?.log_ratio);
    }
    let (min, max) = fixed
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if min == max {
        return Err(Error::DegenerateInput("fixed column is constant".into()));
    }
    if min >= 0.0 || max <= 0.0 {
        return Ok(ExtReal::Infinite);
    }

    let q = nuisance.len();
    let mut base = DMatrix::<f64>::zeros(n, q + 1);
    base.set_column(0, &DVector::from_column_slice(&fixed));
    for (k, &j) in nuisance.iter().enumerate() {
        base.set_column(k + 1, &g.column(j));
    }
    let mut b = DMatrix::<f64>::zeros(q + 1, q);
    for k in 0..q {
        b[(k + 1, k)] = 1.0;
    }
    let jac = LinearJacobian::Shared(b);

    let means: Vec<f64> = (1..=q).map(|k| base.column(k).mean()).collect();
    let out = profile_el_linear(&base, &jac, &means, config)?;
    if !out.value.is_infinite() {
        return Ok(out.value);
    }
    // The sample-mean start can sit outside the hull even when the fixed coordinate
    // is admissible; restart from a strictly positive weighting with zero fixed mean.
    let pos: f64 = fixed.iter().filter(|&&v| v > 0.0).sum();
    let neg: f64 = -fixed.iter().filter(|&&v| v < 0.0).sum::<f64>();
    let w: Vec<f64> = fixed
        .iter()
        .map(|&v| if v > 0.0 { 1.0 / pos } else if v < 0.0 { 1.0 / neg } else { 1.0 / (pos + neg) })
        .collect();
    let wsum: f64 = w.iter().sum();
    let start: Vec<f64> = (1..=q)
        .map(|k| base.column(k).iter().zip(&w).map(|(x, wi)| x * wi).sum::<f64>() / wsum)
        .collect();
    Ok(profile_el_linear(&base, &jac, &start, config)?.value)
}

/// Indices of nuisance columns not in the affine span of the fixed column and the
/// nuisance columns kept before them.
fn independent_nuisance(g: &DMatrix<f64>, fixed: usize) -> Vec<usize> {
    let n = g.nrows();
    let centered = |j: usize| -> DVector<f64> {
        let col = g.column(j);
        let m = col.mean();
        DVector::from_iterator(n, col.iter().map(|v| v - m))
    };
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let f = centered(fixed);
    let fnorm = f.norm();
    if fnorm > 0.0 {
        basis.push(f / fnorm);
    }
    let mut keep = Vec::new();
    for j in (0..g.ncols()).filter(|&j| j != fixed) {
        let mut v = centered(j);
        let norm0 = v.norm();
        if norm0 == 0.0 {
            continue;
        }
        for e in &basis {
            let proj = e.dot(&v);
            v -= e * proj;
        }
        let norm = v.norm();
        if norm > 1e-9 * norm0 {
            basis.push(v / norm);
            keep.push(j);
        }
    }
    keep
}
