use super::{ElConfig, ElSolution, SolveStatus};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use nalgebra::{DMatrix, DVector};

const MAX_HALVINGS: usize = 50;
const MAX_CONDITION: f64 = 1e12;
/// Objective gain per iteration that still counts as divergence when the
/// iteration budget runs out.
const DIVERGENCE_GAIN: f64 = 1e-8;

/// Multivariate EL at zero mean for the rows of `g` (n x r, n > r).
///
/// Maximizes the concave dual `lambda -> sum_i log(1 + lambda'g_i)` by damped
/// Newton with step halving, keeping `1 + lambda'g_i >= boundary_margin`. Divergence
/// of the dual iterates is reported as `Boundary` (`+inf` ratio).
pub fn solve_lambda_multi(g: &DMatrix<f64>, config: &ElConfig) -> Result<ElSolution> {
    let (n, r) = g.shape();
    if r == 0 || n <= r {
        return Err(Error::DegenerateInput(format!("need n > r >= 1, got n = {n}, r = {r}")));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite estimating-function value".into()));
    }
    check_second_moment(g)?;
    solve_multi_from(g, None, config)
}

/// Rejects samples whose second-moment matrix is numerically singular.
pub(crate) fn check_second_moment(g: &DMatrix<f64>) -> Result<()> {
    let s = g.transpose() * g / g.nrows() as f64;
    let eig = s.symmetric_eigenvalues();
    let max = eig.max();
    let min = eig.min();
    if !(min > 0.0) || max / min > MAX_CONDITION {
        return Err(Error::DegenerateInput(format!(
            "singular estimating-function second moment (eigenvalues {min:e} .. {max:e})"
        )));
    }
    Ok(())
}

/// Dual solve from an optional warm start; assumes the input was validated.
pub(crate) fn solve_multi_from(
    g: &DMatrix<f64>,
    warm: Option<&[f64]>,
    config: &ElConfig,
) -> Result<ElSolution> {
    let (n, r) = g.shape();
    let nf = n as f64;

    // A column of one sign puts zero strictly outside the hull.
    for k in 0..r {
        let col = g.column(k);
        if col.iter().all(|&v| v > 0.0) || col.iter().all(|&v| v < 0.0) {
            return Ok(ElSolution::boundary(vec![0.0; r], 0));
        }
    }

    let col_scale: Vec<f64> = (0..r)
        .map(|k| g.column(k).iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE))
        .collect();
    let max_row_norm = (0..n)
        .map(|i| g.row(i).norm())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let lambda_cap = 1.0 / (config.boundary_margin * max_row_norm);

    let mut lambda = DVector::<f64>::zeros(r);
    if let Some(w) = warm {
        let cand = DVector::from_column_slice(w);
        if w.len() == r && w.iter().all(|v| v.is_finite()) && feasible(g, &cand, config.boundary_margin) {
            lambda = cand;
        }
    }

    let mut denom = DVector::<f64>::zeros(n);
    fill_denominators(g, &lambda, &mut denom);
    let mut objective: f64 = denom.iter().map(|d| d.ln()).sum();
    let mut last_gain = f64::INFINITY;
    let mut residual = f64::INFINITY;
    let mut status = SolveStatus::MaxIterations;
    let mut iterations = 0;

    let mut grad = DVector::<f64>::zeros(r);
    let mut hess = DMatrix::<f64>::zeros(r, r);
    let mut scaled = DMatrix::<f64>::zeros(n, r);
    while iterations < config.max_iterations {
        for k in 0..r {
            let src = g.column(k);
            let mut dst = scaled.column_mut(k);
            for i in 0..n {
                dst[i] = src[i] / denom[i];
            }
            grad[k] = dst.sum();
        }
        scaled.tr_mul_to(&scaled, &mut hess);
        // sum_i w_i = 1 - lambda'grad/n; a diverging multiplier drives the gradient
        // to zero but leaves the weights summing to ~0.
        let mass_defect = (lambda.dot(&grad) / nf).abs();
        residual = (0..r)
            .map(|k| (grad[k] / nf).abs() / col_scale[k])
            .fold(mass_defect, f64::max);
        if residual <= config.dual_tolerance {
            status = SolveStatus::Converged;
            break;
        }
        iterations += 1;

        let step = newton_step(&hess, &grad);
        let slope = grad.dot(&step);
        let mut t = 1.0;
        let mut accepted = None;
        let mut trial = DVector::<f64>::zeros(n);
        for _ in 0..=MAX_HALVINGS {
            let cand = &lambda + &step * t;
            fill_denominators(g, &cand, &mut trial);
            if trial.iter().all(|&d| d >= config.boundary_margin) {
                let obj: f64 = trial.iter().map(|d| d.ln()).sum();
                if obj >= objective + 1e-4 * t * slope
                    || (obj >= objective - 1e-13 * objective.abs().max(1.0) && t < 1e-3)
                {
                    accepted = Some((cand, obj));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((cand, obj)) = accepted else {
            break;
        };
        last_gain = obj - objective;
        lambda = cand;
        objective = obj;
        std::mem::swap(&mut denom, &mut trial);
        if lambda.norm() > lambda_cap {
            return Ok(ElSolution::boundary(lambda.iter().copied().collect(), iterations));
        }
    }

    if status == SolveStatus::MaxIterations && iterations >= config.max_iterations && last_gain > DIVERGENCE_GAIN {
        return Ok(ElSolution::boundary(lambda.iter().copied().collect(), iterations));
    }

    Ok(ElSolution {
        lambda: lambda.iter().copied().collect(),
        log_ratio: ExtReal::Finite((2.0 * objective).max(0.0)),
        status,
        iterations,
        dual_residual: residual,
    })
}

fn fill_denominators(g: &DMatrix<f64>, lambda: &DVector<f64>, out: &mut DVector<f64>) {
    out.fill(1.0);
    for k in 0..g.ncols() {
        let l = lambda[k];
        if l != 0.0 {
            for (o, v) in out.iter_mut().zip(g.column(k).iter()) {
                *o += l * v;
            }
        }
    }
}

fn feasible(g: &DMatrix<f64>, lambda: &DVector<f64>, margin: f64) -> bool {
    let mut d = DVector::zeros(g.nrows());
    fill_denominators(g, lambda, &mut d);
    d.iter().all(|&v| v >= margin)
}

/// Solves `hess * step = grad` for a PD Hessian, ridging it if Cholesky fails.
pub(crate) fn newton_step(hess: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    if let Some(ch) = hess.clone().cholesky() {
        return ch.solve(grad);
    }
    let scale = hess.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut ridge = 1e-12 * scale;
    loop {
        let mut h = hess.clone();
        for k in 0..h.nrows() {
            h[(k, k)] += ridge;
        }
        if let Some(ch) = h.cholesky() {
            return ch.solve(grad);
        }
        ridge *= 100.0;
        if ridge > 1e6 * scale {
            return grad / scale;
        }
    }
}
