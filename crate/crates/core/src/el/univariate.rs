use super::{ElConfig, ElSolution, SolveStatus};
use crate::error::{Error, Result};
use crate::ext::ExtReal;

/// Solves the scalar dual equation `sum_i g_i / (1 + lambda g_i) = 0`.
///
/// The left side is strictly decreasing on `(-1/max g, -1/min g)`, so a Newton
/// iteration safeguarded by the bracketing interval always converges. When all
/// `g_i` share a sign (zero outside the open hull) the ratio is `+inf`.
pub fn solve_lambda_uni(g: &[f64], config: &ElConfig) -> Result<ElSolution> {
    let n = g.len();
    if n < 2 {
        return Err(Error::DegenerateInput(format!("need at least 2 values, got {n}")));
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite estimating-function value".into()));
    }
    let (min, max) = g
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if min == max {
        return Err(Error::DegenerateInput("all estimating-function values are identical".into()));
    }
    if min >= 0.0 {
        return Ok(ElSolution::boundary(vec![f64::INFINITY], 0));
    }
    if max <= 0.0 {
        return Ok(ElSolution::boundary(vec![f64::NEG_INFINITY], 0));
    }

    let nf = n as f64;
    let scale = max.max(-min);
    let mut lo = -1.0 / max;
    let mut hi = -1.0 / min;

    let (s1, s2) = g.iter().fold((0.0, 0.0), |(a, b), &v| (a + v, b + v * v));
    let mut lambda = s1 / s2;
    if !(lambda > lo && lambda < hi) {
        lambda = 0.0;
    }

    let mut status = SolveStatus::MaxIterations;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < config.max_iterations {
        let (f, fp) = g.iter().fold((0.0, 0.0), |(f, fp), &v| {
            let z = v / (1.0 + lambda * v);
            (f + z, fp - z * z)
        });
        residual = (f / nf).abs() / scale;
        if residual <= config.dual_tolerance {
            status = SolveStatus::Converged;
            break;
        }
        iterations += 1;
        if f > 0.0 {
            lo = lambda;
        } else {
            hi = lambda;
        }
        let newton = lambda - f / fp;
        let next = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if next == lambda {
            break;
        }
        lambda = next;
    }

    let log_ratio = 2.0 * g.iter().map(|&v| (lambda * v).ln_1p()).sum::<f64>();
    Ok(ElSolution {
        lambda: vec![lambda],
        log_ratio: ExtReal::Finite(log_ratio.max(0.0)),
        status,
        iterations,
        dual_residual: residual,
    })
}

/// EL ratio for the mean of `values` at the hypothesized value `mu`.
pub fn el_ratio_at_mean(values: &[f64], mu: f64, config: &ElConfig) -> Result<ElSolution> {
    let shifted: Vec<f64> = values.iter().map(|v| v - mu).collect();
    solve_lambda_uni(&shifted, config)
}
