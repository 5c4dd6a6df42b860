//! Empirical-likelihood ratios for hypothesized means of estimating-function
//! values, evaluated through the Lagrange dual.
//!
//! For a sample `g_1, ..., g_n` (scalars or r-vectors) the log EL ratio at zero is
//! `2 * sum_i log(1 + lambda' g_i)`, where `lambda` solves
//! `sum_i g_i / (1 + lambda' g_i) = 0`. When zero lies outside the convex hull of the
//! sample no probability weights satisfy the constraint and the ratio is `+inf`.

mod multivariate;
mod profile;
mod univariate;

pub use multivariate::solve_lambda_multi;
pub(crate) use multivariate::check_second_moment;
pub use profile::{profile_el_linear, profile_el_ratio, LinearJacobian, ProfileOutcome};
pub use univariate::{el_ratio_at_mean, solve_lambda_uni};

use crate::error::{Error, Result};
use crate::ext::ExtReal;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Numerical controls for the dual solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ElConfig {
    /// Bound on the scaled dual residual `max_k |mean_i g_ik/(1+lambda'g_i)| / max_i |g_ik|`.
    pub dual_tolerance: f64,
    pub max_iterations: usize,
    /// Smallest admissible value of `1 + lambda'g_i` during multivariate line searches.
    pub boundary_margin: f64,
}

impl Default for ElConfig {
    fn default() -> Self {
        ElConfig {
            dual_tolerance: 1e-10,
            max_iterations: 100,
            boundary_margin: 1e-12,
        }
    }
}

impl ElConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dual_tolerance > 0.0) || !(self.boundary_margin > 0.0) || self.max_iterations == 0 {
            return Err(Error::InvalidArgument(format!(
                "EL configuration values must be strictly positive: {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    /// Zero is outside the (open) convex hull of the sample; the ratio is `+inf`.
    Boundary,
    MaxIterations,
}

/// Result of a dual solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElSolution {
    /// Lagrange multiplier. On `Boundary` this is the last iterate (univariate: the
    /// signed infinity the multiplier diverges to).
    #[serde(with = "crate::ext::vec_f64_ext")]
    pub lambda: Vec<f64>,
    pub log_ratio: ExtReal,
    pub status: SolveStatus,
    pub iterations: usize,
    pub dual_residual: f64,
}

impl ElSolution {
    pub(crate) fn boundary(lambda: Vec<f64>, iterations: usize) -> Self {
        ElSolution {
            lambda,
            log_ratio: ExtReal::Infinite,
            status: SolveStatus::Boundary,
            iterations,
            dual_residual: f64::INFINITY,
        }
    }
}

/// Primal weights `w_i = 1 / (n (1 + lambda'g_i))` implied by a multiplier.
///
/// No renormalization is applied: a multiplier that does not solve the dual
/// equation yields weights that do not sum to one.
pub fn el_weights(g: &DMatrix<f64>, lambda: &[f64]) -> Result<Vec<f64>> {
    if g.ncols() != lambda.len() {
        return Err(Error::DimensionMismatch(format!(
            "g has {} columns but lambda has {} entries",
            g.ncols(),
            lambda.len()
        )));
    }
    let n = g.nrows() as f64;
    (0..g.nrows())
        .map(|i| {
            let d = 1.0 + (0..g.ncols()).map(|k| lambda[k] * g[(i, k)]).sum::<f64>();
            if d > 0.0 {
                Ok(1.0 / (n * d))
            } else {
                Err(Error::DomainViolation { row: i, value: d })
            }
        })
        .collect()
}
