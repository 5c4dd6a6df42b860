//! Marginal EL screening for models given by estimating functions, including the
//! quadratic-inference-function construction for longitudinal data.

use crate::dataset::{LongitudinalDataset, Subject};
use crate::el::{solve_lambda_multi, ElConfig};
use crate::error::{Error, Result};
use crate::screening::{assign_ranks, ScreenStat, StatFlag};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

pub fn basis_identity(m: usize) -> DMatrix<f64> {
    DMatrix::identity(m, m)
}

/// 0/1 matrix with ones exactly on the first super- and sub-diagonals.
pub fn basis_ar1_adjacency(m: usize) -> Result<DMatrix<f64>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("adjacency basis needs m >= 2, got {m}")));
    }
    Ok(DMatrix::from_fn(m, m, |i, j| if i.abs_diff(j) == 1 { 1.0 } else { 0.0 }))
}

/// Known symmetric `m x m` matrices spanning the inverse working correlation.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    matrices: Vec<DMatrix<f64>>,
}

impl BasisSet {
    pub fn new(matrices: Vec<DMatrix<f64>>) -> Result<Self> {
        let Some(first) = matrices.first() else {
            return Err(Error::InvalidArgument("basis set must contain at least one matrix".into()));
        };
        let m = first.nrows();
        for (k, mk) in matrices.iter().enumerate() {
            if mk.nrows() != m || mk.ncols() != m {
                return Err(Error::DimensionMismatch(format!("basis matrix {k} is not {m}x{m}")));
            }
            if (mk - mk.transpose()).amax() > 1e-12 {
                return Err(Error::InvalidArgument(format!("basis matrix {k} is not symmetric")));
            }
        }
        Ok(BasisSet { matrices })
    }

    /// `{I}`: the working-independence construction.
    pub fn identity(m: usize) -> Self {
        BasisSet { matrices: vec![basis_identity(m)] }
    }

    /// `{I, adjacency}`: the AR(1) working-correlation construction.
    pub fn identity_ar1(m: usize) -> Result<Self> {
        Ok(BasisSet { matrices: vec![basis_identity(m), basis_ar1_adjacency(m)?] })
    }

    /// One indicator `e_t e_t'` per measurement time, giving per-time components.
    pub fn time_indicators(m: usize) -> Self {
        let matrices = (0..m)
            .map(|t| DMatrix::from_fn(m, m, |i, j| if i == t && j == t { 1.0 } else { 0.0 }))
            .collect();
        BasisSet { matrices }
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn m(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrices(&self) -> &[DMatrix<f64>] {
        &self.matrices
    }
}

/// Marginal estimating function `g^(j)(Z_i; 0)` of one subject block.
pub trait MarginalEstimatingFunction: Sync {
    /// Dimension `r_j` (taken constant across features).
    fn dim(&self) -> usize;
    fn evaluate(&self, subject: &Subject, feature: usize) -> Result<DVector<f64>>;
}

/// QIF block `k`: `x_j' M_k y` for identity link and unit variance, at beta = 0.
pub fn qif_marginal_g(subject: &Subject, feature: usize, bases: &BasisSet) -> Result<DVector<f64>> {
    let m = subject.y.len();
    if m != bases.m() {
        return Err(Error::DimensionMismatch(format!(
            "subject {} has {m} measurements, bases are {}x{}",
            subject.id,
            bases.m(),
            bases.m()
        )));
    }
    if feature >= subject.x.ncols() {
        return Err(Error::DimensionMismatch(format!("feature {feature} out of range")));
    }
    let xj = subject.x.column(feature);
    Ok(DVector::from_iterator(
        bases.len(),
        bases.matrices.iter().map(|mk| xj.dot(&(mk * &subject.y))),
    ))
}

#[derive(Debug, Clone)]
pub struct QifEstimatingFunction {
    pub bases: BasisSet,
}

impl MarginalEstimatingFunction for QifEstimatingFunction {
    fn dim(&self) -> usize {
        self.bases.len()
    }

    fn evaluate(&self, subject: &Subject, feature: usize) -> Result<DVector<f64>> {
        qif_marginal_g(subject, feature, &self.bases)
    }
}

/// Multivariate marginal EL ratio at zero for every feature, one estimating-function
/// row per subject. Covariates are standardized over the stacked design and the
/// response centered first.
pub fn marginal_el_stats_ee(
    data: &LongitudinalDataset,
    spec: &dyn MarginalEstimatingFunction,
    config: &ElConfig,
) -> Result<Vec<ScreenStat>> {
    config.validate()?;
    let r = spec.dim();
    let n = data.n();
    if n <= r {
        return Err(Error::DegenerateInput(format!("need more subjects ({n}) than components ({r})")));
    }
    let std = data.standardize()?;
    let mut stats = (0..std.p())
        .into_par_iter()
        .map(|j| {
            let mut g = DMatrix::zeros(n, r);
            for (i, s) in std.subjects.iter().enumerate() {
                let gi = spec.evaluate(s, j)?;
                g.set_row(i, &gi.transpose());
            }
            let tb = (0..r)
                .map(|k| crate::screening::studentized(g.column(k).as_slice()))
                .fold(0.0, f64::max);
            match solve_lambda_multi(&g, config) {
                Ok(sol) => Ok(ScreenStat::new(j, Some(sol.log_ratio), tb)),
                Err(Error::DegenerateInput(_)) => {
                    let mut s = ScreenStat::new(j, None, tb);
                    s.flag = Some(StatFlag::Degenerate);
                    Ok(s)
                }
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    assign_ranks(&mut stats);
    Ok(stats)
}
