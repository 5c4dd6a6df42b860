//! In-memory datasets: cross-sectional (`Dataset`) and longitudinal.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Dense `n x p` design with an `n`-vector response. Binary responses are stored
/// as 0/1 reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
    pub feature_names: Vec<String>,
    pub standardized: bool,
    /// Amount subtracted from the raw response by `standardize` (0 otherwise).
    pub response_shift: f64,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>, feature_names: Vec<String>) -> Result<Self> {
        let (n, p) = x.shape();
        if n < 2 || p < 1 {
            return Err(Error::DimensionMismatch(format!("need n >= 2 and p >= 1, got {n} x {p}")));
        }
        if y.len() != n {
            return Err(Error::DimensionMismatch(format!("response has {} rows, design has {n}", y.len())));
        }
        if feature_names.len() != p {
            return Err(Error::DimensionMismatch(format!("{} names for {p} features", feature_names.len())));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("dataset contains non-finite entries".into()));
        }
        Ok(Dataset { x, y, feature_names, standardized: false, response_shift: 0.0 })
    }

    /// Dataset with default names `X1..Xp`.
    pub fn unnamed(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        let names = default_names(x.ncols());
        Self::new(x, y, names)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    /// The response before centering.
    pub fn raw_response(&self) -> DVector<f64> {
        self.y.add_scalar(self.response_shift)
    }

    /// Centers and scales each feature by its sample standard deviation (divisor
    /// `n - 1`) and centers the response.
    pub fn standardize(&self) -> Result<Dataset> {
        let n = self.n();
        let mut x = self.x.clone();
        for j in 0..self.p() {
            let mut col = x.column_mut(j);
            let mean = col.mean();
            col.add_scalar_mut(-mean);
            let sd = (col.norm_squared() / (n - 1) as f64).sqrt();
            if !(sd > 0.0) || sd <= 1e-12 * mean.abs() {
                return Err(Error::ConstantColumn(j));
            }
            col /= sd;
        }
        let ymean = self.y.mean();
        let y = self.y.add_scalar(-ymean);
        Ok(Dataset {
            x,
            y,
            feature_names: self.feature_names.clone(),
            standardized: true,
            response_shift: self.response_shift + ymean,
        })
    }

    /// Keeps the listed feature columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Dataset {
        Dataset {
            x: self.x.select_columns(cols),
            y: self.y.clone(),
            feature_names: cols.iter().map(|&j| self.feature_names[j].clone()).collect(),
            standardized: self.standardized,
            response_shift: self.response_shift,
        }
    }

    pub(crate) fn require_standardized(&self) -> Result<()> {
        if self.standardized {
            Ok(())
        } else {
            Err(Error::InvalidArgument("dataset must be standardized first".into()))
        }
    }
}

pub fn default_names(p: usize) -> Vec<String> {
    (1..=p).map(|j| format!("X{j}")).collect()
}

/// Repeated measurements of one subject: `m_i x p` covariates and `m_i` responses.
#[derive(Debug, Clone, PartialEq)]
pub struct Subject {
    pub id: String,
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LongitudinalDataset {
    pub subjects: Vec<Subject>,
    pub feature_names: Vec<String>,
}

impl LongitudinalDataset {
    pub fn new(subjects: Vec<Subject>, feature_names: Vec<String>) -> Result<Self> {
        let p = feature_names.len();
        if subjects.is_empty() || p == 0 {
            return Err(Error::DimensionMismatch("need at least one subject and one feature".into()));
        }
        for s in &subjects {
            if s.x.nrows() == 0 || s.x.nrows() != s.y.len() || s.x.ncols() != p {
                return Err(Error::DimensionMismatch(format!(
                    "subject {} has a {}x{} design with {} responses (p = {p})",
                    s.id,
                    s.x.nrows(),
                    s.x.ncols(),
                    s.y.len()
                )));
            }
            if s.x.iter().chain(s.y.iter()).any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("subject {} has non-finite entries", s.id)));
            }
        }
        Ok(LongitudinalDataset { subjects, feature_names })
    }

    pub fn n(&self) -> usize {
        self.subjects.len()
    }

    pub fn p(&self) -> usize {
        self.feature_names.len()
    }

    /// Common number of measurements per subject, if constant.
    pub fn common_m(&self) -> Option<usize> {
        let m = self.subjects[0].y.len();
        self.subjects.iter().all(|s| s.y.len() == m).then_some(m)
    }

    /// Stacks all measurements into one cross-sectional dataset (subject order,
    /// then time order).
    pub fn flatten(&self) -> Result<Dataset> {
        let total: usize = self.subjects.iter().map(|s| s.y.len()).sum();
        let p = self.p();
        let mut x = DMatrix::zeros(total, p);
        let mut y = DVector::zeros(total);
        let mut row = 0;
        for s in &self.subjects {
            let m = s.y.len();
            x.view_mut((row, 0), (m, p)).copy_from(&s.x);
            y.rows_mut(row, m).copy_from(&s.y);
            row += m;
        }
        Dataset::new(x, y, self.feature_names.clone())
    }

    /// Standardizes covariates over the stacked design and centers the response,
    /// keeping the subject blocks.
    pub fn standardize(&self) -> Result<LongitudinalDataset> {
        let flat = self.flatten()?.standardize()?;
        let mut row = 0;
        let subjects = self
            .subjects
            .iter()
            .map(|s| {
                let m = s.y.len();
                let out = Subject {
                    id: s.id.clone(),
                    x: flat.x.rows(row, m).into_owned(),
                    y: flat.y.rows(row, m).into_owned(),
                };
                row += m;
                out
            })
            .collect();
        Ok(LongitudinalDataset { subjects, feature_names: self.feature_names.clone() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardize_small_example() {
        let x = DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]);
        let y = DVector::from_column_slice(&[5.0, 5.0, 5.0]);
        let d = Dataset::unnamed(x, y).unwrap().standardize().unwrap();
        assert_eq!(d.x.column(0).as_slice(), &[-1.0, 0.0, 1.0]);
        assert_eq!(d.y.as_slice(), &[0.0, 0.0, 0.0]);
        assert!(d.standardized);
        assert_eq!(d.raw_response().as_slice(), &[5.0, 5.0, 5.0]);
    }

    #[test]
    fn standardize_is_idempotent() {
        let x = DMatrix::from_fn(7, 3, |i, j| ((i * 7 + j * 3) % 5) as f64 * (j as f64 + 0.5) + i as f64 * 0.1);
        let y = DVector::from_fn(7, |i, _| (i as f64).sin());
        let once = Dataset::unnamed(x, y).unwrap().standardize().unwrap();
        let twice = once.standardize().unwrap();
        assert!((&once.x - &twice.x).amax() < 1e-12);
        assert!((&once.y - &twice.y).amax() < 1e-12);
    }

    #[test]
    fn constant_column_is_rejected() {
        let x = DMatrix::from_column_slice(3, 2, &[1.0, 2.0, 3.0, 4.0, 4.0, 4.0]);
        let y = DVector::from_column_slice(&[1.0, 0.0, 1.0]);
        assert_eq!(Dataset::unnamed(x, y).unwrap().standardize(), Err(Error::ConstantColumn(1)));
    }

    #[test]
    fn rejects_non_finite() {
        let x = DMatrix::from_column_slice(2, 1, &[1.0, f64::NAN]);
        let y = DVector::from_column_slice(&[1.0, 0.0]);
        assert!(Dataset::unnamed(x, y).is_err());
    }
}
