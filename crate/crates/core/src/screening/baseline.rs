//! Baseline marginal screeners: least squares, rank correlation and marginal GLM.

use super::{assign_ranks, kendall_tau, moment_column, studentized, ScreenStat, StatFlag};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Gaussian,
    Binomial,
}

/// `|mean_i X_ij y_i|`, the absolute marginal covariance.
pub fn ls_sis_stats(data: &Dataset) -> Result<Vec<ScreenStat>> {
    data.require_standardized()?;
    let n = data.n() as f64;
    let mut stats: Vec<ScreenStat> = (0..data.p())
        .into_par_iter()
        .map(|j| {
            let g = moment_column(data, j);
            let cov = g.iter().sum::<f64>() / n;
            ScreenStat::new(j, Some(ExtReal::Finite(cov.abs())), studentized(&g))
        })
        .collect();
    assign_ranks(&mut stats);
    Ok(stats)
}

/// `|tau_b(X_j, y)|`.
pub fn rrc_sis_stats(data: &Dataset) -> Result<Vec<ScreenStat>> {
    if data.n() < 2 {
        return Err(Error::DegenerateInput("need n >= 2".into()));
    }
    let y = data.y.as_slice();
    let mut stats: Vec<ScreenStat> = (0..data.p())
        .into_par_iter()
        .map(|j| {
            let tau = kendall_tau(data.x.column(j).as_slice(), y);
            let g = moment_column(data, j);
            ScreenStat::new(j, Some(ExtReal::Finite(tau.abs())), studentized(&g))
        })
        .collect();
    assign_ranks(&mut stats);
    Ok(stats)
}

const LOGISTIC_MAX_ITER: usize = 50;
const LOGISTIC_TOL: f64 = 1e-8;
const SEPARATION_BOUND: f64 = 30.0;

/// `|beta_j|` from the one-covariate-plus-intercept maximum-likelihood fit.
///
/// Gaussian fits are closed form. Binomial fits use the raw 0/1 response and
/// Newton-Raphson with step halving; a slope beyond 30 in magnitude is treated
/// as separation and scored `+inf`.
pub fn glm_sis_stats(data: &Dataset, family: Family) -> Result<Vec<ScreenStat>> {
    data.require_standardized()?;
    let raw = data.raw_response();
    if family == Family::Binomial && raw.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::InvalidArgument("binomial screening needs a 0/1 response".into()));
    }
    let mut stats: Vec<ScreenStat> = (0..data.p())
        .into_par_iter()
        .map(|j| {
            let x = data.x.column(j);
            let g = moment_column(data, j);
            let tb = studentized(&g);
            match family {
                Family::Gaussian => {
                    let xm = x.mean();
                    let ym = raw.mean();
                    let sxy: f64 = x.iter().zip(raw.iter()).map(|(a, b)| (a - xm) * (b - ym)).sum();
                    let sxx: f64 = x.iter().map(|a| (a - xm).powi(2)).sum();
                    ScreenStat::new(j, Some(ExtReal::Finite((sxy / sxx).abs())), tb)
                }
                Family::Binomial => match marginal_logistic(x.as_slice(), raw.as_slice()) {
                    Ok(beta) => ScreenStat::new(j, Some(ExtReal::Finite(beta.abs())), tb),
                    Err(Error::Separation(_)) => {
                        let mut s = ScreenStat::new(j, Some(ExtReal::Infinite), tb);
                        s.flag = Some(StatFlag::Separation);
                        s
                    }
                    Err(_) => {
                        let mut s = ScreenStat::new(j, None, tb);
                        s.flag = Some(StatFlag::Degenerate);
                        s
                    }
                },
            }
        })
        .collect();
    assign_ranks(&mut stats);
    Ok(stats)
}

fn log_likelihood(x: &[f64], y: &[f64], a: f64, b: f64) -> f64 {
    x.iter()
        .zip(y)
        .map(|(&xi, &yi)| {
            let eta = a + b * xi;
            // y*eta - log(1 + e^eta), evaluated stably
            yi * eta - if eta > 0.0 { eta + (-eta).exp().ln_1p() } else { eta.exp().ln_1p() }
        })
        .sum()
}

/// Slope of the logistic regression of `y` on `x` with intercept.
pub(crate) fn marginal_logistic(x: &[f64], y: &[f64]) -> Result<f64> {
    let n = x.len() as f64;
    let ybar = y.iter().sum::<f64>() / n;
    if ybar <= 0.0 || ybar >= 1.0 {
        return Err(Error::DegenerateInput("response is constant".into()));
    }
    let mut a = (ybar / (1.0 - ybar)).ln();
    let mut b = 0.0;
    let mut ll = log_likelihood(x, y, a, b);
    for _ in 0..LOGISTIC_MAX_ITER {
        let (mut ga, mut gb, mut haa, mut hab, mut hbb) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&xi, &yi) in x.iter().zip(y) {
            let p = 1.0 / (1.0 + (-(a + b * xi)).exp());
            let w = p * (1.0 - p);
            ga += yi - p;
            gb += (yi - p) * xi;
            haa += w;
            hab += w * xi;
            hbb += w * xi * xi;
        }
        let det = haa * hbb - hab * hab;
        if !(det > 0.0) {
            return Err(Error::Separation(0));
        }
        let da = (hbb * ga - hab * gb) / det;
        let db = (haa * gb - hab * ga) / det;
        let mut t = 1.0;
        let mut next = None;
        for _ in 0..30 {
            let (na, nb) = (a + t * da, b + t * db);
            let nll = log_likelihood(x, y, na, nb);
            if nll >= ll - 1e-12 * ll.abs() {
                next = Some((na, nb, nll));
                break;
            }
            t *= 0.5;
        }
        let Some((na, nb, nll)) = next else { break };
        let change = (na - a).abs().max((nb - b).abs());
        a = na;
        b = nb;
        ll = nll;
        if b.abs() > SEPARATION_BOUND {
            return Err(Error::Separation(0));
        }
        if change < LOGISTIC_TOL {
            break;
        }
    }
    if b.abs() > SEPARATION_BOUND {
        return Err(Error::Separation(0));
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn dataset(cols: &[&[f64]], y: &[f64]) -> Dataset {
        let n = y.len();
        let x = DMatrix::from_fn(n, cols.len(), |i, j| cols[j][i]);
        Dataset::unnamed(x, DVector::from_column_slice(y)).unwrap().standardize().unwrap()
    }

    #[test]
    fn ls_statistic_for_exact_copy() {
        let a = [0.3, -1.2, 2.0, 0.7, -0.8, 0.1];
        let b = [1.0, 0.0, -1.0, 0.5, 0.2, -0.7];
        let d = dataset(&[&a, &b], &a);
        let stats = ls_sis_stats(&d).unwrap();
        let n = a.len() as f64;
        let mean = a.iter().sum::<f64>() / n;
        let sd = (a.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        // (1/n) sum x_std (a - mean) = sd (n-1)/n
        assert!((stats[0].statistic.unwrap().to_f64() - sd * (n - 1.0) / n).abs() < 1e-12);
        assert_eq!(stats[0].rank, 1);
    }

    #[test]
    fn ls_statistic_orthogonal_is_zero() {
        let d = dataset(&[&[1.0, -1.0, 1.0, -1.0]], &[1.0, 1.0, -1.0, -1.0]);
        assert_eq!(ls_sis_stats(&d).unwrap()[0].statistic, Some(ExtReal::Finite(0.0)));
    }

    #[test]
    fn rrc_monotone_and_reversed() {
        let a = [0.3, -1.2, 2.0, 0.7, -0.8, 0.1];
        let y: Vec<f64> = a.iter().map(|v: &f64| v.powi(3) + 2.0).collect();
        let rev: Vec<f64> = a.iter().map(|v| -v).collect();
        let d = dataset(&[&a, &rev], &y);
        let stats = rrc_sis_stats(&d).unwrap();
        assert!((stats[0].statistic.unwrap().to_f64() - 1.0).abs() < 1e-15);
        assert!((stats[1].statistic.unwrap().to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn gaussian_glm_is_rescaled_ls() {
        let a = [0.3, -1.2, 2.0, 0.7, -0.8, 0.1, 1.4];
        let b = [1.0, 0.0, -1.0, 0.5, 0.2, -0.7, 0.3];
        let y = [0.5, -0.1, 2.2, 1.0, -1.3, 0.4, 0.0];
        let d = dataset(&[&a, &b], &y);
        let ls = ls_sis_stats(&d).unwrap();
        let glm = glm_sis_stats(&d, Family::Gaussian).unwrap();
        let n = y.len() as f64;
        for (l, g) in ls.iter().zip(&glm) {
            let ratio = g.statistic.unwrap().to_f64() / l.statistic.unwrap().to_f64();
            assert!((ratio - n / (n - 1.0)).abs() < 1e-12);
            assert_eq!(l.rank, g.rank);
        }
    }

    #[test]
    fn separated_logistic_is_infinite() {
        let x = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];
        let y = [0.0, 0.0, 0.0, 1.0, 1.0, 1.0];
        let noise = [0.1, -0.3, 0.8, 0.2, -1.0, 0.4];
        let d = dataset(&[&x, &noise], &y);
        let stats = glm_sis_stats(&d, Family::Binomial).unwrap();
        assert_eq!(stats[0].statistic, Some(ExtReal::Infinite));
        assert_eq!(stats[0].flag, Some(StatFlag::Separation));
        assert!(stats[1].statistic.unwrap().to_f64().is_finite());
    }

    #[test]
    fn logistic_fit_matches_score_equations() {
        let x = [-1.5, -1.0, -0.2, 0.1, 0.4, 0.9, 1.3, 2.0];
        let y = [0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 1.0];
        let b = marginal_logistic(&x, &y).unwrap();
        // Refit intercept at this slope and check the slope score vanishes.
        let ybar = 0.5;
        let mut a = (ybar / (1.0 - ybar) as f64).ln();
        for _ in 0..100 {
            let (g, h) = x.iter().zip(&y).fold((0.0, 0.0), |(g, h), (&xi, &yi)| {
                let p = 1.0 / (1.0 + (-(a + b * xi)).exp());
                (g + yi - p, h + p * (1.0 - p))
            });
            a += g / h;
        }
        let score: f64 = x.iter().zip(&y).map(|(&xi, &yi)| (yi - 1.0 / (1.0 + (-(a + b * xi)).exp())) * xi).sum();
        assert!(score.abs() < 1e-6, "{score}");
    }

    #[test]
    fn binomial_requires_binary_response() {
        let d = dataset(&[&[1.0, 2.0, 3.0]], &[0.0, 2.0, 1.0]);
        assert!(glm_sis_stats(&d, Family::Binomial).is_err());
    }
}
