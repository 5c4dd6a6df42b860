//! EL solvers against independent reference solvers and frozen reference values.

mod common;

use common::{bisection_uni, coordinate_ascent, grid_bivariate, normals, zero_inside_hull_2d};
use elsis::dataset::{Dataset, LongitudinalDataset, Subject};
use elsis::el::{el_ratio_at_mean, el_weights, profile_el_ratio, solve_lambda_multi, solve_lambda_uni};
use elsis::estimating::{marginal_el_stats_ee, BasisSet, QifEstimatingFunction};
use elsis::rng::SimRng;
use elsis::screening::marginal_el_stats;
use elsis::{ElConfig, ExtReal, SolveStatus};
use nalgebra::{DMatrix, DVector};

fn cfg() -> ElConfig {
    ElConfig::default()
}

fn rows_of(g: &DMatrix<f64>) -> Vec<[f64; 2]> {
    (0..g.nrows()).map(|i| [g[(i, 0)], g[(i, 1)]]).collect()
}

#[test]
fn univariate_matches_bisection_on_100_instances() {
    let mut rng = SimRng::new(2024, 0);
    let mut checked = 0;
    let mut boundary = 0;
    while checked < 100 {
        let n = 2 + (rng.next_u64() % 11) as usize;
        let shift = 1.2 * (rng.uniform() - 0.5);
        let g: Vec<f64> = normals(&mut rng, n).iter().map(|v| v + shift).collect();
        let sol = solve_lambda_uni(&g, &cfg()).unwrap();
        match bisection_uni(&g) {
            Some((lambda, ell)) => {
                assert_eq!(sol.status, SolveStatus::Converged, "g = {g:?}");
                let got = sol.log_ratio.finite().unwrap();
                assert!((got - ell).abs() < 1e-8, "g = {g:?}: {got} vs {ell}");
                assert!((sol.lambda[0] - lambda).abs() < 1e-6 * lambda.abs().max(1.0));
                checked += 1;
            }
            None => {
                assert!(sol.log_ratio.is_infinite());
                boundary += 1;
            }
        }
    }
    assert!(boundary > 0, "sampler never produced a boundary case");
}

#[test]
fn bivariate_matches_grid_oracle_on_100_instances() {
    let mut rng = SimRng::new(77, 0);
    let mut checked = 0;
    let mut outside = 0;
    while checked < 100 {
        let n = 4 + (rng.next_u64() % 9) as usize;
        let (s0, s1) = (0.8 * (rng.uniform() - 0.5), 0.8 * (rng.uniform() - 0.5));
        let rho = 0.6 * (rng.uniform() - 0.5);
        let g = DMatrix::from_fn(n, 2, |_, _| 0.0);
        let mut g = g;
        for i in 0..n {
            let (a, b) = (rng.normal(), rng.normal());
            g[(i, 0)] = a + s0;
            g[(i, 1)] = rho * a + b + s1;
        }
        let rows = rows_of(&g);
        let sol = solve_lambda_multi(&g, &cfg()).unwrap();
        if zero_inside_hull_2d(&rows) {
            let want = grid_bivariate(&rows);
            let got = sol.log_ratio.finite().unwrap_or(f64::INFINITY);
            assert!((got - want).abs() < 1e-4, "rows {rows:?}: {got} vs {want}");
            checked += 1;
        } else {
            assert!(sol.log_ratio.is_infinite(), "rows {rows:?}: zero outside hull but {:?}", sol.log_ratio);
            outside += 1;
        }
    }
    assert!(outside > 0);
}

// Frozen values from a 40-digit bisection of the dual equation (mpmath).
#[test]
fn frozen_univariate_references() {
    let s = solve_lambda_uni(&[-0.5, 0.5, 3.0], &cfg()).unwrap();
    assert!((s.log_ratio.to_f64() - 2.2013265537378994).abs() < 1e-10);
    let s = el_ratio_at_mean(&[1.0, 2.0, 3.0], 1.5, &cfg()).unwrap();
    assert!((s.log_ratio.to_f64() - 1.2602839239449684).abs() < 1e-10);
    let w = el_weights(&DMatrix::from_column_slice(3, 1, &[-0.5, 0.5, 3.0]), &s_lambda(&[-0.5, 0.5, 3.0])).unwrap();
    let m: f64 = w.iter().zip([-0.5, 0.5, 3.0]).map(|(w, g)| w * g).sum();
    assert!(m.abs() < 1e-6);
    assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-8);
}

fn s_lambda(g: &[f64]) -> Vec<f64> {
    solve_lambda_uni(g, &cfg()).unwrap().lambda
}

// Grid (step 1e-3) plus 40-digit coordinate bisection of the dual (numpy + mpmath).
#[test]
fn frozen_bivariate_reference() {
    let g = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, 2.0, 0.0, -1.0, 0.0]);
    let s = solve_lambda_multi(&g, &cfg()).unwrap();
    assert_eq!(s.status, SolveStatus::Converged);
    assert!((s.log_ratio.to_f64() - 1.6399416547157293).abs() < 1e-8);
    assert!((s.lambda[0] - 0.5530536126122565).abs() < 1e-6);
    assert!(s.lambda[1].abs() < 1e-8);
    assert!((grid_bivariate(&rows_of(&g)) - 1.6399416547157293).abs() < 1e-8);
}

#[test]
fn screening_statistic_on_four_row_toy() {
    // y = (1, -1, 1, -1) and x = g * y, so the products X_ij y_i are exactly g.
    let g = [-0.5, 0.5, 3.0, -1.0];
    let y = [1.0, -1.0, 1.0, -1.0];
    let x: Vec<f64> = g.iter().zip(&y).map(|(g, y)| g * y).collect();
    let mut d = Dataset::unnamed(DMatrix::from_column_slice(4, 1, &x), DVector::from_column_slice(&y)).unwrap();
    d.standardized = true;
    let stats = marginal_el_stats(&d, &cfg()).unwrap();
    let got = stats[0].statistic.unwrap().finite().unwrap();
    assert!((got - 0.5248457776076593).abs() < 1e-10);
    assert!((got - bisection_uni(&g).unwrap().1).abs() < 1e-10);
}

#[test]
fn profile_matches_grid_minimization() {
    let mut rng = SimRng::new(5, 3);
    let n = 20;
    let mut g = DMatrix::zeros(n, 2);
    for i in 0..n {
        let a = rng.normal();
        g[(i, 0)] = a + 0.2;
        g[(i, 1)] = 0.5 * a + rng.normal() - 0.1;
    }
    let fixed = 0.0;
    let got = profile_el_ratio(&g, 0, fixed, &cfg()).unwrap().finite().unwrap();

    let col = g.column(1);
    let mean = col.mean();
    let sd = col.variance().sqrt() * (n as f64 / (n as f64 - 1.0)).sqrt();
    let mut best = f64::INFINITY;
    for k in 0..2000 {
        let nu = mean - 4.0 * sd + 8.0 * sd * k as f64 / 1999.0;
        let rows: Vec<[f64; 2]> = (0..n).map(|i| [g[(i, 0)] - fixed, g[(i, 1)] - nu]).collect();
        if zero_inside_hull_2d(&rows) {
            best = best.min(coordinate_ascent(&rows, [0.0, 0.0]));
        }
    }
    assert!(best.is_finite());
    assert!(got <= best + 1e-6, "profile {got} above grid minimum {best}");
    assert!(best - got < 1e-3, "profile {got} vs grid {best}");
}

#[test]
fn profile_with_duplicated_column_equals_univariate() {
    let mut rng = SimRng::new(8, 0);
    let v: Vec<f64> = normals(&mut rng, 15).iter().map(|x| x + 0.3).collect();
    let g = DMatrix::from_fn(15, 2, |i, _| v[i]);
    let p = profile_el_ratio(&g, 0, 0.0, &cfg()).unwrap();
    let u = el_ratio_at_mean(&v, 0.0, &cfg()).unwrap().log_ratio;
    assert!((p.to_f64() - u.to_f64()).abs() < 1e-6);
}

// Eight subjects, two measurements, two features. The reference statistics come
// from standardizing the stacked design in numpy, forming the {I, adjacency} QIF
// rows by hand and running the grid + 40-digit coordinate bisection oracle.
// The responses were chosen so zero sits well inside both hulls (largest angular
// gap under 2.1 rad).
#[test]
fn qif_toy_matches_grid_oracle() {
    let x = [
        [0.3, 1.2], [-0.7, 0.4], [1.1, -0.2], [0.5, 0.9], [-1.4, 0.3], [0.2, -1.1], [0.8, 0.6], [-0.3, -0.5],
        [1.6, 0.1], [-0.9, 1.3], [0.4, -0.8], [-0.2, 0.7], [1.0, -1.2], [-1.1, 0.2], [0.6, 1.0], [-0.5, -0.4],
    ];
    let y = [1.7, 0.8, 0.8, 1.1, 0.3, -0.6, -0.8, -0.8, 1.4, -1.5, -0.6, -0.3, 0.2, 0.6, -1.2, -1.7];
    let subjects = (0..8)
        .map(|i| Subject {
            id: (i + 1).to_string(),
            x: DMatrix::from_row_slice(2, 2, &[x[2 * i][0], x[2 * i][1], x[2 * i + 1][0], x[2 * i + 1][1]]),
            y: DVector::from_column_slice(&[y[2 * i], y[2 * i + 1]]),
        })
        .collect();
    let data = LongitudinalDataset::new(subjects, vec!["a".into(), "b".into()]).unwrap();
    let ef = QifEstimatingFunction { bases: BasisSet::identity_ar1(2).unwrap() };
    let stats = marginal_el_stats_ee(&data, &ef, &cfg()).unwrap();
    let want = [1.4910335162529653, 0.9258295216087404];
    for (s, w) in stats.iter().zip(want) {
        let got = s.statistic.unwrap().finite().unwrap();
        assert!((got - w).abs() < 1e-4, "feature {}: {got} vs {w}", s.feature);
    }
}

#[test]
fn boundary_is_infinite_not_sentinel() {
    let s = solve_lambda_uni(&[1.0, 2.0, 3.0], &cfg()).unwrap();
    assert_eq!(s.log_ratio, ExtReal::Infinite);
    assert!(ExtReal::Infinite > ExtReal::Finite(f64::MAX));
}
