//! Iterative screening: rank inactive features by a profile EL ratio conditioned
//! on the current active set, recruit the best, and prune the union with SCAD.

use crate::dataset::Dataset;
use crate::el::{check_second_moment, profile_el_linear, profile_el_ratio, ElConfig, LinearJacobian};
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use crate::scad::{scad_select, ScadConfig, TuningCriterion};
use crate::screening::{
    assign_ranks, build_report, default_top_d, marginal_el_stats, moment_column, select_top_d, studentized, Family,
    Method, ScreenStat, ScreeningReport, SelectionRule, StatFlag,
};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const RANKING_DIRECTION: &str = "profile EL ratio descending (larger ratio = stronger conditional evidence)";

/// Form of the conditional estimating function for feature `j` given active set `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    /// Rows `x_iS (y_i - x_iA' theta)` with `S = {j} + A`; `theta` (the active
    /// coefficients) is profiled out.
    Regression,
    /// Rows `(X_ij y_i, X_ik y_i : k in A)` with the active means profiled out.
    /// This reproduces the marginal statistic exactly and is kept for comparison.
    MeanShift,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsisConfig {
    /// Features recruited per iteration; `None` means `floor(n / (2 log n))`.
    pub per_step_recruit: Option<usize>,
    /// Cap on the active set; `None` means `floor(n / log n)`.
    pub max_active: Option<usize>,
    pub max_iterations: usize,
    pub family: Family,
    pub scad_a: f64,
    pub tuning_grid: Vec<f64>,
    pub criterion: TuningCriterion,
    pub profile: ProfileKind,
    pub el: ElConfig,
}

impl Default for IsisConfig {
    fn default() -> Self {
        IsisConfig {
            per_step_recruit: None,
            max_active: None,
            max_iterations: 5,
            family: Family::Gaussian,
            scad_a: 3.7,
            tuning_grid: Vec::new(),
            criterion: TuningCriterion::Ebic { gamma: 1.0 },
            profile: ProfileKind::Regression,
            el: ElConfig::default(),
        }
    }
}

impl IsisConfig {
    /// `(per_step_recruit, max_active)` for sample size `n`, validated.
    pub fn resolve(&self, n: usize) -> Result<(usize, usize)> {
        let d = self.per_step_recruit.unwrap_or_else(|| default_top_d(n));
        let nf = n as f64;
        let cap = self.max_active.unwrap_or_else(|| ((nf / nf.ln()).floor() as usize).max(1));
        if d == 0 {
            return Err(Error::InvalidArgument("per_step_recruit must be >= 1".into()));
        }
        if cap < d {
            return Err(Error::InvalidArgument(format!("max_active {cap} is below per_step_recruit {d}")));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be >= 1".into()));
        }
        if !(self.scad_a > 2.0) {
            return Err(Error::InvalidArgument(format!("scad_a must exceed 2, got {}", self.scad_a)));
        }
        self.el.validate()?;
        Ok((d, cap))
    }

    fn scad(&self) -> ScadConfig {
        ScadConfig { family: self.family, a: self.scad_a, tuning_grid: self.tuning_grid.clone(), criterion: self.criterion }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileStats {
    /// One entry per inactive feature, ranked among themselves.
    pub stats: Vec<ScreenStat>,
    /// Active set actually conditioned on.
    pub active: Vec<usize>,
    /// Active features dropped (most recent first) because they made the
    /// conditioning block degenerate.
    pub dropped: Vec<usize>,
}

/// Profile EL statistics of every feature outside `active`.
pub fn profile_stats(data: &Dataset, active: &[usize], kind: ProfileKind, config: &ElConfig) -> Result<ProfileStats> {
    data.require_standardized()?;
    config.validate()?;
    if active.is_empty() {
        return Err(Error::InvalidArgument("profile screening needs a non-empty active set".into()));
    }
    if let Some(&j) = active.iter().find(|&&j| j >= data.p()) {
        return Err(Error::InvalidArgument(format!("active feature {j} out of range")));
    }
    let mut active = active.to_vec();
    let mut dropped = Vec::new();
    loop {
        if data.n() <= active.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "n = {} too small for an active set of {}",
                data.n(),
                active.len()
            )));
        }
        if active_block_ok(data, &active, kind) {
            break;
        }
        dropped.push(active.pop().expect("non-empty active set"));
        if active.is_empty() {
            return Err(Error::DegenerateInput("every active feature makes the profile degenerate".into()));
        }
    }

    let inactive: Vec<usize> = (0..data.p()).filter(|j| !active.contains(j)).collect();
    let ctx = match kind {
        ProfileKind::Regression => Some(RegressionContext::new(data, &active)?),
        ProfileKind::MeanShift => None,
    };
    let mut stats = inactive
        .par_iter()
        .map(|&j| {
            let tb = studentized(&moment_column(data, j));
            let value = match &ctx {
                Some(c) => c.statistic(data, j, config),
                None => mean_shift_statistic(data, j, &active, config),
            };
            match value {
                Ok(v) => Ok(ScreenStat::new(j, Some(v), tb)),
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
    Ok(ProfileStats { stats, active, dropped })
}

fn active_block_ok(data: &Dataset, active: &[usize], kind: ProfileKind) -> bool {
    let xa = data.x.select_columns(active);
    let z = match kind {
        ProfileKind::MeanShift => row_scale(&xa, &data.y),
        ProfileKind::Regression => match ols(&xa, &data.y) {
            Some(theta) => row_scale(&xa, &(&data.y - &xa * theta)),
            None => return false,
        },
    };
    check_second_moment(&z).is_ok()
}

fn row_scale(m: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for mut row_col in out.column_iter_mut() {
        row_col.component_mul_assign(w);
    }
    out
}

fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Option<DVector<f64>> {
    let ch = (x.transpose() * x).cholesky()?;
    let theta = ch.solve(&(x.transpose() * y));
    theta.iter().all(|v| v.is_finite()).then_some(theta)
}

struct RegressionContext {
    xa: DMatrix<f64>,
    theta0: Vec<f64>,
}

impl RegressionContext {
    fn new(data: &Dataset, active: &[usize]) -> Result<Self> {
        let xa = data.x.select_columns(active);
        let theta0 = ols(&xa, &data.y)
            .ok_or_else(|| Error::DegenerateInput("singular active design".into()))?
            .iter()
            .copied()
            .collect();
        Ok(RegressionContext { xa, theta0 })
    }

    fn statistic(&self, data: &Dataset, j: usize, config: &ElConfig) -> Result<ExtReal> {
        let (n, q) = self.xa.shape();
        let mut u = DMatrix::zeros(n, q + 1);
        u.set_column(0, &data.x.column(j));
        u.columns_mut(1, q).copy_from(&self.xa);
        let base = row_scale(&u, &data.y);
        let jac = LinearJacobian::RankOne { u, v: self.xa.clone() };
        let value = profile_el_linear(&base, &jac, &self.theta0, config)?.value;
        if !value.is_infinite() {
            return Ok(value);
        }
        match feasible_coefficients(&self.xa, &data.x.column(j).into_owned(), &data.y) {
            Some(theta) => Ok(profile_el_linear(&base, &jac, &theta, config)?.value),
            None => Ok(ExtReal::Infinite),
        }
    }
}

/// Weighted least-squares fits of `y` and `xj` on `xa`: `(f, theta, s)` with
/// `s_i = rho_i e_i` (`e`, `rho` the residuals) and `f = sum w_i s_i / sum w_i`.
fn weighted_fit(xa: &DMatrix<f64>, xj: &DVector<f64>, y: &DVector<f64>, w: &DVector<f64>) -> Option<(f64, DVector<f64>, DVector<f64>)> {
    let sw = w.map(f64::sqrt);
    let xw = row_scale(xa, &sw);
    let ch = xw.tr_mul(&xw).cholesky()?;
    let theta = ch.solve(&xw.tr_mul(&y.component_mul(&sw)));
    let gamma = ch.solve(&xw.tr_mul(&xj.component_mul(&sw)));
    let e = y - xa * &theta;
    let rho = xj - xa * gamma;
    let s = e.component_mul(&rho);
    let f = w.dot(&s) / w.sum();
    f.is_finite().then_some((f, theta, s))
}

/// Coefficients at which zero is interior to the hull of `x_iS (y_i - x_iA' theta)`.
///
/// Such coefficients are the weighted least-squares fits under positive weights
/// that make the weighted residual orthogonal to `xj`. The weights are tilted by
/// mirror descent on that weighted covariance until it changes sign, and the root
/// is then bracketed on the segment between the last two weightings.
fn feasible_coefficients(xa: &DMatrix<f64>, xj: &DVector<f64>, y: &DVector<f64>) -> Option<Vec<f64>> {
    let n = y.len();
    let mut w = DVector::from_element(n, 1.0 / n as f64);
    let (f0, _, mut s) = weighted_fit(xa, xj, y, &w)?;
    if f0 == 0.0 {
        return None;
    }
    let sign = f0.signum();
    let mut found = None;
    for _ in 0..200 {
        let scale = s.amax();
        if !(scale > 0.0) {
            return None;
        }
        let mut next = w.zip_map(&s, |wi, si| wi * (-sign * si / scale).exp());
        next /= next.sum();
        let (f, _, s_next) = weighted_fit(xa, xj, y, &next)?;
        if f.signum() != sign {
            found = Some(next);
            break;
        }
        w = next;
        s = s_next;
    }
    let far = found?;
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let wm = &w * (1.0 - mid) + &far * mid;
        let (f, _, _) = weighted_fit(xa, xj, y, &wm)?;
        if f.signum() == sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let wm = &w * (1.0 - 0.5 * (lo + hi)) + &far * (0.5 * (lo + hi));
    let (_, theta, _) = weighted_fit(xa, xj, y, &wm)?;
    Some(theta.iter().copied().collect())
}

fn mean_shift_statistic(data: &Dataset, j: usize, active: &[usize], config: &ElConfig) -> Result<ExtReal> {
    let mut cols = Vec::with_capacity(active.len() + 1);
    cols.push(j);
    cols.extend_from_slice(active);
    let g = row_scale(&data.x.select_columns(&cols), &data.y);
    profile_el_ratio(&g, 0, 0.0, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The active set did not change.
    Stable,
    /// The active set reached `max_active`, or no further feature can be recruited.
    MaxActive,
    MaxIterations,
    /// SCAD removed every candidate; the previous active set is kept.
    EmptySelection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsisStep {
    pub iteration: usize,
    /// Active features conditioned on (after any degeneracy drops); empty at step 1.
    pub conditioned_on: Vec<usize>,
    pub dropped_active: Vec<usize>,
    pub recruited: Vec<usize>,
    pub recruited_stats: Vec<Option<ExtReal>>,
    /// Largest defined statistic among inactive features not recruited.
    pub best_unrecruited: Option<ExtReal>,
    /// Active set after the SCAD step.
    pub active: Vec<usize>,
    pub scad_lambda: f64,
    #[serde(skip_serializing_if = "std::ops::Not::not", default)]
    pub scad_nonconvergence: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsisReport {
    /// Marginal statistics of step 1; `selected` is the final active set.
    pub screening: ScreeningReport,
    pub per_step_recruit: usize,
    pub max_active: usize,
    pub max_iterations: usize,
    pub profile: ProfileKind,
    pub ranking_direction: String,
    /// Step 1 SCAD returned nothing and the marginal top features were forced active.
    pub forced_restart: bool,
    pub stop_reason: StopReason,
    pub trace: Vec<IsisStep>,
}

fn recruit(stats: &[ScreenStat], k: usize) -> Result<(Vec<usize>, Vec<Option<ExtReal>>, Option<ExtReal>)> {
    let chosen = select_top_d(stats, k)?;
    let stat_of = |j: usize| stats.iter().find(|s| s.feature == j).and_then(|s| s.statistic);
    let chosen_stats = chosen.iter().map(|&j| stat_of(j)).collect();
    let best_rest = stats
        .iter()
        .filter(|s| !chosen.contains(&s.feature))
        .filter_map(|s| s.statistic)
        .max();
    Ok((chosen, chosen_stats, best_rest))
}

fn same_set(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && a.iter().all(|j| b.contains(j))
}

/// Iterative EL screening with SCAD pruning on standardized `data`.
pub fn el_isis(data: &Dataset, config: &IsisConfig) -> Result<IsisReport> {
    data.require_standardized()?;
    let n = data.n();
    let (d, cap) = config.resolve(n)?;
    if d >= n || d > data.p() {
        return Err(Error::InvalidArgument(format!("per_step_recruit {d} needs to be below n = {n} and at most p")));
    }
    let scad = config.scad();

    let marginal = marginal_el_stats(data, &config.el)?;
    let (m1, m1_stats, best_rest) = recruit(&marginal, d)?;
    let sel = scad_select(data, &m1, &scad)?;
    let forced_restart = sel.selected.is_empty();
    let mut active = if forced_restart { m1.clone() } else { sel.selected.clone() };
    let mut trace = vec![IsisStep {
        iteration: 1,
        conditioned_on: vec![],
        dropped_active: vec![],
        recruited: m1,
        recruited_stats: m1_stats,
        best_unrecruited: best_rest,
        active: active.clone(),
        scad_lambda: sel.lambda,
        scad_nonconvergence: sel.nonconvergence,
    }];

    let stop_reason = loop {
        if active.len() >= cap {
            break StopReason::MaxActive;
        }
        if trace.len() >= config.max_iterations {
            break StopReason::MaxIterations;
        }
        let ps = profile_stats(data, &active, config.profile, &config.el)?;
        let room = (n - 1).saturating_sub(ps.active.len()).min(ps.stats.len()).min(d);
        if room == 0 {
            break StopReason::MaxActive;
        }
        let (recruited, recruited_stats, best_unrecruited) = recruit(&ps.stats, room)?;
        let mut candidates = ps.active.clone();
        candidates.extend_from_slice(&recruited);
        let sel = scad_select(data, &candidates, &scad)?;
        let empty = sel.selected.is_empty();
        trace.push(IsisStep {
            iteration: trace.len() + 1,
            conditioned_on: ps.active.clone(),
            dropped_active: ps.dropped,
            recruited,
            recruited_stats,
            best_unrecruited,
            active: if empty { active.clone() } else { sel.selected.clone() },
            scad_lambda: sel.lambda,
            scad_nonconvergence: sel.nonconvergence,
        });
        if empty {
            break StopReason::EmptySelection;
        }
        let stable = same_set(&sel.selected, &active);
        active = sel.selected;
        if stable {
            break StopReason::Stable;
        }
    };

    let mut screening = build_report(marginal, Method::El, SelectionRule::TopD(d), n)?;
    screening.selected = active;
    Ok(IsisReport {
        screening,
        per_step_recruit: d,
        max_active: cap,
        max_iterations: config.max_iterations,
        profile: config.profile,
        ranking_direction: RANKING_DIRECTION.to_string(),
        forced_restart,
        stop_reason,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::{generate, Example, SimData, SimulationSpec};

    const TOY_X: [f64; 30] = [
        0.8, -1.1, 0.3, 1.9, 0.4, -0.7, -0.6, 1.3, 1.2, 0.2, -0.5, -1.6, -1.4, 0.9, 0.5, 1.1, 1.7, -0.2, -0.3, -1.2,
        0.9, 0.7, 0.1, -1.1, -1.8, -0.4, 0.6, 0.5, 0.6, 1.4,
    ];

    fn toy(y: &[f64]) -> Dataset {
        let x = DMatrix::from_row_slice(10, 3, &TOY_X);
        Dataset::unnamed(x, DVector::from_column_slice(y)).unwrap().standardize().unwrap()
    }

    const TOY_Y: [f64; 10] = [0.3, 1.1, -0.9, 0.4, -0.2, 1.0, -1.3, 0.6, -0.5, 0.2];
    /// Separates column 0 so sharply that the feasible coefficient set splits into
    /// disconnected pieces.
    const TOY_Y_HARD: [f64; 10] = [1.3, 2.1, -0.4, 0.9, -1.7, 2.6, -0.8, 1.0, -2.2, 0.7];

    fn stat_of(ps: &ProfileStats, j: usize) -> f64 {
        ps.stats.iter().find(|s| s.feature == j).unwrap().statistic.unwrap().to_f64()
    }

    #[test]
    fn toy_profile_matches_grid_oracle() {
        let d = toy(&TOY_Y);
        let cfg = ElConfig::default();
        let ps = profile_stats(&d, &[0, 2], ProfileKind::Regression, &cfg).unwrap();
        assert!((stat_of(&ps, 1) - 2.806694311102937).abs() < 1e-3);
        let ps = profile_stats(&d, &[0], ProfileKind::Regression, &cfg).unwrap();
        assert!((stat_of(&ps, 1) - 0.9476365648594447).abs() < 1e-3);
        assert!((stat_of(&ps, 2) - 23.956202226127022).abs() < 1e-3);
    }

    #[test]
    fn infeasible_start_is_recovered() {
        let d = toy(&TOY_Y_HARD);
        let cfg = ElConfig::default();
        let ps = profile_stats(&d, &[0], ProfileKind::Regression, &cfg).unwrap();
        assert!((stat_of(&ps, 1) - 2.269177247800427).abs() < 1e-3);
        assert!((stat_of(&ps, 2) - 1.7227287878185258).abs() < 1e-3);
        // Zero is outside the hull at the least-squares start; the minimization lands
        // in a feasible piece whose minimum is at least the global one.
        let ps = profile_stats(&d, &[1, 2], ProfileKind::Regression, &cfg).unwrap();
        let v = stat_of(&ps, 0);
        assert!(v.is_finite() && v >= 49.4560255359703 - 1e-6, "{v}");
    }

    #[test]
    fn empty_active_set_rejected() {
        let err = profile_stats(&toy(&TOY_Y), &[], ProfileKind::Regression, &ElConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn orthogonal_active_column_decouples() {
        // Column 1 is orthogonal to column 0 and to y.
        let x = DMatrix::from_row_slice(6, 2, &[1.0, 1.0, 2.0, -1.0, -1.0, 1.0, 0.5, -1.0, -2.5, 1.0, 3.0, -1.0]);
        let y = DVector::from_column_slice(&[0.4, -1.1, -0.3, 0.9, 1.5, 0.2]);
        let raw = Dataset::unnamed(x, y).unwrap();
        let mut d = raw.standardize().unwrap();
        let c0 = d.x.column(0).into_owned();
        let basis = DMatrix::from_columns(&[c0, d.y.clone()]);
        let c1 = d.x.column(1).into_owned();
        let coef = ols(&basis, &c1).unwrap();
        let c1 = &c1 - &basis * coef;
        let sd = (c1.norm_squared() / 5.0).sqrt();
        d.x.set_column(1, &(c1 / sd));
        let cfg = ElConfig::default();
        let marginal = marginal_el_stats(&d, &cfg).unwrap()[0].statistic.unwrap().to_f64();
        let ps = profile_stats(&d, &[1], ProfileKind::MeanShift, &cfg).unwrap();
        assert!(marginal.is_finite() && marginal > 0.0);
        assert!((stat_of(&ps, 0) - marginal).abs() < 1e-4);
    }

    #[test]
    fn mean_shift_reproduces_marginal() {
        let spec = SimulationSpec::new(Example::Ex1, 40, 8, 11);
        let SimData::CrossSection(d) = generate(&spec, 0).unwrap() else { unreachable!() };
        let d = d.standardize().unwrap();
        let cfg = ElConfig::default();
        let marginal = marginal_el_stats(&d, &cfg).unwrap();
        let ps = profile_stats(&d, &[0, 5], ProfileKind::MeanShift, &cfg).unwrap();
        for s in &ps.stats {
            let m = marginal[s.feature].statistic.unwrap();
            match (m, s.statistic.unwrap()) {
                (ExtReal::Finite(a), ExtReal::Finite(b)) => assert!((a - b).abs() < 1e-6 * a.max(1.0), "{a} {b}"),
                (a, b) => assert_eq!(a, b),
            }
        }
    }

    #[test]
    fn collinear_active_feature_is_dropped() {
        let d = toy(&TOY_Y);
        let mut x = d.x.clone();
        let c1 = x.column(1).into_owned();
        x.set_column(2, &c1);
        let d = Dataset::unnamed(x, d.y.clone()).unwrap().standardize().unwrap();
        let ps = profile_stats(&d, &[1, 2], ProfileKind::Regression, &ElConfig::default()).unwrap();
        assert_eq!(ps.active, vec![1]);
        assert_eq!(ps.dropped, vec![2]);
    }

    fn example2(seed: u64) -> Dataset {
        let spec = SimulationSpec::new(Example::Ex2, 100, 60, seed);
        let SimData::CrossSection(d) = generate(&spec, 0).unwrap() else { unreachable!() };
        d.standardize().unwrap()
    }

    #[test]
    fn isis_trace_invariants() {
        let d = example2(3);
        let cfg = IsisConfig::default();
        let rep = el_isis(&d, &cfg).unwrap();
        assert!(!rep.trace.is_empty() && rep.trace.len() <= cfg.max_iterations);
        let mut prev: Vec<usize> = vec![];
        for step in &rep.trace {
            for j in &step.active {
                assert!(prev.contains(j) || step.recruited.contains(j));
            }
            if let Some(best) = step.best_unrecruited {
                for s in &step.recruited_stats {
                    assert!(s.unwrap() >= best);
                }
            }
            prev = step.active.clone();
        }
        assert_eq!(rep.screening.selected, prev);
        assert!(rep.screening.selected.contains(&3), "{:?}", rep.trace);
        assert_eq!(el_isis(&d, &cfg).unwrap(), rep);
    }

    #[test]
    fn stable_first_screen_stops() {
        // Three strong, mutually orthogonal signals and nothing else to find.
        let n = 60;
        let mut rng = crate::rng::SimRng::new(5, 0);
        let x = DMatrix::from_fn(n, 12, |_, _| rng.normal());
        let y = DVector::from_fn(n, |i, _| 3.0 * x[(i, 0)] + 3.0 * x[(i, 1)] + 3.0 * x[(i, 2)] + 0.1 * rng.normal());
        let d = Dataset::unnamed(x, y).unwrap().standardize().unwrap();
        let cfg = IsisConfig { per_step_recruit: Some(3), ..IsisConfig::default() };
        let rep = el_isis(&d, &cfg).unwrap();
        assert_eq!(rep.stop_reason, StopReason::Stable);
        let mut fin = rep.screening.selected.clone();
        fin.sort();
        assert_eq!(fin, vec![0, 1, 2]);
        assert_eq!(rep.trace.last().unwrap().active, rep.trace[0].active);
    }

    #[test]
    fn config_validation() {
        let bad = IsisConfig { per_step_recruit: Some(0), ..IsisConfig::default() };
        assert!(bad.resolve(100).is_err());
        let bad = IsisConfig { per_step_recruit: Some(10), max_active: Some(5), ..IsisConfig::default() };
        assert!(bad.resolve(100).is_err());
        let bad = IsisConfig { scad_a: 2.0, ..IsisConfig::default() };
        assert!(bad.resolve(100).is_err());
        assert_eq!(IsisConfig::default().resolve(100).unwrap(), (10, 21));
    }
}
