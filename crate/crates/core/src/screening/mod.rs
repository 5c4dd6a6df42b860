//! Marginal screening: per-feature statistics, ranking and selection rules.

mod baseline;
mod el;
mod kendall;

pub use baseline::{glm_sis_stats, ls_sis_stats, rrc_sis_stats, Family};
pub use el::marginal_el_stats;
pub use kendall::kendall_tau;

use crate::dataset::Dataset;
use crate::el::ElConfig;
use crate::error::{Error, Result};
use crate::ext::ExtReal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Method {
    /// Marginal empirical-likelihood ratio at zero covariance.
    El,
    /// Absolute marginal covariance (least-squares SIS).
    Ls,
    /// Absolute Kendall tau (robust rank correlation SIS).
    Rrc,
    /// Absolute marginal GLM slope.
    Glm,
}

impl Method {
    pub fn label(&self) -> &'static str {
        match self {
            Method::El => "EL",
            Method::Ls => "LS",
            Method::Rrc => "RRC",
            Method::Glm => "GLM",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SelectionRule {
    TopD(usize),
    Threshold(f64),
}

/// Why a feature's statistic is missing or was forced to `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatFlag {
    /// The statistic is undefined (e.g. identical estimating-function values).
    Degenerate,
    /// The marginal logistic fit diverged; the statistic is `+inf`.
    Separation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenStat {
    pub feature: usize,
    /// `None` marks an unrankable feature, ranked after all defined statistics.
    pub statistic: Option<ExtReal>,
    /// Studentized magnitude `|mean(g)| / sd(g)` of `g_i = X_ij y_i`.
    #[serde(with = "crate::ext::f64_ext")]
    pub tie_break: f64,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub flag: Option<StatFlag>,
}

impl ScreenStat {
    pub(crate) fn new(feature: usize, statistic: Option<ExtReal>, tie_break: f64) -> Self {
        ScreenStat { feature, statistic, tie_break, rank: 0, flag: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningReport {
    pub method: Method,
    pub selection_rule: SelectionRule,
    pub n: usize,
    pub p: usize,
    /// One entry per feature, indexed by feature.
    pub stats: Vec<ScreenStat>,
    /// Selected features in rank order.
    pub selected: Vec<usize>,
    /// Ordering rule applied among equal statistics (e.g. several `+inf`).
    pub tie_break_rule: String,
    pub unrankable: Vec<usize>,
}

pub(crate) const TIE_BREAK_RULE: &str =
    "statistic desc, then |mean(X_j*y)|/sd(X_j*y) desc, then feature index asc; unrankable last";

/// `|mean(g)| / sd(g)` with sample sd (divisor `n - 1`); `+inf` for a constant
/// nonzero `g`, 0 for `g == 0`.
pub(crate) fn studentized(g: &[f64]) -> f64 {
    let n = g.len() as f64;
    let mean = g.iter().sum::<f64>() / n;
    let var = g.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if sd > 0.0 {
        mean.abs() / sd
    } else if mean != 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Fills `rank` (1-based) for every entry of `stats`.
pub fn assign_ranks(stats: &mut [ScreenStat]) {
    let order = ranking_order(stats);
    for (pos, &idx) in order.iter().enumerate() {
        stats[idx].rank = pos + 1;
    }
}

/// Positions in `stats`, best first.
fn ranking_order(stats: &[ScreenStat]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..stats.len()).collect();
    order.sort_by(|&a, &b| {
        let (sa, sb) = (&stats[a], &stats[b]);
        // Some(_) > None, so reversed comparison puts unrankable last.
        sb.statistic
            .cmp(&sa.statistic)
            .then_with(|| sb.tie_break.total_cmp(&sa.tie_break))
            .then_with(|| sa.feature.cmp(&sb.feature))
    });
    order
}

/// Features ordered by rank.
pub fn ranked_features(stats: &[ScreenStat]) -> Vec<usize> {
    let mut v: Vec<&ScreenStat> = stats.iter().collect();
    v.sort_by_key(|s| s.rank);
    v.into_iter().map(|s| s.feature).collect()
}

/// The `d` top-ranked features, best first.
pub fn select_top_d(stats: &[ScreenStat], d: usize) -> Result<Vec<usize>> {
    if d == 0 || d > stats.len() {
        return Err(Error::InvalidArgument(format!("top-d size {d} outside 1..={}", stats.len())));
    }
    Ok(ranked_features(stats).into_iter().take(d).collect())
}

/// Features with a defined statistic `>= gamma`, in rank order.
pub fn select_threshold(stats: &[ScreenStat], gamma: f64) -> Result<Vec<usize>> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!("threshold must be positive, got {gamma}")));
    }
    let by_feature: Vec<&ScreenStat> = {
        let mut v: Vec<&ScreenStat> = stats.iter().collect();
        v.sort_by_key(|s| s.rank);
        v
    };
    Ok(by_feature
        .into_iter()
        .filter(|s| s.statistic.is_some_and(|v| v >= ExtReal::Finite(gamma)))
        .map(|s| s.feature)
        .collect())
}

/// Default screening size `floor(n / (2 log n))`, at least 1.
pub fn default_top_d(n: usize) -> usize {
    let nf = n as f64;
    ((nf / (2.0 * nf.ln())).floor() as usize).max(1)
}

/// Computes the statistics of `method`, applies `rule` and assembles a report.
/// The data must be standardized; binomial GLM screening reads the raw 0/1 response.
pub fn screen(
    data: &Dataset,
    method: Method,
    rule: SelectionRule,
    family: Family,
    config: &ElConfig,
) -> Result<ScreeningReport> {
    let stats = match method {
        Method::El => marginal_el_stats(data, config)?,
        Method::Ls => ls_sis_stats(data)?,
        Method::Rrc => rrc_sis_stats(data)?,
        Method::Glm => glm_sis_stats(data, family)?,
    };
    build_report(stats, method, rule, data.n())
}

pub(crate) fn build_report(
    stats: Vec<ScreenStat>,
    method: Method,
    rule: SelectionRule,
    n: usize,
) -> Result<ScreeningReport> {
    let selected = match rule {
        SelectionRule::TopD(d) => select_top_d(&stats, d)?,
        SelectionRule::Threshold(g) => select_threshold(&stats, g)?,
    };
    let unrankable = stats.iter().filter(|s| s.statistic.is_none()).map(|s| s.feature).collect();
    Ok(ScreeningReport {
        method,
        selection_rule: rule,
        n,
        p: stats.len(),
        stats,
        selected,
        tie_break_rule: TIE_BREAK_RULE.to_string(),
        unrankable,
    })
}

/// Products `X_ij * y_i` for feature `j`.
pub(crate) fn moment_column(data: &Dataset, j: usize) -> Vec<f64> {
    data.x.column(j).iter().zip(data.y.iter()).map(|(x, y)| x * y).collect()
}
