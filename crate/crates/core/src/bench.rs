//! Replication harness: runs a screening pipeline over seeded replications of a
//! simulation design and aggregates per-feature selection counts.

use crate::dataset::default_names;
use crate::el::ElConfig;
use crate::error::{Error, Result};
use crate::estimating::{marginal_el_stats_ee, BasisSet, QifEstimatingFunction};
use crate::iterative::{el_isis, IsisConfig};
use crate::scad::{scad_select, ScadConfig};
use crate::screening::{build_report, default_top_d, screen, Family, Method, SelectionRule};
use crate::simgen::{generate, Example, SimData, SimulationSpec};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

pub const SCHEMA_VERSION: u32 = 1;

/// Basis matrices of the longitudinal (example 4) EL path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    /// `{I}`, one component.
    Identity,
    /// `{I, adjacency}`, two components.
    IdentityAr1,
    /// One indicator per measurement time, `m` components.
    TimeIndicators,
}

impl BasisChoice {
    pub fn build(&self, m: usize) -> Result<BasisSet> {
        match self {
            BasisChoice::Identity => Ok(BasisSet::identity(m)),
            BasisChoice::IdentityAr1 => BasisSet::identity_ar1(m),
            BasisChoice::TimeIndicators => Ok(BasisSet::time_indicators(m)),
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            BasisChoice::Identity => "I",
            BasisChoice::IdentityAr1 => "I+AR1",
            BasisChoice::TimeIndicators => "time",
        }
    }
}

/// What to run on each replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pipeline {
    pub method: Method,
    /// `None` means top `floor(n / (2 log n))`.
    pub rule: Option<SelectionRule>,
    /// `None` means binomial for example 5 and Gaussian otherwise.
    pub family: Option<Family>,
    /// SCAD pruning of the screened set.
    pub post_scad: Option<ScadConfig>,
    /// Run iterative EL screening instead of a single marginal screen (EL only).
    pub isis: Option<IsisConfig>,
    pub bases: BasisChoice,
    pub el: ElConfig,
}

impl Pipeline {
    pub fn sis(method: Method) -> Self {
        Pipeline {
            method,
            rule: None,
            family: None,
            post_scad: None,
            isis: None,
            bases: BasisChoice::IdentityAr1,
            el: ElConfig::default(),
        }
    }

    pub fn isis(config: IsisConfig) -> Self {
        Pipeline { isis: Some(config), ..Pipeline::sis(Method::El) }
    }

    pub fn label(&self, example: Example) -> String {
        let mut s = format!("{}-{}", self.method.label(), if self.isis.is_some() { "ISIS" } else { "SIS" });
        if self.post_scad.is_some() {
            s.push_str("+SCAD");
        }
        if example.is_longitudinal() && self.method == Method::El && self.bases != BasisChoice::IdentityAr1 {
            let _ = write!(s, "[{}]", self.bases.tag());
        }
        s
    }

    /// Copy with every default filled in for `spec`.
    pub fn resolve(&self, spec: &SimulationSpec) -> Result<Pipeline> {
        let family = self.family.unwrap_or(match spec.example {
            Example::Ex5 => Family::Binomial,
            _ => Family::Gaussian,
        });
        if family == Family::Binomial && spec.example != Example::Ex5 {
            return Err(Error::InvalidArgument(format!("binomial family needs a 0/1 response (example {} is continuous)", spec.example.number())));
        }
        if self.isis.is_some() {
            if self.method != Method::El {
                return Err(Error::InvalidArgument("iterative screening is only defined for the EL method".into()));
            }
            if spec.example.is_longitudinal() {
                return Err(Error::InvalidArgument("iterative screening is not available for longitudinal data".into()));
            }
        }
        let rule = self.rule.unwrap_or(SelectionRule::TopD(default_top_d(spec.n)));
        if let SelectionRule::TopD(d) = rule {
            if d == 0 || d > spec.p {
                return Err(Error::InvalidArgument(format!("top-d must lie in 1..={}, got {d}", spec.p)));
            }
        }
        self.el.validate()?;
        Ok(Pipeline {
            rule: Some(rule),
            family: Some(family),
            post_scad: self.post_scad.clone().map(|c| ScadConfig { family, ..c }),
            isis: self.isis.clone().map(|c| IsisConfig { family, ..c }),
            ..self.clone()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureCount {
    pub feature: String,
    pub index: usize,
    pub count: usize,
}

/// Final selection of one replication, or why it failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationLog {
    pub replication: u64,
    pub selected: Option<Vec<usize>>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkTable {
    pub method: String,
    pub spec: SimulationSpec,
    /// Resolved pipeline.
    pub pipeline: Pipeline,
    #[serde(rename = "R")]
    pub r: usize,
    pub per_true_feature_counts: Vec<FeatureCount>,
    /// Unimportant features selected per replication, averaged over replications.
    pub unimportant_avg: f64,
    /// Selection count per unimportant feature, averaged over those features.
    pub unimportant_avg_per_feature: f64,
    /// Failed replications (excluded from the counts).
    pub failures: usize,
    pub selections: Vec<ReplicationLog>,
    /// Seconds; only filled in when timing was requested, since it breaks
    /// byte-identical reruns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

/// Final selected set of `pipeline` (already resolved) on one dataset.
pub fn run_pipeline(data: &SimData, pipeline: &Pipeline) -> Result<Vec<usize>> {
    let rule = pipeline.rule.ok_or_else(|| Error::InvalidArgument("pipeline is not resolved".into()))?;
    let family = pipeline.family.unwrap_or(Family::Gaussian);
    let (flat, selected) = match data {
        SimData::CrossSection(raw) => {
            let std = raw.standardize()?;
            if let Some(isis) = &pipeline.isis {
                return Ok(el_isis(&std, isis)?.screening.selected);
            }
            let report = screen(&std, pipeline.method, rule, family, &pipeline.el)?;
            (std, report.selected)
        }
        SimData::Longitudinal(long) => {
            if pipeline.isis.is_some() {
                return Err(Error::InvalidArgument("iterative screening is not available for longitudinal data".into()));
            }
            let flat = long.flatten()?.standardize()?;
            let selected = if pipeline.method == Method::El {
                let m = long
                    .common_m()
                    .ok_or_else(|| Error::DimensionMismatch("subjects need a common number of measurements".into()))?;
                let ef = QifEstimatingFunction { bases: pipeline.bases.build(m)? };
                let stats = marginal_el_stats_ee(long, &ef, &pipeline.el)?;
                build_report(stats, Method::El, rule, long.n())?.selected
            } else {
                screen(&flat, pipeline.method, rule, family, &pipeline.el)?.selected
            };
            (flat, selected)
        }
    };
    match &pipeline.post_scad {
        Some(cfg) if !selected.is_empty() => Ok(scad_select(&flat, &selected, cfg)?.selected),
        _ => Ok(selected),
    }
}

fn dataset_names(data: &SimData) -> &[String] {
    match data {
        SimData::CrossSection(d) => &d.feature_names,
        SimData::Longitudinal(d) => &d.feature_names,
    }
}

/// Runs replications `1..=reps` of `spec` (replication `r` on stream `r`) in
/// parallel and aggregates the selections.
pub fn run_replications(spec: &SimulationSpec, pipeline: &Pipeline, reps: usize) -> Result<BenchmarkTable> {
    if reps == 0 {
        return Err(Error::InvalidArgument("need at least one replication".into()));
    }
    spec.validate()?;
    let pipeline = pipeline.resolve(spec)?;
    let selections: Vec<ReplicationLog> = (1..=reps as u64)
        .into_par_iter()
        .map(|r| match generate(spec, r).and_then(|d| run_pipeline(&d, &pipeline)) {
            Ok(sel) => ReplicationLog { replication: r, selected: Some(sel), error: None },
            Err(e) => ReplicationLog { replication: r, selected: None, error: Some(e.to_string()) },
        })
        .collect();
    Ok(aggregate(spec, pipeline, selections))
}

/// Tallies replication logs into a table.
pub fn aggregate(spec: &SimulationSpec, pipeline: Pipeline, selections: Vec<ReplicationLog>) -> BenchmarkTable {
    let support = spec.example.true_support();
    let names = default_names(spec.p);
    let mut counts = vec![0usize; spec.p];
    let mut ok = 0usize;
    for log in &selections {
        if let Some(sel) = &log.selected {
            ok += 1;
            for &j in sel {
                if j < spec.p {
                    counts[j] += 1;
                }
            }
        }
    }
    let unimportant: usize = (0..spec.p).filter(|j| !support.contains(j)).map(|j| counts[j]).sum();
    let per_rep = if ok > 0 { unimportant as f64 / ok as f64 } else { 0.0 };
    let n_unimp = spec.p - support.len();
    BenchmarkTable {
        method: pipeline.label(spec.example),
        spec: spec.clone(),
        pipeline,
        r: selections.len(),
        per_true_feature_counts: support
            .iter()
            .map(|&j| FeatureCount { feature: names[j].clone(), index: j, count: counts[j] })
            .collect(),
        unimportant_avg: per_rep,
        unimportant_avg_per_feature: if n_unimp > 0 { per_rep / n_unimp as f64 } else { 0.0 },
        failures: selections.len() - ok,
        selections,
        wall_time: None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Json,
    Ascii,
}

#[derive(Serialize, Deserialize)]
pub struct TableDocument {
    pub schema_version: u32,
    pub tables: Vec<BenchmarkTable>,
}

/// Union of true-feature names over `tables`, ordered by feature index.
fn feature_columns(tables: &[BenchmarkTable]) -> Vec<(usize, String)> {
    let mut cols: Vec<(usize, String)> = Vec::new();
    for t in tables {
        for fc in &t.per_true_feature_counts {
            if !cols.iter().any(|(j, _)| *j == fc.index) {
                cols.push((fc.index, fc.feature.clone()));
            }
        }
    }
    cols.sort();
    cols
}

fn row_cells(t: &BenchmarkTable, cols: &[(usize, String)]) -> Vec<String> {
    let mut cells = vec![
        t.method.clone(),
        t.spec.example.number().to_string(),
        t.spec.error_dist.label(),
        t.spec.c.to_string(),
        t.spec.n.to_string(),
        t.spec.p.to_string(),
        t.r.to_string(),
    ];
    for (j, _) in cols {
        let c = t.per_true_feature_counts.iter().find(|fc| fc.index == *j);
        cells.push(c.map(|fc| fc.count.to_string()).unwrap_or_default());
    }
    cells.push(format!("{:.6}", t.unimportant_avg));
    cells.push(format!("{:.6}", t.unimportant_avg_per_feature));
    cells.push(t.failures.to_string());
    cells
}

fn header(cols: &[(usize, String)]) -> Vec<String> {
    let mut h: Vec<String> = ["method", "example", "error", "c", "n", "p", "R"].iter().map(|s| s.to_string()).collect();
    h.extend(cols.iter().map(|(_, name)| name.clone()));
    h.extend(["unimportant_avg", "unimportant_avg_per_feature", "failures"].iter().map(|s| s.to_string()));
    h
}

/// Serializes `tables`. JSON carries everything; CSV and ASCII show the count
/// columns, one row per table.
pub fn render_table(tables: &[BenchmarkTable], format: TableFormat) -> String {
    if format == TableFormat::Json {
        let doc = TableDocument { schema_version: SCHEMA_VERSION, tables: tables.to_vec() };
        let mut s = serde_json::to_string_pretty(&doc).expect("tables serialize");
        s.push('\n');
        return s;
    }
    let cols = feature_columns(tables);
    let mut rows = vec![header(&cols)];
    rows.extend(tables.iter().map(|t| row_cells(t, &cols)));
    let mut out = String::new();
    match format {
        TableFormat::Csv => {
            for r in &rows {
                out.push_str(&r.join(","));
                out.push('\n');
            }
        }
        _ => {
            let widths: Vec<usize> =
                (0..rows[0].len()).map(|k| rows.iter().map(|r| r[k].len()).max().unwrap_or(0)).collect();
            for (i, r) in rows.iter().enumerate() {
                let line: Vec<String> = r
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(k, (c, w))| if k == 0 { format!("{c:<w$}") } else { format!("{c:>w$}") })
                    .collect();
                out.push_str(line.join("  ").trim_end());
                out.push('\n');
                if i == 0 {
                    out.push_str(&"-".repeat(widths.iter().sum::<usize>() + 2 * (widths.len() - 1)));
                    out.push('\n');
                }
            }
        }
    }
    out
}

/// Parses a JSON document produced by [`render_table`].
pub fn parse_tables(json: &str) -> Result<Vec<BenchmarkTable>> {
    let doc: TableDocument =
        serde_json::from_str(json).map_err(|e| Error::InvalidArgument(format!("bad table document: {e}")))?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidArgument(format!("unsupported schema_version {}", doc.schema_version)));
    }
    Ok(doc.tables)
}

/// Feature names of replication 1, for user-facing output.
pub fn feature_names(spec: &SimulationSpec) -> Result<Vec<String>> {
    Ok(dataset_names(&generate(spec, 1)?).to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(example: Example) -> SimulationSpec {
        let mut s = SimulationSpec::new(example, 40, 30, 11);
        if example == Example::Ex4 {
            s.n = 30;
            s.c = 2.0;
        }
        s
    }

    #[test]
    fn all_features_selected_when_d_is_p() {
        for ex in [Example::Ex1, Example::Ex4] {
            let spec = small(ex);
            let pipe = Pipeline { rule: Some(SelectionRule::TopD(spec.p)), ..Pipeline::sis(Method::El) };
            let t = run_replications(&spec, &pipe, 1).unwrap();
            assert_eq!(t.failures, 0);
            assert!(t.per_true_feature_counts.iter().all(|fc| fc.count == 1), "{ex:?}");
            assert_eq!(t.unimportant_avg, (spec.p - ex.true_support().len()) as f64);
            assert!((t.unimportant_avg_per_feature - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn prefix_replications_unchanged() {
        let spec = small(Example::Ex3);
        let pipe = Pipeline::sis(Method::Ls);
        let a = run_replications(&spec, &pipe, 4).unwrap();
        let b = run_replications(&spec, &pipe, 8).unwrap();
        assert_eq!(a.selections[..], b.selections[..4]);
    }

    #[test]
    fn counts_match_recount() {
        let spec = small(Example::Ex2);
        let t = run_replications(&spec, &Pipeline::sis(Method::El), 6).unwrap();
        for fc in &t.per_true_feature_counts {
            let recount = t
                .selections
                .iter()
                .filter(|l| l.selected.as_ref().is_some_and(|s| s.contains(&fc.index)))
                .count();
            assert_eq!(recount, fc.count);
        }
        let d = default_top_d(spec.n);
        let total: usize = t.selections.iter().map(|l| l.selected.as_ref().unwrap().len()).sum();
        assert_eq!(total, 6 * d);
    }

    #[test]
    fn isis_rejected_for_longitudinal_and_baselines() {
        let spec = small(Example::Ex4);
        assert!(run_replications(&spec, &Pipeline::isis(IsisConfig::default()), 1).is_err());
        let pipe = Pipeline { method: Method::Ls, ..Pipeline::isis(IsisConfig::default()) };
        assert!(pipe.resolve(&small(Example::Ex1)).is_err());
    }

    #[test]
    fn render_formats() {
        assert_eq!(render_table(&[], TableFormat::Csv).lines().count(), 1);
        assert!(render_table(&[], TableFormat::Csv).starts_with("method,example,error"));
        let spec = small(Example::Ex1);
        let t = run_replications(&spec, &Pipeline::sis(Method::Rrc), 3).unwrap();
        let json = render_table(std::slice::from_ref(&t), TableFormat::Json);
        assert!(json.contains("\"schema_version\": 1"));
        assert!(json.contains("\"R\": 3"));
        assert_eq!(parse_tables(&json).unwrap(), vec![t.clone()]);
        let csv = render_table(std::slice::from_ref(&t), TableFormat::Csv);
        assert_eq!(csv.lines().next().unwrap().split(',').filter(|c| c.starts_with('X')).count(), 3);
        let ascii = render_table(&[t], TableFormat::Ascii);
        assert!(ascii.lines().nth(2).unwrap().starts_with("RRC-SIS"));
    }
}
