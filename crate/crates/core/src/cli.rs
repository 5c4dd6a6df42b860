//! Command-line front end: `screen`, `isis`, `simulate`, `benchmark`, `el-eval`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
//! Every report starts with the resolved configuration; JSON reports carry it
//! under `config` next to `schema_version`.

use crate::bench::{render_table, run_replications, BasisChoice, Pipeline, TableFormat, SCHEMA_VERSION};
use crate::dataset::Dataset;
use crate::el::{el_ratio_at_mean, ElConfig};
use crate::error::Error;
use crate::estimating::{marginal_el_stats_ee, QifEstimatingFunction};
use crate::io::{parse_dataset, read_column, read_dataset, write_dataset, write_longitudinal, CsvLayout, LoadedData};
use crate::iterative::{el_isis, IsisConfig, ProfileKind};
use crate::scad::{ScadConfig, TuningCriterion};
use crate::screening::{build_report, default_top_d, screen, Family, Method, ScreeningReport, SelectionRule};
use crate::simgen::{generate, ErrorDist, Example, SimData, SimulationSpec};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "elsis", version, about = "Marginal empirical-likelihood feature screening")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Rank features of a CSV dataset by a marginal statistic.
    Screen(ScreenArgs),
    /// Iterative EL screening with SCAD pruning.
    Isis(IsisArgs),
    /// Write one replication of a simulation design as CSV.
    Simulate(SimulateArgs),
    /// Run a pipeline over replications of a design and tabulate selection counts.
    Benchmark(BenchmarkArgs),
    /// EL ratio of a single numeric column at a hypothesized mean.
    ElEval(ElEvalArgs),
}

#[derive(Args, Debug, Clone)]
struct ElArgs {
    /// Dual residual tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
    /// Dual solver iteration cap.
    #[arg(long, default_value_t = 100)]
    max_newton: usize,
    /// Smallest admissible 1 + lambda'g_i.
    #[arg(long, default_value_t = 1e-12)]
    boundary_margin: f64,
}

impl ElArgs {
    fn config(&self) -> ElConfig {
        ElConfig { dual_tolerance: self.tolerance, max_iterations: self.max_newton, boundary_margin: self.boundary_margin }
    }
}

#[derive(Args, Debug)]
struct InputArgs {
    /// CSV file with a header row.
    #[arg(long)]
    input: PathBuf,
    /// Name of the response column.
    #[arg(long, default_value = "y")]
    response: String,
    /// Subject-id column; makes the data longitudinal.
    #[arg(long)]
    subject: Option<String>,
    /// Time column ordering measurements within a subject.
    #[arg(long)]
    time: Option<String>,
}

impl InputArgs {
    fn layout(&self) -> CsvLayout {
        CsvLayout { response: self.response.clone(), subject: self.subject.clone(), time: self.time.clone() }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum MethodArg {
    El,
    Ls,
    Rrc,
    Glm,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::El => Method::El,
            MethodArg::Ls => Method::Ls,
            MethodArg::Rrc => Method::Rrc,
            MethodArg::Glm => Method::Glm,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FamilyArg {
    Gaussian,
    Binomial,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Gaussian => Family::Gaussian,
            FamilyArg::Binomial => Family::Binomial,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BasisArg {
    /// `{I}`
    I,
    /// `{I, adjacency}`
    IAr1,
    /// One indicator per measurement time.
    Time,
}

impl From<BasisArg> for BasisChoice {
    fn from(b: BasisArg) -> BasisChoice {
        match b {
            BasisArg::I => BasisChoice::Identity,
            BasisArg::IAr1 => BasisChoice::IdentityAr1,
            BasisArg::Time => BasisChoice::TimeIndicators,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum CriterionArg {
    Bic,
    Ebic,
}

#[derive(Args, Debug)]
struct ScreenArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "el")]
    method: MethodArg,
    /// Family of the GLM baseline (binomial reads the raw 0/1 response).
    #[arg(long, value_enum, default_value = "gaussian")]
    family: FamilyArg,
    /// Keep the D top-ranked features (default floor(n / (2 ln n))).
    #[arg(long, conflicts_with = "threshold")]
    top_d: Option<usize>,
    /// Keep features with statistic >= G.
    #[arg(long)]
    threshold: Option<f64>,
    /// Basis matrices for longitudinal EL screening.
    #[arg(long, value_enum, default_value = "i-ar1")]
    basis: BasisArg,
    #[command(flatten)]
    el: ElArgs,
    /// Also write the JSON report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(Args, Debug)]
struct IsisArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "gaussian")]
    family: FamilyArg,
    /// Features recruited per iteration (default floor(n / (2 ln n))).
    #[arg(long)]
    per_step: Option<usize>,
    /// Cap on the active set (default floor(n / ln n)).
    #[arg(long)]
    max_active: Option<usize>,
    #[arg(long, default_value_t = 5)]
    max_iterations: usize,
    #[arg(long, default_value_t = 3.7)]
    scad_a: f64,
    #[arg(long, value_enum, default_value = "ebic")]
    criterion: CriterionArg,
    #[arg(long, default_value_t = 1.0)]
    ebic_gamma: f64,
    /// Conditional statistic: regression residual moments or profiled means.
    #[arg(long, value_enum, default_value = "regression")]
    profile: ProfileArg,
    #[command(flatten)]
    el: ElArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: ReportFormat,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum ProfileArg {
    Regression,
    MeanShift,
}

#[derive(Args, Debug, Clone)]
struct DesignArgs {
    /// Design number 1..5.
    #[arg(long)]
    example: u32,
    /// Sample size (subjects for example 4); default per example.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    p: usize,
    #[arg(long, default_value_t = 4)]
    m: usize,
    /// Within-subject error correlation (example 4).
    #[arg(long, default_value_t = 0.8)]
    rho: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

impl DesignArgs {
    fn spec(&self, c: f64, error: ErrorDist) -> Result<SimulationSpec, Error> {
        let example = Example::from_number(self.example)?;
        let n = self.n.unwrap_or(match example {
            Example::Ex1 | Example::Ex2 => 100,
            Example::Ex3 => 70,
            Example::Ex4 => 60,
            Example::Ex5 => 400,
        });
        let spec = SimulationSpec { c, error_dist: error, m: self.m, ar1_rho: self.rho, ..SimulationSpec::new(example, n, self.p, self.seed) };
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    /// `normal:SD` or `t4`.
    #[arg(long, default_value = "normal:1", value_parser = parse_error_dist)]
    error: ErrorDist,
    /// Replication index (stream); benchmarks use 1..R.
    #[arg(long, default_value_t = 1)]
    replication: u64,
    /// Output CSV (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum BenchMethod {
    El,
    Ls,
    Rrc,
    Glm,
    ElIsis,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum TableArg {
    Csv,
    Json,
    Ascii,
}

#[derive(Args, Debug)]
struct BenchmarkArgs {
    #[command(flatten)]
    design: DesignArgs,
    #[arg(long)]
    reps: usize,
    /// Comma-separated methods; one table row each.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "el")]
    method: Vec<BenchMethod>,
    /// Comma-separated error laws (`normal:SD`, `t4`).
    #[arg(long, value_delimiter = ',', default_value = "normal:1", value_parser = parse_error_dist)]
    error: Vec<ErrorDist>,
    /// Comma-separated signal multipliers.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    c: Vec<f64>,
    /// Screening size, also the per-iteration recruit size of el-isis.
    #[arg(long)]
    top_d: Option<usize>,
    /// Prune each screened set with SCAD.
    #[arg(long)]
    scad: bool,
    /// Penalty-level criterion for SCAD steps (default: bic after screening, ebic in el-isis).
    #[arg(long, value_enum)]
    criterion: Option<CriterionArg>,
    #[arg(long, default_value_t = 1.0)]
    ebic_gamma: f64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "i-ar1")]
    basis: Vec<BasisArg>,
    #[command(flatten)]
    el: ElArgs,
    #[arg(long, value_enum, default_value = "ascii")]
    format: TableArg,
    /// Record wall-clock time per table (makes reruns differ).
    #[arg(long)]
    timing: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ElEvalArgs {
    /// CSV file; the column is read by name or the first column is used.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    column: Option<String>,
    #[arg(long)]
    mu: f64,
    #[command(flatten)]
    el: ElArgs,
    /// Print the full solution as JSON.
    #[arg(long)]
    json: bool,
}

fn parse_error_dist(s: &str) -> Result<ErrorDist, String> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("t4") {
        return Ok(ErrorDist::T4);
    }
    match s.split_once(':') {
        Some((k, sd)) if k.eq_ignore_ascii_case("normal") => {
            let sd: f64 = sd.parse().map_err(|_| format!("bad standard deviation in {s:?}"))?;
            if sd >= 0.0 && sd.is_finite() {
                Ok(ErrorDist::Normal { sd })
            } else {
                Err(format!("standard deviation must be finite and >= 0 in {s:?}"))
            }
        }
        _ if s.eq_ignore_ascii_case("normal") => Ok(ErrorDist::Normal { sd: 1.0 }),
        _ => Err(format!("expected normal:SD or t4, got {s:?}")),
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::MissingColumn(_)
        | Error::NonNumericCell { .. }
        | Error::RaggedRow { .. }
        | Error::Io(_)
        | Error::ConstantColumn(_)
        | Error::DimensionMismatch(_) => EXIT_DATA,
        Error::DegenerateInput(_)
        | Error::DomainViolation { .. }
        | Error::InvalidCovariance(_)
        | Error::Separation(_)
        | Error::NonConvergence(_) => EXIT_NUMERIC,
    }
}

/// Parses `args` (including the program name), runs the command and returns the
/// exit code. Output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    if let Some(t) = cli.threads {
        if t == 0 {
            let _ = writeln!(err, "error: --threads must be >= 1");
            return EXIT_USAGE;
        }
        // A second call in the same process (tests) fails harmlessly.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let result = match &cli.command {
        Command::Screen(a) => cmd_screen(a, cli.threads, out),
        Command::Isis(a) => cmd_isis(a, cli.threads, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Benchmark(a) => cmd_benchmark(a, cli.threads, out),
        Command::ElEval(a) => cmd_el_eval(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn write_file(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn json_text<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

/// `# key: value` header lines from a JSON object.
fn config_header(config: &serde_json::Value) -> String {
    let mut s = String::new();
    if let Some(obj) = config.as_object() {
        for (k, v) in obj {
            s.push_str(&format!("# {k}: {v}\n"));
        }
    }
    s
}

fn names_of(names: &[String], idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&j| names[j].clone()).collect()
}

fn screening_text(report: &ScreeningReport, names: &[String]) -> String {
    let mut s = String::new();
    s.push_str(&format!("selected {} of {} features\n", report.selected.len(), report.p));
    s.push_str("rank  feature  statistic  tie_break\n");
    for &j in &report.selected {
        let st = &report.stats[j];
        let value = st.statistic.map(|v| v.to_string()).unwrap_or_else(|| "undefined".into());
        s.push_str(&format!("{:>4}  {}  {}  {:.6}\n", st.rank, names[j], value, st.tie_break));
    }
    if !report.unrankable.is_empty() {
        s.push_str(&format!("unrankable: {}\n", names_of(names, &report.unrankable).join(", ")));
    }
    s
}

fn cmd_screen(a: &ScreenArgs, threads: Option<usize>, out: &mut dyn Write) -> Result<(), Error> {
    let el = a.el.config();
    el.validate()?;
    let method: Method = a.method.into();
    let family: Family = a.family.into();
    let data = read_dataset(&a.input.input, &a.input.layout())?;
    let (n, p, names) = match &data {
        LoadedData::CrossSection(d) => (d.n(), d.p(), d.feature_names.clone()),
        LoadedData::Longitudinal(d) => (d.n(), d.p(), d.feature_names.clone()),
    };
    let rule = match (a.top_d, a.threshold) {
        (_, Some(g)) => SelectionRule::Threshold(g),
        (Some(d), None) => SelectionRule::TopD(d),
        (None, None) => SelectionRule::TopD(default_top_d(n).min(p)),
    };
    let basis: BasisChoice = a.basis.into();
    let report = match &data {
        LoadedData::CrossSection(d) => screen(&d.standardize()?, method, rule, family, &el)?,
        LoadedData::Longitudinal(d) if method == Method::El => {
            let m = d
                .common_m()
                .ok_or_else(|| Error::DimensionMismatch("QIF bases need the same number of measurements per subject".into()))?;
            let ef = QifEstimatingFunction { bases: basis.build(m)? };
            build_report(marginal_el_stats_ee(d, &ef, &el)?, method, rule, n)?
        }
        LoadedData::Longitudinal(d) => screen(&d.flatten()?.standardize()?, method, rule, family, &el)?,
    };
    let longitudinal = matches!(data, LoadedData::Longitudinal(_));
    let config = json!({
        "command": "screen",
        "input": a.input.input.display().to_string(),
        "response": a.input.response,
        "subject": a.input.subject,
        "time": a.input.time,
        "method": method,
        "family": family,
        "selection_rule": rule,
        "basis": if longitudinal && method == Method::El { Some(basis) } else { None },
        "el": el,
        "threads": threads,
    });
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "selected_names": names_of(&names, &report.selected),
        "report": report,
    });
    let json = json_text(&doc);
    if let Some(path) = &a.out {
        write_file(path, &json)?;
    }
    let text = match a.format {
        ReportFormat::Json => json,
        ReportFormat::Text => config_header(&config) + &screening_text(&report, &names),
    };
    out.write_all(text.as_bytes()).map_err(io_err)
}

fn cmd_isis(a: &IsisArgs, threads: Option<usize>, out: &mut dyn Write) -> Result<(), Error> {
    let LoadedData::CrossSection(data) = read_dataset(&a.input.input, &a.input.layout())? else {
        return Err(Error::InvalidArgument("isis needs cross-sectional data (drop --subject)".into()));
    };
    let config = IsisConfig {
        per_step_recruit: a.per_step,
        max_active: a.max_active,
        max_iterations: a.max_iterations,
        family: a.family.into(),
        scad_a: a.scad_a,
        tuning_grid: Vec::new(),
        criterion: match a.criterion {
            CriterionArg::Bic => TuningCriterion::Bic,
            CriterionArg::Ebic => TuningCriterion::Ebic { gamma: a.ebic_gamma },
        },
        profile: match a.profile {
            ProfileArg::Regression => ProfileKind::Regression,
            ProfileArg::MeanShift => ProfileKind::MeanShift,
        },
        el: a.el.config(),
    };
    let (d, cap) = config.resolve(data.n())?;
    let resolved = IsisConfig { per_step_recruit: Some(d), max_active: Some(cap), ..config };
    let report = el_isis(&data.standardize()?, &resolved)?;
    let names = &data.feature_names;
    let header = json!({
        "command": "isis",
        "input": a.input.input.display().to_string(),
        "response": a.input.response,
        "isis": resolved,
        "threads": threads,
    });
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "config": header,
        "selected_names": names_of(names, &report.screening.selected),
        "report": report,
    });
    let json = json_text(&doc);
    if let Some(path) = &a.out {
        write_file(path, &json)?;
    }
    let text = match a.format {
        ReportFormat::Json => json,
        ReportFormat::Text => {
            let mut s = config_header(&header);
            s.push_str(&format!("# ranking: {}\n", report.ranking_direction));
            for step in &report.trace {
                s.push_str(&format!(
                    "iteration {}: recruited [{}] -> active [{}]\n",
                    step.iteration,
                    names_of(names, &step.recruited).join(", "),
                    names_of(names, &step.active).join(", ")
                ));
                if !step.dropped_active.is_empty() {
                    s.push_str(&format!("  dropped (degenerate): {}\n", names_of(names, &step.dropped_active).join(", ")));
                }
            }
            if report.forced_restart {
                s.push_str("first SCAD step selected nothing; marginal top features forced active\n");
            }
            s.push_str(&format!("stop: {:?}\n", report.stop_reason));
            s.push_str(&format!("selected: {}\n", names_of(names, &report.screening.selected).join(", ")));
            s
        }
    };
    out.write_all(text.as_bytes()).map_err(io_err)
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), Error> {
    let spec = a.design.spec(a.c, a.error)?;
    let data = generate(&spec, a.replication)?;
    let mut buf = Vec::new();
    match &data {
        SimData::CrossSection(d) => write_dataset(&mut buf, d)?,
        SimData::Longitudinal(d) => write_longitudinal(&mut buf, d)?,
    }
    match &a.out {
        Some(path) => std::fs::write(path, &buf).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => out.write_all(&buf).map_err(io_err),
    }
}

fn cmd_benchmark(a: &BenchmarkArgs, threads: Option<usize>, out: &mut dyn Write) -> Result<(), Error> {
    if a.reps == 0 {
        return Err(Error::InvalidArgument("--reps must be >= 1".into()));
    }
    let el = a.el.config();
    el.validate()?;
    let mut tables = Vec::new();
    for &c in &a.c {
        for &error in &a.error {
            let spec = a.design.spec(c, error)?;
            for &m in &a.method {
                let bases: Vec<BasisArg> =
                    if spec.example.is_longitudinal() && m == BenchMethod::El { a.basis.clone() } else { vec![a.basis[0]] };
                for basis in bases {
                    let pipeline = bench_pipeline(a, m, basis, el);
                    let start = Instant::now();
                    let mut table = run_replications(&spec, &pipeline, a.reps)?;
                    if a.timing {
                        table.wall_time = Some(start.elapsed().as_secs_f64());
                    }
                    tables.push(table);
                }
            }
        }
    }
    let format = match a.format {
        TableArg::Csv => TableFormat::Csv,
        TableArg::Json => TableFormat::Json,
        TableArg::Ascii => TableFormat::Ascii,
    };
    let body = render_table(&tables, format);
    let text = if format == TableFormat::Json {
        body
    } else {
        let header = json!({
            "command": "benchmark",
            "example": a.design.example,
            "n": tables.first().map(|t| t.spec.n),
            "p": a.design.p,
            "reps": a.reps,
            "seed": a.design.seed,
            "top_d": tables.first().and_then(|t| t.pipeline.rule),
            "el": el,
            "threads": threads,
        });
        config_header(&header) + &body
    };
    match &a.out {
        Some(path) => write_file(path, &text),
        None => out.write_all(text.as_bytes()).map_err(io_err),
    }
}

fn bench_pipeline(a: &BenchmarkArgs, m: BenchMethod, basis: BasisArg, el: ElConfig) -> Pipeline {
    let rule = a.top_d.map(SelectionRule::TopD);
    let criterion = |default: TuningCriterion| match a.criterion {
        None => default,
        Some(CriterionArg::Bic) => TuningCriterion::Bic,
        Some(CriterionArg::Ebic) => TuningCriterion::Ebic { gamma: a.ebic_gamma },
    };
    let method = match m {
        BenchMethod::El | BenchMethod::ElIsis => Method::El,
        BenchMethod::Ls => Method::Ls,
        BenchMethod::Rrc => Method::Rrc,
        BenchMethod::Glm => Method::Glm,
    };
    let isis = (m == BenchMethod::ElIsis).then(|| IsisConfig {
        per_step_recruit: a.top_d,
        criterion: criterion(TuningCriterion::Ebic { gamma: 1.0 }),
        el,
        ..IsisConfig::default()
    });
    let post_scad = (a.scad && isis.is_none())
        .then(|| ScadConfig { criterion: criterion(TuningCriterion::Bic), ..ScadConfig::default() });
    Pipeline { method, rule, family: None, post_scad, isis, bases: basis.into(), el }
}

fn cmd_el_eval(a: &ElEvalArgs, out: &mut dyn Write) -> Result<(), Error> {
    let el = a.el.config();
    el.validate()?;
    let f = std::fs::File::open(&a.input).map_err(|e| Error::Io(format!("{}: {e}", a.input.display())))?;
    let values = read_column(std::io::BufReader::new(f), a.column.as_deref())?;
    let sol = el_ratio_at_mean(&values, a.mu, &el)?;
    let text = if a.json {
        json_text(&json!({
            "schema_version": SCHEMA_VERSION,
            "config": { "command": "el-eval", "input": a.input.display().to_string(), "column": a.column, "mu": a.mu, "el": el },
            "solution": sol,
        }))
    } else {
        format!("{}\n", sol.log_ratio)
    };
    out.write_all(text.as_bytes()).map_err(io_err)
}

/// Reads a cross-sectional dataset from CSV text (convenience for bindings).
pub fn dataset_from_csv(text: &str, response: &str) -> Result<Dataset, Error> {
    match parse_dataset(text.as_bytes(), &CsvLayout::new(response))? {
        LoadedData::CrossSection(d) => Ok(d),
        LoadedData::Longitudinal(_) => unreachable!("no subject column requested"),
    }
}
