//! Method-by-instance benchmark grid and its reports.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{
    bb_solve, cg_solve, fast_gradient_solve, gradient_optimal_step_solve, gradient_wolfe_solve, BBVariant,
    WolfeParams,
};
use crate::ellipcenter::me_solve;
use crate::error::{Error, Result};
use crate::generators::{self, Family, InstanceMetadata, InstanceSpec};
use crate::operator::LinearOperator;
use crate::problem::QuadraticProblem;
use crate::solve::{write_trace_csv, EpsilonMode, SolveOptions, SolverResult, Termination};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Me,
    Grad,
    Fast,
    BbLong,
    BbShort,
    Cg,
    GradWolfe,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Me,
        Method::Grad,
        Method::Fast,
        Method::BbLong,
        Method::BbShort,
        Method::Cg,
        Method::GradWolfe,
    ];

    /// Everything except gradient with Wolfe search.
    pub const DEFAULT: [Method; 6] = [
        Method::Me,
        Method::Grad,
        Method::Fast,
        Method::BbLong,
        Method::BbShort,
        Method::Cg,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Me => "me",
            Method::Grad => "grad",
            Method::Fast => "fast",
            Method::BbLong => "bb-long",
            Method::BbShort => "bb-short",
            Method::Cg => "cg",
            Method::GradWolfe => "grad-wolfe",
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Method::Me => "ME",
            Method::Grad => "Gradient optimal step",
            Method::Fast => "Fast gradient (Nesterov)",
            Method::BbLong => "Barzilai-Borwein long steps",
            Method::BbShort => "Barzilai-Borwein short steps",
            Method::Cg => "Conjugate gradient",
            Method::GradWolfe => "Gradient Wolfe search",
        }
    }

    pub fn solve(
        &self,
        p: &QuadraticProblem,
        x1: &[f64],
        opts: &SolveOptions,
        wolfe: &WolfeParams,
    ) -> Result<SolverResult> {
        match self {
            Method::Me => me_solve(p, x1, opts),
            Method::Grad => gradient_optimal_step_solve(p, x1, opts),
            Method::Fast => fast_gradient_solve(p, x1, opts),
            Method::BbLong => bb_solve(p, x1, BBVariant::LONG, wolfe, opts),
            Method::BbShort => bb_solve(p, x1, BBVariant::SHORT, wolfe, opts),
            Method::Cg => cg_solve(p, x1, opts),
            Method::GradWolfe => gradient_wolfe_solve(p, x1, wolfe, opts),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InstanceSource {
    Generated(InstanceSpec),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub instances: Vec<InstanceSource>,
    pub methods: Vec<Method>,
    pub epsilon: f64,
    pub epsilon_mode: EpsilonMode,
    pub max_iterations: usize,
    /// Iteration cap for the fast gradient on non-diagonal instances.
    pub fast_cap: Option<usize>,
    pub repetitions: usize,
    pub trace_dir: Option<PathBuf>,
    pub wolfe: WolfeParams,
    pub dependence_tolerance: f64,
}

pub const DEFAULT_FAST_CAP: usize = 1000;

impl Default for BenchConfig {
    fn default() -> Self {
        let opts = SolveOptions::default();
        Self {
            instances: Vec::new(),
            methods: Method::DEFAULT.to_vec(),
            epsilon: opts.epsilon,
            epsilon_mode: opts.epsilon_mode,
            max_iterations: opts.max_iterations,
            fast_cap: Some(DEFAULT_FAST_CAP),
            repetitions: 1,
            trace_dir: None,
            wolfe: WolfeParams::default(),
            dependence_tolerance: opts.dependence_tolerance,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            return Err(Error::Config("at least one instance is required".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("at least one method is required".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        self.wolfe.validate()?;
        self.options(Method::Me, false).validate()
    }

    fn options(&self, method: Method, dense: bool) -> SolveOptions {
        let cap = match (method, dense, self.fast_cap) {
            (Method::Fast, true, Some(c)) => c.min(self.max_iterations),
            _ => self.max_iterations,
        };
        SolveOptions {
            epsilon: self.epsilon,
            epsilon_mode: self.epsilon_mode,
            max_iterations: cap,
            dependence_tolerance: self.dependence_tolerance,
            record_trace: self.trace_dir.is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RowStatus {
    Finished(Termination),
    Error(String),
}

impl fmt::Display for RowStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowStatus::Finished(t) => write!(f, "{t}"),
            RowStatus::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub method: Method,
    pub n: usize,
    pub condition_number: Option<f64>,
    pub cpu_time_seconds: f64,
    pub iterations: usize,
    pub optimal_value: f64,
    pub terminated_by: RowStatus,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn all_converged(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.terminated_by == RowStatus::Finished(Termination::GradientTolerance))
    }

    pub fn rows_for<'a>(&'a self, instance_id: &'a str) -> impl Iterator<Item = &'a BenchRow> + 'a {
        self.rows.iter().filter(move |r| r.instance_id == instance_id)
    }

    pub fn row<'a>(&'a self, instance_id: &'a str, method: Method) -> Option<&'a BenchRow> {
        self.rows_for(instance_id).find(|r| r.method == method)
    }
}

/// A loaded benchmark instance.
#[derive(Debug, Clone)]
pub struct LoadedInstance {
    pub id: String,
    pub problem: QuadraticProblem,
    pub condition_number: Option<f64>,
    pub seed: Option<u64>,
    pub dense: bool,
    pub metadata: Option<InstanceMetadata>,
}

pub fn load_instance(source: &InstanceSource) -> Result<LoadedInstance> {
    match source {
        InstanceSource::Generated(spec) => {
            let inst = generators::generate(spec)?;
            Ok(LoadedInstance {
                id: format!("{}-{}-{}", spec.family.name(), spec.n, spec.seed),
                condition_number: inst.bounds.condition_number(),
                seed: Some(spec.seed),
                dense: spec.family == Family::DenseRankOne,
                problem: inst.problem,
                metadata: Some(inst.metadata),
            })
        }
        InstanceSource::File(path) => {
            let problem = generators::load_problem(path)?;
            let condition_number = match problem.operator() {
                LinearOperator::Dense(_) => None,
                op => op.eigen_bounds()?.condition_number(),
            };
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            Ok(LoadedInstance {
                id,
                condition_number,
                seed: None,
                dense: !matches!(problem.operator(), LinearOperator::Diagonal(_)),
                problem,
                metadata: None,
            })
        }
    }
}

fn trace_path(dir: &Path, method: Method, inst: &LoadedInstance) -> PathBuf {
    let tag = match inst.seed {
        Some(s) => s.to_string(),
        None => inst.id.clone(),
    };
    dir.join(format!("{}_{}_{}.csv", method.name(), inst.problem.dim(), tag))
}

fn run_cell(cfg: &BenchConfig, inst: &LoadedInstance, method: Method) -> BenchRow {
    let opts = cfg.options(method, inst.dense);
    let x1 = vec![0.0; inst.problem.dim()];
    let mut best_time = f64::INFINITY;
    let mut outcome = None;
    for _ in 0..cfg.repetitions {
        match method.solve(&inst.problem, &x1, &opts, &cfg.wolfe) {
            Ok(r) => {
                best_time = best_time.min(r.wall_time_seconds);
                outcome = Some(Ok(r));
            }
            Err(e) => {
                outcome = Some(Err(e));
                break;
            }
        }
    }
    let mut row = BenchRow {
        instance_id: inst.id.clone(),
        method,
        n: inst.problem.dim(),
        condition_number: inst.condition_number,
        cpu_time_seconds: 0.0,
        iterations: 0,
        optimal_value: f64::NAN,
        terminated_by: RowStatus::Error("not run".into()),
        seed: inst.seed,
    };
    match outcome.expect("repetitions >= 1") {
        Ok(r) => {
            if let (Some(dir), Some(trace)) = (&cfg.trace_dir, &r.trace) {
                let written = std::fs::File::create(trace_path(dir, method, inst))
                    .map_err(Error::from)
                    .and_then(|f| write_trace_csv(trace, std::io::BufWriter::new(f)));
                if let Err(e) = written {
                    row.terminated_by = RowStatus::Error(format!("trace: {e}"));
                    return row;
                }
            }
            row.cpu_time_seconds = best_time;
            row.iterations = r.iterations;
            row.optimal_value = r.f_final;
            row.terminated_by = RowStatus::Finished(r.terminated_by);
        }
        Err(e) => row.terminated_by = RowStatus::Error(e.to_string()),
    }
    row
}

/// Solves every (instance, method) cell from `x1 = 0` with a shared stopping
/// rule. Cells may run in parallel; repetitions of one cell run back to back
/// and report the fastest.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport> {
    cfg.validate()?;
    if let Some(dir) = &cfg.trace_dir {
        std::fs::create_dir_all(dir)?;
    }
    let instances = cfg
        .instances
        .iter()
        .map(load_instance)
        .collect::<Result<Vec<_>>>()?;
    let cells: Vec<(&LoadedInstance, Method)> = instances
        .iter()
        .flat_map(|inst| cfg.methods.iter().map(move |m| (inst, *m)))
        .collect();

    #[cfg(feature = "parallel")]
    let rows = {
        use rayon::prelude::*;
        cells.par_iter().map(|(inst, m)| run_cell(cfg, inst, *m)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows = cells.iter().map(|(inst, m)| run_cell(cfg, inst, *m)).collect();

    Ok(BenchReport { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            _ => Err(Error::Config(format!("unknown report format `{s}`"))),
        }
    }
}

pub const CSV_HEADER: [&str; 8] = ["method", "n", "cond", "cpu_s", "iters", "fval", "term", "seed"];

/// Objective value with six significant digits.
pub fn format_fval(v: f64) -> String {
    format!("{v:.5e}")
}

fn cells(row: &BenchRow) -> [String; 8] {
    [
        row.method.name().to_string(),
        row.n.to_string(),
        row.condition_number.map(|c| format!("{c}")).unwrap_or_default(),
        format!("{:.6}", row.cpu_time_seconds),
        row.iterations.to_string(),
        format_fval(row.optimal_value),
        row.terminated_by.to_string(),
        row.seed.map(|s| s.to_string()).unwrap_or_default(),
    ]
}

pub fn write_csv<W: Write>(report: &BenchReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for row in &report.rows {
        w.write_record(cells(row)).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

/// Pipe table with columns Method, n, cond, CPU time, Iterations, Optimal
/// value, then termination and seed. Cell text matches the CSV cells.
pub fn write_markdown<W: Write>(report: &BenchReport, mut out: W) -> Result<()> {
    writeln!(
        out,
        "| Method | n | cond | CPU time (s) | Iterations | Optimal value | Termination | Seed |"
    )?;
    writeln!(out, "|---|---|---|---|---|---|---|---|")?;
    for row in &report.rows {
        let c = cells(row);
        let escaped: Vec<String> = c.iter().map(|s| s.replace('|', "\\|")).collect();
        writeln!(
            out,
            "| {} | {} | {} | {} | {} | {} | {} | {} |",
            escaped[0], escaped[1], escaped[2], escaped[3], escaped[4], escaped[5], escaped[6], escaped[7]
        )?;
    }
    Ok(())
}

pub fn emit_report(report: &BenchReport, format: ReportFormat, path: impl AsRef<Path>) -> Result<()> {
    if report.rows.is_empty() {
        return Err(Error::Config("cannot emit an empty report".into()));
    }
    let file = std::fs::File::create(path)?;
    let out = std::io::BufWriter::new(file);
    match format {
        ReportFormat::Csv => write_csv(report, out),
        ReportFormat::Markdown => write_markdown(report, out),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(method: Method) -> BenchRow {
        BenchRow {
            instance_id: "diag-10-1".into(),
            method,
            n: 10,
            condition_number: Some(50000.0),
            cpu_time_seconds: 0.012345678,
            iterations: 21,
            optimal_value: -1_524_000.123,
            terminated_by: RowStatus::Finished(Termination::GradientTolerance),
            seed: Some(1),
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bfgs".parse::<Method>().is_err());
        assert!(!Method::DEFAULT.contains(&Method::GradWolfe));
    }

    #[test]
    fn one_row_csv() {
        let mut buf = Vec::new();
        write_csv(&BenchReport { rows: vec![row(Method::Me)] }, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "method,n,cond,cpu_s,iters,fval,term,seed");
        assert_eq!(lines[1], "me,10,50000,0.012346,21,-1.52400e6,GradientTolerance,1");
    }

    #[test]
    fn empty_config_is_rejected() {
        let mut cfg = BenchConfig {
            instances: vec![InstanceSource::Generated(InstanceSpec::diagonal(10, 1))],
            ..BenchConfig::default()
        };
        cfg.methods.clear();
        assert!(matches!(run_benchmark(&cfg), Err(Error::Config(_))));
        let cfg = BenchConfig::default();
        assert!(matches!(run_benchmark(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn empty_report_is_not_emitted() {
        let dir = tempfile::tempdir().unwrap();
        assert!(emit_report(&BenchReport::default(), ReportFormat::Csv, dir.path().join("r.csv")).is_err());
    }

    #[test]
    fn fast_cap_only_on_dense() {
        let cfg = BenchConfig::default();
        assert_eq!(cfg.options(Method::Fast, true).max_iterations, DEFAULT_FAST_CAP);
        assert_eq!(cfg.options(Method::Fast, false).max_iterations, cfg.max_iterations);
        assert_eq!(cfg.options(Method::Me, true).max_iterations, cfg.max_iterations);
    }
}
