use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ellipcenter::baselines::WolfeParams;
use ellipcenter::bench::{self, BenchConfig, InstanceSource, Method, ReportFormat};
use ellipcenter::generators::{self, InstanceSpec};
use ellipcenter::solve::write_trace_csv;
use ellipcenter::{EpsilonMode, SolveOptions, Termination};

#[derive(Parser)]
#[command(name = "ellip", version, about = "Method of ellipcenters and baseline solvers for quadratics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a method x instance grid and write a report.
    Bench(BenchArgs),
    /// Solve one instance with one method.
    Solve(SolveArgs),
    /// Write a generated instance to the text problem format.
    Gen(GenArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EpsMode {
    Abs,
    Rel,
}

impl From<EpsMode> for EpsilonMode {
    fn from(m: EpsMode) -> Self {
        match m {
            EpsMode::Abs => EpsilonMode::Absolute,
            EpsMode::Rel => EpsilonMode::RelativeToInitial,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Markdown,
}

#[derive(Args)]
struct InstanceArgs {
    /// `diag`, `dense` or `file:PATH`; repeatable.
    #[arg(long = "instance", default_value = "diag")]
    instances: Vec<String>,
    /// Dimensions for generated instances; repeatable or comma separated.
    #[arg(long = "n", value_delimiter = ',', default_value = "1000")]
    dims: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = generators::DEFAULT_B_SCALE)]
    b_scale: f64,
}

impl InstanceArgs {
    fn sources(&self) -> Result<Vec<InstanceSource>> {
        let mut out = Vec::new();
        for inst in &self.instances {
            if let Some(path) = inst.strip_prefix("file:") {
                out.push(InstanceSource::File(PathBuf::from(path)));
                continue;
            }
            for &n in &self.dims {
                let spec = match inst.as_str() {
                    "diag" => InstanceSpec::diagonal(n, self.seed),
                    "dense" => InstanceSpec::dense_rank_one(n, self.seed),
                    other => bail!("unknown instance `{other}`, expected diag, dense or file:PATH"),
                };
                out.push(InstanceSource::Generated(spec.with_b_scale(self.b_scale)));
            }
        }
        Ok(out)
    }
}

#[derive(Args)]
struct StopArgs {
    #[arg(long, default_value_t = 1e-8)]
    eps: f64,
    #[arg(long, value_enum, default_value = "rel")]
    eps_mode: EpsMode,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    stop: StopArgs,
    /// Comma separated; defaults to every method except grad-wolfe.
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Fast-gradient iteration cap on non-diagonal instances; 0 disables it.
    #[arg(long, default_value_t = bench::DEFAULT_FAST_CAP)]
    fast_cap: usize,
    #[arg(long, default_value_t = 1)]
    reps: usize,
    /// Report path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    trace_dir: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[command(flatten)]
    stop: StopArgs,
    #[arg(long, default_value = "me")]
    method: String,
    /// Write the per-iteration trace CSV here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long)]
    out: PathBuf,
    /// Append instance metadata as JSON lines.
    #[arg(long)]
    meta: Option<PathBuf>,
}

fn parse_methods(names: &[String]) -> Result<Vec<Method>> {
    if names.is_empty() {
        return Ok(Method::DEFAULT.to_vec());
    }
    names
        .iter()
        .map(|s| s.trim().parse::<Method>().map_err(Into::into))
        .collect()
}

fn run_bench(args: BenchArgs) -> Result<bool> {
    let cfg = BenchConfig {
        instances: args.instance.sources()?,
        methods: parse_methods(&args.methods)?,
        epsilon: args.stop.eps,
        epsilon_mode: args.stop.eps_mode.into(),
        max_iterations: args.stop.max_iters,
        fast_cap: (args.fast_cap > 0).then_some(args.fast_cap),
        repetitions: args.reps,
        trace_dir: args.trace_dir,
        wolfe: WolfeParams::default(),
        dependence_tolerance: SolveOptions::default().dependence_tolerance,
    };
    let report = bench::run_benchmark(&cfg)?;
    let format = match args.format {
        Format::Csv => ReportFormat::Csv,
        Format::Markdown => ReportFormat::Markdown,
    };
    match &args.out {
        Some(path) => bench::emit_report(&report, format, path)
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => {
            let stdout = std::io::stdout().lock();
            match format {
                ReportFormat::Csv => bench::write_csv(&report, stdout)?,
                ReportFormat::Markdown => bench::write_markdown(&report, stdout)?,
            }
        }
    }
    Ok(report.all_converged())
}

fn run_solve(args: SolveArgs) -> Result<bool> {
    let sources = args.instance.sources()?;
    let [source] = sources.as_slice() else {
        bail!("solve takes exactly one instance and one dimension");
    };
    let method: Method = args.method.parse()?;
    let inst = bench::load_instance(source)?;
    let opts = SolveOptions {
        epsilon: args.stop.eps,
        epsilon_mode: args.stop.eps_mode.into(),
        max_iterations: args.stop.max_iters,
        record_trace: args.trace.is_some(),
        ..SolveOptions::default()
    };
    let x1 = vec![0.0; inst.problem.dim()];
    let r = method.solve(&inst.problem, &x1, &opts, &WolfeParams::default())?;
    if let (Some(path), Some(trace)) = (&args.trace, &r.trace) {
        let file = std::fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
        write_trace_csv(trace, std::io::BufWriter::new(file))?;
    }
    let mut out = std::io::stdout().lock();
    writeln!(out, "instance   {}", inst.id)?;
    writeln!(out, "method     {method}")?;
    writeln!(out, "iterations {}", r.iterations)?;
    writeln!(out, "f_final    {:.16e}", r.f_final)?;
    writeln!(out, "grad_norm  {:.6e}", r.grad_norm_final)?;
    writeln!(out, "epsilon    {:.6e}", r.epsilon_effective)?;
    writeln!(out, "time_s     {:.6}", r.wall_time_seconds)?;
    writeln!(out, "term       {}", r.terminated_by)?;
    Ok(r.terminated_by == Termination::GradientTolerance)
}

fn run_gen(args: GenArgs) -> Result<bool> {
    let sources = args.instance.sources()?;
    let [InstanceSource::Generated(spec)] = sources.as_slice() else {
        bail!("gen takes exactly one generated instance and one dimension");
    };
    let inst = generators::generate(spec)?;
    ellipcenter::io::save_problem(&inst.problem, &args.out)?;
    if let Some(meta) = &args.meta {
        let file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(meta)
            .with_context(|| format!("opening {}", meta.display()))?;
        generators::write_metadata_jsonl(&[inst.metadata], file)?;
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench(a) => run_bench(a),
        Command::Solve(a) => run_solve(a),
        Command::Gen(a) => run_gen(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
