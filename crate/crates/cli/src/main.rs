//! `pflow`: generate planted problems, solve them, certify solutions and run
//! experiment grids.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use pflow_core::certify::{certify_solution, Verdict};
use pflow_core::harness::io::{load_problem, load_solution, save_problem, save_solution};
use pflow_core::harness::{
    gen_problem, run_convergence, run_pf_vs_iht, run_phase_transition, write_curves_csv,
    write_phase_csv, write_records_csv, ExperimentKind, ExperimentSpec, PlantedProblem,
    ProblemParams,
};
use pflow_core::linalg::io::save_mat;
use pflow_core::sensing::EnsembleKind;
use pflow_core::solver::{iht_baseline, procrustes_flow, InitSchedule, Mode, SolveTrace, SolverConfig};
use serde_json::json;

/// Environment variable holding the worker thread count.
const THREADS_ENV: &str = "PFLOW_THREADS";

#[derive(Parser)]
#[command(name = "pflow", version, about = "Low-rank matrix recovery by Procrustes Flow")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a planted problem directory.
    Gen {
        #[command(flatten)]
        problem: GenArgs,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Store every sensing matrix instead of the seed only.
        #[arg(long)]
        full: bool,
    },
    /// Run PF/RPF on a problem.
    Solve(SolveArgs),
    /// Run the iterative hard thresholding baseline on a problem.
    Iht(IhtArgs),
    /// Check a solution against its problem; prints a JSON verdict list.
    Certify {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Run an experiment grid from a JSON spec.
    Bench {
        kind: BenchKind,
        #[arg(long)]
        spec: PathBuf,
        /// Output directory; overrides `output` in the spec.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchKind {
    Convergence,
    Phase,
    Compare,
}

impl BenchKind {
    fn experiment(self) -> ExperimentKind {
        match self {
            BenchKind::Convergence => ExperimentKind::Convergence,
            BenchKind::Phase => ExperimentKind::PhaseTransition,
            BenchKind::Compare => ExperimentKind::PfVsIht,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EnsembleArg {
    Gaussian,
    Spiked,
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long, default_value = "psd")]
    mode: Mode,
    #[arg(long)]
    n1: usize,
    /// Defaults to `n1`.
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    r: usize,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    #[arg(long, default_value_t = 1.0)]
    sigma1: f64,
    #[arg(long)]
    m: usize,
    /// Defaults to spiked in PSD mode and gaussian otherwise.
    #[arg(long)]
    ensemble: Option<EnsembleArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GenArgs {
    fn params(&self) -> ProblemParams {
        ProblemParams {
            n1: self.n1,
            n2: self.n2.unwrap_or(self.n1),
            r: self.r,
            kappa: self.kappa,
            sigma1: self.sigma1,
            m: self.m,
            ensemble: self.ensemble.map(|e| match e {
                EnsembleArg::Gaussian => EnsembleKind::Gaussian,
                EnsembleArg::Spiked => EnsembleKind::SpikedGaussian,
            }),
            mode: self.mode,
            seed: self.seed,
        }
    }
}

/// A problem read from disk, or generated from `--n1 … --seed`.
#[derive(Args)]
struct ProblemSource {
    /// Problem directory written by `gen`.
    #[arg(long, conflicts_with_all = ["n1", "n2", "m", "kappa", "sigma1", "ensemble", "seed"])]
    problem: Option<PathBuf>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    sigma1: Option<f64>,
    #[arg(long)]
    ensemble: Option<EnsembleArg>,
    /// Seed of a generated problem.
    #[arg(long)]
    seed: Option<u64>,
}

impl ProblemSource {
    fn load(&self, mode: Mode, r: usize) -> Result<PlantedProblem> {
        if let Some(dir) = &self.problem {
            let p = load_problem(dir).with_context(|| format!("loading problem from {}", dir.display()))?;
            if p.params.mode != mode {
                bail!("problem is {} but --mode is {}", p.params.mode.name(), mode.name());
            }
            return Ok(p);
        }
        let (Some(n1), Some(m)) = (self.n1, self.m) else {
            bail!("pass --problem DIR or at least --n1 and --m");
        };
        let args = GenArgs {
            mode,
            n1,
            n2: self.n2,
            r,
            kappa: self.kappa.unwrap_or(1.0),
            sigma1: self.sigma1.unwrap_or(1.0),
            m,
            ensemble: self.ensemble,
            seed: self.seed.unwrap_or(0),
        };
        Ok(gen_problem(&args.params())?)
    }
}

fn parse_t_init(s: &str) -> Result<InitSchedule, String> {
    match s {
        "auto" => Ok(InitSchedule::Auto),
        "theory" => Ok(InitSchedule::Theory),
        n => n
            .parse()
            .map(InitSchedule::Fixed)
            .map_err(|_| format!("expected a step count, auto or theory; got {n:?}")),
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    source: ProblemSource,
    #[arg(long, default_value = "psd")]
    mode: Mode,
    #[arg(long)]
    r: usize,
    /// Gradient step scale; defaults to 36/425 (psd) or 2/187 (rect).
    #[arg(long)]
    mu: Option<f64>,
    /// Projected-gradient step; defaults to the calibrated value.
    #[arg(long)]
    alpha: Option<f64>,
    /// Initialization steps: a count, `auto` or `theory`.
    #[arg(long, default_value = "theory", value_parser = parse_t_init)]
    t_init: InitSchedule,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Relative residual at which gradient descent stops.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Per-iteration trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Solution directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IhtArgs {
    #[command(flatten)]
    source: ProblemSource,
    #[arg(long, default_value = "psd")]
    mode: Mode,
    #[arg(long)]
    r: usize,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    /// Stop once the relative error to the planted matrix is at most this.
    #[arg(long)]
    target_error: Option<f64>,
    #[arg(long)]
    trace: Option<PathBuf>,
    /// File for the recovered matrix.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .with_context(|| format!("{THREADS_ENV} must be a thread count, got {value:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn write_trace(path: Option<&Path>, trace: &SolveTrace) -> Result<()> {
    if let Some(path) = path {
        trace.save_csv(path).with_context(|| format!("writing trace to {}", path.display()))?;
    }
    Ok(())
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn solve(args: &SolveArgs) -> Result<()> {
    let p = args.source.load(args.mode, args.r)?;
    let cfg = SolverConfig {
        r: args.r,
        mode: args.mode,
        alpha: args.alpha,
        mu: args.mu,
        t_init: args.t_init,
        max_gd_iters: args.max_iters,
        residual_tol: args.tol,
        ..SolverConfig::default()
    };
    let sol = procrustes_flow(&p.op, &p.b, &cfg, Some(&p.truth_factors))?;
    write_trace(args.trace.as_deref(), &sol.trace)?;
    if let Some(dir) = &args.out {
        save_solution(dir, &sol)?;
    }
    print_json(&json!({
        "mode": args.mode,
        "converged": sol.converged,
        "relative_residual": sol.relative_residual,
        "relative_error": p.relative_error(&sol.m_hat),
        "init_steps": sol.trace.init_steps,
        "init_completed": sol.trace.init_completed,
        "gd_iterations": sol.trace.gd_iterations(),
        "svd_count": sol.trace.svd_count,
    }))
}

fn iht(args: &IhtArgs) -> Result<()> {
    let p = args.source.load(args.mode, args.r)?;
    let cfg = SolverConfig {
        r: args.r,
        mode: args.mode,
        alpha: args.alpha,
        target_error: args.target_error,
        ..SolverConfig::default()
    };
    let (m_hat, trace) = iht_baseline(&p.op, &p.b, &cfg, args.iters, Some(&p.truth_m))?;
    write_trace(args.trace.as_deref(), &trace)?;
    if let Some(path) = &args.out {
        save_mat(path, &m_hat)?;
    }
    print_json(&json!({
        "mode": args.mode,
        "relative_error": p.relative_error(&m_hat),
        "iterations": trace.svd_count,
        "svd_count": trace.svd_count,
    }))
}

/// Returns whether every report passed or was skipped.
fn certify(problem: &Path, solution: &Path) -> Result<bool> {
    let p = load_problem(problem).with_context(|| format!("loading problem from {}", problem.display()))?;
    let (factors, _) =
        load_solution(solution).with_context(|| format!("loading solution from {}", solution.display()))?;
    let reports = certify_solution(&p.op, &p.b, &factors, &p.truth_factors)?;
    println!("{}", serde_json::to_string_pretty(&reports)?);
    Ok(reports.iter().all(|r| r.verdict != Verdict::Fail))
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn bench(kind: BenchKind, spec_path: &Path, out: Option<&Path>) -> Result<()> {
    let text = fs::read_to_string(spec_path).with_context(|| format!("reading {}", spec_path.display()))?;
    let spec: ExperimentSpec = serde_json::from_str(&text).context("parsing the experiment spec")?;
    if spec.kind != kind.experiment() {
        bail!("spec kind is {:?}, but the subcommand expects {:?}", spec.kind, kind.experiment());
    }
    let dir = out
        .map(Path::to_path_buf)
        .or_else(|| spec.output.clone())
        .context("no output directory: pass --out or set output in the spec")?;
    fs::create_dir_all(&dir)?;
    let records = match kind {
        BenchKind::Convergence => {
            let res = run_convergence(&spec)?;
            write_curves_csv(create(&dir, "curves.csv")?, &res.curves)?;
            res.records
        }
        BenchKind::Phase => {
            let res = run_phase_transition(&spec)?;
            write_phase_csv(create(&dir, "phase.csv")?, &res.table)?;
            res.records
        }
        BenchKind::Compare => run_pf_vs_iht(&spec)?.records,
    };
    write_records_csv(create(&dir, "records.csv")?, &records)?;
    let successes = records.iter().filter(|r| r.success).count();
    log::info!("wrote {} records to {}", records.len(), dir.display());
    print_json(&json!({
        "trials": records.len(),
        "successes": successes,
        "output": dir,
    }))
}

fn run(cli: Cli) -> Result<ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Gen { problem, out, full } => {
            let p = gen_problem(&problem.params())?;
            save_problem(&out, &p, full)?;
            print_json(&json!({ "output": out, "singular_values": p.singular_values }))?;
        }
        Command::Solve(args) => solve(&args)?,
        Command::Iht(args) => iht(&args)?,
        Command::Certify { problem, solution } => {
            if !certify(&problem, &solution)? {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Bench { kind, spec, out } => bench(kind, &spec, out.as_deref())?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
