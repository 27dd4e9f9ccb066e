use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rkas::flops::FlopLedger;
use rkas::linalg::norm;
use rkas::problems::ProblemFile;
use rkas::solvers::{run_counted, Method, SolverConfig, DEFAULT_RSE_TOL};
use rkas::{ProblemKind, ProblemSpec};
use rkas_cli::bench::format_table;
use rkas_cli::output::{trials_path, write_records, write_summary, write_trials, Sidecar};
use rkas_cli::plan::{method_label, DEFAULT_TRIALS};
use rkas_cli::sweep::{run_sweep, write_sweep, Axis};
use rkas_cli::{run_bench, verify, ExperimentPlan, Instance};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "rkas", version, about = "Randomized Kaczmarz solvers and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a problem and save it as a replayable JSON file.
    Generate {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one method and write its convergence history as CSV.
    Solve {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Rkas, rkas-unstored, rk or rek.
        #[arg(long, default_value = "rkas")]
        method: String,
        /// Trial stream.
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long)]
        record_flops: bool,
        /// CSV destination; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare methods over many seeded trials.
    Bench {
        /// JSON experiment plan; replaces the problem and method flags.
        #[arg(long, conflicts_with_all = ["problem", "dense", "sparse", "mtx"])]
        plan: Option<PathBuf>,
        #[command(flatten)]
        problem: OptionalProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_delimiter = ',', default_value = "rkas,rek")]
        methods: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long)]
        record_flops: bool,
        /// Summary CSV; per-trial rows go next to it as `<stem>.trials.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check solver and flop-model properties on one instance.
    Verify {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 100_000)]
        steps: u64,
    },
    /// Benchmark over a range of sizes; plot-ready CSV.
    Sweep {
        #[command(flatten)]
        problem: ProblemArgs,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_enum, default_value = "m")]
        axis: AxisArg,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "rkas,rek")]
        methods: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum AxisArg {
    M,
    N,
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false, id = "source")]
struct SourceArgs {
    /// A problem file written by `generate`.
    #[arg(long)]
    problem: Option<PathBuf>,
    /// Dense `U D Vᵀ` generator (needs --m, --n; --r, --kappa optional).
    #[arg(long)]
    dense: bool,
    /// Sparse random generator (needs --m, --n; --density, --rc optional).
    #[arg(long)]
    sparse: bool,
    /// Matrix Market file; the right-hand side is generated.
    #[arg(long)]
    mtx: Option<PathBuf>,
}

#[derive(Args, Clone)]
#[group(required = false, multiple = false)]
struct OptionalSourceArgs {
    #[arg(long)]
    problem: Option<PathBuf>,
    #[arg(long)]
    dense: bool,
    #[arg(long)]
    sparse: bool,
    #[arg(long)]
    mtx: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Rank of the dense generator; defaults to min(m, n).
    #[arg(long)]
    r: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    kappa: f64,
    #[arg(long, default_value_t = 0.1)]
    density: f64,
    #[arg(long, default_value_t = 0.5)]
    rc: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Add a residual in Null(Aᵀ) to the right-hand side.
    #[arg(long)]
    inconsistent: bool,
    /// ‖r‖ / ‖Ax‖ for --inconsistent.
    #[arg(long, default_value_t = rkas::problems::DEFAULT_RESIDUAL_RATIO)]
    residual_ratio: f64,
}

#[derive(Args, Clone)]
struct ProblemArgs {
    #[command(flatten)]
    source: SourceArgs,
    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Args, Clone)]
struct OptionalProblemArgs {
    #[command(flatten)]
    source: OptionalSourceArgs,
    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Stop when the relative solution error reaches this.
    #[arg(long, default_value_t = DEFAULT_RSE_TOL)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: u64,
    /// Evaluate the stopping rule every this many iterations.
    #[arg(long, default_value_t = 1)]
    check_every: u64,
    /// RKAS: keep A Aᵀ in memory instead of forming columns per step.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    store_gram: bool,
    /// RKAS: recompute r = Ax − b exactly every this many iterations.
    #[arg(long)]
    refresh_every: Option<u64>,
    /// RK stepsize.
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Solver seed (master seed for bench and sweep).
    #[arg(long = "solver-seed", default_value_t = 0)]
    solver_seed: u64,
}

enum Failure {
    Usage(String),
    Checks,
}

impl From<rkas::Error> for Failure {
    fn from(e: rkas::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn usage(msg: &str) -> Failure {
    Failure::Usage(format!("{msg}\n\nFor more information, try '--help'."))
}

impl GenArgs {
    fn dims(&self) -> Result<(usize, usize), Failure> {
        match (self.m, self.n) {
            (Some(m), Some(n)) => Ok((m, n)),
            _ => Err(usage("generators need both --m and --n")),
        }
    }

    fn spec(&self, kind: ProblemKind) -> ProblemSpec {
        ProblemSpec::new(kind, self.seed, !self.inconsistent).residual_ratio(self.residual_ratio)
    }
}

/// Resolve the source flags to a spec (generators) or a loaded instance.
fn load(problem: Option<&PathBuf>, dense: bool, sparse: bool, mtx: Option<&PathBuf>, g: &GenArgs) -> Result<Instance, Failure> {
    if let Some(path) = problem {
        return Ok(Instance::load(path)?);
    }
    if let Some(path) = mtx {
        return Ok(Instance::from_mtx(path.clone(), g.seed, !g.inconsistent, g.residual_ratio)?);
    }
    Ok(Instance::generate(&generator_spec(dense, sparse, g)?)?)
}

fn generator_spec(dense: bool, sparse: bool, g: &GenArgs) -> Result<ProblemSpec, Failure> {
    let (m, n) = g.dims()?;
    if dense {
        let r = g.r.unwrap_or(m.min(n));
        Ok(g.spec(ProblemKind::DenseUdv { m, n, r, kappa: g.kappa }))
    } else if sparse {
        Ok(g.spec(ProblemKind::SparseRandom { m, n, density: g.density, rc: g.rc }))
    } else {
        Err(usage("choose one of --problem, --dense, --sparse or --mtx"))
    }
}

impl ProblemArgs {
    fn instance(&self) -> Result<Instance, Failure> {
        let s = &self.source;
        load(s.problem.as_ref(), s.dense, s.sparse, s.mtx.as_ref(), &self.gen)
    }
}

fn parse_method(token: &str, s: &SolverArgs) -> Result<SolverConfig, Failure> {
    let cfg = match token.trim() {
        "rkas-unstored" => SolverConfig::rkas().store_gram(false),
        "rkas" => SolverConfig::rkas().store_gram(s.store_gram),
        other => {
            let method: Method = other.parse().map_err(|e: rkas::Error| usage(&e.to_string()))?;
            SolverConfig::new(method)
        }
    };
    let cfg = SolverConfig { lambda: s.lambda, ..cfg }
        .seed(s.solver_seed)
        .rse_tol(s.tol)
        .max_iters(s.max_iters)
        .check_every(s.check_every)
        .residual_refresh_every(s.refresh_every);
    cfg.validate().map_err(|e| usage(&e.to_string()))?;
    Ok(cfg)
}

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn print_instance(inst: &Instance) {
    let gt = &inst.gt;
    println!(
        "m={} n={} nnz={} rank={} cond={:.6e} cond_full={:.6e} sigma_max={:.6e} sigma_min={:.6e} e_norm={:.6e}",
        inst.sys.nrows(),
        inst.sys.ncols(),
        inst.sys.csr().nnz(),
        gt.rank,
        gt.cond_nonzero(),
        gt.cond_full(),
        gt.sigma_max,
        gt.sigma_min,
        norm(&gt.e)
    );
}

#[derive(Serialize)]
struct SolvePlan<'a> {
    problem: &'a str,
    spec: Option<&'a ProblemSpec>,
    config: &'a SolverConfig,
}

fn dispatch(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Generate { problem, out } => {
            let inst = problem.instance()?;
            ProblemFile::from_system(&inst.sys, inst.spec.clone()).save(&out)?;
            print_instance(&inst);
            println!("wrote {}", out.display());
        }
        Cmd::Solve {
            problem,
            solver,
            method,
            stream,
            record_flops,
            out,
        } => {
            let inst = problem.instance()?;
            let cfg = parse_method(&method, &solver)?.stream(stream);
            let report = if record_flops {
                run_counted(&inst.sys, &inst.gt, &cfg, FlopLedger::new())?.0
            } else {
                rkas::run(&inst.sys, &inst.gt, &cfg)?
            };
            let summary = format!(
                "method={} status={} iterations={} final_rse={:e} elapsed={:.6}",
                method_label(&cfg),
                report.status,
                report.iterations,
                report.final_rse,
                report.elapsed_seconds
            );
            match &out {
                Some(path) => {
                    write_records(create(path)?, &report.records)?;
                    let plan = SolvePlan {
                        problem: &inst.source,
                        spec: inst.spec.as_ref(),
                        config: &cfg,
                    };
                    Sidecar::new("solve", &plan).write(path)?;
                    println!("{summary}");
                }
                None => {
                    write_records(io::stdout().lock(), &report.records)?;
                    eprintln!("{summary}");
                }
            }
        }
        Cmd::Bench {
            plan,
            problem,
            solver,
            methods,
            trials,
            record_flops,
            out,
        } => {
            let (plan, inst) = match plan {
                Some(path) => {
                    let plan = ExperimentPlan::load(&path)?;
                    let inst = Instance::generate(&plan.problem)?;
                    (plan, inst)
                }
                None => {
                    let s = &problem.source;
                    let inst = load(s.problem.as_ref(), s.dense, s.sparse, s.mtx.as_ref(), &problem.gen)?;
                    let spec = inst.spec.clone().ok_or_else(|| usage("problem file has no spec"))?;
                    let methods = methods.iter().map(|m| parse_method(m, &solver)).collect::<Result<_, _>>()?;
                    let plan = ExperimentPlan {
                        problem: spec,
                        methods,
                        trials,
                        master_seed: solver.solver_seed,
                        record_flops,
                    };
                    (plan, inst)
                }
            };
            let result = run_bench(&inst, &plan)?;
            print_instance(&inst);
            print!("{}", format_table(&result.summary));
            println!("timer_resolution={:e}s", result.timer_resolution_seconds);
            if let Some(path) = out {
                write_summary(create(&path)?, &result.summary)?;
                write_trials(create(&trials_path(&path))?, &result.trials)?;
                let mut sidecar = Sidecar::new("bench", &plan);
                sidecar.timer_resolution_seconds = Some(result.timer_resolution_seconds);
                sidecar.write(&path)?;
            }
        }
        Cmd::Verify { problem, steps } => {
            let inst = problem.instance()?;
            let checks = verify(&inst, problem.gen.seed, steps)?;
            let mut all = true;
            for c in &checks {
                all &= c.passed;
                println!("{:<26} {}  {}", c.name, if c.passed { "PASS" } else { "FAIL" }, c.detail);
            }
            if !all {
                return Err(Failure::Checks);
            }
        }
        Cmd::Sweep {
            problem,
            solver,
            axis,
            values,
            methods,
            trials,
            out,
        } => {
            let s = &problem.source;
            let spec = generator_spec(s.dense, s.sparse, &problem.gen)?;
            let methods = methods.iter().map(|m| parse_method(m, &solver)).collect::<Result<_, _>>()?;
            let plan = ExperimentPlan {
                problem: spec,
                methods,
                trials,
                master_seed: solver.solver_seed,
                record_flops: false,
            };
            let axis = match axis {
                AxisArg::M => Axis::M,
                AxisArg::N => Axis::N,
            };
            let points = run_sweep(&plan, axis, &values)?;
            match &out {
                Some(path) => {
                    write_sweep(create(path)?, &points)?;
                    Sidecar::new("sweep", &plan).write(path)?;
                }
                None => write_sweep(io::stdout().lock(), &points)?,
            }
        }
    }
    io::stdout().flush()?;
    Ok(())
}
