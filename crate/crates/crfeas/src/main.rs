use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use crfeas::bench::{aggregate_all, run_experiment, write_stats_csv, write_trials_csv, ExperimentConfig, TrialProblem};
use crfeas::fixtures;
use crfeas::formats::{write_cascade_csv, FilterFile};
use crfeas::solve::solve;
use crfeas::HarnessError;
use crfeas_core::wavelet::{cascade_samples, WaveletProblem, WaveletVariant};
use crfeas_core::{Algorithm, Error as CoreError, StoppingCriterion};
use serde_json::json;

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;

#[derive(Parser)]
#[command(
    name = "crfeas",
    version,
    about = "Constraint-reduced projection algorithms for wavelet feasibility problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one wavelet problem from a seeded random start.
    Solve(SolveArgs),
    /// Run seeded random restarts and write trial and statistics CSVs.
    Bench(BenchArgs),
    /// Run the projector fixture suites.
    Verify,
    /// Sample the scaling function and wavelet of a filter file.
    Cascade(CascadeArgs),
}

fn parse_variant(s: &str) -> Result<WaveletVariant, String> {
    WaveletVariant::from_name(s).ok_or_else(|| format!("unknown problem '{s}' (expected symmetric or real)"))
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    Algorithm::from_name(s).ok_or_else(|| format!("unknown algorithm '{s}' (expected p-dr, cr-dr, p-map or cr-map)"))
}

#[derive(Args)]
struct ProblemArgs {
    /// symmetric or real
    #[arg(long, value_parser = parse_variant, default_value = "symmetric")]
    problem: WaveletVariant,
    /// Support length (even, at least 4).
    #[arg(long = "M", default_value_t = 6)]
    m: usize,
    /// Regularity order, 0 < D <= (M-2)/2.
    #[arg(long = "D", default_value_t = 2)]
    d: u32,
}

impl ProblemArgs {
    fn resolve(&self) -> Result<WaveletProblem, CoreError> {
        WaveletProblem::new(self.m, self.d, self.problem)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, value_parser = parse_algorithm, default_value = "cr-dr")]
    algorithm: Algorithm,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = StoppingCriterion::DEFAULT_CUTOFF)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Filter JSON written on convergence.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    problem: ProblemArgs,
    #[arg(long, default_value_t = 50)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, value_parser = parse_algorithm, value_delimiter = ',', default_value = "p-dr,cr-dr,p-map,cr-map")]
    algorithms: Vec<Algorithm>,
    #[arg(long, value_delimiter = ',', default_value = "1e-6,1e-9")]
    eps: Vec<f64>,
    #[arg(long, default_value_t = StoppingCriterion::DEFAULT_CUTOFF)]
    cutoff: usize,
    /// Worker threads (0: one per core).
    #[arg(long, default_value_t = 0)]
    workers: usize,
    #[arg(long, default_value_t = 1)]
    timing_repeats: usize,
}

#[derive(Args)]
struct CascadeArgs {
    #[arg(long)]
    filters: PathBuf,
    #[arg(long, default_value_t = 10)]
    levels: u32,
    #[arg(long)]
    out: PathBuf,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn run_solve(args: SolveArgs) -> ExitCode {
    let problem = match args.problem.resolve() {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    if args.eps.is_nan() || args.eps <= 0.0 || args.max_iters == 0 {
        return usage("--eps and --max-iters must be positive");
    }
    println!(
        "{}",
        json!({
            "command": "solve",
            "problem": problem.variant().name(),
            "M": problem.m(),
            "D": problem.d(),
            "algorithm": args.algorithm.name(),
            "eps": args.eps,
            "max_iters": args.max_iters,
            "seed": args.seed,
            "out": args.out,
        })
    );
    let outcome = match solve(&problem, args.algorithm, args.eps, args.max_iters, args.seed) {
        Ok(o) => o,
        Err(HarnessError::Core(CoreError::Diverged { step, .. })) => {
            eprintln!("iteration diverged at step {step}");
            return ExitCode::from(EXIT_NOT_CONVERGED);
        }
        Err(e) => return usage(e),
    };
    let r = outcome.residuals;
    println!(
        "{} after {} iterations (stopping residual {:.3e}, {:.3} s)",
        if outcome.converged {
            "converged"
        } else {
            "cutoff reached"
        },
        outcome.iterations,
        outcome.stopping_residual,
        outcome.wall_time_s
    );
    println!(
        "residuals c1 {:.3e} c2 {:.3e} c3 {:.3e} c4 {:.3e}",
        r.c1, r.c2, r.c3, r.c4
    );
    if !outcome.converged {
        return ExitCode::from(EXIT_NOT_CONVERGED);
    }
    let file = FilterFile::new(
        problem.m(),
        problem.d(),
        problem.variant().name(),
        &outcome.filters,
        Some(r),
    );
    match &args.out {
        Some(path) => {
            if let Err(e) = file.write(path) {
                return usage(e);
            }
            println!("filters written to {}", path.display());
        }
        None => println!("{}", serde_json::to_string_pretty(&file).expect("plain data")),
    }
    ExitCode::SUCCESS
}

fn run_bench(args: BenchArgs) -> ExitCode {
    let problem = match args.problem.resolve() {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let cfg = ExperimentConfig {
        algorithms: args.algorithms,
        epsilons: args.eps,
        trials: args.trials,
        cutoff: args.cutoff,
        seed: args.seed,
        timing_repeats: args.timing_repeats,
        workers: args.workers,
    };
    if let Err(e) = cfg.validate() {
        return usage(e);
    }
    let header = cfg.echo(&problem);
    println!("{header}");
    if let Err(e) = fs::create_dir_all(&args.out_dir) {
        return usage(HarnessError::io(&args.out_dir, e));
    }
    let result = run_experiment(&problem, &cfg).and_then(|records| {
        let stats = aggregate_all(&records, &cfg)?;
        let trials_path = args.out_dir.join("trials.csv");
        let stats_path = args.out_dir.join("stats.csv");
        write_trials_csv(&trials_path, &records, &header)?;
        write_stats_csv(&stats_path, &problem.parameters(), &stats, &header)?;
        Ok((stats, trials_path, stats_path))
    });
    let (stats, trials_path, stats_path) = match result {
        Ok(v) => v,
        Err(e) => return usage(e),
    };
    let fmt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.1}"));
    println!(
        "{:>8} {:>7} {:>7} {:>6} {:>6} {:>6} {:>9} {:>9}",
        "eps", "alg", "solved", "alone", "both", "wins", "mean", "median"
    );
    for s in &stats {
        for a in [&s.product, &s.reduced] {
            println!(
                "{:>8.0e} {:>7} {:>7} {:>6} {:>6} {:>6} {:>9} {:>9}",
                s.epsilon,
                a.algorithm,
                a.cases_solved,
                a.solved_alone,
                a.solved_by_both,
                a.wins,
                fmt(a.mean),
                fmt(a.median)
            );
        }
    }
    println!("wrote {} and {}", trials_path.display(), stats_path.display());
    ExitCode::SUCCESS
}

fn run_verify() -> ExitCode {
    println!("{}", json!({ "command": "verify" }));
    let results = fixtures::run_all();
    for r in &results {
        println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
    }
    if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_NOT_CONVERGED)
    }
}

fn run_cascade(args: CascadeArgs) -> ExitCode {
    if args.levels == 0 {
        return usage("--levels must be at least 1");
    }
    let header = json!({ "command": "cascade", "filters": args.filters, "levels": args.levels, "out": args.out });
    println!("{header}");
    let filters = match FilterFile::read(&args.filters).and_then(|f| f.filters()) {
        Ok(f) => f,
        Err(e) => return usage(e),
    };
    let samples = match cascade_samples(&filters, args.levels) {
        Ok(s) => s,
        Err(e @ CoreError::CascadeDiverged { .. }) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_NOT_CONVERGED);
        }
        Err(e) => return usage(e),
    };
    if let Err(e) = write_cascade_csv(&args.out, &samples, &header) {
        return usage(e);
    }
    println!("wrote {} samples to {}", samples.t.len(), args.out.display());
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Bench(a) => run_bench(a),
        Command::Verify => run_verify(),
        Command::Cascade(a) => run_cascade(a),
    }
}
