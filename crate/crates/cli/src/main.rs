use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use permcode::combinatorics::benchmark_instances;
use permcode::experiment::{emit_bounds_table, rows_to_csv, run_plan, summarize, summary_to_csv, RunRow};
use permcode::oracle::{exact_max_code, exact_max_code_with_cap, greedy_clique};
use permcode::{
    run_seeded, BoundsReport, CoolingClock, Crossover, ExperimentPlan, FitnessKind, Method, Mutation, OperatorPool,
    PermutationCode, Policy, PolicyKind, SearchConfig, Variant,
};

#[derive(Parser)]
#[command(
    name = "permcode",
    version,
    about = "Build permutation codes PA(n,d) by incremental search"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grow a single code and print its run record as CSV.
    Run(RunArgs),
    /// Run a grid of instances, variants, fitness functions and seeds.
    Sweep(SweepArgs),
    /// Print bounds and search-space size for an instance.
    Bounds(BoundsArgs),
    /// Maximum code by exhaustive clique search, or a greedy clique.
    Oracle(OracleArgs),
    /// Check that a code file is a valid permutation code.
    Verify { file: PathBuf },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 1000)]
    pop_size: usize,
    #[arg(long, default_value_t = 3)]
    tournament: usize,
    #[arg(long, default_value_t = 0.3)]
    mutation_rate: f64,
    /// Crossover pool, e.g. `pmx,cx,ox`.
    #[arg(long, value_delimiter = ',', default_values_t = Crossover::ALL)]
    crossovers: Vec<Crossover>,
    /// Mutation pool, e.g. `swap,inversion,scramble`.
    #[arg(long, value_delimiter = ',', default_values_t = Mutation::ALL)]
    mutations: Vec<Mutation>,
    /// Evaluations without growth before a reset (default max(n!, 100000)).
    #[arg(long)]
    stagnation: Option<u64>,
    /// `global` or `since-reset`.
    #[arg(long, default_value = "global")]
    cooling_clock: CoolingClock,
}

impl SearchArgs {
    fn pool(&self) -> Result<OperatorPool> {
        Ok(OperatorPool::new(
            self.crossovers.clone(),
            self.mutations.clone(),
            self.mutation_rate,
        )?)
    }

    fn policy(&self, kind: PolicyKind) -> Policy {
        let mut p = match kind {
            PolicyKind::Plain => Policy::plain(),
            PolicyKind::RandomReset => Policy::random_reset(),
        };
        p.stagnation_threshold = self.stagnation;
        p.clock = self.cooling_clock;
        p
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value = "ea")]
    method: Method,
    #[arg(long, default_value = "plain")]
    policy: PolicyKind,
    #[arg(long, default_value = "f3")]
    fitness: FitnessKind,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
    /// Stop at this size (default: best known M(n,d)).
    #[arg(long)]
    target: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    search: SearchArgs,
    /// Write the final code here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave out the wall-clock column.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct SweepArgs {
    /// Instances as `n:d`, e.g. `6:4,6:5` (default: the 15 benchmark instances).
    #[arg(long, value_delimiter = ',', value_parser = parse_instance)]
    instances: Vec<(usize, usize)>,
    #[arg(long, value_delimiter = ',', default_values_t = Variant::ALL)]
    variants: Vec<Variant>,
    #[arg(long, value_delimiter = ',', default_values_t = FitnessKind::ALL)]
    fitness: Vec<FitnessKind>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// 10^5 evaluations and 3 repetitions unless overridden.
    #[arg(long)]
    quick: bool,
    #[arg(long, env = "PERMCODE_WORKERS")]
    workers: Option<usize>,
    #[command(flatten)]
    search: SearchArgs,
    /// Per-run CSV (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-cell peak-size summary CSV.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Directory for the final code of every run.
    #[arg(long)]
    codes_dir: Option<PathBuf>,
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[arg(long, required_unless_present = "table")]
    n: Option<usize>,
    #[arg(long, required_unless_present = "table")]
    d: Option<usize>,
    /// CSV for all 15 benchmark instances.
    #[arg(long, conflicts_with_all = ["n", "d"])]
    table: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    #[arg(long, conflicts_with = "greedy")]
    exact: bool,
    #[arg(long)]
    greedy: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Raise the exact-search limit to this n (slow beyond 5).
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_instance(s: &str) -> Result<(usize, usize), String> {
    let (n, d) = s.split_once(':').ok_or_else(|| format!("expected n:d, got `{s}`"))?;
    let parse = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok((parse(n)?, parse(d)?))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = SearchConfig::new(args.n, args.d);
    config.method = args.method;
    config.policy = args.search.policy(args.policy);
    config.fitness = args.fitness;
    config.budget = args.budget;
    config.target = args.target;
    config.seed = args.seed;
    config.pop_size = args.search.pop_size;
    config.tournament = args.search.tournament;
    config.pool = args.search.pool()?;

    let record = run_seeded(&config)?;
    info!(
        "PA({},{}): peak {} final {} after {} evaluations, {} resets",
        args.n,
        args.d,
        record.peak_size,
        record.final_size(),
        record.evals_used,
        record.resets
    );
    if let Some(path) = &args.out {
        record.code.write_to(path)?;
    }
    print!("{}", rows_to_csv(&[RunRow::from(&record)], !args.no_timing));
    Ok(())
}

fn code_file_name(row: &RunRow) -> String {
    format!(
        "pa_{}_{}_{}_{}_{}_seed{}.txt",
        row.n, row.d, row.method, row.policy, row.fitness, row.seed
    )
}

fn cmd_sweep(args: SweepArgs) -> Result<bool> {
    let mut plan = if args.quick {
        ExperimentPlan::quick()
    } else {
        ExperimentPlan::default()
    };
    if !args.instances.is_empty() {
        plan.instances = args.instances;
    }
    plan.variants = args.variants;
    plan.fitness = args.fitness;
    if let Some(r) = args.repetitions {
        plan.repetitions = r;
    }
    if let Some(b) = args.budget {
        plan.budget = b;
    }
    plan.base_seed = args.seed;
    plan.pop_size = args.search.pop_size;
    plan.tournament = args.search.tournament;
    plan.pool = args.search.pool()?;
    plan.reset_schedule = args.search.policy(PolicyKind::RandomReset);
    plan.workers = args.workers;

    info!("running {} runs", plan.configs().len());
    let results = run_plan(&plan)?;
    for f in &results.failures {
        warn!(
            "run ({},{}) seed {} failed: {}",
            f.config.n, f.config.d, f.config.seed, f.error
        );
    }
    write_or_print(args.out.as_deref(), &rows_to_csv(&results.rows, !args.no_timing))?;
    if let Some(path) = &args.summary {
        fs::write(path, summary_to_csv(&summarize(&results.rows)))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let mut ok = results.failures.is_empty();
    if let Some(dir) = &args.codes_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for (row, code) in results.rows.iter().zip(&results.codes) {
            let path = dir.join(code_file_name(row));
            code.write_to(&path)?;
            if let Err(e) = PermutationCode::read_from(&path) {
                warn!("{} does not verify: {e}", path.display());
                ok = false;
            }
        }
    }
    Ok(ok)
}

fn cmd_bounds(args: BoundsArgs) -> Result<()> {
    if args.table {
        print!("{}", emit_bounds_table(&benchmark_instances())?);
        return Ok(());
    }
    let (n, d) = (args.n.unwrap_or_default(), args.d.unwrap_or_default());
    let report = BoundsReport::new(n, d)?;
    println!("{}", BoundsReport::csv_header());
    println!("{}", report.csv_line());
    println!();
    print!("{report}");
    Ok(())
}

fn cmd_oracle(args: OracleArgs) -> Result<()> {
    let code = if args.greedy {
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
        greedy_clique(args.n, args.d, &mut rng)?
    } else {
        let (_, code) = match args.cap {
            Some(cap) => exact_max_code_with_cap(args.n, args.d, cap)?,
            None => exact_max_code(args.n, args.d)?,
        };
        code
    };
    let kind = if args.greedy { "greedy" } else { "maximum" };
    eprintln!("{kind} PA({},{}) with {} rows", args.n, args.d, code.len());
    write_or_print(args.out.as_deref(), &code.to_text())
}

fn cmd_verify(file: &Path) -> Result<()> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    match PermutationCode::parse(&text) {
        Ok(code) => {
            println!("valid PA({},{}) with {} rows", code.n(), code.d(), code.len());
            Ok(())
        }
        Err(e) => bail!("{}: {e}", file.display()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args).map(|_| true),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Bounds(args) => cmd_bounds(args).map(|_| true),
        Command::Oracle(args) => cmd_oracle(args).map(|_| true),
        Command::Verify { file } => cmd_verify(&file).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
