//! Command-line front end: `generate`, `solve` and `compare`.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::baselines::{brute_force, kwiksort, OracleResult, DEFAULT_BRUTE_FORCE_CAP};
use crate::cycles::Parity;
use crate::datagen::{kwiksort_trap_dataset, generate, with_random_list_weights, GenMode, GenSpec, DEFAULT_VOTES};
use crate::error::Error;
use crate::pairs::num_pairs;
use crate::qubo::DEFAULT_EPSILON;
use crate::ranking::{accuracy, build_comparison, cumulative_kt, represent, Dataset, ListKind, Ranking, WeightScheme};
use crate::sampler::{ExactSolver, SaParams, Sampler, SimulatedAnnealing, DEFAULT_EXACT_CAP, DEFAULT_READS, DEFAULT_SWEEPS};
use crate::solvers::{
    solve_base, solve_iterative, solve_n2, solve_pair_removal, InitialPenalty, IterOptions, PairRemoval, PenaltyMode,
    PrStrategy, Solution, DEFAULT_MAX_RESTARTS, DEFAULT_MIN_GAP,
};
use crate::votes_file::{format_votes, parse_votes};

/// Environment variable overriding the exact solver's variable cap.
pub const EXACT_CAP_ENV: &str = "KEMENY_QA_EXACT_CAP";

#[derive(Debug, Parser)]
#[command(name = "kemeny-qa", version, about = "Kemeny rank aggregation via QUBO sampling")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded or fixed votes file.
    Generate(GenerateArgs),
    /// Run one pipeline or baseline on a votes file.
    Solve(SolveArgs),
    /// Iterative method against repeated KwikSort, as CSV.
    Compare(CompareArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Synthetic,
    Simplified,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    KwiksortTrap,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "synthetic")]
    pub mode: ModeArg,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_VOTES)]
    pub votes: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub min_sublists: usize,
    #[arg(long, default_value = "complete")]
    pub list_kind: ListKind,
    /// Shortest truncated vote for partial and k-top lists.
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    /// Give every vote a random list weight (multiples of 1/4 up to 3).
    #[arg(long)]
    pub list_weights: bool,
    /// Emit a fixed dataset instead of generating one.
    #[arg(long, value_enum, conflicts_with_all = ["n", "mode"])]
    pub fixture: Option<Fixture>,
    #[arg(short, long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Base,
    Iterative,
    PairRemoval,
    Kwiksort,
    BruteForce,
    N2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplerArg {
    /// Exact when the QUBO fits the cap, annealing otherwise.
    Auto,
    Exact,
    Sa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ParityArg {
    Auto,
    Odd,
    Even,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Options shared by `solve` and `compare`.
#[derive(Debug, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "auto")]
    pub sampler: SamplerArg,
    #[arg(long, default_value_t = DEFAULT_READS)]
    pub reads: usize,
    #[arg(long, default_value_t = DEFAULT_SWEEPS)]
    pub sweeps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value = "auto")]
    pub parity: ParityArg,
    /// Starting penalty of new cycles: minimal or bias-scaled.
    #[arg(long)]
    pub initial_penalty: Option<InitialPenalty>,
    #[arg(long)]
    pub double_check: Option<usize>,
    #[arg(long)]
    pub prune_k: Option<usize>,
    /// How votes in the file are read: complete, partial or ktop.
    #[arg(long, default_value = "complete")]
    pub list_kind: ListKind,
    /// uniform, distance or position:<p>.
    #[arg(long, default_value = "uniform")]
    pub pair_weight: WeightScheme,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub votes: PathBuf,
    #[arg(short, long, value_enum, default_value = "iterative")]
    pub method: Method,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Stop after this many cycle-ledger updates.
    #[arg(long)]
    pub stop_after_updates: Option<usize>,
    /// Penalty scheme under pair removal: minmax or iterative.
    #[arg(long, default_value = "iterative")]
    pub penalty_mode: PenaltyMode,
    /// prhb or promega.
    #[arg(long)]
    pub pr_strategy: Option<PrStrategy>,
    #[arg(long)]
    pub pr_count: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MIN_GAP)]
    pub pr_min_gap: usize,
    #[arg(long, default_value_t = DEFAULT_MAX_RESTARTS)]
    pub pr_max_restarts: usize,
    /// Always compare against the brute-force optimum.
    #[arg(long)]
    pub oracle: bool,
    /// KwikSort repetitions.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub votes: PathBuf,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long, default_value_t = 4)]
    pub stop_after_updates: usize,
    /// Independent iterative-method runs.
    #[arg(long, default_value_t = 5)]
    pub runs: usize,
    /// KwikSort repetitions.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Failure of a CLI command: bad usage (exit 2) or a failed run (exit 1).
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Run(#[from] Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Run(_) => 1,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Run(e.into())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDigest {
    pub n: usize,
    pub votes: usize,
    pub kind: ListKind,
    pub sha256: String,
}

impl DatasetDigest {
    fn new(ds: &Dataset, bytes: &[u8]) -> Self {
        DatasetDigest {
            n: ds.n(),
            votes: ds.votes().len(),
            kind: ds.kind(),
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KwikTrial {
    pub trial: usize,
    pub seed: u64,
    pub kt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaselineReport {
    Kwiksort { best_ranking: Ranking, best_kt: f64, mean_kt: f64, trials: Vec<KwikTrial> },
    BruteForce { min_kt: f64, optima: Vec<Ranking> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub min_kt: f64,
    pub optima_count: usize,
    pub accuracy: u8,
    pub kt_gap: f64,
    /// Sampled occurrences of optimal configurations, when the sampled
    /// variables are exactly the pair bits.
    pub optimal_occ: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: Vec<String>,
    pub dataset: DatasetDigest,
    pub method: String,
    pub sampler: Option<String>,
    pub seed: u64,
    pub solution: Option<Solution>,
    pub baseline: Option<BaselineReport>,
    pub oracle: Option<OracleComparison>,
    /// Informational only.
    pub wall_clock_ms: f64,
}

pub fn exact_cap() -> usize {
    std::env::var(EXACT_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_EXACT_CAP)
}

/// Parses arguments and runs the command, writing results to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            write!(out, "{e}")?;
            return Ok(());
        }
        Err(e) => return Err(usage(e.to_string())),
    };
    let echo = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    match cli.command {
        Command::Generate(a) => cmd_generate(&a, out),
        Command::Solve(a) => cmd_solve(&a, echo, out),
        Command::Compare(a) => cmd_compare(&a, out),
    }
}

pub fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut ds = match args.fixture {
        Some(Fixture::KwiksortTrap) => kwiksort_trap_dataset(),
        None => {
            let n = args.n.ok_or_else(|| usage("--n is required unless --fixture is given"))?;
            let mode = match args.mode {
                ModeArg::Synthetic => GenMode::Synthetic,
                ModeArg::Simplified => GenMode::Simplified { min_sublists: args.min_sublists },
            };
            let spec = GenSpec { n, votes: args.votes, seed: args.seed, mode, kind: args.list_kind, k_min: args.k_min };
            spec.validate().map_err(|e| usage(e.to_string()))?;
            generate(&spec)?
        }
    };
    if args.list_weights {
        ds = with_random_list_weights(&ds, args.seed)?;
    }
    let text = format_votes(&ds);
    std::fs::write(&args.output, &text)?;
    let digest = DatasetDigest::new(&ds, text.as_bytes());
    writeln!(out, "{}", serde_json::to_string(&digest).map_err(Error::from)?)?;
    Ok(())
}

fn load(path: &Path, solver: &SolverArgs) -> Result<(Dataset, DatasetDigest), CliError> {
    let bytes = std::fs::read(path)?;
    let text = String::from_utf8(bytes.clone()).map_err(|e| usage(format!("votes file is not UTF-8: {e}")))?;
    let ds = parse_votes(&text, solver.list_kind, solver.pair_weight)?;
    let digest = DatasetDigest::new(&ds, &bytes);
    Ok((ds, digest))
}

fn iter_options(solver: &SolverArgs, stop_after_updates: Option<usize>) -> Result<IterOptions, CliError> {
    let opts = IterOptions {
        max_cycle_updates: stop_after_updates,
        parity: match solver.parity {
            ParityArg::Auto => None,
            ParityArg::Odd => Some(Parity::Odd),
            ParityArg::Even => Some(Parity::Even),
        },
        initial_penalty: solver.initial_penalty,
        double_check: solver.double_check.unwrap_or(1),
        prune_k: solver.prune_k,
        epsilon: solver.epsilon,
        seed: solver.seed,
        ..IterOptions::default()
    };
    opts.validate().map_err(|e| usage(e.to_string()))?;
    Ok(opts)
}

fn make_sampler(solver: &SolverArgs, num_vars: usize) -> Result<(Box<dyn Sampler + Send>, String), CliError> {
    let cap = exact_cap();
    let sa = || -> Result<(Box<dyn Sampler + Send>, String), CliError> {
        let params = SaParams { reads: solver.reads, sweeps: solver.sweeps, beta_range: None, seed: solver.seed };
        params.validate().map_err(|e| usage(e.to_string()))?;
        Ok((Box::new(SimulatedAnnealing::new(params)), "sa".into()))
    };
    match solver.sampler {
        SamplerArg::Exact => Ok((Box::new(ExactSolver::with_cap(cap)), "exact".into())),
        SamplerArg::Sa => sa(),
        SamplerArg::Auto if num_vars <= cap => Ok((Box::new(ExactSolver::with_cap(cap)), "exact".into())),
        SamplerArg::Auto => sa(),
    }
}

fn optimal_occ(sol: &Solution, oracle: &OracleResult) -> Option<usize> {
    let samples = sol.samples.as_ref()?;
    if !sol.removed_pairs.is_empty() || samples.records.first()?.config.len() != num_pairs(sol.ranking.len()) {
        return None;
    }
    let optimal: Vec<Vec<bool>> = oracle
        .optima
        .iter()
        .filter_map(|r| represent(r).ok()?.to_bools().ok())
        .collect();
    Some(samples.occurrences_where(|c| optimal.iter().any(|o| o.as_slice() == c)))
}

pub fn cmd_solve(args: &SolveArgs, command: Vec<String>, out: &mut dyn Write) -> Result<(), CliError> {
    let (ds, digest) = load(&args.votes, &args.solver)?;
    let start = Instant::now();
    let opts = iter_options(&args.solver, args.stop_after_updates)?;
    if args.method != Method::PairRemoval && (args.pr_strategy.is_some() || args.pr_count.is_some()) {
        return Err(usage("--pr-strategy and --pr-count only apply to -m pair-removal"));
    }
    if args.method != Method::Kwiksort && args.trials != 1 {
        return Err(usage("--trials only applies to -m kwiksort"));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let n = ds.n();
    let mut sampler_name = None;
    let mut solution = None;
    let mut baseline = None;
    match args.method {
        Method::Base | Method::Iterative | Method::PairRemoval | Method::N2 => {
            let num_vars = if args.method == Method::N2 { n * n } else { num_pairs(n) };
            let (sampler, name) = make_sampler(&args.solver, num_vars)?;
            sampler_name = Some(name);
            let sol = match args.method {
                Method::Base => solve_base(&ds, &sampler, &opts)?,
                Method::Iterative => solve_iterative(&ds, &sampler, &opts)?,
                Method::PairRemoval => {
                    let strategy = args.pr_strategy.ok_or_else(|| usage("-m pair-removal needs --pr-strategy"))?;
                    let count = args.pr_count.ok_or_else(|| usage("-m pair-removal needs --pr-count"))?;
                    if args.pr_min_gap < 2 {
                        return Err(usage("--pr-min-gap must be at least 2"));
                    }
                    let pr = PairRemoval {
                        strategy,
                        count,
                        min_gap: args.pr_min_gap,
                        max_restarts: args.pr_max_restarts,
                        mode: args.penalty_mode,
                    };
                    solve_pair_removal(&ds, &sampler, &pr, &opts)?
                }
                _ => {
                    if ds.kind() != ListKind::Complete {
                        return Err(usage("-m n2 needs complete lists"));
                    }
                    solve_n2(&ds, &sampler, args.solver.seed)?
                }
            };
            solution = Some(sol);
        }
        Method::Kwiksort => {
            let pm = build_comparison(&ds);
            let mut trials = Vec::with_capacity(args.trials);
            let mut best: Option<(Ranking, f64)> = None;
            for t in 0..args.trials {
                let seed = args.solver.seed.wrapping_add(t as u64);
                let r = kwiksort(&pm, seed);
                let kt = cumulative_kt(&ds, &r)?;
                if best.as_ref().map_or(true, |(_, b)| kt < *b) {
                    best = Some((r, kt));
                }
                trials.push(KwikTrial { trial: t, seed, kt });
            }
            let (best_ranking, best_kt) = best.expect("at least one trial");
            let mean_kt = trials.iter().map(|t| t.kt).sum::<f64>() / trials.len() as f64;
            baseline = Some(BaselineReport::Kwiksort { best_ranking, best_kt, mean_kt, trials });
        }
        Method::BruteForce => {
            let res = brute_force(&ds)?;
            baseline = Some(BaselineReport::BruteForce { min_kt: res.min_kt, optima: res.optima });
        }
    }

    let oracle = if (args.oracle || n <= DEFAULT_BRUTE_FORCE_CAP) && args.method != Method::BruteForce {
        let res = brute_force(&ds)?;
        let (bits, kt, occ) = match (&solution, &baseline) {
            (Some(sol), _) => (sol.bits.clone(), sol.cumulative_kt, optimal_occ(sol, &res)),
            (None, Some(BaselineReport::Kwiksort { best_ranking, best_kt, .. })) => {
                (represent(best_ranking)?, *best_kt, None)
            }
            _ => unreachable!("every method yields a solution or a baseline"),
        };
        Some(OracleComparison {
            min_kt: res.min_kt,
            optima_count: res.optima.len(),
            accuracy: accuracy(&bits, &res.optima)?,
            kt_gap: kt - res.min_kt,
            optimal_occ: occ,
        })
    } else {
        None
    };

    let report = RunReport {
        command,
        dataset: digest,
        method: method_name(args.method).into(),
        sampler: sampler_name,
        seed: args.solver.seed,
        solution,
        baseline,
        oracle,
        wall_clock_ms: start.elapsed().as_secs_f64() * 1e3,
    };
    let text = match args.format {
        Format::Json => serde_json::to_string_pretty(&report).map_err(Error::from)? + "\n",
        Format::Csv => report_csv(&report)?,
    };
    emit(args.output.as_deref(), &text, out)
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Base => "base",
        Method::Iterative => "iterative",
        Method::PairRemoval => "pair-removal",
        Method::Kwiksort => "kwiksort",
        Method::BruteForce => "brute-force",
        Method::N2 => "n2",
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Header of `solve --format csv`.
pub const SOLVE_CSV_HEADER: [&str; 10] =
    ["method", "trial", "seed", "ranking", "kt", "normalized_kt", "converged", "iterations", "energy", "num_occ"];

fn report_csv(report: &RunReport) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SOLVE_CSV_HEADER).map_err(Error::from)?;
    let joined = |r: &Ranking| r.order().iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut row = |cells: [String; 10]| w.write_record(&cells).map_err(Error::from);
    if let Some(sol) = &report.solution {
        row([
            report.method.clone(),
            "0".into(),
            report.seed.to_string(),
            joined(&sol.ranking),
            sol.cumulative_kt.to_string(),
            sol.normalized_kt.to_string(),
            sol.converged.to_string(),
            sol.iterations.to_string(),
            sol.energy.to_string(),
            sol.num_occ.to_string(),
        ])?;
    }
    match &report.baseline {
        Some(BaselineReport::Kwiksort { trials, .. }) => {
            for t in trials {
                let blank = String::new;
                row([
                    report.method.clone(),
                    t.trial.to_string(),
                    t.seed.to_string(),
                    blank(),
                    t.kt.to_string(),
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                    blank(),
                ])?;
            }
        }
        Some(BaselineReport::BruteForce { min_kt, optima }) => {
            for (i, r) in optima.iter().enumerate() {
                row([
                    report.method.clone(),
                    i.to_string(),
                    report.seed.to_string(),
                    joined(r),
                    min_kt.to_string(),
                    String::new(),
                    "true".into(),
                    String::new(),
                    String::new(),
                    String::new(),
                ])?;
            }
        }
        None => {}
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Header of `compare` output.
pub const COMPARE_CSV_HEADER: [&str; 12] = [
    "row",
    "method",
    "run",
    "seed",
    "best_kt",
    "mean_kt",
    "iterations",
    "trials",
    "wall_ms",
    "threshold_kt",
    "mean_trials_to_beat",
    "mean_time_to_beat_ms",
];

/// Mean KwikSort trials (and time) to find a distance strictly below a
/// threshold, estimated as trials / successes.
#[derive(Debug, Clone, PartialEq)]
pub struct Threshold {
    pub name: &'static str,
    pub kt: f64,
    pub mean_trials: Option<f64>,
    pub mean_time_ms: Option<f64>,
}

pub fn thresholds(im_runs: &[Vec<f64>], ks: &[f64], ks_ms_per_trial: f64) -> Vec<Threshold> {
    let all: Vec<f64> = im_runs.iter().flatten().copied().collect();
    let run_mins: Vec<f64> = im_runs.iter().map(|r| r.iter().copied().fold(f64::INFINITY, f64::min)).collect();
    let avg = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let levels = [
        ("avg", avg(&all)),
        ("avg_run_min", avg(&run_mins)),
        ("min_run_min", run_mins.iter().copied().fold(f64::INFINITY, f64::min)),
    ];
    levels
        .into_iter()
        .map(|(name, kt)| {
            let wins = ks.iter().filter(|&&k| k < kt).count();
            let mean_trials = (wins > 0).then(|| ks.len() as f64 / wins as f64);
            Threshold { name, kt, mean_trials, mean_time_ms: mean_trials.map(|t| t * ks_ms_per_trial) }
        })
        .collect()
}

pub fn cmd_compare(args: &CompareArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (ds, _) = load(&args.votes, &args.solver)?;
    if args.runs == 0 || args.trials == 0 {
        return Err(usage("--runs and --trials must be at least 1"));
    }
    let (sampler, _) = make_sampler(&args.solver, num_pairs(ds.n()))?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(COMPARE_CSV_HEADER).map_err(Error::from)?;
    let fmt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));

    let mut im_runs = Vec::with_capacity(args.runs);
    for r in 0..args.runs {
        let seed = args.solver.seed.wrapping_add(r as u64);
        let mut opts = iter_options(&args.solver, Some(args.stop_after_updates))?;
        opts.seed = seed;
        let start = Instant::now();
        let sol = solve_iterative(&ds, &sampler, &opts)?;
        let ms = start.elapsed().as_secs_f64() * 1e3;
        let kts: Vec<f64> = sol.trace.iter().map(|t| t.best_kt).collect();
        let mean = kts.iter().sum::<f64>() / kts.len() as f64;
        w.write_record([
            "run".into(),
            "iterative".into(),
            r.to_string(),
            seed.to_string(),
            sol.cumulative_kt.to_string(),
            format!("{mean:.3}"),
            sol.iterations.to_string(),
            String::new(),
            format!("{ms:.3}"),
            String::new(),
            String::new(),
            String::new(),
        ])
        .map_err(Error::from)?;
        im_runs.push(kts);
    }

    let pm = build_comparison(&ds);
    let start = Instant::now();
    let ks: Vec<f64> = (0..args.trials)
        .map(|t| cumulative_kt(&ds, &kwiksort(&pm, args.solver.seed.wrapping_add(t as u64))))
        .collect::<Result<_, _>>()?;
    let ks_ms = start.elapsed().as_secs_f64() * 1e3;
    let best = ks.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = ks.iter().sum::<f64>() / ks.len() as f64;
    w.write_record([
        "run".into(),
        "kwiksort".into(),
        "0".into(),
        args.solver.seed.to_string(),
        best.to_string(),
        format!("{mean:.3}"),
        String::new(),
        args.trials.to_string(),
        format!("{ks_ms:.3}"),
        String::new(),
        String::new(),
        String::new(),
    ])
    .map_err(Error::from)?;

    for th in thresholds(&im_runs, &ks, ks_ms / args.trials as f64) {
        w.write_record([
            format!("summary:{}", th.name),
            "kwiksort".into(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            String::new(),
            args.trials.to_string(),
            String::new(),
            format!("{:.3}", th.kt),
            fmt(th.mean_trials),
            fmt(th.mean_time_ms),
        ])
        .map_err(Error::from)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    emit(args.output.as_deref(), &String::from_utf8(bytes).expect("csv output is UTF-8"), out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds_use_strict_improvement() {
        let im = vec![vec![10.0, 8.0], vec![9.0, 9.0]];
        let ks = [9.0, 7.0, 12.0, 8.0];
        let th = thresholds(&im, &ks, 2.0);
        assert_eq!(th[0].kt, 9.0);
        assert_eq!(th[0].mean_trials, Some(2.0));
        assert_eq!(th[0].mean_time_ms, Some(4.0));
        assert_eq!(th[1].kt, 8.5);
        assert_eq!(th[2].kt, 8.0);
        assert_eq!(th[2].mean_trials, Some(4.0));
        let none = thresholds(&[vec![0.0]], &[0.0, 0.0], 1.0);
        assert!(none.iter().all(|t| t.mean_trials.is_none()));
    }

    #[test]
    fn parses_flags() {
        let cli = Cli::try_parse_from([
            "kemeny-qa",
            "solve",
            "d.votes",
            "-m",
            "pair-removal",
            "--pr-strategy",
            "promega",
            "--pr-count",
            "2",
            "--pair-weight",
            "position:1.5",
            "--list-kind",
            "ktop",
            "--penalty-mode",
            "minmax",
        ])
        .unwrap();
        let Command::Solve(args) = cli.command else { panic!() };
        assert_eq!(args.method, Method::PairRemoval);
        assert_eq!(args.pr_strategy, Some(PrStrategy::Promega));
        assert_eq!(args.solver.pair_weight, WeightScheme::Position { p: 1.5 });
        assert_eq!(args.solver.list_kind, ListKind::Ktop);
        assert_eq!(args.penalty_mode, PenaltyMode::Minmax);
        assert!(Cli::try_parse_from(["kemeny-qa", "solve", "d.votes", "--pr-strategy", "nope"]).is_err());
    }
}
