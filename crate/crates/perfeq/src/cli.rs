//! The `perfeq` command line: compute, verify, simulate, and explore.
//!
//! Exit codes: `0` converged / verified, `1` input error, `2` numerical
//! non-convergence (the report is still written). Every numeric flag
//! default mirrors the library default, so a report is reproducible from
//! its flags alone.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use perfeq_core::equilibrium::{
    cluster_runs, initial_vector, seeded_starts, solve_equilibrium, verify_equilibrium,
    EquilibriumConfig, EquilibriumResult, ExploreReport, InitMode, UpdateScheme,
};
use perfeq_core::generate::{self, ResultRule};
use perfeq_core::model::{RatingVector, Tournament};
use perfeq_core::rating::{tpr_map, BoundaryParams, ClampBounds, EloParams};

use crate::io;
use crate::report::{ExploreDoc, ReportFormat, ResultReport, VerifyDoc};

#[derive(Parser, Debug)]
#[command(
    name = "perfeq",
    version,
    about = "Tournament performance ratings and their equilibria",
    long_about = "Computes per-player performance ratings (TPR) and equilibrium ratings \
                  (PPR): a rating vector that the tournament's rating map leaves unchanged, \
                  so every player's rating exactly predicts their realized score."
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a tournament read from players and games files and emit a report.
    Compute(ComputeArgs),
    /// Check how well a given rating vector predicts a tournament's scores.
    Verify(VerifyArgs),
    /// Generate a synthetic tournament, solve it, and emit a report.
    Simulate(SimulateArgs),
    /// Solve from several starting vectors and cluster the equilibria found.
    Explore(ExploreArgs),
}

#[derive(Args, Debug, Clone)]
struct InputArgs {
    /// Players CSV (header `id,name,rating`).
    #[arg(long, value_name = "FILE")]
    players: PathBuf,
    /// Games CSV (header `a,b,score_a`).
    #[arg(long, value_name = "FILE")]
    games: PathBuf,
    /// Rating assumed for players whose rating column is empty.
    #[arg(long, value_name = "ELO")]
    default_rating: Option<f64>,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    /// Step fraction of the fixed-point iteration, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    damping: f64,
    /// Sup-norm convergence tolerance, in rating points.
    #[arg(long, default_value_t = 1e-7)]
    sup_tol: f64,
    /// Iteration cap for the fixed-point loop.
    #[arg(long, default_value_t = 10_000)]
    max_iters: u32,
    /// Component update order within one iteration.
    #[arg(long, value_enum, default_value_t = SchemeArg::Simultaneous)]
    scheme: SchemeArg,
    /// Score margin applied to zero and perfect scores, in (0, 0.5].
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// Lower clamp bound for mapped ratings (default 0).
    #[arg(long, value_name = "ELO")]
    clamp_lo: Option<f64>,
    /// Upper clamp bound (default: the largest sum of any player's
    /// opponents' initial ratings).
    #[arg(long, value_name = "ELO")]
    clamp_hi: Option<f64>,
    /// Rating-difference scale of the expected-score curve.
    #[arg(long, default_value_t = 400.0)]
    scale: f64,
    /// Base of the expected-score exponential.
    #[arg(long, default_value_t = 10.0)]
    base: f64,
    /// Root tolerance of the per-player solve, in score units.
    #[arg(long, default_value_t = 1e-9)]
    root_tol: f64,
    /// Initial half-width padding of the bisection bracket, in rating points.
    #[arg(long, default_value_t = 4000.0)]
    bracket_pad: f64,
}

impl SolverArgs {
    fn elo(&self) -> EloParams {
        EloParams {
            scale: self.scale,
            base: self.base,
            root_tol: self.root_tol,
            bracket_pad: self.bracket_pad,
        }
    }

    fn boundary(&self) -> BoundaryParams {
        BoundaryParams { delta: self.delta }
    }

    fn clamp(&self, t: &Tournament) -> Result<ClampBounds, CliError> {
        let default = ClampBounds::for_tournament(t).map_err(input_err)?;
        ClampBounds::new(
            self.clamp_lo.unwrap_or(default.lo),
            self.clamp_hi.unwrap_or(default.hi),
        )
        .map_err(input_err)
    }

    fn config(&self, init: InitMode) -> EquilibriumConfig {
        EquilibriumConfig {
            init,
            damping: self.damping,
            sup_tol: self.sup_tol,
            max_iters: self.max_iters,
            scheme: match self.scheme {
                SchemeArg::Simultaneous => UpdateScheme::Simultaneous,
                SchemeArg::Sequential => UpdateScheme::Sequential,
            },
            record_trajectory: false,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    /// Report encoding.
    #[arg(long, value_enum, default_value_t = FormatArg::Markdown)]
    format: FormatArg,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum FormatArg {
    Json,
    Csv,
    Markdown,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => ReportFormat::Json,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Markdown => ReportFormat::Markdown,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum SchemeArg {
    Simultaneous,
    Sequential,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum InitArg {
    /// Uniform start at the mean of the resolved initial ratings.
    Average,
    /// Start from the players' initial ratings.
    Initial,
    /// Start from a ratings file given with --init-file.
    File,
}

#[derive(Args, Debug)]
struct ComputeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Iteration starting vector.
    #[arg(long, value_enum, default_value_t = InitArg::Average)]
    init: InitArg,
    /// Ratings CSV (header `id,rating`) for `--init file`.
    #[arg(long, value_name = "FILE", required_if_eq("init", "file"))]
    init_file: Option<PathBuf>,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Also write the equilibrium rating vector as a ratings CSV.
    #[arg(long, value_name = "FILE")]
    save_ratings: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Ratings CSV (header `id,rating`) to check against the tournament.
    #[arg(long, value_name = "FILE")]
    ratings: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum PairingArg {
    Random,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum RuleArg {
    /// Uniform over win, draw, loss.
    Mixed,
    /// Every game drawn.
    Draws,
    /// No draws.
    Decisive,
}

impl From<RuleArg> for ResultRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Mixed => ResultRule::Mixed,
            RuleArg::Draws => ResultRule::AllDraws,
            RuleArg::Decisive => ResultRule::Decisive,
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Single round-robin on this many players.
    #[arg(long, value_name = "N", conflicts_with_all = ["pairing", "n", "rounds"])]
    round_robin: Option<usize>,
    /// Pairing generator for sparse tournaments.
    #[arg(long, value_enum, requires = "n", requires = "rounds")]
    pairing: Option<PairingArg>,
    /// Number of players for --pairing.
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Number of rounds for --pairing.
    #[arg(long, value_name = "R")]
    rounds: Option<usize>,
    /// Generator seed; identical seeds reproduce the tournament exactly.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result rule for generated games.
    #[arg(long, value_enum, default_value_t = RuleArg::Mixed)]
    rule: RuleArg,
    /// Initial rating assigned to generated players.
    #[arg(long, default_value_t = generate::GENERATED_DEFAULT_RATING)]
    default_rating: f64,
    /// Iteration starting vector.
    #[arg(long, value_enum, default_value_t = InitArg::Average)]
    init: InitArg,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Also write the equilibrium rating vector as a ratings CSV.
    #[arg(long, value_name = "FILE")]
    save_ratings: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
enum StartArg {
    Average,
    Initial,
}

#[derive(Args, Debug)]
struct ExploreArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Named starting vectors (repeatable). Defaults to `average` when no
    /// start flags are given at all.
    #[arg(long = "start", value_enum)]
    starts: Vec<StartArg>,
    /// Ratings CSV starting vectors (repeatable).
    #[arg(long = "start-file", value_name = "FILE")]
    start_files: Vec<PathBuf>,
    /// Additional seeded random starts.
    #[arg(long, value_name = "K")]
    random_starts: Option<usize>,
    /// Seed for --random-starts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random starts spread uniformly within this many points of the average.
    #[arg(long, default_value_t = 400.0)]
    spread: f64,
    /// Sup-distance below which two equilibria count as the same.
    #[arg(long, default_value_t = 0.5)]
    cluster_tol: f64,
    /// Worker thread cap for running the starts.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

/// Input failures exit with code 1; messages go to standard error.
#[derive(Debug)]
struct CliError(String);

fn input_err(e: impl std::fmt::Display) -> CliError {
    CliError(e.to_string())
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError(format!("cannot read `{}`: {e}", path.display())))
}

fn parse_errors(path: &Path, errors: Vec<io::ParseError>) -> CliError {
    let mut msg = format!("`{}`:", path.display());
    for e in errors {
        msg.push_str(&format!("\n  {e}"));
    }
    CliError(msg)
}

fn load_input(input: &InputArgs) -> Result<Tournament, CliError> {
    let players_text = read_file(&input.players)?;
    let players = io::parse_players(&players_text).map_err(|e| parse_errors(&input.players, e))?;
    let games_text = read_file(&input.games)?;
    let games = io::parse_games(&games_text).map_err(|e| parse_errors(&input.games, e))?;
    io::load_tournament(&players, &games, input.default_rating).map_err(|violations| {
        let mut msg = "invalid tournament:".to_string();
        for v in violations {
            msg.push_str(&format!("\n  {v}"));
        }
        CliError(msg)
    })
}

fn load_ratings(path: &Path) -> Result<RatingVector, CliError> {
    let text = read_file(path)?;
    let file = io::parse_ratings(&text).map_err(|e| parse_errors(path, e))?;
    let mut v = RatingVector::new();
    for (id, r) in file.rows {
        v.insert(id, r);
    }
    Ok(v)
}

fn write_output(output: &OutputArgs, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError(format!("cannot write `{}`: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn resolve_init(
    init: InitArg,
    init_file: Option<&PathBuf>,
    t: &Tournament,
) -> Result<InitMode, CliError> {
    Ok(match init {
        InitArg::Average => InitMode::Average,
        InitArg::Initial => InitMode::InitialRatings,
        InitArg::File => {
            let path = init_file
                .ok_or_else(|| CliError("--init file requires --init-file".to_string()))?;
            let v = load_ratings(path)?;
            if !v.covers(t) {
                return Err(CliError(format!(
                    "`{}` does not cover the tournament's players",
                    path.display()
                )));
            }
            InitMode::Custom(v)
        }
    })
}

/// Solve + report for a loaded tournament; shared by compute and simulate.
fn solve_and_report(
    t: &Tournament,
    init: InitMode,
    solver: &SolverArgs,
    output: &OutputArgs,
    save_ratings: Option<&PathBuf>,
) -> Result<ExitCode, CliError> {
    let params = solver.elo();
    let boundary = solver.boundary();
    let clamp = solver.clamp(t)?;
    let cfg = solver.config(init);

    let initial: RatingVector = t
        .players()
        .iter()
        .zip(t.resolved_ratings().map_err(input_err)?)
        .map(|(p, r)| (p.id.clone(), r))
        .collect();
    let baseline = tpr_map(t, &initial, &params, &clamp, &boundary).map_err(input_err)?;
    let result = solve_equilibrium(t, &params, &clamp, &boundary, &cfg).map_err(input_err)?;
    let report = ResultReport::build(t, &result, &baseline, &params, &clamp, &boundary, &cfg)
        .map_err(input_err)?;

    write_output(output, &report.render(output.format.into()))?;
    if let Some(path) = save_ratings {
        fs::write(path, io::emit_ratings(&result.ratings))
            .map_err(|e| CliError(format!("cannot write `{}`: {e}", path.display())))?;
    }
    if !result.converged {
        eprintln!(
            "not converged after {} iterations: residual {:.3e} > sup_tol {:.1e}",
            result.iterations, result.residual, cfg.sup_tol
        );
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_compute(args: &ComputeArgs) -> Result<ExitCode, CliError> {
    let t = load_input(&args.input)?;
    let init = resolve_init(args.init, args.init_file.as_ref(), &t)?;
    solve_and_report(
        &t,
        init,
        &args.solver,
        &args.output,
        args.save_ratings.as_ref(),
    )
}

fn cmd_verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let t = load_input(&args.input)?;
    let x = load_ratings(&args.ratings)?;
    if !x.covers(&t) {
        return Err(CliError(format!(
            "`{}` does not cover the tournament's players",
            args.ratings.display()
        )));
    }
    let params = args.solver.elo();
    let boundary = args.solver.boundary();
    let clamp = args.solver.clamp(&t)?;
    let report = verify_equilibrium(&t, &x, &params, &clamp, &boundary).map_err(input_err)?;
    let doc = VerifyDoc::build(&report, args.solver.sup_tol);
    write_output(&args.output, &doc.render(args.output.format.into()))?;
    if doc.verified {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "residual {:.3e} exceeds sup_tol {:.1e}",
            doc.residual, doc.sup_tol
        );
        Ok(ExitCode::from(2))
    }
}

fn cmd_simulate(args: &SimulateArgs) -> Result<ExitCode, CliError> {
    let rule: ResultRule = args.rule.into();
    let generated = match (args.round_robin, args.pairing) {
        (Some(n), None) => generate::round_robin(n, args.seed, rule),
        (None, Some(PairingArg::Random)) => {
            let n = args.n.expect("clap enforces --n");
            let rounds = args.rounds.expect("clap enforces --rounds");
            generate::random_pairing(n, rounds, args.seed, rule)
        }
        (None, None) => {
            return Err(CliError(
                "choose a generator: --round-robin N or --pairing random --n N --rounds R"
                    .to_string(),
            ))
        }
        (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
    }
    .map_err(input_err)?;

    // Rebuild with the requested default rating.
    let t = Tournament::new(
        generated.players().to_vec(),
        generated.games().to_vec(),
        Some(args.default_rating),
    );
    let init = resolve_init(args.init, None, &t)?;
    solve_and_report(
        &t,
        init,
        &args.solver,
        &args.output,
        args.save_ratings.as_ref(),
    )
}

fn cmd_explore(args: &ExploreArgs) -> Result<ExitCode, CliError> {
    let t = load_input(&args.input)?;
    let params = args.solver.elo();
    let boundary = args.solver.boundary();
    let clamp = args.solver.clamp(&t)?;
    let cfg = args.solver.config(InitMode::Average);

    let mut labels = Vec::new();
    let mut starts = Vec::new();
    let named: &[StartArg] =
        if args.starts.is_empty() && args.start_files.is_empty() && args.random_starts.is_none() {
            &[StartArg::Average]
        } else {
            &args.starts
        };
    for s in named {
        let (label, mode) = match s {
            StartArg::Average => ("average", InitMode::Average),
            StartArg::Initial => ("initial_ratings", InitMode::InitialRatings),
        };
        let mut c = cfg.clone();
        c.init = mode;
        starts.push(initial_vector(&t, &c).map_err(input_err)?);
        labels.push(label.to_string());
    }
    for path in &args.start_files {
        let v = load_ratings(path)?;
        if !v.covers(&t) {
            return Err(CliError(format!(
                "`{}` does not cover the tournament's players",
                path.display()
            )));
        }
        starts.push(v);
        labels.push(format!("file:{}", path.display()));
    }
    if let Some(k) = args.random_starts {
        let random = seeded_starts(&t, k, args.seed, args.spread).map_err(input_err)?;
        for (i, v) in random.into_iter().enumerate() {
            starts.push(v);
            labels.push(format!("random:{i}"));
        }
    }

    let report = explore_parallel(
        &t,
        &params,
        &clamp,
        &boundary,
        &cfg,
        &starts,
        args.threads.max(1),
    )
    .map_err(input_err)?;
    let (distances, clusters) = cluster_runs(&report, args.cluster_tol);
    let explore = ExploreReport {
        runs: report,
        distances,
        clusters,
    };
    let doc = ExploreDoc::build(&explore, &labels, args.cluster_tol);
    write_output(&args.output, &doc.render(args.output.format.into()))?;

    if explore.runs.iter().all(|r| r.converged) {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("one or more starts did not converge");
        Ok(ExitCode::from(2))
    }
}

/// Runs each start through the solver, fanning out across at most
/// `threads` workers. Results keep start order, so the output is identical
/// to a sequential run regardless of thread count.
fn explore_parallel(
    t: &Tournament,
    params: &EloParams,
    clamp: &ClampBounds,
    boundary: &BoundaryParams,
    cfg: &EquilibriumConfig,
    starts: &[RatingVector],
    threads: usize,
) -> Result<Vec<EquilibriumResult>, perfeq_core::equilibrium::EquilibriumError> {
    let solve_one = |start: &RatingVector| {
        let mut run_cfg = cfg.clone();
        run_cfg.init = InitMode::Custom(start.clone());
        solve_equilibrium(t, params, clamp, boundary, &run_cfg)
    };

    if threads <= 1 || starts.len() <= 1 {
        return starts.iter().map(solve_one).collect();
    }

    let workers = threads.min(starts.len());
    let chunk = starts.len().div_ceil(workers);
    let mut results: Vec<Option<Result<EquilibriumResult, _>>> = Vec::new();
    results.resize_with(starts.len(), || None);

    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for (w, batch) in starts.chunks(chunk).enumerate() {
            let solve_one = &solve_one;
            handles.push(scope.spawn(move || {
                batch
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (w * chunk + i, solve_one(s)))
                    .collect::<Vec<_>>()
            }));
        }
        for handle in handles {
            for (idx, r) in handle.join().expect("worker panicked") {
                results[idx] = Some(r);
            }
        }
    });

    results
        .into_iter()
        .map(|r| r.expect("every start solved"))
        .collect()
}

/// Parses argv and runs the requested subcommand.
pub fn run() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Explore(args) => cmd_explore(args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
