//! `bandod`: band order dependency discovery over CSV files.
//!
//! Every command prints one JSON report on standard output. Exit codes:
//! 0 success, 2 usage, 3 data error, 4 input too large for an oracle.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use bandod::bench::SeriesDatasetConfig;
use bandod::discovery::DpStrategy;
use bandod::model::Orientation;
use clap::{Args, Parser, Subcommand, ValueEnum};

use commands::{Check, DeltaChoice, DiscoverOptions, Input, Method, Mode};
use io::{CliError, CliResult, ColumnSpec};
use report::{discovery_tsv, to_json};

#[derive(Parser)]
#[command(name = "bandod", version, about = "Discover band order dependencies in CSV data")]
struct Cli {
    /// Worker threads for per-group work (0 = one per core)
    #[arg(long, global = true, env = "BANDOD_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Find segments on which Y follows X within a band
    Discover(DiscoverArgs),
    /// Longest monotonic band of Y sorted by X
    Lmb(LmbArgs),
    /// Estimate the band-width from the data
    EstimateDelta(EstimateArgs),
    /// Rank candidate dependencies by how distinct their band-width is
    RankCandidates(RankArgs),
    /// Write a synthetic dataset of monotone series and its ground truth
    Generate(GenerateArgs),
    /// Inject errors into a generated dataset
    Perturb(PerturbArgs),
    /// Score a segmentation against ground truth (pairwise F1)
    Evaluate(EvaluateArgs),
    /// Split at unusually large X gaps (baseline)
    Gap(GapArgs),
    /// Exhaustive reference answers for inputs of at most 12 rows
    Oracle(OracleArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Asc,
    Desc,
    Bi,
}

impl From<DirectionArg> for Orientation {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Asc => Orientation::Asc,
            DirectionArg::Desc => Orientation::Desc,
            DirectionArg::Bi => Orientation::Bi,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Abod,
    Bcod,
    Abcod,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Tsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Abcod,
    Gap,
}

#[derive(Clone, Copy, ValueEnum)]
enum CheckArg {
    Lmb,
    Abcod,
    Bcod,
}

fn parse_delta(raw: &str) -> Result<DeltaChoice, String> {
    if raw == "auto" {
        return Ok(DeltaChoice::Auto);
    }
    match raw.parse::<i64>() {
        Ok(d) if d >= 0 => Ok(DeltaChoice::Fixed(d)),
        _ => Err(format!("expected a non-negative integer or `auto`, got `{raw}`")),
    }
}

#[derive(Args)]
struct InputArgs {
    /// CSV file with a header row
    #[arg(short, long)]
    input: PathBuf,
    /// Ordering columns, `name[:int|dec<N>|text|cat=A|B|month]`, comma separated
    #[arg(long)]
    x: String,
    /// Ordered columns, same syntax as --x
    #[arg(long)]
    y: String,
    /// Column whose values label rows in the report
    #[arg(long)]
    id: Option<String>,
    /// Discover separately within each value of this column
    #[arg(long)]
    group_by: Option<String>,
}

impl InputArgs {
    fn specs(&self) -> CliResult<(Vec<ColumnSpec>, Vec<ColumnSpec>)> {
        Ok((ColumnSpec::parse_list(&self.x)?, ColumnSpec::parse_list(&self.y)?))
    }
}

#[derive(Args)]
struct EstimateOpts {
    /// Largest band-width tried
    #[arg(long, default_value_t = 20)]
    delta_max: i64,
    /// Error ratio below which a stretch counts as ordered while dividing
    #[arg(long, default_value_t = 0.4)]
    ratio: f64,
}

#[derive(Args)]
struct DiscoverArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "abcod")]
    mode: ModeArg,
    #[arg(long, value_enum, default_value = "bi")]
    direction: DirectionArg,
    /// Band-width, or `auto` to estimate it per group
    #[arg(long, default_value = "1", value_parser = parse_delta)]
    delta: DeltaChoice,
    /// Longest run of consecutive outliers allowed inside a segment
    #[arg(long, default_value_t = 1)]
    epsilon: usize,
    /// Restrict split points to piece boundaries (default)
    #[arg(long, overrides_with = "no_pieces")]
    pieces: bool,
    /// Consider every split point
    #[arg(long)]
    no_pieces: bool,
    /// Recompute every candidate range from scratch (slower, same result)
    #[arg(long)]
    recompute: bool,
    #[command(flatten)]
    estimate: EstimateOpts,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Add wall-clock timings to the report (makes output non-reproducible)
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct LmbArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1)]
    delta: i64,
    #[arg(long, value_enum, default_value = "bi")]
    direction: DirectionArg,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "bi")]
    direction: DirectionArg,
    #[command(flatten)]
    estimate: EstimateOpts,
}

#[derive(Args)]
struct RankArgs {
    #[arg(short, long)]
    input: PathBuf,
    /// Candidate `X=>Y`, e.g. `country,cat=>year`; repeatable
    #[arg(long = "candidate", required = true)]
    candidates: Vec<String>,
    #[arg(long, value_enum, default_value = "bi")]
    direction: DirectionArg,
    #[command(flatten)]
    estimate: EstimateOpts,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 30)]
    series: usize,
    #[arg(long, default_value_t = 40)]
    size_min: usize,
    #[arg(long, default_value_t = 60)]
    size_max: usize,
    /// Share of ascending series
    #[arg(long, default_value_t = 1.0)]
    asc_fraction: f64,
    /// Largest backward wiggle inside a series
    #[arg(long, default_value_t = 1)]
    jitter: i64,
    #[arg(long, default_value_t = 0)]
    step_min: i64,
    #[arg(long, default_value_t = 2)]
    step_max: i64,
    /// Base drop between consecutive series
    #[arg(long, default_value_t = 500)]
    series_jump: i64,
    #[arg(long, default_value_t = 0.0)]
    null_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Data CSV (row_id,x,y)
    #[arg(short, long)]
    output: PathBuf,
    /// Ground-truth CSV (row_id,series_id,is_error)
    #[arg(long)]
    truth: PathBuf,
}

#[derive(Args)]
struct PerturbArgs {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(long)]
    truth: PathBuf,
    /// Fraction of rows replaced by errors
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
    #[arg(long)]
    truth_output: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    truth: PathBuf,
    #[arg(long, value_enum, default_value = "abcod")]
    method: MethodArg,
    #[arg(long, value_enum, default_value = "bi")]
    direction: DirectionArg,
    #[arg(long, default_value = "1", value_parser = parse_delta)]
    delta: DeltaChoice,
    #[arg(long, default_value_t = 1)]
    epsilon: usize,
    #[arg(long)]
    no_pieces: bool,
    #[command(flatten)]
    estimate: EstimateOpts,
    /// Gap threshold in standard deviations above the mean gap
    #[arg(long, default_value_t = 3.0)]
    k_sigma: f64,
}

#[derive(Args)]
struct GapArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 3.0)]
    k_sigma: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum)]
    check: CheckArg,
    #[arg(long, default_value_t = 1)]
    delta: i64,
    #[arg(long, default_value_t = 1)]
    epsilon: usize,
    #[arg(long, value_enum, default_value = "bi")]
    direction: DirectionArg,
}

fn discover_options(
    mode: ModeArg,
    direction: DirectionArg,
    delta: DeltaChoice,
    epsilon: usize,
    pieces: bool,
    recompute: bool,
    est: &EstimateOpts,
) -> DiscoverOptions {
    DiscoverOptions {
        mode: match mode {
            ModeArg::Abod => Mode::Abod,
            ModeArg::Bcod => Mode::Bcod,
            ModeArg::Abcod => Mode::Abcod,
        },
        orientation: direction.into(),
        delta,
        epsilon,
        pieces,
        strategy: if recompute {
            DpStrategy::Recompute
        } else {
            DpStrategy::Incremental
        },
        ratio: est.ratio,
        delta_max: est.delta_max,
    }
}

fn run(command: Command) -> CliResult<String> {
    match command {
        Command::Discover(a) => {
            let (x, y) = a.input.specs()?;
            let input = input(&a.input, &x, &y);
            let opts = discover_options(
                a.mode,
                a.direction,
                a.delta,
                a.epsilon,
                !a.no_pieces,
                a.recompute,
                &a.estimate,
            );
            let r = commands::discover(&input, &opts, a.timings)?;
            Ok(match a.format {
                Format::Json => to_json(&r),
                Format::Tsv => discovery_tsv(&r),
            })
        }
        Command::Lmb(a) => {
            let (x, y) = a.input.specs()?;
            Ok(to_json(&commands::lmb(
                &input(&a.input, &x, &y),
                a.delta,
                a.direction.into(),
            )?))
        }
        Command::EstimateDelta(a) => {
            let (x, y) = a.input.specs()?;
            let r = commands::estimate_delta(
                &input(&a.input, &x, &y),
                a.estimate.delta_max,
                a.estimate.ratio,
                a.direction.into(),
            )?;
            Ok(to_json(&r))
        }
        Command::RankCandidates(a) => {
            let r = commands::rank(
                &a.input,
                &a.candidates,
                a.estimate.delta_max,
                a.estimate.ratio,
                a.direction.into(),
            )?;
            Ok(to_json(&r))
        }
        Command::Generate(a) => {
            let cfg = SeriesDatasetConfig {
                series_count: a.series,
                size_min: a.size_min,
                size_max: a.size_max,
                asc_fraction: a.asc_fraction,
                jitter: a.jitter,
                step_min: a.step_min,
                step_max: a.step_max,
                series_jump: a.series_jump,
                null_rate: a.null_rate,
                seed: a.seed,
                ..Default::default()
            };
            Ok(to_json(&commands::generate(&cfg, &a.output, &a.truth)?))
        }
        Command::Perturb(a) => {
            let r = commands::perturb(&a.input, &a.truth, a.rate, a.seed, &a.output, &a.truth_output)?;
            Ok(to_json(&r))
        }
        Command::Evaluate(a) => {
            let (x, y) = a.input.specs()?;
            let opts = discover_options(
                ModeArg::Abcod,
                a.direction,
                a.delta,
                a.epsilon,
                !a.no_pieces,
                false,
                &a.estimate,
            );
            let method = match a.method {
                MethodArg::Abcod => Method::Abcod,
                MethodArg::Gap => Method::Gap,
            };
            Ok(to_json(&commands::evaluate(
                &input(&a.input, &x, &y),
                &a.truth,
                method,
                &opts,
                a.k_sigma,
            )?))
        }
        Command::Gap(a) => {
            let (x, y) = a.input.specs()?;
            let r = commands::gap(&input(&a.input, &x, &y), a.k_sigma)?;
            Ok(match a.format {
                Format::Json => to_json(&r),
                Format::Tsv => discovery_tsv(&r),
            })
        }
        Command::Oracle(a) => {
            let (x, y) = a.input.specs()?;
            let check = match a.check {
                CheckArg::Lmb => Check::Lmb,
                CheckArg::Abcod => Check::Abcod,
                CheckArg::Bcod => Check::Bcod,
            };
            Ok(to_json(&commands::oracle(
                &input(&a.input, &x, &y),
                check,
                a.delta,
                a.epsilon,
                a.direction.into(),
            )?))
        }
    }
}

fn input<'a>(a: &'a InputArgs, x: &'a [ColumnSpec], y: &'a [ColumnSpec]) -> Input<'a> {
    Input {
        path: &a.input,
        x,
        y,
        id: a.id.as_deref(),
        group_by: a.group_by.as_deref(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build();
    let result = match pool {
        Ok(pool) => pool.install(|| run(cli.command)),
        Err(e) => Err(CliError::Usage(format!("cannot start worker threads: {e}"))),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("bandod: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
