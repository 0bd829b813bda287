//! `rbo`: simulate energy-limited receivers on a bit-reversal broadcast
//! cycle and certify their energy bounds.
//!
//! Exit codes: 0 when every check passes, 1 when a sweep found a
//! counterexample (the report is still written), 2 on bad input or
//! configuration.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rbo::analysis::decompose;
use rbo::protocol::{self, BroadcastCycle, QueryInterval};
use rbo::verifier::{
    lemma_sweep, query_for_targets, query_realizing, sweep_bounds, worst_case, KeyScheme,
    SweepConfig, SweepMode, DEFAULT_EXHAUSTIVE_CAP,
};

#[derive(Parser)]
#[command(
    name = "rbo",
    version,
    about = "Bit-reversal broadcast scheduling toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one receiver and print its slot-by-slot trace.
    Trace(TraceArgs),
    /// Print the aligned-segment ladder of a start slot.
    Decompose(DecomposeArgs),
    /// Sweep instances, checking energy bounds, closed forms and
    /// delivery on every run.
    Verify(SweepArgs),
    /// Run the per-segment statement suite over a range of exponents.
    Lemmas(LemmaArgs),
    /// Report the worst extra energy found per exponent.
    Worst(SweepArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Copy, Clone, ValueEnum)]
enum ModeArg {
    Exhaustive,
    Random,
}

#[derive(Copy, Clone, ValueEnum)]
enum SchemeArg {
    /// Distinct keys 0, 2, 4, ...
    Distinct,
    /// Each key doubled: 0, 0, 4, 4, ...
    Duplicates,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("selection").required(true).args(["query", "targets"]))]
struct TraceArgs {
    /// Cycle exponent; the cycle carries 2^k generated keys 0, 2, 4, ...
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=20))]
    k: Option<u32>,

    /// Start slot, reduced mod 2^k.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    s: i64,

    /// Comma-separated ascending keys; the count must be a power of two.
    #[arg(long, conflicts_with = "keys_file")]
    keys: Option<String>,

    /// File with one key per line, same rules as --keys.
    #[arg(long)]
    keys_file: Option<PathBuf>,

    /// Key interval to query, as `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    query: Option<String>,

    /// Target index pair `r_lo:r_hi`; `r_hi = r_lo - 1` asks for an
    /// empty result.
    #[arg(long, allow_hyphen_values = true)]
    targets: Option<String>,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Write the report to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Cycle exponent.
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=32))]
    k: u32,

    /// Start slot, reduced mod 2^k.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    s: i64,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Single exponent to sweep.
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=24))]
    k: Option<u32>,

    /// Inclusive exponent range, as `lo:hi`.
    #[arg(long, conflicts_with = "k")]
    k_range: Option<String>,

    #[arg(long, value_enum, default_value_t = ModeArg::Exhaustive)]
    mode: ModeArg,

    /// Instances drawn per exponent in random mode.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,

    /// Seed for random mode; identical seeds reproduce reports exactly.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long, value_enum, default_value_t = SchemeArg::Distinct)]
    key_scheme: SchemeArg,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; defaults to all cores. Results do not depend on
    /// this.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct LemmaArgs {
    /// Single exponent to check.
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=24))]
    k: Option<u32>,

    /// Inclusive exponent range, as `lo:hi`.
    #[arg(long, conflicts_with = "k")]
    k_range: Option<String>,

    #[arg(long, value_enum, default_value_t = SchemeArg::Distinct)]
    key_scheme: SchemeArg,

    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; defaults to all cores. Results do not depend on
    /// this.
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    match dispatch() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn dispatch() -> Result<bool> {
    match Cli::parse().command {
        Command::Trace(args) => run_trace(args),
        Command::Decompose(args) => run_decompose(args),
        Command::Verify(args) => run_sweep(args, false),
        Command::Worst(args) => run_sweep(args, true),
        Command::Lemmas(args) => run_lemmas(args),
    }
}

fn parse_pair<T: std::str::FromStr>(text: &str, what: &str) -> Result<(T, T)>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| anyhow!("{what} must look like `lo:hi`, got {text:?}"))?;
    let lo = lo
        .trim()
        .parse()
        .with_context(|| format!("{what}: bad value {lo:?}"))?;
    let hi = hi
        .trim()
        .parse()
        .with_context(|| format!("{what}: bad value {hi:?}"))?;
    Ok((lo, hi))
}

fn parse_keys_csv(text: &str) -> Result<Vec<i64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .with_context(|| format!("--keys: bad value {:?}", tok.trim()))
        })
        .collect()
}

fn parse_keys_file(path: &Path) -> Result<Vec<i64>> {
    let body = fs::read_to_string(path)
        .with_context(|| format!("reading keys file {}", path.display()))?;
    body.lines()
        .enumerate()
        .filter(|(_, line)| !line.trim().is_empty())
        .map(|(ln, line)| {
            line.trim().parse().with_context(|| {
                format!("{}:{}: bad key {:?}", path.display(), ln + 1, line.trim())
            })
        })
        .collect()
}

fn emit(out: Option<&Path>, body: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, body).with_context(|| format!("writing report to {}", path.display()))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn exhaustive_cap() -> Result<u32> {
    match std::env::var("RBO_EXHAUSTIVE_CAP") {
        Ok(raw) => raw
            .trim()
            .parse()
            .with_context(|| format!("RBO_EXHAUSTIVE_CAP: bad value {raw:?}")),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_EXHAUSTIVE_CAP),
        Err(err) => Err(err).context("RBO_EXHAUSTIVE_CAP"),
    }
}

fn run_trace(args: TraceArgs) -> Result<bool> {
    let explicit = match (&args.keys, &args.keys_file) {
        (Some(csv), None) => Some(parse_keys_csv(csv)?),
        (None, Some(path)) => Some(parse_keys_file(path)?),
        (None, None) => None,
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    };

    let (keys, query) = match (explicit, &args.query, &args.targets) {
        (Some(keys), Some(raw), None) => {
            let (lo, hi) = parse_pair::<i64>(raw, "--query")?;
            (keys, QueryInterval::new(lo, hi)?)
        }
        (Some(keys), None, Some(raw)) => {
            let (r_lo, r_hi) = parse_pair::<i64>(raw, "--targets")?;
            let query = query_realizing(&keys, r_lo, r_hi).ok_or_else(|| {
                anyhow!("no integer query over these keys has targets ({r_lo},{r_hi})")
            })?;
            (keys, query)
        }
        (None, query_raw, targets_raw) => {
            let k = args
                .k
                .ok_or_else(|| anyhow!("--k is required unless keys are given"))?;
            let n = 1i64 << k;
            match (query_raw, targets_raw) {
                (Some(raw), None) => {
                    let (lo, hi) = parse_pair::<i64>(raw, "--query")?;
                    let keys = (0..n).map(|i| 2 * i).collect();
                    (keys, QueryInterval::new(lo, hi)?)
                }
                (None, Some(raw)) => {
                    let (r_lo, r_hi) = parse_pair::<i64>(raw, "--targets")?;
                    query_for_targets(n, r_lo, r_hi)?
                }
                _ => unreachable!("clap requires exactly one selector"),
            }
        }
        (Some(_), _, _) => unreachable!("clap requires exactly one selector"),
    };

    let cycle = BroadcastCycle::new(keys)?;
    if let Some(k) = args.k {
        if k != cycle.k() {
            bail!("--k {} does not match the {} provided keys", k, cycle.n());
        }
    }
    let targets = cycle.target_bounds(&query);
    let trace = protocol::run(&cycle, &query, args.s);

    let body = match args.format {
        Format::Text => render::trace_text(&trace, &cycle, &query, targets),
        Format::Json => render::trace_json(&trace, &cycle, &query, targets),
        Format::Csv => render::trace_csv(&trace),
    };
    emit(args.out.as_deref(), &body)?;
    Ok(true)
}

fn run_decompose(args: DecomposeArgs) -> Result<bool> {
    let n = 1i64 << args.k;
    let dec = decompose(args.s.rem_euclid(n), args.k);
    let body = match args.format {
        Format::Text => render::ladder_text(&dec),
        Format::Json => render::ladder_json(&dec),
        Format::Csv => render::ladder_csv(&dec),
    };
    emit(args.out.as_deref(), &body)?;
    Ok(true)
}

fn k_bounds(k: Option<u32>, k_range: Option<&str>) -> Result<(u32, u32)> {
    match (k, k_range) {
        (Some(k), None) => Ok((k, k)),
        (None, Some(raw)) => {
            let (lo, hi) = parse_pair::<u32>(raw, "--k-range")?;
            Ok((lo, hi))
        }
        (None, None) => bail!("one of --k or --k-range is required"),
        (Some(_), Some(_)) => unreachable!("clap rejects the combination"),
    }
}

fn scheme_of(arg: SchemeArg) -> KeyScheme {
    match arg {
        SchemeArg::Distinct => KeyScheme::Distinct,
        SchemeArg::Duplicates => KeyScheme::Duplicates,
    }
}

fn with_pool<T: Send>(jobs: Option<usize>, work: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(work()),
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .context("building the worker pool")?;
            Ok(pool.install(work))
        }
    }
}

fn run_sweep(args: SweepArgs, worst: bool) -> Result<bool> {
    let (k_min, k_max) = k_bounds(args.k, args.k_range.as_deref())?;
    let cfg = SweepConfig {
        k_min,
        k_max,
        mode: match args.mode {
            ModeArg::Exhaustive => SweepMode::Exhaustive,
            ModeArg::Random => SweepMode::Random,
        },
        samples: args.samples,
        seed: args.seed,
        key_scheme: scheme_of(args.key_scheme),
        exhaustive_cap: exhaustive_cap()?,
    };
    let report = with_pool(args.jobs, || {
        if worst {
            worst_case(&cfg)
        } else {
            sweep_bounds(&cfg)
        }
    })??;

    let body = match (args.format, worst) {
        (Format::Text, false) => render::sweep_text(&report),
        (Format::Text, true) => render::worst_text(&report),
        (Format::Json, _) => report.to_json(),
        (Format::Csv, _) => report.to_csv(),
    };
    emit(args.out.as_deref(), &body)?;
    Ok(report.all_pass())
}

fn run_lemmas(args: LemmaArgs) -> Result<bool> {
    let (k_min, k_max) = k_bounds(args.k, args.k_range.as_deref())?;
    let scheme = scheme_of(args.key_scheme);
    let cap = exhaustive_cap()?;
    let report = with_pool(args.jobs, || lemma_sweep(k_min, k_max, &scheme, cap))??;

    let body = match args.format {
        Format::Text => render::lemma_text(&report),
        Format::Json => report.to_json(),
        Format::Csv => render::lemma_csv(&report),
    };
    emit(args.out.as_deref(), &body)?;
    Ok(report.all_pass())
}
