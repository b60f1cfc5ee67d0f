//! Command-line drivers. Each subcommand writes CSV files with a `#` JSON
//! header and a `<command>.manifest.json` into the output directory.
//!
//! Exit codes: 0 on success, 2 on usage or domain errors, 3 when a
//! verification check fails.

mod commands;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;
use crate::interval::Interval;

pub use output::{sig17, RunManifest};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SQRTFRAC_OUT";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "sqrtfrac", version, about = "Local statistics of sqrt(n) mod 1 and the lattice model behind them")]
pub struct Cli {
    /// Output directory (default: $SQRTFRAC_OUT, else the current directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the sequence, one value per line.
    Gen(GenArgs),
    /// Histogram of scaled gaps against exp(1).
    Gaps(GapsArgs),
    /// Pair correlation for indicator test functions.
    Paircorr(PaircorrArgs),
    /// Distribution of window counts, optionally against the lattice limit.
    Countdist(CountdistArgs),
    /// Mixed moments of window counts.
    Moments(MomentsArgs),
    /// Count distribution of Haar-random affine lattices in unit triangles.
    LatticeSim(LatticeSimArgs),
    /// Monte Carlo check of the first and second Siegel moments.
    SiegelCheck(SiegelArgs),
    /// Horocycle integrals of the cusp functions.
    EscapeMass(EscapeArgs),
    /// Compare direct and closed-form quadratic Gauss sums.
    GaussCheck(GaussArgs),
    /// Evaluate the (c, d) lattice sum S against its bounds.
    LemmaCheck(LemmaArgs),
    /// Regenerate the gap and pair correlation datasets.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeqArgs {
    /// Upper limit T on n.
    #[arg(long)]
    pub t: u64,
    /// Keep only n > c^2 T.
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
    /// Use n^alpha instead of sqrt(n).
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GapsArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// Right end of the histogram range.
    #[arg(long, default_value_t = 5.0)]
    pub max: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PaircorrArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    /// Support `a:b` of an indicator test function; repeatable.
    #[arg(long = "window", value_parser = parse_window, allow_hyphen_values = true, default_value = "0:1")]
    pub windows: Vec<Interval>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CountdistArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "0:1")]
    pub window: Interval,
    /// Number of window positions.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Draw positions at random from this seed instead of a uniform grid.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 10)]
    pub kmax: u32,
    /// Lattice samples for the limit distribution (0 to skip).
    #[arg(long, default_value_t = 0)]
    pub limit_samples: usize,
    #[arg(long, default_value_t = 1)]
    pub limit_seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    /// Intervals `a:b` of the box; repeatable.
    #[arg(long = "window", value_parser = parse_window, allow_hyphen_values = true, required = true)]
    pub windows: Vec<Interval>,
    /// One exponent per interval.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub s: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also report the moment restricted to counts <= kmax.
    #[arg(long)]
    pub kmax: Option<u32>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LatticeSimArgs {
    #[arg(long = "window", value_parser = parse_window, allow_hyphen_values = true, default_value = "0:1")]
    pub windows: Vec<Interval>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub kmax: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SiegelArgs {
    /// One or two intervals `a:b`.
    #[arg(long = "window", value_parser = parse_window, allow_hyphen_values = true, default_value = "0:1")]
    pub windows: Vec<Interval>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Allowed deviation in jackknife standard errors.
    #[arg(long, default_value_t = 3.0)]
    pub sigmas: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EscapeArgs {
    #[arg(long, default_value_t = 1e-4)]
    pub v: f64,
    #[arg(long, default_value_t = 0.5)]
    pub beta: f64,
    /// Cutoffs R.
    #[arg(long, value_delimiter = ',', default_value = "4,16,64")]
    pub r: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub eta: f64,
    #[arg(long, default_value_t = 0.5)]
    pub theta: f64,
    /// Initial quadrature panels per coset term.
    #[arg(long, default_value_t = 8)]
    pub points: usize,
    /// Half-width of the triangle test function.
    #[arg(long, default_value_t = 1.0)]
    pub width: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GaussArgs {
    #[arg(long, default_value_t = 50)]
    pub c_max: u64,
    /// Exhaustive range of odd |n|; both signs are checked.
    #[arg(long, default_value_t = 99)]
    pub n_max: i64,
    /// Additional random (n, c) pairs.
    #[arg(long, default_value_t = 0)]
    pub random: usize,
    #[arg(long, default_value_t = 10_000)]
    pub random_c_max: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LemmaArgs {
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64,128,256")]
    pub d_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "2,4,8,16,32,64,128,256,512,1024")]
    pub t_grid: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FiguresArgs {
    /// T for the two gap histograms.
    #[arg(long, default_value_t = 200_000)]
    pub t_gaps: u64,
    /// T for the pair correlation histogram.
    #[arg(long, default_value_t = 2000)]
    pub t_pair: u64,
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    #[arg(long, default_value_t = 5.0)]
    pub max: f64,
    #[arg(long, default_value_t = 30)]
    pub pair_bins: usize,
    #[arg(long, default_value_t = 3.0)]
    pub pair_max: f64,
}

/// Parses `a:b` into the half-open interval `[a, b)`.
pub fn parse_window(s: &str) -> Result<Interval, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Interval::half_open(a, b).map_err(|e| e.to_string())
}

/// Outcome of a subcommand that ran to completion.
pub(crate) enum Outcome {
    Ok,
    VerificationFailed(String),
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return EXIT_USAGE;
    }
    let out = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    let start = Instant::now();
    match pool.install(|| commands::dispatch(&cli.command, &out, cli.threads, start)) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::VerificationFailed(msg)) => {
            eprintln!("verification failed: {msg}");
            EXIT_VERIFICATION
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) | Error::Json(_) => EXIT_FAILURE,
                _ => EXIT_USAGE,
            }
        }
    }
}
