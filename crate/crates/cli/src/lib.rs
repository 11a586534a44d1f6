//! Command-line front end. [`run`] is the whole program minus process exit,
//! so tests can drive it in-process.
//!
//! Exit codes: 0 certified-yes or valid, 1 certified-no or invalid,
//! 2 inconclusive, 64 usage error, 65 unreadable or malformed input. With
//! several inputs the largest code wins.

mod commands;
mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

pub use report::{Report, Verdict};

/// Default seed for every sampling step.
pub const DEFAULT_SEED: u64 = 2024;

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;

#[derive(Debug, Parser)]
#[command(
    name = "sosconvex",
    version,
    about = "Exact sos and sos-convexity certificates for polynomials"
)]
pub struct Cli {
    /// Seed for sampling steps.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads; only independent input files run in parallel.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Add wall-clock time to every report (reports are then not reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether polynomials (or polynomial matrices) are sums of squares.
    CheckSos(CheckSos),
    /// Decide sos-convexity, or certify convexity with a multiplier.
    CheckSosConvex(CheckSosConvex),
    /// Check a certificate file exactly, without any numerical solver.
    VerifyCert(VerifyCert),
    /// Build a convex form that is not sos-convex from a seed of the given degree.
    Construct(Construct),
    /// Print or export a known example.
    Catalog(Catalog),
    /// Report when nonnegativity equals sos and convexity equals sos-convexity.
    Classify(Classify),
}

#[derive(Debug, Args)]
pub struct CheckSos {
    /// Polynomial files (canonical or infix) or matrix files.
    #[arg(long = "poly", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Directory for certificate files, one `<stem>.cert` per input.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Kind {
    SecondOrder,
    FirstOrder,
    Midpoint,
}

#[derive(Debug, Args)]
pub struct CheckSosConvex {
    #[arg(long = "poly", required = true, num_args = 1..)]
    pub inputs: Vec<PathBuf>,
    /// Which convexity characterization to test for sos.
    #[arg(long, value_enum, default_value_t = Kind::SecondOrder)]
    pub kind: Kind,
    /// Weight of the midpoint characterization, strictly between 0 and 1.
    #[arg(long, default_value = "1/2")]
    pub lambda: String,
    /// Certify convexity instead, trying multipliers `(Σ x_i²)^r` for `r <= R`.
    #[arg(long = "max-r", value_name = "R")]
    pub max_r: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyCert {
    #[arg(long)]
    pub cert: PathBuf,
    /// Check against this polynomial instead of the one stored in the file.
    #[arg(long)]
    pub poly: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Construct {
    /// Seed degree; even and at least 6. The output has degree `degree + 2`.
    #[arg(long)]
    pub degree: u32,
    /// Largest multiplier exponent tried for the convexity certificate.
    #[arg(long = "max-r", default_value_t = 2)]
    pub max_r: u32,
    /// Sample count for the Hessian estimates.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    /// Directory receiving `recipe.json`, `seed.cert` and `convexity.cert`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Catalog {
    #[arg(long, required_unless_present = "list")]
    pub name: Option<String>,
    /// Write the canonical text instead of a report.
    #[arg(long, requires = "name")]
    pub emit: bool,
    /// File for `--emit`; standard output otherwise.
    #[arg(long, requires = "emit")]
    pub out: Option<PathBuf>,
    #[arg(long, conflicts_with = "name")]
    pub list: bool,
}

#[derive(Debug, Args)]
pub struct Classify {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: u32,
    /// Forms instead of general polynomials.
    #[arg(long)]
    pub homogeneous: bool,
}

/// Failures that end an input without a verdict.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Input(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Input(_) => EXIT_DATA,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) => m,
        }
    }
}

/// Output of one unit of work: a report, or raw text for `catalog --emit`.
pub enum Output {
    Report(Report),
    Text(String),
}

/// Result of one unit of work with its wall-clock time in milliseconds.
type Outcome = (Result<Output, Failure>, u128);

pub(crate) struct Context {
    pub seed: u64,
}

/// Runs the program on `args` (including the program name) and returns the
/// exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{text}");
                0
            } else {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            };
        }
    };
    if cli.jobs == 0 {
        let _ = writeln!(err, "error: --jobs must be at least 1");
        return EXIT_USAGE;
    }
    let ctx = Context { seed: cli.seed };
    let results: Vec<Outcome> = match &cli.command {
        Command::CheckSos(c) => batch(&c.inputs, cli.jobs, |p| commands::check_sos(p, c)),
        Command::CheckSosConvex(c) => batch(&c.inputs, cli.jobs, |p| commands::check_sos_convex(p, c)),
        Command::VerifyCert(c) => vec![timed(|| commands::verify_cert(c))],
        Command::Construct(c) => vec![timed(|| commands::construct(c, &ctx))],
        Command::Catalog(c) => vec![timed(|| commands::catalog(c))],
        Command::Classify(c) => vec![timed(|| commands::classify(c))],
    };
    let mut code = 0;
    for (result, elapsed) in results {
        match result {
            Ok(Output::Report(mut r)) => {
                if cli.timing {
                    r.elapsed_ms = Some(elapsed);
                }
                let _ = writeln!(out, "{}", r.to_line());
                code = code.max(r.verdict.exit_code());
            }
            Ok(Output::Text(t)) => {
                let _ = write!(out, "{t}");
            }
            Err(f) => {
                let _ = writeln!(err, "error: {}", f.message());
                code = code.max(f.exit_code());
            }
        }
    }
    code
}

fn timed(f: impl FnOnce() -> Result<Output, Failure>) -> Outcome {
    let start = Instant::now();
    let r = f();
    (r, start.elapsed().as_millis())
}

/// Runs `f` over the inputs on up to `jobs` threads, keeping input order.
fn batch<F>(inputs: &[PathBuf], jobs: usize, f: F) -> Vec<Outcome>
where
    F: Fn(&PathBuf) -> Result<Output, Failure> + Sync,
{
    let next = AtomicUsize::new(0);
    let mut slots: Vec<Option<Outcome>> = (0..inputs.len()).map(|_| None).collect();
    let workers = jobs.min(inputs.len()).max(1);
    let done: Vec<Vec<(usize, Outcome)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::SeqCst);
                        if i >= inputs.len() {
                            break local;
                        }
                        local.push((i, timed(|| f(&inputs[i]))));
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    for (i, r) in done.into_iter().flatten() {
        slots[i] = Some(r);
    }
    slots.into_iter().map(|s| s.expect("every input handled")).collect()
}

/// Initializes logging from `SOSCONVEX_LOG` (e.g. `info`, `sosconvex=debug`).
pub fn init_logging() {
    let env = env_logger::Env::new().filter("SOSCONVEX_LOG");
    let _ = env_logger::Builder::from_env(env).format_timestamp(None).try_init();
}
