//! Command-line front end. JSON reports go to standard output, human-readable
//! logs to standard error.
//!
//! Exit codes: 0 success, 2 verification failure, 3 invalid input,
//! 4 precondition violated.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::generate::{generate, GenSpec, Kind};
use crate::job::{factorize_document, verify_document, Arith};
use crate::matrix::json::MatrixJson;
use crate::mode::Mode;
use crate::scalar::DEFAULT_EPS;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 2;
pub const EXIT_INVALID: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;

/// Environment variable that overrides `--seed`.
pub const SEED_VAR: &str = "COMMFACT_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "commfact",
    version,
    about = "Commutator factorizations with checkable certificates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor a matrix document into commutators and write a certificate.
    Factorize(FactorizeArgs),
    /// Check a certificate against a matrix document.
    Verify(VerifyArgs),
    /// Write a seeded random instance.
    Generate(GenerateArgs),
    /// Run the built-in invariant suites.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
struct ArithArgs {
    /// Exact cyclotomic arithmetic (default unless the input has floats).
    #[arg(long, conflicts_with = "float")]
    exact: bool,
    /// Complex floating point arithmetic.
    #[arg(long)]
    float: bool,
    /// Relative tolerance for float comparisons.
    #[arg(long, default_value_t = DEFAULT_EPS)]
    eps: f64,
}

impl ArithArgs {
    fn arith(&self) -> Arith {
        if self.float {
            Arith::Float { eps: self.eps }
        } else {
            Arith::Exact
        }
    }
}

#[derive(Debug, Args)]
struct FactorizeArgs {
    /// inv, skewinv, order-k or skew-2k.
    #[arg(long)]
    mode: String,
    /// Order parameter; defaults to 3 for order-k and 2 for skew-2k.
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    arith: ArithArgs,
    /// Seed for the randomized similarity search.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    cert: PathBuf,
    #[command(flatten)]
    arith: ArithArgs,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// band, sl or vk.
    #[arg(long)]
    kind: String,
    /// Size of the matrix, or of `M1` for vk.
    #[arg(long)]
    n: usize,
    /// Band offset.
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Window size for vk.
    #[arg(long = "N", default_value_t = 8)]
    window: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    /// Mix `zeta_C` into exact entries.
    #[arg(long)]
    conductor: Option<u64>,
    /// Float entries; sl instances are uniform complex rescaled to det 1.
    #[arg(long)]
    float: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct SelftestArgs {
    #[arg(long)]
    quick: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            _ if e.is_precondition() => EXIT_PRECONDITION,
            Error::RetriesExhausted(_) | Error::Singular => EXIT_PRECONDITION,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

fn seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| invalid(format!("{SEED_VAR} is not an unsigned integer: `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn read_matrix(path: &Path) -> Result<MatrixJson, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| invalid(e.to_string()))?;
    fs::write(path, text + "\n")
        .map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))
}

fn print_json(value: &impl Serialize) {
    use std::io::Write;
    match serde_json::to_string_pretty(value) {
        // A closed pipe downstream is not our failure.
        Ok(s) => {
            let _ = writeln!(std::io::stdout(), "{s}");
        }
        Err(e) => eprintln!("cannot serialize report: {e}"),
    }
}

fn parse_mode(name: &str, k: Option<u32>) -> Result<Mode, Failure> {
    let default_k = match name {
        "skew-2k" | "skew_order_2k" => 2,
        _ => 3,
    };
    Ok(Mode::from_name(name, k.unwrap_or(default_k))?)
}

fn factorize(args: FactorizeArgs) -> Result<i32, Failure> {
    let mode = parse_mode(&args.mode, args.k)?;
    let input = read_matrix(&args.input)?;
    let seed = seed(args.seed)?;
    eprintln!("factorizing {} input in {mode} mode", input.kind());
    let (cert, report) = factorize_document(&input, mode, args.arith.arith(), seed)?;
    write_json(&args.output, &cert)?;
    print_json(&report);
    if report.passed {
        eprintln!("{} commutators, bound {}", report.pairs, report.bound);
        Ok(EXIT_OK)
    } else {
        eprintln!("certificate failed its own verification");
        Ok(EXIT_VERIFY)
    }
}

fn verify(args: VerifyArgs) -> Result<i32, Failure> {
    let input = read_matrix(&args.input)?;
    let cert = fs::read_to_string(&args.cert)
        .map_err(|e| invalid(format!("cannot read {}: {e}", args.cert.display())))?;
    let report = verify_document(&input, &cert, args.arith.arith())?;
    print_json(&report);
    if report.passed {
        eprintln!("certificate verified");
        Ok(EXIT_OK)
    } else {
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!("check `{}` failed: {}", c.name, c.detail);
        }
        Ok(EXIT_VERIFY)
    }
}

fn generate_cmd(args: GenerateArgs) -> Result<i32, Failure> {
    let spec = GenSpec {
        kind: Kind::from_name(&args.kind)?,
        n: args.n,
        m: args.m,
        window: args.window,
        density: args.density,
        conductor: args.conductor,
        float: args.float,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed(args.seed)?);
    let doc = generate(&spec, &mut rng)?;
    write_json(&args.output, &doc)?;
    eprintln!("wrote {} instance to {}", doc.kind(), args.output.display());
    Ok(EXIT_OK)
}

fn selftest(args: SelftestArgs) -> Result<i32, Failure> {
    let summary = crate::selftest::run(args.quick, seed(args.seed)?);
    for s in &summary.suites {
        let tag = if s.passed { "ok" } else { "FAILED" };
        eprintln!("{:<20} {:>4} cases  {tag}", s.name, s.cases);
    }
    print_json(&summary);
    Ok(if summary.passed { EXIT_OK } else { EXIT_VERIFY })
}

/// Runs the command line `argv` (program name first) and returns the exit
/// code.
pub fn run<I, A>(argv: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_OK,
                _ => EXIT_INVALID,
            };
        }
    };
    let outcome = match cli.command {
        Command::Factorize(a) => factorize(a),
        Command::Verify(a) => verify(a),
        Command::Generate(a) => generate_cmd(a),
        Command::Selftest(a) => selftest(a),
    };
    outcome.unwrap_or_else(|f| {
        eprintln!("error: {}", f.message);
        f.code
    })
}
