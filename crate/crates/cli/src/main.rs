use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

use commands::{Algo, Kind};

/// Generate test matrices, factor them, and evaluate factorization quality
/// and cost.
#[derive(Debug, Parser)]
#[command(name = "hqrrp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a test matrix (and its singular values when known).
    Gen(GenArgs),
    /// Factor a matrix file and write R, the pivot trail and optionally Q.
    Factor(FactorArgs),
    /// Truncation errors and |diag R| for one matrix under several algorithms.
    Quality(QualityArgs),
    /// Time and count flops on Gaussian matrices.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    /// Number of columns (and rows, unless --m is given).
    #[arg(long)]
    n: usize,
    /// Number of rows; only `gaussian` may be rectangular.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.99999)]
    zeta: f64,
    #[arg(long, default_value_t = 1e-5)]
    beta: f64,
    /// Output prefix; writes `<prefix>.mtx` and maybe `<prefix>.sv.csv`.
    #[arg(short, long = "output")]
    output: String,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    /// Matrix Market file, or raw binary when the name ends in `.bin`.
    #[arg(long)]
    input: String,
    #[arg(long, value_enum)]
    algo: Algo,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    b: u64,
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the first k columns of Q.
    #[arg(long = "form-q", value_name = "K")]
    form_q: Option<usize>,
    #[arg(short, long = "output")]
    output: String,
}

#[derive(Debug, Args)]
pub struct QualityArgs {
    /// Algorithms to compare (comma separated or repeated).
    #[arg(long = "algo", value_enum, value_delimiter = ',', required = true)]
    algos: Vec<Algo>,
    /// Generate the matrix instead of reading --input.
    #[arg(
        long,
        value_enum,
        conflicts_with = "input",
        required_unless_present = "input"
    )]
    kind: Option<Kind>,
    #[arg(long)]
    input: Option<String>,
    /// `j,sigma` file with the singular values of --input.
    #[arg(long, requires = "input")]
    sv: Option<String>,
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    #[arg(long, default_value_t = 0.99999)]
    zeta: f64,
    #[arg(long, default_value_t = 1e-5)]
    beta: f64,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    b: u64,
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Skip the spectral-norm column.
    #[arg(long)]
    no_spectral: bool,
    #[arg(short, long = "output")]
    output: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long = "algo", value_enum, value_delimiter = ',', required = true)]
    algos: Vec<Algo>,
    /// Matrix sizes (comma separated or repeated).
    #[arg(long = "n", value_delimiter = ',', required = true)]
    ns: Vec<usize>,
    #[arg(long, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    b: u64,
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output prefix; writes `<prefix>.bench.csv`.
    #[arg(short, long = "output")]
    output: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Factor(a) => commands::factor(&a),
        Command::Quality(a) => commands::quality(&a),
        Command::Bench(a) => commands::bench(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
