use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "l2eis", version, about = "Level 2 Eisenstein double series: coefficients, sums and identity checks")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
    Plain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Series,
    Oracle,
    Both,
}

#[derive(Debug, Args)]
pub struct GlobalOpts {
    /// Working precision in bits (at least 64).
    #[arg(long, global = true, env = "PRECISION_BITS", default_value_t = 256)]
    pub precision_bits: u32,
    /// Series-route tolerance, e.g. `2^-200` or `1e-60`.
    #[arg(long, global = true, env = "TOL_SERIES", default_value = "2^-200")]
    pub tol_series: String,
    /// Oracle-route tolerance, before subtracting the oracle's error estimate.
    #[arg(long, global = true, env = "TOL_ORACLE", default_value = "1e-5")]
    pub tol_oracle: String,
    /// Identity catalog (TOML). Defaults to the bundled one.
    #[arg(long, global = true, env = "CATALOG")]
    pub catalog: Option<PathBuf>,
    #[arg(long, global = true, env = "FORMAT", value_enum, default_value_t = Format::Plain)]
    pub format: Format,
    /// Seed for random spot checks.
    #[arg(long, global = true, env = "SEED", default_value_t = 0)]
    pub seed: u64,
    /// Maximum number of lattice terms per oracle evaluation.
    #[arg(long, global = true, env = "BUDGET", default_value_t = l2eis::lattice::DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, global = true, env = "MODE", value_enum, default_value_t = ModeArg::Series)]
    pub mode: ModeArg,
    /// Write the output here instead of stdout.
    #[arg(long, global = true, env = "OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Table of the coefficients A_{k,m}(l).
    Coeff(CoeffArgs),
    /// d^n/ds^n of csc^(2m-1), cot, sec or tan at pi*s.
    Deriv(DerivArgs),
    /// Value of a double series (or a single sum) through the hyperbolic reduction.
    Eval(EvalArgs),
    /// Brute-force lattice sum at a fixed truncation.
    Oracle(OracleArgs),
    /// Check catalog identities and matrix relations.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long, default_value_t = 7)]
    pub k_max: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    /// Print the single cell A_{k,m}(l); needs --l.
    #[arg(long, requires = "l")]
    pub k: Option<u32>,
    #[arg(long, requires = "k")]
    pub l: Option<u32>,
    /// Compare with the bundled reference table (m = 1 only); exits 1 on mismatch.
    #[arg(long)]
    pub check_table: bool,
}

#[derive(Debug, Args)]
pub struct DerivArgs {
    /// csc, csc3, csc5, ..., cot, sec or tan.
    #[arg(long)]
    pub kind: String,
    #[arg(long)]
    pub order: u32,
    /// Point `re` or `re,im`; parts are decimals or fractions such as `1/3`.
    #[arg(long, allow_hyphen_values = true)]
    pub s: String,
    /// Also evaluate the Taylor-series oracle and report the relative deviation.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    /// F_alt, G_plain, F_oddline or G_oddline. Omit for the single sum Σ_{m>=1} w(m).
    #[arg(long)]
    pub family: Option<String>,
    /// Total exponent p of the denominator.
    #[arg(long)]
    pub exponent: Option<u32>,
    #[arg(long, default_value = "1")]
    pub a: String,
    /// Weight in the factor grammar, e.g. `m^2*csch(1)` or `alt*sech(1)`.
    #[arg(long, allow_hyphen_values = true)]
    pub weight: String,
    /// Shift: the denominator uses b m + c in place of m.
    #[arg(long, requires = "c")]
    pub b: Option<String>,
    #[arg(long, requires = "b", allow_hyphen_values = true)]
    pub c: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// `printed` or `alternate` kernel argument for G_oddline.
    #[arg(long, default_value = "printed")]
    pub reading: String,
    /// Use the explicit low-exponent formulas (exponents 1 to 4).
    #[arg(long)]
    pub corollary: bool,
    /// Cross-check against the lattice oracle.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long, default_value_t = 40)]
    pub nm: u64,
    #[arg(long, default_value_t = 4096)]
    pub nn: u64,
    /// Skip the inner tail correction.
    #[arg(long)]
    pub no_tail: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Every catalog entry (the default when nothing else is selected).
    #[arg(long)]
    pub all: bool,
    /// Comma-separated entry ids.
    #[arg(long, value_delimiter = ',')]
    pub ids: Vec<String>,
    /// Matrix relations up to this k (at most 6).
    #[arg(long)]
    pub matrix: Option<u32>,
    /// Values of a for the matrix relations.
    #[arg(long, value_delimiter = ',', default_value = "1,2,1/2")]
    pub a_values: Vec<String>,
    /// Test weight g for the matrix relations.
    #[arg(long, default_value = "sech(1/3)^2 + m*sech(1/3)^2")]
    pub test_weight: String,
    /// Number of random consistency checks drawn with --seed.
    #[arg(long, default_value_t = 0)]
    pub spot: usize,
    /// Record wall-clock time per row (makes reports non-reproducible).
    #[arg(long)]
    pub timings: bool,
}
