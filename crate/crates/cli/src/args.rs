use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug, Serialize)]
#[command(name = "negdep", version, about = "Low-discrepancy point sets, randomizations and the C_b(k) criterion")]
pub struct Cli {
    /// JSON object of flag values; a key also given on the command line is an error.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Worker threads (0 = all cores). Never changes the output.
    #[arg(long, global = true, default_value_t = 0)]
    #[serde(skip)]
    pub threads: usize,

    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Cmd {
    /// Write a point set as CSV.
    Gen(GenArgs),
    /// c and c̄ for one construction or a whole table.
    Criteria(CriteriaArgs),
    /// Check C_b(k) <= 1 for every |k| <= L.
    Cqe(CqeArgs),
    /// MSE or variance over a grid of sample sizes.
    Converge(ConvergeArgs),
    /// Scrambled-vs-deterministic error study at one sample size.
    Hist(HistArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyArg {
    Vdc,
    Halton,
    Ghalton,
    Faure,
    Gfaure,
    /// Plain Monte Carlo (converge only).
    Mc,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderArg {
    Natural,
    Gray,
}

#[derive(Args, Debug, Serialize)]
pub struct SeqArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub s: usize,
    /// Construction base (vdc, Faure).
    #[arg(long)]
    pub base: Option<u32>,
    /// identity, faure92, offset or file:<path>
    #[arg(long)]
    pub perms: Option<String>,
    /// f92, offset or file:<path>
    #[arg(long)]
    pub factors: Option<String>,
    #[arg(long, value_enum, default_value_t = OrderArg::Natural)]
    pub order: OrderArg,
    /// Index of the first point (1 keeps the origin).
    #[arg(long, default_value_t = 1)]
    pub start: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct GenArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long)]
    pub n: usize,
    /// Also emit the base-b digit strings of every coordinate.
    #[arg(long)]
    pub digits: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AggregationArg {
    PerK,
    PerProjection,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug, Serialize)]
pub struct CriteriaArgs {
    /// Rebuild a whole table (1..4) with the calibrated settings.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4), conflicts_with_all = ["family", "s", "n"])]
    pub table: Option<u8>,
    /// Permutation file for the DL rows of tables 2 and 4.
    #[arg(long, requires = "table")]
    pub dl: Option<PathBuf>,
    /// Permutation file for the FL rows of tables 2 and 4.
    #[arg(long, requires = "table")]
    pub fl: Option<PathBuf>,

    #[arg(long, value_enum, required_unless_present = "table")]
    pub family: Option<FamilyArg>,
    #[arg(long, required_unless_present = "table")]
    pub s: Option<usize>,
    #[arg(long, required_unless_present = "table")]
    pub n: Option<usize>,
    #[arg(long)]
    pub base: Option<u32>,
    #[arg(long)]
    pub perms: Option<String>,
    #[arg(long)]
    pub factors: Option<String>,
    #[arg(long, value_enum, default_value_t = OrderArg::Natural)]
    pub order: OrderArg,

    /// A base, or `own` for the construction bases.
    #[arg(long = "criterion-base", default_value = "2")]
    pub criterion_base: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Window; defaults to s.
    #[arg(long)]
    pub w: Option<usize>,
    /// Norm bound on |k|.
    #[arg(long = "L")]
    pub norm_bound: Option<u32>,
    #[arg(long, value_enum)]
    pub aggregation: Option<AggregationArg>,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
}

#[derive(Args, Debug, Serialize)]
pub struct CqeArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long = "criterion-base", default_value = "own")]
    pub criterion_base: String,
    #[arg(long = "L")]
    pub norm_bound: Option<u32>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RandArg {
    Shift,
    Owen,
    Linear,
    None,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum IntegrandArg {
    H0,
    H1,
    G2,
    San,
}

#[derive(Args, Debug, Serialize)]
pub struct IntegrandArgs {
    #[arg(long = "f", value_enum)]
    pub f: IntegrandArg,
    /// g2 coefficient.
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    /// SAN definition (JSON); the bundled network is used when absent.
    #[arg(long = "san-config")]
    pub san_config: Option<PathBuf>,
    #[arg(long = "seed", env = "NEGDEP_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Replications per estimate.
    #[arg(long = "V", default_value_t = 25)]
    pub replications: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub seq: SeqArgs,
    #[command(flatten)]
    pub integrand: IntegrandArgs,
    #[arg(long, value_enum, default_value_t = RandArg::Shift)]
    pub rand: RandArg,
    /// `start:multiples` or a comma-separated list.
    #[arg(long)]
    pub ns: String,
    /// Construction column of the output.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Args, Debug, Serialize)]
pub struct HistArgs {
    /// halton or faure
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub s: usize,
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub integrand: IntegrandArgs,
    /// Independent scramblings.
    #[arg(long = "R", default_value_t = 100)]
    pub scramblings: usize,
    /// Scrambler; owen for Faure and linear for Halton by default.
    #[arg(long, value_enum)]
    pub rand: Option<RandArg>,
    #[arg(long)]
    pub dl: Option<PathBuf>,
    #[arg(long)]
    pub fl: Option<PathBuf>,
}
