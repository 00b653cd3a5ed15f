use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Tilings of F_q^n, 1-perfect codes and factorizations of projective spaces.
#[derive(Debug, Parser)]
#[command(name = "fqtile", version, about)]
pub struct Cli {
    /// Worker threads for parallel verifiers (1 is the reference behavior).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,
    /// Also write the report to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub report: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build one of the two full-rank tilings of F_q^{2m} and check it.
    Construct(ConstructArgs),
    /// Check a tiling, a perfect code or a factorization.
    Verify(VerifyArgs),
    /// Turn a tiling with a projective first tile into a 1-perfect code.
    ToCode(ToCodeArgs),
    /// Search for factorizations of a small projective or affine geometry.
    Search(SearchArgs),
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// 1: first tile projective (q >= 3, m >= 3); 2: both tiles projective (q >= 3, m >= 5).
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub theorem: u8,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_name = "FILE")]
    pub out_u: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    pub out_v: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("input").required(true).args(["u", "code", "factorization"])))]
pub struct VerifyArgs {
    /// First tile of a tiling (requires --v).
    #[arg(long, value_name = "FILE", requires = "v")]
    pub u: Option<PathBuf>,
    #[arg(long, value_name = "FILE", requires = "u")]
    pub v: Option<PathBuf>,
    /// A code to check for r-perfection.
    #[arg(long, value_name = "FILE")]
    pub code: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub radius: usize,
    /// Two point files forming a candidate factorization.
    #[arg(long, num_args = 2, value_names = ["U", "V"])]
    pub factorization: Option<Vec<PathBuf>>,
    /// Field order for files without a header, as `q=<q>`.
    #[arg(long, value_name = "q=<q>", value_parser = parse_assume)]
    pub assume: Option<u64>,
    /// Fail unless the code has this rank.
    #[arg(long, requires = "code")]
    pub expect_rank: Option<usize>,
    /// Fail unless the code has this kernel dimension.
    #[arg(long, requires = "code")]
    pub expect_kernel_dim: Option<usize>,
}

#[derive(Debug, Args)]
pub struct ToCodeArgs {
    #[arg(long, value_name = "FILE")]
    pub u: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub v: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    Projective,
    Affine,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long, value_enum)]
    pub geometry: GeometryArg,
    #[arg(long)]
    pub p: u64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    /// Vector space dimension: PG(n-1, q) or AG(n, q).
    #[arg(long)]
    pub n: usize,
    /// Tile sizes as `a,b`.
    #[arg(long, value_parser = parse_sizes)]
    pub sizes: (usize, usize),
    #[arg(long)]
    pub first_only: bool,
    /// Allow geometries above the default ceiling of 200 points.
    #[arg(long, value_name = "N")]
    pub max_points: Option<usize>,
    /// Do not fix the smallest point into U at the root.
    #[arg(long)]
    pub no_symmetry: bool,
    #[arg(long, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

fn parse_sizes(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once(',').ok_or("expected `a,b`")?;
    let num = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
    Ok((num(a)?, num(b)?))
}

fn parse_assume(s: &str) -> Result<u64, String> {
    let q = s.strip_prefix("q=").ok_or("expected `q=<q>`")?;
    q.parse().map_err(|e| format!("{q:?}: {e}"))
}
