use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use mzf_core::relations::Family;

#[derive(Parser, Debug)]
#[command(name = "mzf", version, about = "Multiple zeta functions: cyclic identity checks and MZV relation ranks")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Cache directory for generated relation sets (MZF_CACHE_DIR takes precedence).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads for relation generation.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub parallel: u16,

    /// Largest accepted truncation cutoff.
    #[arg(long, global = true, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_n: u64,

    /// Largest accepted relation weight.
    #[arg(long, global = true, default_value_t = 11, value_parser = clap::value_parser!(u32).range(3..))]
    pub max_weight: u32,

    /// Largest accepted number of matrix rows.
    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rows: u64,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a series by truncated summation.
    Eval(EvalArgs),
    /// Check membership of an argument in the convergence domain.
    Domain(DomainArgs),
    /// Generate the relations of one family at one weight.
    Relations(RelationsArgs),
    /// Exact rank of a relation-set file.
    Rank(RankArgs),
    /// Ranks of every family at weights 3..=K.
    Table1(Table1Args),
    /// Split a constrained sum into MZV symbols, or count its lattice points.
    Decompose(DecomposeArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Mzf,
    ZetaTilde,
    ZetaC,
    Mt,
    Theorem,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    #[value(name = "1")]
    First,
    #[value(name = "2")]
    Second,
    Diff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Path {
    Direct,
    Harmonic,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub kind: Kind,

    /// Block depths, e.g. "2,1". Defaults to the block structure of --s.
    #[arg(long)]
    pub shape: Option<String>,

    /// Arguments: entries separated by ',', blocks by ';', each like 1.5+0.5i.
    #[arg(long = "s", allow_hyphen_values = true)]
    pub s: String,

    /// Truncation cutoff.
    #[arg(long = "N", conflicts_with = "n_list")]
    pub n: Option<u64>,

    /// Increasing refinement cutoffs; the last one is the reported cutoff.
    #[arg(long = "N-list", value_delimiter = ',')]
    pub n_list: Option<Vec<u64>>,

    /// Block index (1-based).
    #[arg(long)]
    pub i: Option<usize>,

    /// Position inside the block (1-based).
    #[arg(long)]
    pub j: Option<usize>,

    #[arg(long, value_enum, default_value_t = Variant::Diff)]
    pub variant: Variant,

    /// Evaluate the pole sum directly or through its harmonic closed form.
    #[arg(long, value_enum, default_value_t = Path::Direct)]
    pub path: Path,

    /// Evaluate outside the convergence domain, with a warning.
    #[arg(long)]
    pub allow_outside: bool,
}

#[derive(Args, Debug)]
pub struct DomainArgs {
    #[arg(long)]
    pub shape: Option<String>,

    #[arg(long = "s", allow_hyphen_values = true)]
    pub s: String,
}

#[derive(Args, Debug)]
pub struct RelationsArgs {
    #[arg(long)]
    pub weight: u32,

    #[arg(long, value_parser = parse_family)]
    pub family: Family,

    /// Output file; the relation set is printed when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Keep one-block configurations in the derivation family.
    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    pub include_d1_derivation: bool,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Args, Debug)]
pub struct Table1Args {
    #[arg(long, default_value_t = 8)]
    pub max_weight: u32,

    #[arg(long, value_delimiter = ',', value_parser = parse_family, default_values_t = Family::ALL.to_vec())]
    pub families: Vec<Family>,

    #[arg(long, action = ArgAction::Set, default_value_t = true)]
    pub include_d1_derivation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SetKind {
    #[value(name = "S")]
    S,
    #[value(name = "S_i")]
    SI,
    #[value(name = "S_ij")]
    SIj,
    #[value(name = "T_i")]
    TI,
    /// Constraints given with --constraints.
    Custom,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub shape: String,

    #[arg(long, value_enum)]
    pub set: SetKind,

    #[arg(long)]
    pub i: Option<usize>,

    #[arg(long)]
    pub j: Option<usize>,

    /// For --set custom: constraints like "n_{1,1} <= n_{2,1}", separated by ';'.
    #[arg(long)]
    pub constraints: Option<String>,

    /// For --set custom: include the auxiliary variable n.
    #[arg(long)]
    pub extra: bool,

    /// Whitespace-separated "variable:exponent" pairs, e.g. "n_{1,1}:1 n:2".
    #[arg(long)]
    pub exponents: Option<String>,

    /// Count lattice points in [1, N]^vars instead of decomposing.
    #[arg(long)]
    pub count: bool,

    #[arg(long = "N")]
    pub n: Option<u64>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse().map_err(|e: mzf_core::Error| e.to_string())
}
