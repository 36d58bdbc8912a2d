use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "tablewalk", version, about = "Random walks on contingency tables mod q")]
pub struct Cli {
    /// JSON file with parameter defaults; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the walk and print the final table.
    Sample(SampleArgs),
    /// Exact TV, l2 bound and Monte Carlo lower bound against t.
    TvCurve(CommonArgs),
    /// Cutoff constants per (n, q), with exact t_mix(1/4) where enumerable.
    CutoffTable(CommonArgs),
    /// Run the property suites and print a JSON report.
    Verify(VerifyArgs),
    /// Every eigenvalue, in group index order.
    Spectrum(CommonArgs),
    /// The exact law at time --steps, in group index order.
    Distribution(CommonArgs),
    /// Monte Carlo lower bound next to Wilson's guarantee.
    Wilson(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Suite {
    #[value(name = "all")]
    #[serde(rename = "all")]
    All,
    #[value(name = "lemma3_2")]
    #[serde(rename = "lemma3_2")]
    Lemma32,
    #[value(name = "lemma3_3")]
    #[serde(rename = "lemma3_3")]
    Lemma33,
    #[value(name = "lemma3_5")]
    #[serde(rename = "lemma3_5")]
    Lemma35,
    #[value(name = "nonzero_boxes")]
    #[serde(rename = "nonzero_boxes")]
    NonzeroBoxes,
    #[value(name = "spectral")]
    #[serde(rename = "spectral")]
    Spectral,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Table size; cutoff-table takes a comma list.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Modulus; cutoff-table takes a comma list.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<u32>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub t_min: Option<u64>,
    #[arg(long)]
    pub t_max: Option<u64>,
    #[arg(long)]
    pub t_step: Option<u64>,
    /// Monte Carlo trials (0 disables the Monte Carlo column).
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Largest |G| for exact enumeration.
    #[arg(long)]
    pub max_group_size: Option<u128>,
    #[arg(long)]
    pub steps: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_delimiter = ',')]
    pub row_sums: Vec<u32>,
    #[arg(long, value_delimiter = ',')]
    pub col_sums: Vec<u32>,
    /// Hold with probability 1/2 at each step.
    #[arg(long)]
    pub lazy: bool,
    /// Write one JSON record per step to this file.
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,
    /// Only the exhaustive part (or, with `n=.. q=..`, that instance exhaustively).
    #[arg(long)]
    pub exhaustive: bool,
    #[arg(long, hide = true)]
    pub mutant_flip_cosine: Option<u32>,
    /// `key=value` overrides: n, q, trials, seed.
    #[arg(trailing_var_arg = true)]
    pub params: Vec<String>,
}
