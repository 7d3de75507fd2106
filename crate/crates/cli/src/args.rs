use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "lll", version, about = "Resampling-oracle random walks, verifiers and bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Check structural properties of an enumerable instance.
    Verify(VerifyArgs),
    /// Evaluate charge conditions, Shearer polynomials and runtime bounds.
    Conditions(ConditionsArgs),
    /// Run seeded trials of the sequential or round-structured walk.
    Run(RunArgs),
    /// Enumerate stable words and audit the swapping maps.
    Stable(StableArgs),
    /// Write a random edge colouring of K_2n as a rainbow instance file.
    RainbowGen(RainbowGenArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Report destination; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

/// A flaw graph given inline instead of through an instance.
#[derive(Debug, Args, Serialize)]
pub struct InlineGraph {
    /// Number of flaws of an inline graph.
    #[arg(long)]
    pub flaws: Option<usize>,
    /// Inline relation as `f-g` pairs, e.g. `0-1,1-1`.
    #[arg(long, value_delimiter = ',')]
    pub relation: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Any of atomic, causality, weak, strong, regenerating.
    #[arg(long, value_delimiter = ',', default_value = "atomic,causality,weak,strong,regenerating")]
    pub checks: Vec<String>,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_states: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ConditionsArgs {
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub graph: InlineGraph,
    /// Closed-form rainbow parameters for `n,q`.
    #[arg(long, value_delimiter = ',')]
    pub rainbow: Vec<usize>,
    /// Flaw charges; derived from the instance when omitted.
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<String>,
    /// Cluster-expansion weights.
    #[arg(long, value_delimiter = ',')]
    pub mu: Vec<String>,
    /// Shearer probabilities.
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<String>,
    /// Target θ for the Shearer charge check; `max λ_f/p_f` when omitted.
    #[arg(long)]
    pub theta: Option<String>,
    /// Seed of the colouring whose flaws are counted in rainbow mode.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_states: u64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct RunArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// pi_stable, uniform_random[:SEED], first_present or scripted:f1,f2,...
    #[arg(long, default_value = "pi_stable")]
    pub strategy: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Use the round-structured walk.
    #[arg(long)]
    pub parallel: bool,
    #[arg(long, default_value_t = 10_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_steps: u64,
    #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_rounds: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: u64,
    /// Cluster weights certifying θ < 1 for non-rainbow instances.
    #[arg(long, value_delimiter = ',')]
    pub mu: Vec<String>,
    /// Run even without a certificate θ < 1.
    #[arg(long)]
    pub force: bool,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_states: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StableMode {
    /// List the words of Stab_π(R, t).
    Enumerate,
    /// Truncated counting inequalities for words and strongly stable sequences.
    Counting,
    /// Forward and backward swapping maps over the bad walks.
    Audit,
}

#[derive(Debug, Args, Serialize)]
pub struct StableArgs {
    #[arg(long, value_enum)]
    pub mode: StableMode,
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[command(flatten)]
    pub graph: InlineGraph,
    /// Root set `R` as flaw ids; `-` for the empty set. Counting ranges over
    /// every independent set when omitted.
    #[arg(long)]
    pub root: Option<String>,
    #[arg(long, default_value_t = 4)]
    pub t: usize,
    /// Longest word enumerated; defaults to a value depending on the mode.
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: u64,
    #[arg(long, value_delimiter = ',')]
    pub lambda: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub mu: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<String>,
    #[arg(long)]
    pub theta: Option<String>,
    /// Strategy unrolled by the audit.
    #[arg(long, default_value = "pi_stable")]
    pub strategy: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_states: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct RainbowGenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub q: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: Output,
}
