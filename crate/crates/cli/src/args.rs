//! Command-line arguments. Every subcommand's options serialize into the run
//! manifest (minus output path and thread count, which do not change
//! results) and deserialize back for `replay`.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "binfwd", version, about = "Capacity, rate-region and bin-forward simulation tools")]
pub struct Cli {
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(tag = "subcommand", content = "options", rename_all = "kebab-case")]
pub enum Command {
    /// Closed-form capacities of the example state-encoder channel.
    Table1(Table1Args),
    /// Maximize a capacity expression over input distributions.
    Capacity(CapacityArgs),
    /// Trace the cribbing-MAC region boundary by support functions.
    Region(RegionArgs),
    /// Fourier–Motzkin projection of a rate system.
    Fme(FmeArgs),
    /// Simulate the bin-forward relay scheme.
    Sim(SimArgs),
    /// Indirect covering experiment with random bins.
    Covering(CoveringArgs),
    /// Write an example channel file.
    ExampleChannel(ExampleChannelArgs),
    /// Rerun the command recorded in an output's manifest.
    #[serde(skip)]
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct Table1Args {
    /// Probability of the two noisy states together.
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    /// Comma-separated crossover probabilities; may be empty.
    #[arg(long, default_value = "0,0.5,1")]
    pub alphas: String,
    /// Add the optimizer's non-causal value as a cross-check column.
    #[arg(long)]
    pub optimizer: bool,
    #[arg(long, default_value_t = 3)]
    pub u_size: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    Sdrc,
    SdrcCausal,
    Mac,
    MacCausal,
    PtpSe,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CapacityArgs {
    #[arg(long, value_enum)]
    pub model: Model,
    /// Channel file (JSON).
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub u_size: usize,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid resolution for the exhaustive pre-pass; 0 disables it.
    #[arg(long, default_value_t = 0)]
    pub grid_levels: usize,
    /// MAC only: maximize w1·R1 + w2·R2, given as "w1,w2".
    #[arg(long, default_value = "1,1")]
    pub weights: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CribbingArg {
    StrictlyCausal,
    Causal,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct RegionArgs {
    /// MAC channel file (JSON); a state-encoder channel is embedded.
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, value_enum, default_value = "strictly-causal")]
    pub cribbing: CribbingArg,
    #[arg(long, default_value_t = 2)]
    pub u_size: usize,
    /// Weight pairs "w1:w2,w1:w2,...". Defaults to evenly spaced directions.
    #[arg(long)]
    pub weights: Option<String>,
    /// Number of evenly spaced directions when --weights is absent.
    #[arg(long, default_value_t = 9)]
    pub directions: usize,
    #[arg(long, default_value_t = 16)]
    pub restarts: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct FmeArgs {
    /// System file in the rate-system text format.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    pub system: Option<PathBuf>,
    /// Shipped system: relay, mac or mac-two-state.
    #[arg(long)]
    pub preset: Option<String>,
    /// Comma-separated variables to keep; defaults to the system's `keep`.
    #[arg(long)]
    pub keep: Option<String>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimArgs {
    /// Simulation config (JSON).
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CoveringArgs {
    /// Kernel file {"p_v": [...], "kernel": [[p(z|v)...]...]}.
    #[arg(long)]
    pub kernel_file: PathBuf,
    #[arg(long)]
    pub n: usize,
    /// Sequence rate R.
    #[arg(long)]
    pub r: f64,
    /// Bin rate R_B.
    #[arg(long)]
    pub rb: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 200)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExampleKind {
    /// Ternary-state channel with a one-bit state encoder.
    PtpSe,
    /// Binary relay channel whose destination hears only the relay.
    ForwardingRelay,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct ExampleChannelArgs {
    #[arg(long, value_enum, default_value = "ptp-se")]
    pub kind: ExampleKind,
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.2)]
    pub p: f64,
    /// Forwarding relay only: also write its optimal decision here.
    #[arg(long)]
    pub decision_out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Default)]
pub struct ReplayArgs {
    /// Any output file of this tool.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::Table1(a) => a.out.as_ref(),
            Command::Capacity(a) => a.out.as_ref(),
            Command::Region(a) => a.out.as_ref(),
            Command::Fme(a) => a.out.as_ref(),
            Command::Sim(a) => a.out.as_ref(),
            Command::Covering(a) => a.out.as_ref(),
            Command::ExampleChannel(a) => a.out.as_ref(),
            Command::Replay(a) => a.out.as_ref(),
        }
    }

    pub fn set_out(&mut self, out: Option<PathBuf>) {
        match self {
            Command::Table1(a) => a.out = out,
            Command::Capacity(a) => a.out = out,
            Command::Region(a) => a.out = out,
            Command::Fme(a) => a.out = out,
            Command::Sim(a) => a.out = out,
            Command::Covering(a) => a.out = out,
            Command::ExampleChannel(a) => a.out = out,
            Command::Replay(a) => a.out = out,
        }
    }
}
