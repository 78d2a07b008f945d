use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use nbcrw_core::WalkKind;

#[derive(Debug, Parser)]
#[command(name = "nbcrw", version, about = "Non-backtracking centrality random walks and their hitting times")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Global {
    /// Eigen-solver and power-iteration tolerance.
    #[arg(long, global = true, env = "NBCRW_TOL", default_value_t = 1e-12)]
    pub tol: f64,

    /// Worker threads (0 = one per core). Results do not depend on it.
    #[arg(long, global = true, env = "NBCRW_THREADS", default_value_t = 0)]
    pub threads: usize,

    /// Seed for generators and simulation.
    #[arg(long, global = true, env = "NBCRW_SEED", default_value_t = 1)]
    pub seed: u64,

    #[arg(long, global = true, env = "NBCRW_FORMAT", value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write to this file instead of stdout.
    #[arg(short, long, global = true, env = "NBCRW_OUTPUT")]
    pub output: Option<PathBuf>,

    /// Record wall-clock time in the manifest (breaks byte-identical reruns).
    #[arg(long, global = true, env = "NBCRW_TIMING")]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Input {
    /// Edge-list file (`u v` per line, `#` comments, optional `%N <count>` header); `-` for stdin.
    pub graph: PathBuf,

    /// Smallest node id in the file.
    #[arg(long, env = "NBCRW_INDEX_BASE", default_value_t = 0, value_parser = clap::value_parser!(u64).range(0..=1))]
    pub index_base: u64,

    #[arg(long, env = "NBCRW_DELIMITER", value_enum, default_value_t = DelimiterArg::Whitespace)]
    pub delimiter: DelimiterArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DelimiterArg {
    Whitespace,
    Comma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkArg {
    Turw,
    Merw,
    Nbcrw,
    All,
}

impl WalkArg {
    pub fn kinds(self) -> Vec<WalkKind> {
        match self {
            WalkArg::Turw => vec![WalkKind::Turw],
            WalkArg::Merw => vec![WalkKind::Merw],
            WalkArg::Nbcrw => vec![WalkKind::Nbcrw],
            WalkArg::All => WalkKind::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Spectral,
    Linear,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SimModeArg {
    Stationary,
    Hitting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelArg {
    Er,
    Ba,
    Ws,
    Rose,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingKind {
    Turw,
    Merw,
    Nbcrw,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Non-backtracking and eigenvector centrality.
    Centrality {
        #[command(flatten)]
        input: Input,
    },

    /// Stationary distributions and their inverse participation ratio.
    Stationary {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = WalkArg::All)]
        walk: WalkArg,
        /// Cross-check against a linear solve and report balance residuals.
        #[arg(long)]
        check: bool,
        /// Shift NBCRW centralities by this amount before weighting (not part of the walk's definition).
        #[arg(long)]
        regularize: Option<f64>,
    },

    /// Hitting times: pairwise, partial means and global mean.
    Hitting {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = WalkArg::All)]
        walk: WalkArg,
        #[arg(long, value_enum, default_value_t = MethodArg::Spectral)]
        method: MethodArg,
        /// Comma-separated: `hub`, `global`, or a node id.
        #[arg(long, default_value = "hub,global", value_delimiter = ',')]
        target: Vec<String>,
        /// Emit the N x N matrix even above 500 nodes.
        #[arg(long)]
        full_matrix: bool,
        /// Evaluate the pairwise NBCRW formula with its printed 1/2 prefactor and report the discrepancy.
        #[arg(long)]
        verbatim_eq26: bool,
        #[arg(long)]
        regularize: Option<f64>,
    },

    /// Write a generated graph as an edge list.
    Generate {
        #[arg(value_enum)]
        model: ModelArg,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// ER edge probability.
        #[arg(long, default_value_t = 0.01)]
        p: f64,
        /// BA edges per new node.
        #[arg(long, default_value_t = 2)]
        m_attach: usize,
        /// WS ring degree.
        #[arg(long, default_value_t = 10)]
        k: usize,
        /// WS rewiring probability.
        #[arg(long, default_value_t = 0.1)]
        beta: f64,
        /// Rose petal count.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Rose cycle length.
        #[arg(long, default_value_t = 4)]
        l: usize,
        /// Keep only the largest connected component (relabelled 0..).
        #[arg(long)]
        largest_component: bool,
    },

    /// Closed forms for the 4-petal rose with `m` petals.
    RoseOracle {
        m: usize,
        #[arg(long, value_enum, default_value_t = WalkArg::All)]
        walk: WalkArg,
    },

    /// Table-style comparison of the three walks, one row per walk.
    Compare {
        #[command(flatten)]
        input: Input,
    },

    /// Closed-form global mean hitting time on roses and the fitted log-log slope.
    Scaling {
        #[arg(long, value_enum, default_value_t = ScalingKind::All)]
        kind: ScalingKind,
        /// Inclusive petal range `a:b`.
        #[arg(long, default_value = "10:1000")]
        m_range: String,
    },

    /// Monte Carlo estimate of stationary frequencies or a hitting time.
    Simulate {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = WalkArg::Turw)]
        walk: WalkArg,
        #[arg(long, value_enum, default_value_t = SimModeArg::Hitting)]
        mode: SimModeArg,
        /// Source node id (hitting mode) or start node (stationary mode).
        #[arg(long, default_value_t = 0)]
        source: u64,
        /// Target node id (hitting mode).
        #[arg(long)]
        target: Option<u64>,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        #[arg(long, default_value_t = 1_000)]
        burn_in: u64,
        #[arg(long)]
        regularize: Option<f64>,
    },
}
