//! Command-line surface.
//!
//! There is no configuration file: every behavior is a flag, so any run is
//! reproducible from the command line alone.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "wsrel",
    version,
    about = "Reliability and availability analysis for composed service workflows",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model file against the structural rules
    Validate {
        /// Model document (JSON)
        model: PathBuf,
        /// Warn on unknown fields instead of rejecting them
        #[arg(long)]
        lenient: bool,
    },
    /// Compute absorption probabilities and the reliability judgment
    Solve {
        /// Model document (JSON)
        model: PathBuf,
        /// Use the fixed-point iteration instead of the dense direct solver
        #[arg(long)]
        iterative: bool,
        /// Convergence tolerance for --iterative (max-norm of successive iterates)
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        /// Iteration budget for --iterative
        #[arg(long, default_value_t = 1_000_000)]
        max_iter: u64,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
        /// Warn on unknown fields instead of rejecting them
        #[arg(long)]
        lenient: bool,
    },
    /// Evaluate one closed-form availability/reliability conversion
    Avail(AvailArgs),
    /// Aggregate availability over the composition sets in a catalog file
    Compose {
        /// Composition document (JSON)
        set: PathBuf,
        /// Render percentages truncated to 4 decimals, the precision of the
        /// bundled reference tables
        #[arg(long)]
        paper_precision: bool,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
        /// Warn on unknown fields instead of rejecting them
        #[arg(long)]
        lenient: bool,
        /// Attach an operational profile to a service: NAME=PATH (repeatable).
        /// An attached profile wins over the declared MTBF/MTTR figures.
        #[arg(long = "profile", value_name = "NAME=PATH")]
        profiles: Vec<String>,
    },
    /// Analyze an operational up/down event log
    Monitor {
        /// Profile CSV file
        profile: PathBuf,
        /// Observation horizon in hours; overrides the file's `# horizon=` comment
        #[arg(long)]
        horizon: Option<f64>,
        /// Report the up/down indicator at time T (hours)
        #[arg(long, value_name = "T", allow_negative_numbers = true)]
        at: Option<f64>,
        /// Report average availability over [0, C] (hours)
        #[arg(long, value_name = "C", allow_negative_numbers = true)]
        window: Option<f64>,
        /// Report the limiting-availability estimate with its window series
        #[arg(long)]
        limits: bool,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Monte Carlo engines (seed-deterministic)
    Simulate {
        #[command(subcommand)]
        simulation: SimulateCommand,
    },
}

#[derive(Debug, Args)]
pub struct AvailArgs {
    /// Mean time between failures, hours (pairs with --mttr)
    #[arg(long, allow_negative_numbers = true)]
    pub mtbf: Option<f64>,
    /// Mean time to recovery, hours (pairs with --mtbf)
    #[arg(long, allow_negative_numbers = true)]
    pub mttr: Option<f64>,
    /// Average downtime per failure, hours (pairs with --lambda or --availability)
    #[arg(long, allow_negative_numbers = true)]
    pub tm: Option<f64>,
    /// Failure intensity, per hour (pairs with --tm or --t)
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Exposure time (pairs with --lambda or --r)
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Observed reliability in (0, 1] (pairs with --t)
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Availability in (0, 1] (pairs with --tm)
    #[arg(long, allow_negative_numbers = true)]
    pub availability: Option<f64>,
    /// Marker for the reliability conversion --lambda --t
    #[arg(long)]
    pub reliability: bool,
    /// Render percentages truncated to 4 decimals
    #[arg(long)]
    pub paper_precision: bool,
    /// Emit the report as JSON
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum SimulateCommand {
    /// Estimate reliability by random walks over a model
    Walk {
        /// Model document (JSON)
        model: PathBuf,
        /// Number of walks
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Master seed; trial k draws from substream (seed, k)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-walk step cutoff; censored walks count as faults
        #[arg(long, default_value_t = 10_000)]
        max_steps: u64,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
        /// Warn on unknown fields instead of rejecting them
        #[arg(long)]
        lenient: bool,
    },
    /// Generate an alternating-renewal up/down log as profile CSV
    Renewal {
        /// Mean up duration, hours
        #[arg(long, allow_negative_numbers = true)]
        mtbf: f64,
        /// Mean down duration, hours
        #[arg(long, allow_negative_numbers = true)]
        mttr: f64,
        /// Truncation horizon, hours
        #[arg(long, allow_negative_numbers = true)]
        horizon: f64,
        /// Master seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Service name written into the profile
        #[arg(long, default_value = "service")]
        service: String,
        /// Output path; stdout when omitted
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Estimate the probability of being up at time t across trajectories
    Ensemble {
        /// Mean up duration, hours
        #[arg(long, allow_negative_numbers = true)]
        mtbf: f64,
        /// Mean down duration, hours
        #[arg(long, allow_negative_numbers = true)]
        mttr: f64,
        /// Observation instant, hours
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        /// Number of trajectories
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        /// Master seed; trial k draws from substream (seed, k)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
    },
}
