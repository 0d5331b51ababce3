//! Command-line surface: verbs and flags.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

/// Numerical laboratory for variance-based quantum uncertainty relations on a
/// two-qubit thermal model with Heisenberg exchange and a z-axis
/// Dzyaloshinskii–Moriya term.
#[derive(Parser, Debug)]
#[command(name = "urcli", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Tabulate the conditional reverse relation over a (J, D, T) grid
    Sweep(SweepArgs),
    /// Stress-test exact identities and bound validity on random states
    Audit(AuditArgs),
    /// Emit figure-ready tables with provenance headers and diagnostics
    Figure(FigureArgs),
    /// Dump one model point: Hamiltonian, spectrum, thermal state, cross-checks
    State(StateArgs),
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Exchange coupling J: value, comma list, or start:stop:count
    #[arg(long, allow_hyphen_values = true)]
    pub j: String,
    /// Dzyaloshinskii–Moriya strength D: value, comma list, or start:stop:count
    #[arg(long, allow_hyphen_values = true)]
    pub d: String,
    /// Temperature T (> 0): value, comma list, or start:stop:count
    #[arg(long, allow_hyphen_values = true)]
    pub t: String,
    /// System observables on A: sx|sy|sz or polar:azimuth (radians), comma-separated
    #[arg(long, default_value = "sx,sz")]
    pub q: String,
    /// Control observables on C, same syntax (defaults to the --q list)
    #[arg(long)]
    pub o: Option<String>,
    /// Reverse bound: eq8 (sqrt-purity) | eq9 (linear-purity) | eq10 (phase-family) | mondal (covariance-ratio)
    #[arg(long, default_value = "eq9")]
    pub bound: String,
    /// Phase-family overlap term: zero (certified) | experimental (saturating, uncertified)
    #[arg(long, default_value = "zero")]
    pub m_mode: String,
    /// Grid points per free phase when optimizing the phase family (1 = all-zero phases)
    #[arg(long, default_value_t = 64)]
    pub theta_grid: usize,
    /// Seed recorded in headers (sweeps are deterministic)
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (library default when omitted); results are identical for any count
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    /// Base seed; trial i draws from the deterministic stream (seed, i)
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Number of random trials (≥ 1)
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Bipartite shapes cycled across trials, e.g. 2x2,2x3,3x3
    #[arg(long, default_value = "2x2,2x3,3x3")]
    pub dims: String,
    /// Grid points per free phase for phase-optimized checks
    #[arg(long, default_value_t = 16)]
    pub theta_grid: usize,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (library default when omitted); results are identical for any count
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    /// Figure number (2–9)
    #[arg(long)]
    pub fig: u8,
    /// Output directory for the emitted tables
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Override the J values (value, comma list, or start:stop:count)
    #[arg(long, allow_hyphen_values = true)]
    pub j: Option<String>,
    /// Override the D values
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
    /// Override the T values
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    /// Override the system observables
    #[arg(long)]
    pub q: Option<String>,
    /// Override the control observables
    #[arg(long)]
    pub o: Option<String>,
    /// Override the reverse bound (eq8 | eq9 | eq10 | mondal)
    #[arg(long)]
    pub bound: Option<String>,
    /// Phase-family overlap term: zero | experimental
    #[arg(long, default_value = "zero")]
    pub m_mode: String,
    /// Grid points per free phase when optimizing the phase family
    #[arg(long, default_value_t = 64)]
    pub theta_grid: usize,
    /// Seed recorded in headers
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (library default when omitted); results are identical for any count
    #[arg(long)]
    pub workers: Option<usize>,
}

#[derive(Args, Debug)]
pub struct StateArgs {
    /// Exchange coupling J
    #[arg(long, allow_hyphen_values = true)]
    pub j: f64,
    /// Dzyaloshinskii–Moriya strength D
    #[arg(long, allow_hyphen_values = true)]
    pub d: f64,
    /// Temperature T (> 0)
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}
