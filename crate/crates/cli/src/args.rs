use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Spreading and Lorentz contraction of relativistic Gaussian wavepackets.
///
/// Natural units (ħ = c = 1). Every physical input is measured in units of the
/// particle mass: momenta and momentum widths in m, times in 1/m. To convert a
/// lab value, divide momenta by mc and multiply lengths by mc/ħ.
#[derive(Debug, Parser)]
#[command(name = "relpack", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scaled widths over βt/σ_x ∈ [0, t-max] for ε = 0.01, γ = 2 unless overridden.
    Figure1(Opts),
    /// Closed-form widths over a βt/σ_x grid; --with-oracle adds exact moment widths.
    Spread(Opts),
    /// Widths measured from directly computed density profiles, beside the closed form.
    Density(Opts),
    /// Widths of a rest packet seen from a moving frame (--gamma is the boost factor γ₀).
    Contract(Opts),
    /// Run the invariant battery; exit 4 if any item fails.
    Check(Opts),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Particle mass [default: 1]
    #[arg(long)]
    pub mass: Option<f64>,

    /// Lorentz factor of the mean momentum [default: 2]; the boost factor γ₀ for `contract`
    #[arg(long, conflicts_with = "p")]
    pub gamma: Option<f64>,

    /// Mean momentum magnitude, along +z
    #[arg(long)]
    pub p: Option<f64>,

    /// Relative momentum width σ_p/|p| [default: 0.01]
    #[arg(long, conflicts_with = "sigma_p")]
    pub epsilon: Option<f64>,

    /// Absolute momentum width σ_p [default for `contract`: 0.005]
    #[arg(long = "sigma-p")]
    pub sigma_p: Option<f64>,

    /// Boost speed along +z (negative for −z), `contract` only
    #[arg(long, allow_hyphen_values = true, conflicts_with = "gamma")]
    pub beta0: Option<f64>,

    /// Right end of the βt/σ_x grid [default: 100]
    #[arg(long = "t-max")]
    pub t_max: Option<f64>,

    /// Grid points including both ends [default: 101, or 11 for `density`]
    #[arg(long)]
    pub samples: Option<usize>,

    /// Add oracle columns
    #[arg(long = "with-oracle")]
    pub with_oracle: bool,

    /// Quadrature nodes per axis (at least 8) [default: 64]
    #[arg(long = "quad-nodes")]
    pub quad_nodes: Option<usize>,

    /// Quadrature box half-width in standard deviations (at least 5) [default: 8]
    #[arg(long = "quad-halfwidth")]
    pub quad_halfwidth: Option<f64>,

    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Same as --format json
    #[arg(long)]
    pub json: bool,

    /// Write to this file instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Opts {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}
