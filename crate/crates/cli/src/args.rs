use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "quadlie", version, about = "Left-invariant metrics on Lie groups from structure constants")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Check the algebra, form and iso; report the signature.
    Validate(Opts),
    /// Center, derived algebra, lower central series, unimodularity.
    Analyze(Opts),
    /// Christoffel coefficients of the Levi-Civita product.
    Connection(Opts),
    /// Nonzero curvature components.
    Curvature(Opts),
    /// Flatness certificate; exits 2 when the metric is not flat.
    Flat(Opts),
    /// Integrate the Euler equation from --x over --span.
    Geodesic(Opts),
    /// Integrate a Jacobi field along the geodesic through --x.
    Jacobi(Opts),
    /// Scan --window for conjugate points along the geodesic through --x.
    Conjugate(Opts),
    /// Integrate seeds forward and backward to look for escapes.
    Probe(Opts),
    /// Emit the explicit algebra file of a construction or catalog entry.
    Build(Opts),
    /// List catalog names, or describe --catalog NAME.
    Catalog(Opts),
    /// Flatness and similarity invariants of the two-step metric family
    /// over random phi.
    FamilySweep(Opts),
}

impl Command {
    pub fn opts(&self) -> &Opts {
        match self {
            Command::Validate(o)
            | Command::Analyze(o)
            | Command::Connection(o)
            | Command::Curvature(o)
            | Command::Flat(o)
            | Command::Geodesic(o)
            | Command::Jacobi(o)
            | Command::Conjugate(o)
            | Command::Probe(o)
            | Command::Build(o)
            | Command::Catalog(o)
            | Command::FamilySweep(o) => o,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Analyze(_) => "analyze",
            Command::Connection(_) => "connection",
            Command::Curvature(_) => "curvature",
            Command::Flat(_) => "flat",
            Command::Geodesic(_) => "geodesic",
            Command::Jacobi(_) => "jacobi",
            Command::Conjugate(_) => "conjugate",
            Command::Probe(_) => "probe",
            Command::Build(_) => "build",
            Command::Catalog(_) => "catalog",
            Command::FamilySweep(_) => "family-sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Algebra file (JSON).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Catalog entry, e.g. `dim5-nilpotent` or `oscillator(1,2)`.
    #[arg(long)]
    pub catalog: Option<String>,
    /// Oscillator frequencies, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Square-free integer of the `a-d` entries.
    #[arg(long, allow_hyphen_values = true)]
    pub d: Option<String>,
    /// Constant of the dim-5 solution family.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Initial velocity as `label:value,...` (labels with or without the
    /// leading `e`) or plain comma-separated values.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    /// Initial Jacobi field, same syntax as --x.
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    /// Initial derivative of the Jacobi field.
    #[arg(long, allow_hyphen_values = true)]
    pub ydot: Option<String>,
    /// Integration interval `A:B`.
    #[arg(long, allow_hyphen_values = true)]
    pub span: Option<String>,
    /// Scan interval `A:B`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    /// Directory for report.json and CSV artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Probe seeds: `paper` (the known escaping solution of
    /// `dim5-nilpotent`, shifted by --c), `standard` or `random:N`.
    #[arg(long)]
    pub seed: Option<String>,
    /// Probe horizon; defaults to the larger end of --span, else 100.
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Grid intervals of the conjugate scan.
    #[arg(long, default_value_t = 2000)]
    pub grid: usize,
    /// Use the bi-invariant product `1/2 [x, y]` of the ad-invariant form.
    #[arg(long)]
    pub biinvariant: bool,
    /// For `jacobi`: follow the right-invariant field through --y and check
    /// it against the Jacobi equation.
    #[arg(long)]
    pub right_invariant: bool,
    /// Number of random samples for `family-sweep` and `--seed random:N`.
    #[arg(long, default_value_t = 10)]
    pub samples: usize,
    #[arg(long, default_value_t = 1)]
    pub rng_seed: u64,
}
