//! Command-line definitions.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::presets;

/// Comma-separated list of numbers, e.g. `0.5,-1,2e-3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Floats(pub Vec<f64>);

impl FromStr for Floats {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|_| format!("{t:?} is not a number"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Floats)
    }
}

impl fmt::Display for Floats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(f64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Result file; defaults to `geomkit-<command>.<format>` in the working directory.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Seed for every random draw of the run.
    #[arg(long, env = "GEOMKIT_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Named parameter set; explicit flags override it. See `geomkit presets`.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
}

#[derive(Debug, Parser)]
#[command(
    name = "geomkit",
    version,
    about = "Geometry and stochastic dynamics on manifolds from a single smooth map",
    after_help = presets::HELP,
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Manifold selection and a point on it.
#[derive(Debug, Clone, Args)]
pub struct Place {
    /// sphere-stereographic, euclidean:<d>, ellipsoid:<a>,<b>,<c> or landmarks:<n>,<sigma>,<alpha>
    #[arg(long, default_value = "sphere-stereographic")]
    pub manifold: String,

    /// Chart coordinates of the base point.
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<Floats>,
}

/// A frame at the base point.
#[derive(Debug, Clone, Args)]
pub struct FrameArgs {
    /// Frame vectors in chart coordinates, concatenated column after column.
    #[arg(long, allow_hyphen_values = true)]
    pub frame: Option<Floats>,

    /// Gram-Schmidt the frame in the metric at the base point first.
    #[arg(long)]
    pub orthonormalize: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Geodesic from the second-order geodesic equation over [0, 1].
    Geodesic {
        #[command(flatten)]
        place: Place,
        /// Initial velocity in chart coordinates.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<Floats>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// euler or rk4
        #[arg(long, default_value = "rk4")]
        scheme: String,
        #[command(flatten)]
        common: Common,
    },
    /// Geodesic from Hamilton's equations over [0, 1].
    ExpHam {
        #[command(flatten)]
        place: Place,
        /// Initial velocity; converted to momentum with the metric.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "p")]
        v: Option<Floats>,
        /// Initial momentum.
        #[arg(long, allow_hyphen_values = true)]
        p: Option<Floats>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Logarithm map by geodesic shooting.
    Log {
        #[command(flatten)]
        place: Place,
        /// Target point in chart coordinates.
        #[arg(long, allow_hyphen_values = true)]
        y: Option<Floats>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// lbfgs or gauss-newton
        #[arg(long, default_value = "gauss-newton")]
        method: String,
        /// Number of shooting solves from perturbed starts.
        #[arg(long, default_value_t = 1)]
        restarts: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Parallel transport of a vector along a curve.
    Partransport {
        #[command(flatten)]
        place: Place,
        /// Vector to transport, in chart coordinates at the curve's start.
        #[arg(long, allow_hyphen_values = true)]
        v: Option<Floats>,
        /// Built-in curve `spiral` (t^2, -sin t), or `file` to read --curve-file.
        #[arg(long, default_value = "spiral")]
        curve: String,
        /// Curve samples as CSV with header `t,...` and chart coordinates per row.
        #[arg(long)]
        curve_file: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Metric, Ricci, scalar and sectional curvature at a point (JSON).
    Curvature {
        #[command(flatten)]
        place: Place,
        /// Plane for the sectional curvature as two concatenated vectors;
        /// the first two coordinate directions by default.
        #[arg(long, allow_hyphen_values = true)]
        plane: Option<Floats>,
        #[command(flatten)]
        common: Common,
    },
    /// Euler-Poincare geodesic on SO(3) with its reconstructed group curve.
    LieEp {
        /// Initial body momentum.
        #[arg(long, allow_hyphen_values = true, default_value = "1,0.5,-0.3")]
        mu: Floats,
        /// Diagonal of the inertia tensor.
        #[arg(long, default_value = "1,2,3")]
        inertia: Floats,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// Columns of g projected to the sphere, e.g. `0,1`.
        #[arg(long, default_value = "0")]
        track: Floats,
        #[command(flatten)]
        common: Common,
    },
    /// Brownian motion on SO(3) started at the identity.
    LieBrownian {
        #[arg(long, default_value = "1,1,1")]
        inertia: Floats,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// Re-project onto the group after every step.
        #[arg(long)]
        project: bool,
        #[arg(long, default_value = "0")]
        track: Floats,
        #[command(flatten)]
        common: Common,
    },
    /// Normal sub-Riemannian geodesic on the frame bundle.
    FmGeodesic {
        #[command(flatten)]
        place: Place,
        #[command(flatten)]
        frame: FrameArgs,
        /// Horizontal initial velocity in frame coordinates.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "p")]
        v: Option<Floats>,
        /// Full initial momentum (d + d r entries, vertical part last).
        #[arg(long, allow_hyphen_values = true)]
        p: Option<Floats>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Development of a deterministic Euclidean curve.
    Develop {
        #[command(flatten)]
        place: Place,
        #[command(flatten)]
        frame: FrameArgs,
        /// Built-in curve `wave` (20 sin t, t^2 + 2t), or `file` to read --curve-file.
        #[arg(long, default_value = "wave")]
        curve: String,
        /// Curve samples as CSV with header `t,...`; increments are row differences.
        #[arg(long)]
        curve_file: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 10.0)]
        t_end: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Stochastic development of a Brownian motion with drift.
    StocDevelop {
        #[command(flatten)]
        place: Place,
        #[command(flatten)]
        frame: FrameArgs,
        /// Drift of the driving process, one entry per frame vector.
        #[arg(long, allow_hyphen_values = true)]
        drift: Option<Floats>,
        #[arg(long, default_value_t = 1000)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Most probable path from a frame to a target point.
    Mpp {
        #[command(flatten)]
        place: Place,
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long, allow_hyphen_values = true)]
        y: Option<Floats>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// A previously reported initial velocity to print next to the result.
        #[arg(long, allow_hyphen_values = true)]
        reference_v: Option<Floats>,
        #[command(flatten)]
        common: Common,
    },
    /// Exact landmark matching by shooting on the initial momentum.
    LandmarkMatch {
        #[arg(long, default_value_t = 50)]
        landmarks: usize,
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Source shape CSV (`x,y` header); the letter T by default.
        #[arg(long)]
        source: Option<PathBuf>,
        /// Target shape CSV (`x,y` header); the letter O by default.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 50)]
        max_iters: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Empirical Frechet mean of chart samples.
    Frechet {
        #[arg(long, default_value = "sphere-stereographic")]
        manifold: String,
        /// Samples CSV (`x0,x1,...` header); drawn from a chart Gaussian when absent.
        #[arg(long)]
        samples: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        n_samples: usize,
        /// Centre of the generated samples.
        #[arg(long, allow_hyphen_values = true, default_value = "0,0")]
        center: Floats,
        /// Coordinate standard deviation of the generated samples.
        #[arg(long, default_value_t = 0.2)]
        sd: f64,
        /// Initial guess.
        #[arg(long, allow_hyphen_values = true, default_value = "0.4,-0.4")]
        x0: Floats,
        #[command(flatten)]
        common: Common,
    },
    /// Density of a Brownian-motion normal distribution on a surface.
    NormalDensity {
        #[command(flatten)]
        place: Place,
        /// Covariance matrix, row-major.
        #[arg(long, allow_hyphen_values = true, default_value = "0.15,0,0,0.15")]
        sigma: Floats,
        /// `sqrt` uses the columns of the matrix square root as frame, `columns`
        /// the columns of the covariance itself.
        #[arg(long, default_value = "sqrt")]
        frame_mode: String,
        #[arg(long, default_value_t = 1000)]
        paths: usize,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        /// Kernel width in ambient units.
        #[arg(long, default_value_t = 0.1)]
        bandwidth: f64,
        #[arg(long, default_value_t = 50)]
        n_lat: usize,
        #[arg(long, default_value_t = 100)]
        n_lon: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Runs the invariant suite and reports one line per check.
    Selftest {
        /// Also run the slow landmark matching check.
        #[arg(long)]
        slow: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Lists the named presets.
    Presets,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Geodesic { .. } => "geodesic",
            Command::ExpHam { .. } => "exp-ham",
            Command::Log { .. } => "log",
            Command::Partransport { .. } => "partransport",
            Command::Curvature { .. } => "curvature",
            Command::LieEp { .. } => "lie-ep",
            Command::LieBrownian { .. } => "lie-brownian",
            Command::FmGeodesic { .. } => "fm-geodesic",
            Command::Develop { .. } => "develop",
            Command::StocDevelop { .. } => "stoc-develop",
            Command::Mpp { .. } => "mpp",
            Command::LandmarkMatch { .. } => "landmark-match",
            Command::Frechet { .. } => "frechet",
            Command::NormalDensity { .. } => "normal-density",
            Command::Selftest { .. } => "selftest",
            Command::Presets => "presets",
        }
    }
}
