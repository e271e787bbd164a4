use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "orbitframe",
    version,
    about = "Frames generated by commuting operator orbits: bounds, basic tuples, similarity and fiber analysis"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Directory receiving reports and side files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Report format. CSV side files are written in both cases.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Seed for every random draw of the run.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Universe `N,M,n` (unilateral) or `N1,N2,n` (bilateral); `n` may be omitted.
    #[arg(long, global = true, value_delimiter = ',')]
    pub universe: Vec<usize>,

    #[arg(long, global = true, value_enum)]
    pub mode: Option<ModeArg>,

    #[arg(long, global = true, value_enum)]
    pub iteration: Option<IterationArg>,

    /// Truncated iteration: `k ∈ [−K, K]`.
    #[arg(long = "K", global = true)]
    pub k: Option<usize>,

    /// Truncated iteration: `j ∈ [0, J)` (bilateral `[−J, J]`).
    #[arg(long = "J", global = true)]
    pub j: Option<usize>,

    #[command(flatten)]
    pub tol: TolArgs,
}

#[derive(Args, Debug, Clone, Default)]
pub struct TolArgs {
    #[arg(long = "tol-comm", global = true, allow_negative_numbers = true)]
    pub comm: Option<f64>,
    #[arg(long = "tol-inv", global = true, allow_negative_numbers = true)]
    pub inv: Option<f64>,
    #[arg(long = "tol-cyclic", global = true, allow_negative_numbers = true)]
    pub cyclic: Option<f64>,
    #[arg(long = "tol-parseval", global = true, allow_negative_numbers = true)]
    pub parseval: Option<f64>,
    #[arg(long = "tol-frame", global = true, allow_negative_numbers = true)]
    pub frame: Option<f64>,
    #[arg(long = "tol-rank", global = true, allow_negative_numbers = true)]
    pub rank: Option<f64>,
    #[arg(long = "tol-red", global = true, allow_negative_numbers = true)]
    pub red: Option<f64>,
    #[arg(long = "tol-sim", global = true, allow_negative_numbers = true)]
    pub sim: Option<f64>,
    #[arg(long = "tol-cert", global = true, allow_negative_numbers = true)]
    pub cert: Option<f64>,
}

impl TolArgs {
    pub fn overrides(&self) -> [(&'static str, Option<f64>); 9] {
        [
            ("comm", self.comm),
            ("inv", self.inv),
            ("cyclic", self.cyclic),
            ("parseval", self.parseval),
            ("frame", self.frame),
            ("rank", self.rank),
            ("red", self.red),
            ("sim", self.sim),
            ("cert", self.cert),
        ]
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeArg {
    Unilateral,
    Bilateral,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationArg {
    Cyclic,
    Truncated,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Frame bounds, spectrum and invariant diagnostics of a tuple.
    Analyze {
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Basic tuple (model subspace, compressed shift, projected generators).
    Model {
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Similarity of two tuples sharing a universe.
    Similar {
        #[arg(short = 'a', long = "a")]
        a: PathBuf,
        #[arg(short = 'b', long = "b")]
        b: PathBuf,
    },
    /// Range function of a model subspace, or of the orbit span of fields.
    Fibers {
        #[arg(long, conflicts_with = "field", required_unless_present = "field")]
        tuple: Option<PathBuf>,
        /// Coefficient field files whose shift orbits span the subspace.
        #[arg(long)]
        field: Vec<PathBuf>,
    },
    /// Per-fiber inner factor of the complement of a unilateral model subspace.
    Inner {
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Grid support of a bilateral model subspace.
    #[command(name = "chi-e")]
    ChiE {
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Generator experiments over a fixed operator pair.
    Genlab {
        #[command(subcommand)]
        experiment: Experiment,
    },
    /// Write a preset tuple.
    Preset {
        #[arg(value_enum)]
        name: PresetName,
        /// Fiber depths per grid point, comma-separated; `a:b` gives one value per generator.
        #[arg(long)]
        profile: Option<String>,
        /// Grid mask in row-major order as 0/1 digits, optionally comma-separated.
        #[arg(long)]
        mask: Option<String>,
        /// Number of powers of `L` for `geometric_diag`.
        #[arg(long, default_value_t = 50)]
        powers: usize,
        /// Condition number of the map used by `pushforward`.
        #[arg(long, default_value_t = 100.0)]
        cond: f64,
        /// Input tuple for `pushforward`.
        #[arg(long)]
        tuple: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum Experiment {
    /// Decide whether a candidate vector generates a tuple similar to the base.
    Membership {
        #[arg(long)]
        tuple: PathBuf,
        /// JSON array of `[re, im]` pairs.
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Extend two generators by their sum and by their difference and compare.
    Counterexample {
        #[arg(long)]
        tuple: PathBuf,
    },
    /// Similarity classes of tuples sharing one operator pair.
    Census {
        #[arg(long = "tuple", required = true)]
        tuples: Vec<PathBuf>,
    },
    /// Classes of `{v, a·v}` for the base generator `v` and given scalars.
    Scaled {
        #[arg(long)]
        tuple: PathBuf,
        /// Comma-separated scalars, each `re` or `re:im`.
        #[arg(long, default_value = "1,2,3")]
        scalars: String,
    },
    /// Commuting versus generic maps applied to a single generator.
    Dichotomy {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long, default_value_t = 50)]
        samples: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    #[value(name = "full_riesz")]
    FullRiesz,
    #[value(name = "monomial_fibers")]
    MonomialFibers,
    #[value(name = "bilateral_mask")]
    BilateralMask,
    #[value(name = "geometric_diag")]
    GeometricDiag,
    #[value(name = "remark49_pair")]
    SumDifferencePair,
    #[value(name = "pushforward")]
    Pushforward,
}

impl PresetName {
    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::FullRiesz => "full_riesz",
            PresetName::MonomialFibers => "monomial_fibers",
            PresetName::BilateralMask => "bilateral_mask",
            PresetName::GeometricDiag => "geometric_diag",
            PresetName::SumDifferencePair => "remark49_pair",
            PresetName::Pushforward => "pushforward",
        }
    }
}
