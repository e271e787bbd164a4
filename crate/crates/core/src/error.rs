use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid universe: {0}")]
    InvalidUniverse(String),

    #[error("universe mismatch: {0}")]
    UniverseMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A named structural invariant of the input does not hold.
    #[error("invariant violated ({invariant}): {detail}")]
    InvariantViolated {
        invariant: &'static str,
        detail: String,
    },

    #[error("matrix is not invertible: {0}")]
    NotInvertible(String),

    #[error("not a frame: lower bound {lower:e}, upper bound {upper:e}")]
    NotAFrame { lower: f64, upper: f64 },

    /// A singular value sits too close to the rank cutoff to decide the kernel.
    #[error("ambiguous rank decision: singular value {value:e} within 10x of cutoff {cutoff:e}")]
    RankAmbiguous { value: f64, cutoff: f64 },

    #[error("structural failure at grid point {point}: {detail}")]
    StructuralFailure { point: usize, detail: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("basic tuple does not belong to this tuple: {0}")]
    ProvenanceMismatch(String),

    #[error("no well-conditioned sample after {0} tries")]
    SamplingExhausted(usize),

    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: String, value: f64 },

    #[error("serialization: {0}")]
    Serialization(String),
}

impl Error {
    /// `true` for mathematical negatives (non-frames, violated invariants,
    /// structural failures) as opposed to malformed input.
    pub fn is_domain_failure(&self) -> bool {
        matches!(
            self,
            Error::InvariantViolated { .. }
                | Error::NotInvertible(_)
                | Error::NotAFrame { .. }
                | Error::RankAmbiguous { .. }
                | Error::StructuralFailure { .. }
                | Error::Precondition(_)
                | Error::SamplingExhausted(_)
        )
    }

    /// Short name used on stderr by the CLI.
    pub fn invariant_name(&self) -> &'static str {
        match self {
            Error::InvariantViolated { invariant, .. } => invariant,
            Error::NotInvertible(_) => "invertibility",
            Error::NotAFrame { .. } => "frame property",
            Error::RankAmbiguous { .. } => "rank gap",
            Error::StructuralFailure { .. } => "fiber structure",
            Error::Precondition(_) => "precondition",
            Error::SamplingExhausted(_) => "commutant sampling",
            Error::ProvenanceMismatch(_) => "provenance",
            _ => "input",
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
