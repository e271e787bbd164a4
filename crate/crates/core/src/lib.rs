//! Frames generated by orbits `{TᵏLʲwᵢ}` of two commuting operators.
//!
//! The crate works on finite truncations of the model spaces
//! `L²(𝕋, H²_{ℓ²(I)})` (unilateral) and `L²(𝕋², ℓ²(I))` (bilateral):
//!
//! * [`lattice`]: the discretized universes, coefficient fields and the
//!   shift operators `U`, `Ŝ`, `U₁`, `U₂`.
//! * [`tuples`]: tuples `(ℋ, T, L, {wᵢ})`, orbit systems, synthesis
//!   operators and frame bounds.
//! * [`model`]: the basic-tuple model of a frame-tuple and the similarity
//!   decision built on it.
//! * [`fibers`]: range functions, pointwise projections, Beurling
//!   generators of fibers, `χ_E` masks and operator-valued multipliers.
//! * [`genlab`]: joint commutants and generator-class experiments.
//! * [`presets`]: reproducible fixtures used by the tests and the CLI.

pub mod error;
pub mod fibers;
pub mod genlab;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod model;
pub mod presets;
pub mod random;
pub mod tolerances;
pub mod tuples;

pub use error::{Error, Result};
pub use fibers::{InnerFactor, OperatorField, RangeFunction, ReducingDefect};
pub use genlab::{CommutantBasis, GeneratorClassReport, MembershipVerdict};
pub use lattice::{BasisIndex, CoefField, Mode, Shift, Universe};
pub use model::{BasicTuple, RieszClass, SimilarityVerdict};
pub use tolerances::Tolerances;
pub use tuples::{FrameReport, Iteration, SynthesisOp, Tuple};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// Version string embedded in serialized reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
