//! Crate-wide error type.

use crate::layout::LayoutTag;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The pair force diverges at zero separation.
    #[error("zero separation between atoms; pair force is undefined")]
    ZeroSeparation,

    #[error("atoms {i} and {j} coincide; pair force is undefined")]
    CoincidentAtoms { i: usize, j: usize },

    #[error("squared distance must be positive, got {0}")]
    NonPositiveDistance(f64),

    #[error("lattice block of extent {extent} does not fit in a box of edge {box_edge}")]
    LatticeOutsideBox { extent: f64, box_edge: f64 },

    #[error("inconsistent system: {0}")]
    InvalidSystem(String),

    /// The cell grid needs at least three cells per edge so the 27-cell
    /// stencil is well defined without wraparound.
    #[error("search radius {r_s} is too large for a box of edge {box_edge} (needs >= 3 cells per edge)")]
    SearchRadiusTooLarge { r_s: f64, box_edge: f64 },

    #[error("unknown kernel `{0}`")]
    UnknownKernel(String),

    #[error("kernel {kernel} requires the {required} layout, got {got}")]
    LayoutMismatch {
        kernel: &'static str,
        required: LayoutTag,
        got: LayoutTag,
    },

    #[error("malformed xyz input at line {line}: {reason}")]
    MalformedXyz { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
