use thiserror::Error;

/// Errors shared across the numeric modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("scaling factor must be nonzero")]
    ZeroScalingFactor,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("scaled vector level does not match the structure's upper level")]
    LevelMismatch,

    #[error("grid point count must be a power of two >= 8, got {0}")]
    BadGridSize(usize),

    #[error("grid spacing must be positive and finite, got {0}")]
    BadGridSpacing(f64),

    #[error("grid origin {origin} is not an integer multiple of the spacing {dz}")]
    BadGridOrigin { origin: f64, dz: f64 },

    #[error("coordinate {0} does not lie on a grid node")]
    OffGrid(f64),

    #[error("sampled field is defined on a different grid")]
    GridMismatch,

    #[error("grid has {n} points, operation needs at least {min}")]
    GridTooSmall { n: usize, min: usize },

    #[error("amplitude array length {actual} does not match grid size {expected}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("non-finite amplitude at index {0}")]
    NonFiniteAmplitude(usize),

    #[error("coordinate list is empty")]
    EmptyPointList,

    #[error("{0} axes requested, localization supports 1 to 3")]
    UnsupportedRank(usize),

    #[error("total grid size {0} exceeds the 2^20 point budget")]
    SizeOverflow(usize),

    #[error("physical constants must be positive")]
    BadConstants,

    #[error("time step must be positive and finite, got {0}")]
    BadTimeStep(f64),

    #[error("linear solve failed in the time stepper")]
    SolveFailure,

    #[error("combined state statistics must be fermion or boson")]
    BadStatistics,

    #[error("declared {0:?} symmetry does not hold for the supplied amplitudes")]
    SymmetryViolation(crate::pair::Statistics),
}

pub type Result<T> = std::result::Result<T, Error>;
