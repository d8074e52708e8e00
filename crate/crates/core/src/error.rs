use thiserror::Error;

/// Errors produced by the algebra, measurement and optimization layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix dimension {0} is not one of 1, 3, 9, 27")]
    UnsupportedDimension(usize),

    #[error("kronecker product would produce a {rows}x{cols} matrix, beyond the supported 27")]
    KronOverflow { rows: usize, cols: usize },

    #[error("dimension mismatch: {left_rows}x{left_cols} against {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("trace requires a square matrix, got {rows}x{cols}")]
    NonSquareTrace { rows: usize, cols: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not unitary: max |U\u{2020}U - I| = {deviation:.3e}")]
    NotUnitary { deviation: f64 },

    #[error("state is not normalized: |\u{2016}\u{03c8}\u{2016}\u{00b2} - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("noise fraction {0} is outside [0, 1]")]
    InvalidNoiseFraction(f64),

    #[error(
        "probabilities are not constant over outcome residues: \
         group W{group} (l+m+n \u{2261} {residue} mod 3) spreads {spread:.3e}"
    )]
    GroupingViolated { group: u8, residue: u8, spread: f64 },

    #[error("{0:?} is not a permutation of {{1, 2, 3}}")]
    InvalidPermutation([u8; 3]),

    #[error("outcome index {0} is outside {{1, 2, 3}}")]
    InvalidOutcome(u8),

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("internal consistency check failed: {0}")]
    ConsistencyCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
