use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not antisymmetric: max |A + A^T| = {0:.3e}")]
    NotAntisymmetric(f64),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("input is not an antisymmetric skew-circulant matrix (deviation {0:.3e})")]
    NotSkewCirculant(f64),

    /// The requested base configuration has (numerically) vanishing amplitude.
    #[error("target base configuration has vanishing amplitude (|pf| = {0:.3e})")]
    ZeroAmplitudeBase(f64),

    #[error("T22 block of the Balian-Brezin decomposition is singular (cond ~ {0:.3e})")]
    SingularBlock(f64),

    /// Either R + I or H.P - I failed to invert: the dual construction degenerates.
    #[error("Cayley transform in the dual construction is singular (cond ~ {0:.3e})")]
    SingularCayley(f64),

    #[error("I - R*.R is numerically singular (cond ~ {0:.3e})")]
    SingularQ(f64),

    #[error("matrix has a non-negligible imaginary part ({0:.3e})")]
    NotRealMatrix(f64),

    #[error("I - G is numerically singular (cond ~ {0:.3e})")]
    SingularG(f64),

    #[error("insufficient data: need at least {needed} points, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("ill-conditioned fit: design matrix condition number {0:.3e}")]
    IllConditionedFit(f64),

    #[error("size limit exceeded: L = {l} > {max}")]
    SizeLimit { l: usize, max: usize },

    #[error("ground state is (nearly) degenerate: gap {0:.3e}")]
    DegenerateGroundState(f64),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
