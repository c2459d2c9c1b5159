use thiserror::Error;

/// Errors produced anywhere in the library.
///
/// Validation variants carry the measured residual so that callers can
/// report how far an input was from satisfying the invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected side {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian: |M - M^H| = {residual:.3e} at entry ({row}, {col})")]
    NotHermitian { residual: f64, row: usize, col: usize },

    #[error("trace is {trace:.12}, off by {residual:.3e} from 1")]
    TraceNotOne { trace: f64, residual: f64 },

    #[error("matrix is not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    BadSubsystemIndex { index: usize, count: usize },

    #[error("invalid permutation {0:?}")]
    BadPermutation(Vec<usize>),

    #[error("no convergence after {max_iter} sweeps (residual {residual:.3e})")]
    ConvergenceFailure { max_iter: usize, residual: f64 },

    #[error("vector is not normalized: norm {norm:.12}")]
    NotNormalized { norm: f64 },

    #[error("state has {0} subsystems, expected a bipartite state")]
    NotBipartite(usize),

    #[error("state has {found} subsystems, expected {expected}")]
    WrongPartyCount { expected: usize, found: usize },

    #[error("local dimensions {0:?} are not all equal")]
    UnequalLocalDims(Vec<usize>),

    #[error("invalid parameter family: {0}")]
    BadFamily(String),

    #[error("invalid parameters: {0}")]
    BadParams(String),

    #[error("verdict does not change between endpoints (margins {lo_margin:.6e}, {hi_margin:.6e})")]
    NoSignChange { lo_margin: f64, hi_margin: f64 },

    #[error("bisection tolerance {0:e} is too small for the bracket")]
    TolTooSmall(f64),

    #[error("unknown state '{0}'")]
    UnknownState(String),

    #[error("parameter {value} for '{name}' outside range [{lo}, {hi}]")]
    ParamOutOfRange { name: String, value: f64, lo: f64, hi: f64 },

    #[error("rank {rank} exceeds dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("invalid optimizer configuration: {0}")]
    BadConfig(String),

    #[error("reference data: {0}")]
    ReferenceData(String),
}

impl Error {
    /// Short variant name, used by the CLI when reporting numeric failures.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotSquare { .. } => "NotSquare",
            Error::DimMismatch { .. } => "DimMismatch",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::TraceNotOne { .. } => "TraceNotOne",
            Error::NotPositive { .. } => "NotPositive",
            Error::NonFinite { .. } => "NonFinite",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::BadSubsystemIndex { .. } => "BadSubsystemIndex",
            Error::BadPermutation(_) => "BadPermutation",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NotBipartite(_) => "NotBipartite",
            Error::WrongPartyCount { .. } => "WrongPartyCount",
            Error::UnequalLocalDims(_) => "UnequalLocalDims",
            Error::BadFamily(_) => "BadFamily",
            Error::BadParams(_) => "BadParams",
            Error::NoSignChange { .. } => "NoSignChange",
            Error::TolTooSmall(_) => "TolTooSmall",
            Error::UnknownState(_) => "UnknownState",
            Error::ParamOutOfRange { .. } => "ParamOutOfRange",
            Error::BadRank { .. } => "BadRank",
            Error::BadConfig(_) => "BadConfig",
            Error::ReferenceData(_) => "ReferenceData",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
