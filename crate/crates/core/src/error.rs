use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("not kinetic: {0}")]
    NotKinetic(String),
    #[error("not a generalized compartmental system: {0}")]
    NotCompartmentalShape(String),
    #[error("invalid reaction network: {0}")]
    InvalidNetwork(String),
    #[error("parameters are not robust: eigenvalues {0} and {1} coincide")]
    NonRobustParameters(usize, usize),
    #[error("matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,
    #[error("matrix exponential overflowed")]
    Overflow,
    #[error("selected eigenvectors are linearly dependent (rank {rank} of {selected})")]
    DependentSelection { rank: usize, selected: usize },
    #[error("lumping needs fewer rows than states ({rows} >= {states})")]
    TooManyRows { rows: usize, states: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("not exactly lumpable (residual {0:e})")]
    NotLumpable(f64),
    #[error("basis transform is singular")]
    SingularP,
    #[error("matrix has negative entries")]
    NegativeEntries,
    #[error("time grid too coarse: step {step:e} exceeds {limit:e}")]
    GridTooCoarse { step: f64, limit: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::InvalidModel(_) => "InvalidModel",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NotKinetic(_) => "NotKinetic",
            Error::NotCompartmentalShape(_) => "NotCompartmentalShape",
            Error::InvalidNetwork(_) => "InvalidNetwork",
            Error::NonRobustParameters(..) => "NonRobustParameters",
            Error::RankDeficient { .. } => "RankDeficient",
            Error::ConvergenceFailure => "ConvergenceFailure",
            Error::Overflow => "Overflow",
            Error::DependentSelection { .. } => "DependentSelection",
            Error::TooManyRows { .. } => "TooManyRows",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::NotLumpable(_) => "NotLumpable",
            Error::SingularP => "SingularP",
            Error::NegativeEntries => "NegativeEntries",
            Error::GridTooCoarse { .. } => "GridTooCoarse",
            Error::Unsupported(_) => "Unsupported",
        }
    }
}
