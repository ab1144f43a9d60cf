use thiserror::Error;

/// Failure modes of construction, matching and extraction.
///
/// Variants fall in four families that the command line maps to exit codes:
/// malformed input, hypothesis violations, operator/vector mismatch and
/// extraction failure. See [`Error::kind`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid factoring: {0}")]
    InvalidDims(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("zero vector: {0}")]
    ZeroVector(String),

    #[error("invalid subsystem selection: {0}")]
    InvalidSubsystem(String),

    #[error("operator is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("operator is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("weight of term {index} must be positive, got {value}")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("coefficient of term {index} must be nonzero")]
    ZeroCoefficient { index: usize },

    #[error("set {{{set}}} collinear pair ({first},{second})")]
    CollinearPair {
        set: String,
        first: usize,
        second: usize,
    },

    #[error("independence hypothesis violated: {0}")]
    NotIndependent(String),

    #[error("no dual basis: set is linearly dependent (rank {rank} of {count})")]
    NoDualBasis { rank: usize, count: usize },

    #[error("auxiliary dimension {dim3} is smaller than the term count {n}")]
    AuxiliaryTooSmall { dim3: usize, n: usize },

    #[error("not co-purifications: reduced operators differ by {0:.3e}")]
    NotCoPurifications(f64),

    #[error("unitary completion failed: residual {0:.3e}")]
    CompletionFailure(f64),

    #[error("factorability hypothesis violated: term {term} has Schmidt values {schmidt:?}")]
    FactorabilityViolated { term: usize, schmidt: Vec<f64> },

    #[error("term-count mismatch: {first} vs {second}")]
    TermCountMismatch { first: usize, second: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("operators differ: relative Frobenius distance {0:.3e}")]
    OperatorsDiffer(f64),

    #[error("vectors differ: relative distance {0:.3e}")]
    VectorsDiffer(f64),

    #[error("not extractable under hypotheses: {0}")]
    NotExtractable(String),

    #[error("infeasible instance: {0}")]
    Infeasible(String),
}

/// Coarse classification of an [`Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Hypothesis,
    Mismatch,
    NotExtractable,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            DimensionMismatch { .. }
            | InvalidDims(_)
            | InvalidTolerance(_)
            | ZeroVector(_)
            | InvalidSubsystem(_)
            | NotHermitian(_)
            | NotPsd(_)
            | AuxiliaryTooSmall { .. }
            | Infeasible(_) => ErrorKind::Input,
            NonPositiveWeight { .. }
            | ZeroCoefficient { .. }
            | CollinearPair { .. }
            | NotIndependent(_)
            | NoDualBasis { .. }
            | NotCoPurifications(_)
            | CompletionFailure(_)
            | FactorabilityViolated { .. }
            | TermCountMismatch { .. }
            | Hypothesis(_) => ErrorKind::Hypothesis,
            OperatorsDiffer(_) | VectorsDiffer(_) => ErrorKind::Mismatch,
            NotExtractable(_) => ErrorKind::NotExtractable,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
