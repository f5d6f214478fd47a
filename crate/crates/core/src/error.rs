use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("total degree {total} is odd")]
    OddTotalDegree { total: u64 },
    #[error("degree 0 is not allowed")]
    ZeroDegree,
    #[error("empty type sequence")]
    EmptySequence,
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("mean degree {mean} does not exceed 2; no extinction root in (0,1)")]
    SubcriticalDistribution { mean: f64 },
    #[error("rate requires positive mass at degree 1")]
    Degree1Required,
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("root solve did not reach tolerance (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("epsilon {eps} too large: need eps < {limit} and a supercritical truncation")]
    EpsilonTooLarge { eps: f64, limit: f64 },
    #[error("instance too large for exhaustive enumeration (total degree {total}, limit {limit})")]
    TooLarge { total: u64, limit: u64 },
    #[error("type sequence is not bounded by the reference sequence")]
    NotBounded,
    #[error("invalid switching move: {0}")]
    InvalidMove(String),
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("giant surplus {surplus} is smaller than the {needed} components to attach")]
    InsufficientSurplus { surplus: u64, needed: u64 },
    #[error("budget exhausted after {attempts} attempts")]
    BudgetExhausted { attempts: u64 },
    #[error("non-integer graph count: {0}")]
    NonIntegerResult(String),
    #[error("invalid tree code: {0}")]
    InvalidTreeCode(String),
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::OddTotalDegree { .. } => "OddTotalDegree",
            Error::ZeroDegree => "ZeroDegree",
            Error::EmptySequence => "EmptySequence",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::SubcriticalDistribution { .. } => "SubcriticalDistribution",
            Error::Degree1Required => "Degree1Required",
            Error::Domain(_) => "Domain",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::EpsilonTooLarge { .. } => "EpsilonTooLarge",
            Error::TooLarge { .. } => "TooLarge",
            Error::NotBounded => "NotBounded",
            Error::InvalidMove(_) => "InvalidMove",
            Error::InvalidConfiguration(_) => "InvalidConfiguration",
            Error::InsufficientSurplus { .. } => "InsufficientSurplus",
            Error::BudgetExhausted { .. } => "BudgetExhausted",
            Error::NonIntegerResult(_) => "NonIntegerResult",
            Error::InvalidTreeCode(_) => "InvalidTreeCode",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
