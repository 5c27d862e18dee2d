//! Error type shared by every module of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A value lies exactly on the dilogarithm cut `[1, oo)`.
    #[error("point on the dilogarithm branch cut: {0}")]
    CutPoint(String),

    /// Argument outside the domain of the operation.
    #[error("domain violation: {0}")]
    Domain(String),

    /// Adaptive quadrature could not meet the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// Index or parameter outside its admissible range.
    #[error("out of range: {0}")]
    Range(String),

    /// A summand that must be real had a phase away from a multiple of pi.
    /// This signals a bookkeeping bug, not a data condition.
    #[error("realness check failed: {0}")]
    Realness(String),

    /// Evaluation point too close to a vertical branch cut.
    #[error("too close to a branch cut: {0}")]
    BranchCut(String),

    /// No suitable real root found in the expected bracket.
    #[error("root not found: {0}")]
    RootNotFound(String),

    /// Coarse scan found no sign change to bisect.
    #[error("no bisection bracket: {0}")]
    Bracket(String),

    /// Least-squares design matrix is singular.
    #[error("fit failed: {0}")]
    Fit(String),

    /// Closed-form derivative evaluated on its singular locus.
    #[error("singular locus: {0}")]
    Singularity(String),

    /// Level-set extraction blocked by masked (branch-cut) cells.
    #[error("resolution failure: {0}")]
    Resolution(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Range(_) | Error::CutPoint(_) | Error::BranchCut(_) => 3,
            Error::Quadrature(_)
            | Error::Realness(_)
            | Error::RootNotFound(_)
            | Error::Bracket(_)
            | Error::Fit(_)
            | Error::Singularity(_)
            | Error::Resolution(_) => 4,
            Error::Io(_) => 1,
        }
    }
}
