use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// Operand length or shape does not fit the operator.
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    /// Matrix given to a symmetric solver is not symmetric within tolerance.
    NotSymmetric {
        max_deviation: f64,
    },
    /// Cholesky factorization met a nonpositive pivot.
    NotPositiveDefinite {
        pivot: usize,
    },
    /// The SVD iteration did not converge.
    SvdFailed,
    /// A backward Bellman step could not factor `F* S_{k+1} F + I`.
    BackwardStep {
        step: usize,
        pivot: usize,
    },
    /// Explicit Riccati stepping violates `dt * |F*F| <= 1`.
    Unstable {
        steps: usize,
        required_steps: usize,
    },
    /// Landweber residual exceeded ten times its initial value.
    Diverged {
        iteration: usize,
    },
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::NotSymmetric { max_deviation } => {
                write!(f, "matrix is not symmetric (max deviation {max_deviation:e})")
            }
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (pivot {pivot})")
            }
            Error::SvdFailed => f.write_str("singular value decomposition did not converge"),
            Error::BackwardStep { step, pivot } => write!(
                f,
                "backward pass failed at step {step}: F*SF+I not positive definite at pivot {pivot}"
            ),
            Error::Unstable { steps, required_steps } => write!(
                f,
                "explicit Riccati scheme unstable with {steps} steps; at least {required_steps} required"
            ),
            Error::Diverged { iteration } => {
                write!(f, "iteration diverged at step {iteration}")
            }
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
