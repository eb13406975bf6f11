use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The symmetric eigensolver hit its iteration cap.
    #[error("eigendecomposition did not converge (matrix Frobenius norm {norm:e})")]
    NumericalFailure { norm: f64 },

    /// An SPD operation met an eigenvalue at or below the floor.
    #[error("degenerate matrix: smallest eigenvalue {min_eigenvalue:e} <= floor {floor:e}")]
    DegenerateMatrix { min_eigenvalue: f64, floor: f64 },

    /// The Bures-Wasserstein exponential map would collapse the covariance:
    /// the factor `S + I` is (numerically) singular.
    #[error("degenerate covariance: smallest |eigenvalue| of S + I is {min_factor_eigenvalue:e}")]
    DegenerateCovariance { min_factor_eigenvalue: f64 },

    /// Sphere logarithm / transport between (near-)antipodal points.
    #[error("logarithm undefined: points are antipodal (angle {angle})")]
    UndefinedLog { angle: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("objective has no reference optimum")]
    MissingReference,

    #[error("unknown certificate suite `{0}`")]
    UnknownSuite(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
