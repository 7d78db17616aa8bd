use thiserror::Error;

/// Everything that can go wrong inside the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("pump-loss imbalance is undefined for eta_kappa = 0")]
    DegenerateBeta,

    #[error("truncation half-width must be at least 1, got {0}")]
    TruncationTooSmall(i64),

    #[error("harmonic {n} lies outside the truncation window [-{n_trunc}, {n_trunc}]")]
    HarmonicOutOfRange { n: i64, n_trunc: usize },

    #[error("omega_bar - H is exactly singular")]
    Singular,

    #[error("omega_bar - H is nearly singular (condition number {cond:.3e})")]
    NearSingular { cond: f64 },

    #[error("gap closes at harmonic {n}, omega_bar = {omega_bar}: winding number undefined")]
    OnBoundary { n: i64, omega_bar: f64 },

    #[error("closed-form winding requires phi = +-pi/2, got phi = {0}")]
    UnsupportedPhase(f64),

    #[error("no Dirac points: beta = {0} lies outside (0, 2)")]
    NoDiracPoints(f64),

    #[error("vector length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("frequency quadrature did not converge (relative disagreement {0:.3e})")]
    QuadratureNotConverged(f64),

    #[error("integration diverged after t = {t_last}")]
    Divergence { t_last: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
