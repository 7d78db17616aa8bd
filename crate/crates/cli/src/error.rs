use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<floquet_amp::Error> for CliError {
    fn from(e: floquet_amp::Error) -> Self {
        use floquet_amp::Error as E;
        match e {
            E::InvalidParams(_)
            | E::DegenerateBeta
            | E::TruncationTooSmall(_)
            | E::HarmonicOutOfRange { .. }
            | E::UnsupportedPhase(_)
            | E::LengthMismatch(..)
            | E::InvalidArgument(_) => CliError::Config(e.to_string()),
            E::Io(msg) => CliError::Io(msg),
            E::Singular
            | E::NearSingular { .. }
            | E::OnBoundary { .. }
            | E::NoDiracPoints(_)
            | E::QuadratureNotConverged(_)
            | E::Divergence { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
