use thiserror::Error;

/// Failures of a CLI run, grouped by the exit code they map to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Engine(#[from] knnsv::Error),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    /// 2 for usage errors, 3 for bad input data, 4 when a work budget or
    /// player cap refuses the run.
    pub fn exit_code(&self) -> u8 {
        use knnsv::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io { .. } => 3,
            CliError::Engine(e) => match e {
                E::BudgetExceeded { .. } | E::TooManyPlayers { .. } => 4,
                E::DimensionMismatch { .. } | E::InvalidData(_) | E::Format(_) | E::Io(_) => 3,
                E::InvalidArgument(_) | E::Unsupported(_) | E::BracketExhausted { .. } => 2,
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
