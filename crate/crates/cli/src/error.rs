use std::path::PathBuf;

/// Errors surfaced by the binary, each with a fixed exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error(transparent)]
    Kernel(#[from] realign::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use realign::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Parse { .. } => 2,
            CliError::Kernel(E::NoSignChange { .. }) => 4,
            CliError::Kernel(
                E::UnknownState(_) | E::BadParams(_) | E::ParamOutOfRange { .. } | E::BadConfig(_) | E::BadFamily(_),
            ) => 2,
            CliError::Kernel(_) => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "Usage",
            CliError::Io { .. } => "Io",
            CliError::Parse { .. } => "ParseError",
            CliError::Kernel(e) => e.kind(),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
