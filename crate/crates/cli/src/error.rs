use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] dissim_core::Error),
}

impl CliError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config { path: path.into(), message: message.into() }
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    /// Process exit status: 2 for size guards, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(dissim_core::Error::GuardExceeded { .. }) => 2,
            _ => 1,
        }
    }

    /// Extra hint printed after guard failures.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::Core(dissim_core::Error::GuardExceeded { what: "D", .. }) => {
                Some("reduce the number of sites; `bounds`, `census` and `nets` have no size limit")
            }
            CliError::Core(dissim_core::Error::GuardExceeded { .. }) => {
                Some("dense superoperators need D^2 <= 4096; for larger systems use `bounds`, or `simulate` with verification.oracle = false")
            }
            _ => None,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
