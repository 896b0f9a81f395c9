use thiserror::Error;

/// Process exit status for each failure class.
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("{failed} of {total} validation checks failed")]
    ChecksFailed { failed: usize, total: usize },

    #[error(transparent)]
    Solver(#[from] pnp_core::Error),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },

    #[error("JSON encoding failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable class used in failure reports.
    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            EXIT_VALIDATION => "validation",
            EXIT_NONCONVERGENCE => "nonconvergence",
            _ => "io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        use pnp_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Validation(_) | CliError::ChecksFailed { .. } => {
                EXIT_VALIDATION
            }
            CliError::Solver(e) => match e {
                E::NonConvergence { .. }
                | E::NotConverged
                | E::SingularSystem { .. }
                | E::StepRejected(_)
                | E::StagnantStep { .. }
                | E::DivergentOrbit { .. }
                | E::IntegrationFailure { .. }
                | E::QuadratureFailure { .. }
                | E::RootFindFailure(_) => EXIT_NONCONVERGENCE,
                _ => EXIT_VALIDATION,
            },
            CliError::Io { .. } | CliError::Csv { .. } | CliError::Json(_) => EXIT_IO,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
