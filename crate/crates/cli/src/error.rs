use thiserror::Error;

/// Failures of a subcommand, each tied to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config values or malformed input files (exit 2).
    #[error("{0}")]
    Usage(String),

    /// Unreadable input or unwritable output (exit 3).
    #[error("I/O error: {0}")]
    Io(String),

    /// The fit degenerated: all components pruned, a singular solve or an
    /// observation no component can explain (exit 4).
    #[error("degenerate fit: {0}")]
    Degenerate(String),

    /// Too few bench replicates succeeded (exit 5).
    #[error("only {succeeded} of {total} replicates succeeded")]
    BenchFailed { succeeded: usize, total: usize },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Degenerate(_) => 4,
            CliError::BenchFailed { .. } => 5,
        }
    }
}

impl From<mixep::Error> for CliError {
    fn from(e: mixep::Error) -> Self {
        use mixep::Error as E;
        match e {
            E::Io(_) => CliError::Io(e.to_string()),
            E::AllPruned { .. } | E::DegenerateRow { .. } | E::Singular { .. } | E::NonFinite(_) => {
                CliError::Degenerate(e.to_string())
            }
            E::Csv(ref inner) if matches!(inner.kind(), csv::ErrorKind::Io(_)) => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
