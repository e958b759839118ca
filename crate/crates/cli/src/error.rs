use thiserror::Error;

/// Exit code for a failed mathematical check.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code for unreadable, malformed or invalid input.
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}:{line}:{column}: at `{path}`: {message}")]
    Parse {
        origin: String,
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("validation failed: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] cstarcat::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use cstarcat::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Io { .. } | CliError::Validation(_) => EXIT_INPUT,
            CliError::Core(e) => match e {
                E::ShapeMismatch { .. }
                | E::NonFinite
                | E::DimensionBlowup { .. }
                | E::UnknownObject(_)
                | E::DuplicateObject(_)
                | E::InvalidCategory(_)
                | E::InvalidFunctor(_)
                | E::NotAnIdeal(_)
                | E::GroupTooLarge { .. }
                | E::InvalidGroup(_)
                | E::InvalidAction(_)
                | E::NotASubgroup(_)
                | E::NotEquivariant => EXIT_INPUT,
                _ => EXIT_CHECK_FAILED,
            },
        }
    }
}
