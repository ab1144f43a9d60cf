//! Command-line front end: file formats and one function per subcommand.
//!
//! Exit codes: 0 success, 2 input error, 3 not extractable, 4 hypothesis
//! violation, 5 operator mismatch.

pub mod commands;
pub mod io;

use thiserror::Error;
use unidecomp::ErrorKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_EXTRACTABLE: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;
pub const EXIT_MISMATCH: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] unidecomp::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Parse(_) | CliError::Usage(_) => EXIT_INPUT,
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => EXIT_INPUT,
                ErrorKind::Hypothesis => EXIT_HYPOTHESIS,
                ErrorKind::Mismatch => EXIT_MISMATCH,
                ErrorKind::NotExtractable => EXIT_NOT_EXTRACTABLE,
            },
        }
    }
}
