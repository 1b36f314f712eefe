use std::fmt;

use serde::Serialize;

/// One failed condition, named the way reports print it (`C4`, `(M)`, `symmetry`, ...).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub message: String,
}

impl Violation {
    pub fn new(condition: impl Into<String>, message: impl Into<String>) -> Self {
        Violation {
            condition: condition.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated: {}", self.condition, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{}", join_violations(.0))]
    Validation(Vec<Violation>),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("not M-prime: {0}")]
    NotMPrime(String),

    #[error("root obstruction: {0}")]
    RootObstruction(String),

    #[error("obstruction: {0}")]
    Obstruction(String),

    #[error("checker failure: {0}")]
    Checker(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    /// Process exit code: 1 parse, 2 validation, 3 obstruction, 4 checker failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Io(_) => 1,
            Error::Validation(_) | Error::Invalid(_) | Error::NotMPrime(_) => 2,
            Error::RootObstruction(_) | Error::Obstruction(_) => 3,
            Error::Checker(_) => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
