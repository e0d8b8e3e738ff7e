use thiserror::Error;

use crate::pattern::Assignment;
use crate::word::Word;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error: {0}")]
    Syntax(String),

    #[error("alphabet error: {0}")]
    Alphabet(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    /// The backtracking search visited more nodes than allowed. `best` is the
    /// longest good word seen before giving up.
    #[error("node budget of {budget} exceeded (best word so far has length {})", best.len())]
    NodeBudget { budget: u64, best: Word },

    /// Occurrence enumeration ran out of steps; `partial` holds what was found.
    #[error("occurrence search exceeded {budget} steps ({} partial results)", partial.len())]
    StepBudget {
        budget: u64,
        partial: Vec<Assignment>,
    },

    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn syntax(msg: impl Into<String>) -> Self {
        Error::Syntax(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn alphabet(msg: impl Into<String>) -> Self {
        Error::Alphabet(msg.into())
    }

    /// True for every flavour of budget exhaustion.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::Resource(_) | Error::NodeBudget { .. } | Error::StepBudget { .. }
        )
    }

    pub(crate) fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }
}
