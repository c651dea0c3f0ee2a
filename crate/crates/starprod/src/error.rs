use std::path::PathBuf;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot parse `{text}`: {source}")]
    Parse { text: String, source: ParseError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Core(#[from] starprod_core::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {}: {source}", .path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", .path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Format(String),
}

impl Error {
    /// 1 for bad input, 2 for failures inside a computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Core(_) => 2,
            Error::Write { .. } => 2,
            _ => 1,
        }
    }
}
