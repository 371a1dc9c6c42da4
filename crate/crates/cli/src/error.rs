use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{}", match .pos { Some(p) => format!("at position {p}: {msg}"), None => msg.clone() })]
    Eval { pos: Option<usize>, msg: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn parse(pos: usize, msg: impl Into<String>) -> Self {
        CliError::Parse { pos, msg: msg.into() }
    }

    pub fn msg(msg: impl Into<String>) -> Self {
        CliError::Eval { pos: None, msg: msg.into() }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    /// Attaches a source position unless one is already known.
    pub fn at(self, pos: usize) -> Self {
        match self {
            CliError::Eval { pos: None, msg } => CliError::Eval { pos: Some(pos), msg },
            e => e,
        }
    }
}

impl From<cartier_core::Error> for CliError {
    fn from(e: cartier_core::Error) -> Self {
        CliError::msg(e.to_string())
    }
}
