use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degree cap exceeded: product has total degree {degree} > {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    #[error("cannot parse polynomial `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("scheme {0} is not palindromic")]
    NonPalindromicScheme(String),

    #[error("generator {0} has no vector field assigned")]
    MissingGenerator(String),

    #[error("linear system is inconsistent: no polynomial shadow pair of degree <= {max_degree}")]
    InconsistentSystem { max_degree: u32 },

    #[error("unknown scheme label `{0}`")]
    UnknownScheme(String),

    #[error("argument out of domain: {0}")]
    DomainError(String),

    #[error("trajectory span is insufficient: {0}")]
    InsufficientSpan(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("rewrite plan failed: {0}")]
    Rewrite(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
