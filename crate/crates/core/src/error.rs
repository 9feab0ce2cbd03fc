use std::path::PathBuf;

/// Errors raised by the augmentation engine and its I/O layer.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("out of supported range: {0}")]
    OutOfRange(String),

    #[error(
        "quadrature did not converge: relative change {relative_change:.3e} \
         between {coarse_nodes} and {fine_nodes} nodes (last value {value:.6e})"
    )]
    QuadratureNotConverged {
        value: f64,
        relative_change: f64,
        coarse_nodes: usize,
        fine_nodes: usize,
    },

    #[error("{path}: file size {len} is not a multiple of {record} bytes")]
    Format {
        path: PathBuf,
        len: u64,
        record: usize,
    },

    #[error("{path}: point {index}: {reason}")]
    Data {
        path: PathBuf,
        index: usize,
        reason: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn ensure_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("{name} must be finite, got {v}")))
    }
}
