use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{}key `{key}`: {msg}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Config {
        line: Option<usize>,
        key: String,
        msg: String,
    },

    #[error("polynomial expression: {0}")]
    Expression(String),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("eigenpair certificate rejected: residual {residual:e} exceeds {threshold:e}")]
    RejectedCertificate { residual: f64, threshold: f64 },

    #[error("numeric failure at d = {dim}: {source}")]
    AtDimension {
        dim: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn io(path: impl Into<std::path::PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the CLI: 1 for usage and environment
    /// problems, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. } => 2,
            Error::AtDimension { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}
