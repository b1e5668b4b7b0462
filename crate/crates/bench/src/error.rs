use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] dpreg::Error),
    /// A method failed inside a run; its partial trace was still written.
    #[error("method failed: {0}")]
    MethodFailed(String),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl BenchError {
    /// 1 for configuration and I/O problems, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Numerical(_) | BenchError::MethodFailed(_) => 2,
            BenchError::Config(_) | BenchError::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
