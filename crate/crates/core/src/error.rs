use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QpdError {
    #[error("matrix side {side} exceeds the configured limit {limit}")]
    SizeLimit { side: usize, limit: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("matrix is not Hermitian (max |m - m†| = {0:e})")]
    NotHermitian(f64),
    #[error("channel is not trace preserving (residual {0:e})")]
    NotTracePreserving(f64),
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("parameter outside its domain: {0}")]
    DomainError(String),
    #[error("decomposition did not converge: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QpdError>;

pub(crate) fn dim_mismatch(msg: impl Into<String>) -> QpdError {
    QpdError::DimMismatch(msg.into())
}
