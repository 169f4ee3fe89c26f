//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("linear system infeasible: {0}")]
    Infeasible(String),
    #[error("ill-defined construction: {0}")]
    IllDefined(String),
    #[error("metric is not real: {0}")]
    NonRealMetric(String),
    #[error("no bimodule braiding exists: {0}")]
    NotBimodule(String),
    #[error("unknown catalog entry: {0}")]
    UnknownCatalog(String),
    #[error("not representable in exact mode: {0}")]
    ExactUnsupported(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
