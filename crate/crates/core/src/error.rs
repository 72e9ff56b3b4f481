use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cyclotomic order mismatch: {left} vs {right}")]
    OrderMismatch { left: u64, right: u64 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("element is not rational: coefficient of zeta^{degree} is {coefficient}")]
    NotRational { degree: usize, coefficient: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("fiber measure diverges for a = {a}, m = {m} (integrability needs a > m/2); tail shell ratio {ratio}")]
    DivergenceDetected { a: f64, m: u32, ratio: f64 },

    #[error("quadrature did not converge: {0}")]
    QuadratureNonconvergence(String),

    #[error("dbar matrix entry ({row}, {col}) connects weight blocks {row_label} and {col_label} mod {l}")]
    BlockLeak {
        row: usize,
        col: usize,
        row_label: i64,
        col_label: i64,
        l: u64,
    },

    #[error("Cholesky factorization of the {0} Gram matrix failed")]
    Cholesky(&'static str),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
