use thiserror::Error;

/// Errors shared by all pipeline stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape produced an empty mask (no cell center lies strictly inside)")]
    EmptyMask,

    #[error("unknown shape `{0}`")]
    UnknownShape(String),

    #[error("malformed shape spec `{spec}`: {msg}")]
    BadShapeSpec { spec: String, msg: String },

    #[error("malformed mask file: {0}")]
    BadMaskFile(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension must be positive, got {0}")]
    BadDimension(i64),

    #[error("dense solve limited to {max} unknowns, operator has {dim}")]
    DenseTooLarge { dim: usize, max: usize },

    #[error("requested {m} eigenpairs but the operator allows at most {max} (dim/4)")]
    TooManyPairs { m: usize, max: usize },

    #[error("matrix is not positive definite (pivot {pivot:.3e} at column {col})")]
    NotPositiveDefinite { col: usize, pivot: f64 },

    #[error(
        "eigensolver did not reach the residual target {tol:.1e} within {budget} operator \
         applications; worst achieved residual {worst:.3e}"
    )]
    NonConvergence { tol: f64, budget: usize, worst: f64 },

    #[error("lemma hypothesis violated: ratio {ratio:.6} is not below d = {d:.6}")]
    HypothesisViolated { ratio: f64, d: f64 },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("problem tag mismatch: expected {expected}, got {got}")]
    ProblemMismatch { expected: String, got: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
