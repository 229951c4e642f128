use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Inputs that do not belong to the domain of an operation: mismatched
    /// base points, non-Hermitian ambient data, wrong shapes.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("retraction failed: {0}")]
    Retraction(String),

    #[error("frame re-orthonormalization failed at node {node}: pivot {pivot:e}")]
    FrameCollapse { node: usize, pivot: f64 },

    #[error("frame is not orthonormal (defect {defect:e} > {tol:e})")]
    FrameQuality { defect: f64, tol: f64 },

    #[error("grid mismatch: expected {expected} nodes, got {actual}")]
    GridMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step rejected {rejections} times at t = {t}: {reason}")]
    StepRejected {
        t: f64,
        rejections: usize,
        reason: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
