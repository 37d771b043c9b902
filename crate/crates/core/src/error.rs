use thiserror::Error;

/// Errors raised across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("assembly error: {0}")]
    Assembly(String),

    #[error("refinement budget exceeded: {nodes} nodes (cap {cap}), achieved boundary resolution {resolution:.3e}")]
    Budget {
        nodes: usize,
        cap: usize,
        resolution: f64,
    },

    #[error("solver error: {0}")]
    Solver(#[from] SolverError),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Failures of the generalized eigensolver.
#[derive(Debug, Error)]
pub enum SolverError {
    #[error("factorization failed after {retries} shift retries (last shift {shift:.6e})")]
    Factorization { retries: usize, shift: f64 },

    #[error("no convergence in {iterations} iterations (best eigenvalue {lambda:.12e}, residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        lambda: f64,
        residual: f64,
        eigenvector: Vec<f64>,
    },

    #[error("matrix not positive definite: pivot of row {pivot} is {value:.3e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("empty problem: no free degrees of freedom")]
    Empty,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
