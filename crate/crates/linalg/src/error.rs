use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not {kind}: defect {defect:.3e} exceeds {tolerance:.3e}")]
    KindViolation {
        kind: &'static str,
        defect: f64,
        tolerance: f64,
    },

    #[error("QR iteration did not converge after {iterations} sweeps (worst residual {worst_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        worst_residual: f64,
    },

    #[error("eigenpair residual {worst_residual:.3e} exceeds {tolerance:.3e}")]
    ResidualTooLarge { worst_residual: f64, tolerance: f64 },

    #[error(
        "power iteration did not settle after {iterations} steps (last estimate {estimate:.6e})"
    )]
    PowerIteration { iterations: usize, estimate: f64 },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
}
