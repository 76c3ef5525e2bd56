use anosov_linalg::LinalgError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("map {matrix:?} rejected: {reason}")]
    InvalidMap {
        matrix: [[i64; 2]; 2],
        reason: String,
    },

    #[error("period {n} exceeds the enumeration cap {cap}")]
    PeriodTooLarge { n: usize, cap: usize },

    #[error("observable is not real-valued (worst conjugate-symmetry defect {defect:.3e})")]
    NotReal { defect: f64 },

    #[error("observable must have zero mean, got {mean}")]
    NonZeroMean { mean: f64 },

    #[error("symbol degree {degree} is not below N/2 = {half} (frequency aliasing)")]
    Aliasing { degree: i64, half: f64 },

    #[error("Egorov check at n = {n} needs degree(a∘Aⁿ) = {degree} < N/2 = {half}; largest admissible n is {cap}")]
    EhrenfestCap {
        n: usize,
        degree: i64,
        half: f64,
        cap: usize,
    },

    #[error("map {matrix:?} has no sign-free quantization at N = {n}; admissible parities: {admissible}")]
    IncompatibleDimension {
        matrix: [[i64; 2]; 2],
        n: usize,
        admissible: String,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("word enumeration needs {count} words, above the cap {cap}")]
    EnumerationCap { count: f64, cap: f64 },

    #[error("partition invariant failed: max |ΣP_k² − 1| = {defect:.3e}")]
    PartitionDefect { defect: f64 },

    #[error("observable parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, Error>;
