//! Dense complex linear algebra used by the quantized-torus laboratory.
//!
//! Everything is double precision and row-major. Matrices are small
//! (N up to about a thousand), so the algorithms are the classical
//! dense ones: Householder-Hessenberg reduction followed by shifted
//! QR sweeps, power iteration for norms, and an FFT for basis changes.

mod dft;
mod eigen;
mod error;
mod matrix;
mod norm;
mod tridiag;
pub mod vector;

pub use num_complex::Complex64 as C64;

pub use dft::{dft, idft, Dft};
pub use eigen::{eigendecompose, extremal_eigen, Extremal, SpectralResult, SpectrumKind};
pub use error::LinalgError;
pub use matrix::ComplexMatrix;
pub use norm::{operator_norm, operator_norm_from, NormEstimate};
pub use tridiag::extremal_eigenvalue;

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Plain complex amplitude sequence.
pub type ComplexVector = Vec<C64>;
