//! Cat-map laboratory: classical thermodynamic formalism, quantization on
//! the torus, semiclassical measures and quantum partition entropies.

pub mod classical;
pub mod entropy;
mod error;
pub mod measures;
pub mod quantum;
pub mod rng;

pub use anosov_linalg::C64;
pub use error::{Error, Result};
