//! Quantized torus: Hilbert space H_N with ℏ = 1/(2πN), Weyl and positive
//! quantization of trigonometric polynomials, the cat-map propagator and
//! Husimi densities.

mod husimi;
mod planck;
mod propagator;
pub(crate) mod weyl;

pub use husimi::{coherent_state, husimi, HusimiGrid};
pub use planck::{PlanckData, QuantumState, TorusOperator};
pub use propagator::{
    admissible_parities, cat_propagator, egorov_defect, egorov_defect_unbounded, CatPropagator,
};
pub use weyl::{
    antiwick_quantize, antiwick_symbol, translation, weyl_quantize, weyl_unbounded, SymbolAction,
};

use anosov_linalg::ComplexMatrix;

/// Cheap upper bound on the spectral norm: min(‖A‖_F, √(‖A‖₁‖A‖_∞)).
pub fn norm_upper_bound(a: &ComplexMatrix) -> f64 {
    let one = a.norm_one();
    let inf = a.transpose().norm_one();
    a.frobenius().min((one * inf).sqrt())
}
