//! Semiclassical measures of state families, the generalized orthonormal
//! family (G.O.F.) constructions and verifier, deviation probabilities and
//! the quantum variance.

mod deviation;
mod family;
mod weights;

pub use deviation::{
    deviation_probability, deviation_rate_report, family_measures, family_statistics,
    planted_slope_family, quantum_variance, semiclassical_measure, DeviationRateReport,
    FamilyStatistics, MeasureEstimate, QuantumVarianceReport,
};
pub use family::{
    gof_eigenbasis, gof_position, gof_random, verify_gof, GOFamily, GofReport, Provenance,
};
pub use weights::TimeWeights;
