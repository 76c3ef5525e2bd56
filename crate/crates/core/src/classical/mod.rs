//! Classical side: the toral automorphism, observables, periodic orbits,
//! pressure, rate function, dynamical variance and entropy estimates.

mod deviation;
mod ks;
mod map;
mod periodic;
mod pressure;
mod trig;
mod variance;

pub use deviation::{empirical_deviation, DeviationEstimate};
pub use ks::{ks_entropy_estimate, KsReport, MeasureSampler};
pub use map::HyperbolicToralMap;
pub use periodic::{periodic_points, FixedPoints, MAX_PERIOD};
pub use pressure::{
    pressure_curve, rate_function, topological_pressure, PressureCurve, PressureReport,
    RateFunction,
};
pub use trig::TrigPolynomial;
pub use variance::{correlation, dynamical_variance};
