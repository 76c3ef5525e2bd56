use std::f64::consts::PI;

use anosov_linalg::{vector, ComplexMatrix};

use crate::classical::TrigPolynomial;
use crate::{Error, Result, C64};

/// Dimension N of the quantized torus and ℏ = 1/(2πN).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanckData {
    n: usize,
    hbar: f64,
}

impl PlanckData {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "N must be at least 2, got {n}"
            )));
        }
        Ok(Self {
            n,
            hbar: 1.0 / (2.0 * PI * n as f64),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
}

/// Unit vector of H_N in the position representation (sites j/N).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    plk: PlanckData,
    amplitudes: Vec<C64>,
}

impl QuantumState {
    /// Normalizes the given amplitudes. Fails on a zero or mis-sized vector.
    pub fn new(plk: PlanckData, mut amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != plk.n() {
            return Err(Error::InvalidArgument(format!(
                "state has {} amplitudes, expected N = {}",
                amplitudes.len(),
                plk.n()
            )));
        }
        if !vector::is_finite(&amplitudes) {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        if vector::normalize(&mut amplitudes) == 0.0 {
            return Err(Error::InvalidArgument(
                "zero vector cannot be normalized".into(),
            ));
        }
        Ok(Self { plk, amplitudes })
    }

    pub fn position(plk: PlanckData, site: usize) -> Self {
        let mut amplitudes = vec![C64::new(0.0, 0.0); plk.n()];
        amplitudes[site % plk.n()] = C64::new(1.0, 0.0);
        Self { plk, amplitudes }
    }

    pub fn plk(&self) -> PlanckData {
        self.plk
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        vector::norm(&self.amplitudes)
    }

    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        vector::dot(&self.amplitudes, &op.matvec(&self.amplitudes))
    }
}

/// N×N operator on H_N, optionally remembering its symbol.
#[derive(Debug, Clone)]
pub struct TorusOperator {
    pub plk: PlanckData,
    pub matrix: ComplexMatrix,
    pub symbol: Option<TrigPolynomial>,
}

impl TorusOperator {
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.matrix.hermitian_defect() <= tol
    }
}
