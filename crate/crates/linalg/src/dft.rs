use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Unitary DFT of fixed length, `(F v)(m) = N^{-1/2} Σ_j e^{-2πi jm/N} v(j)`.
///
/// Plans are cached so the same object can be applied many times.
#[derive(Clone)]
pub struct Dft {
    n: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

impl Dft {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "DFT length must be positive");
        let mut planner = FftPlanner::new();
        Self {
            n,
            scale: 1.0 / (n as f64).sqrt(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn forward(&self, v: &mut [C64]) {
        assert_eq!(v.len(), self.n);
        self.forward.process(v);
        v.iter_mut().for_each(|z| *z *= self.scale);
    }

    pub fn inverse(&self, v: &mut [C64]) {
        assert_eq!(v.len(), self.n);
        self.inverse.process(v);
        v.iter_mut().for_each(|z| *z *= self.scale);
    }
}

pub fn dft(v: &[C64]) -> Vec<C64> {
    let mut out = v.to_vec();
    Dft::new(v.len()).forward(&mut out);
    out
}

pub fn idft(v: &[C64]) -> Vec<C64> {
    let mut out = v.to_vec();
    Dft::new(v.len()).inverse(&mut out);
    out
}
