use std::f64::consts::PI;
use std::fmt::Write as _;

use anosov_linalg::vector;

use super::planck::{PlanckData, QuantumState};
use crate::C64;

/// Periodized Gaussian coherent state centred at (q, p) ∈ [0,1)²:
/// ψ(j) ∝ Σ_ℓ exp(−πN(j/N + ℓ − q)²)·exp(2πiNp(j/N + ℓ)).
pub fn coherent_state(plk: PlanckData, q: f64, p: f64) -> Vec<C64> {
    let n = plk.n() as f64;
    let mut v: Vec<C64> = (0..plk.n())
        .map(|j| {
            (-3i32..=3)
                .map(|l| {
                    let y = j as f64 / n + l as f64;
                    let g = (-PI * n * (y - q) * (y - q)).exp();
                    C64::from_polar(g, 2.0 * PI * n * p * y)
                })
                .sum()
        })
        .collect();
    vector::normalize(&mut v);
    v
}

/// |⟨coherent(x, ξ)|u⟩|² on a G×G grid, indexed [ix·G + iξ].
#[derive(Debug, Clone)]
pub struct HusimiGrid {
    pub g: usize,
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn at(&self, ix: usize, ixi: usize) -> f64 {
        self.values[ix * self.g + ixi]
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }

    /// CSV with header "x,xi,value".
    pub fn to_csv(&self) -> String {
        let mut s = String::from("x,xi,value\n");
        let g = self.g as f64;
        for ix in 0..self.g {
            for ixi in 0..self.g {
                let _ = writeln!(
                    s,
                    "{},{},{}",
                    ix as f64 / g,
                    ixi as f64 / g,
                    self.at(ix, ixi)
                );
            }
        }
        s
    }
}

pub fn husimi(u: &QuantumState, g: usize) -> HusimiGrid {
    let plk = u.plk();
    let mut values = Vec::with_capacity(g * g);
    for ix in 0..g {
        for ixi in 0..g {
            let c = coherent_state(plk, ix as f64 / g as f64, ixi as f64 / g as f64);
            values.push(vector::dot(&c, u.amplitudes()).norm_sqr());
        }
    }
    HusimiGrid { g, values }
}
