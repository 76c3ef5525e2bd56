use std::collections::BTreeMap;
use std::f64::consts::PI;

use anosov_linalg::ComplexMatrix;

use super::planck::{PlanckData, TorusOperator};
use crate::classical::TrigPolynomial;
use crate::{Error, Result, C64};

/// Table of e^{iπe/N} for e = 0..2N, exactly conjugate-symmetric.
pub(crate) struct HalfRoots {
    n: i128,
    table: Vec<C64>,
}

impl HalfRoots {
    pub(crate) fn new(n: usize) -> Self {
        let m = 2 * n;
        let mut table = vec![C64::new(0.0, 0.0); m];
        for e in 0..=n {
            let (s, c) = (PI * e as f64 / n as f64).sin_cos();
            table[e] = C64::new(c, s);
        }
        table[0] = C64::new(1.0, 0.0);
        table[n] = C64::new(-1.0, 0.0);
        for e in n + 1..m {
            table[e] = table[m - e].conj();
        }
        Self {
            n: n as i128,
            table,
        }
    }

    /// e^{iπ·e/N} for any integer e.
    pub(crate) fn get(&self, e: i128) -> C64 {
        self.table[e.rem_euclid(2 * self.n) as usize]
    }
}

/// Weyl translation T(k):
/// (T(k)ψ)(j) = exp(2πi k₁j/N + iπ k₁k₂/N)·ψ(j + k₂ mod N).
/// k₁ is the position frequency, k₂ the momentum frequency, so T(k) = Op(e_k).
fn weyl_phase(roots: &HalfRoots, (k1, k2): (i64, i64), j: usize) -> C64 {
    let (k1, k2) = (k1 as i128, k2 as i128);
    roots.get(2 * k1 * j as i128 + k1 * k2)
}

pub fn translation(k: (i64, i64), plk: PlanckData) -> TorusOperator {
    weyl_unbounded(&TrigPolynomial::exponential(k), plk)
}

/// Op_N(a) = Σ_k â(k)·T(k), requiring degree(a) < N/2.
pub fn weyl_quantize(a: &TrigPolynomial, plk: PlanckData) -> Result<TorusOperator> {
    check_degree(a, plk)?;
    Ok(weyl_unbounded(a, plk))
}

/// Op_N(a) with no aliasing check. T(k) is defined for every k ∈ ℤ² and
/// the Egorov identity holds for all of them, which is what long-time
/// comparisons with a∘Aⁿ need.
pub fn weyl_unbounded(a: &TrigPolynomial, plk: PlanckData) -> TorusOperator {
    let n = plk.n();
    let roots = HalfRoots::new(n);
    let mut m = ComplexMatrix::zeros(n, n);
    for (k, c) in a.terms() {
        let shift = k.1.rem_euclid(n as i64) as usize;
        for j in 0..n {
            let col = (j + shift) % n;
            m[(j, col)] += c * weyl_phase(&roots, k, j);
        }
    }
    TorusOperator {
        plk,
        matrix: m,
        symbol: Some(a.clone()),
    }
}

pub(crate) fn check_degree(a: &TrigPolynomial, plk: PlanckData) -> Result<()> {
    let d = a.degree();
    if 2 * d as i128 >= plk.n() as i128 {
        return Err(Error::Aliasing {
            degree: d,
            half: plk.n() as f64 / 2.0,
        });
    }
    Ok(())
}

/// Gaussian-smoothed symbol: â(k) ↦ â(k)·exp(−π(w·k₁² + k₂²/w)/(2N)).
pub fn antiwick_symbol(a: &TrigPolynomial, plk: PlanckData, width: f64) -> Result<TrigPolynomial> {
    if !(width > 0.0 && width.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "squeezing width must be positive, got {width}"
        )));
    }
    let n = plk.n() as f64;
    Ok(TrigPolynomial::from_terms(a.terms().map(|(k, v)| {
        let (k1, k2) = (k.0 as f64, k.1 as f64);
        let damp = (-PI * (width * k1 * k1 + k2 * k2 / width) / (2.0 * n)).exp();
        (k, v * damp)
    })))
}

/// Positive quantization Op⁺(a): Weyl quantization of the Gaussian-smoothed symbol.
pub fn antiwick_quantize(a: &TrigPolynomial, plk: PlanckData, width: f64) -> Result<TorusOperator> {
    check_degree(a, plk)?;
    let smooth = antiwick_symbol(a, plk, width)?;
    let mut op = weyl_unbounded(&smooth, plk);
    op.symbol = Some(a.clone());
    Ok(op)
}

/// Op_N(a) applied to vectors in O(N·#shifts) without forming the matrix:
/// (Op ψ)(j) = Σ_s D_s(j)·ψ(j + s), one diagonal D_s per momentum shift s.
#[derive(Debug, Clone)]
pub struct SymbolAction {
    n: usize,
    shifts: Vec<(usize, Vec<C64>)>,
}

impl SymbolAction {
    pub fn new(a: &TrigPolynomial, plk: PlanckData) -> Self {
        let n = plk.n();
        let roots = HalfRoots::new(n);
        let mut by_shift: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
        for (k, c) in a.terms() {
            let s = k.1.rem_euclid(n as i64) as usize;
            let d = by_shift
                .entry(s)
                .or_insert_with(|| vec![C64::new(0.0, 0.0); n]);
            for (j, dj) in d.iter_mut().enumerate() {
                *dj += c * weyl_phase(&roots, k, j);
            }
        }
        Self {
            n,
            shifts: by_shift.into_iter().collect(),
        }
    }

    /// Multiplication operator if a depends on x only.
    pub fn diagonal(&self) -> Option<&[C64]> {
        match self.shifts.as_slice() {
            [(0, d)] => Some(d),
            [] => None,
            _ => None,
        }
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (s, d) in &self.shifts {
            for j in 0..n {
                out[j] += d[j] * psi[(j + s) % n];
            }
        }
        out
    }

    /// ⟨ψ|Op|ψ⟩
    pub fn expectation(&self, psi: &[C64]) -> C64 {
        let n = self.n;
        let mut acc = C64::new(0.0, 0.0);
        for (s, d) in &self.shifts {
            for j in 0..n {
                acc += psi[j].conj() * d[j] * psi[(j + s) % n];
            }
        }
        acc
    }
}
