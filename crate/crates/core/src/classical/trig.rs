use std::collections::BTreeMap;
use std::f64::consts::PI;

use super::map::HyperbolicToralMap;
use crate::{Error, Result, C64};

/// Trigonometric polynomial a(x, ξ) = Σ_k â(k) e^{2πi(k₁x + k₂ξ)} on the 2-torus.
///
/// Coefficients live in a `BTreeMap` so iteration order is fixed.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPolynomial {
    coeffs: BTreeMap<(i64, i64), C64>,
}

impl TrigPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::from_terms([((0, 0), C64::new(c, 0.0))])
    }

    pub fn from_terms(terms: impl IntoIterator<Item = ((i64, i64), C64)>) -> Self {
        let mut p = Self::zero();
        for (k, v) in terms {
            p.add_term(k, v);
        }
        p
    }

    /// amplitude · cos(2π k·(x, ξ)).
    pub fn cosine(k: (i64, i64), amplitude: f64) -> Self {
        let h = C64::new(0.5 * amplitude, 0.0);
        Self::from_terms([(k, h), ((-k.0, -k.1), h)])
    }

    /// amplitude · sin(2π k·(x, ξ)).
    pub fn sine(k: (i64, i64), amplitude: f64) -> Self {
        let h = C64::new(0.0, -0.5 * amplitude);
        Self::from_terms([(k, h), ((-k.0, -k.1), -h)])
    }

    /// The single exponential e_k.
    pub fn exponential(k: (i64, i64)) -> Self {
        Self::from_terms([(k, C64::new(1.0, 0.0))])
    }

    pub fn add_term(&mut self, k: (i64, i64), v: C64) {
        let e = self.coeffs.entry(k).or_insert(C64::new(0.0, 0.0));
        *e += v;
        if *e == C64::new(0.0, 0.0) {
            self.coeffs.remove(&k);
        }
    }

    pub fn coeff(&self, k: (i64, i64)) -> C64 {
        self.coeffs.get(&k).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), C64)> + '_ {
        self.coeffs.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// max ‖k‖∞ over the support (0 for the empty polynomial).
    pub fn degree(&self) -> i64 {
        self.coeffs
            .keys()
            .map(|(a, b)| a.abs().max(b.abs()))
            .max()
            .unwrap_or(0)
    }

    pub fn mean(&self) -> C64 {
        self.coeff((0, 0))
    }

    /// Σ|â(k)|, an upper bound for sup|a| and for the quantized operator norm.
    pub fn l1_norm(&self) -> f64 {
        self.coeffs.values().map(|v| v.norm()).sum()
    }

    /// Worst conjugate-symmetry defect |â(−k) − conj â(k)|.
    pub fn reality_defect(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|((a, b), v)| (self.coeff((-a, -b)) - v.conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_real(&self) -> bool {
        self.reality_defect() <= 1e-12 * self.l1_norm().max(1.0)
    }

    pub fn require_real(&self) -> Result<()> {
        if self.is_real() {
            Ok(())
        } else {
            Err(Error::NotReal {
                defect: self.reality_defect(),
            })
        }
    }

    pub fn require_mean_zero(&self) -> Result<()> {
        let m = self.mean().norm();
        if m > 1e-12 {
            Err(Error::NonZeroMean { mean: m })
        } else {
            Ok(())
        }
    }

    /// True when only frequencies with k₂ = 0 appear.
    pub fn is_x_only(&self) -> bool {
        self.coeffs.keys().all(|(_, k2)| *k2 == 0)
    }

    pub fn eval(&self, x: f64, xi: f64) -> C64 {
        self.coeffs
            .iter()
            .map(|((a, b), v)| {
                v * C64::from_polar(1.0, 2.0 * PI * (*a as f64 * x + *b as f64 * xi))
            })
            .sum()
    }

    pub fn eval_real(&self, x: f64, xi: f64) -> f64 {
        self.eval(x, xi).re
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map_coeffs(|v| v * s)
    }

    pub fn map_coeffs(&self, f: impl Fn(C64) -> C64) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (k, f(v))))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (k, v) in other.terms() {
            p.add_term(k, v);
        }
        p
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero();
        for (k, v) in self.terms() {
            for (l, w) in other.terms() {
                p.add_term((k.0 + l.0, k.1 + l.1), v * w);
            }
        }
        p
    }

    /// a ∘ A: the coefficient at k moves to Aᵀk.
    pub fn compose(&self, map: &HyperbolicToralMap) -> Self {
        Self::from_terms(self.terms().map(|(k, v)| (map.transpose_apply(k), v)))
    }

    pub fn compose_power(&self, map: &HyperbolicToralMap, n: usize) -> Self {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.compose(map);
        }
        p
    }

    /// Parses lines "k1 k2 re im"; blank lines and '#' comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::zero();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = |message: String| Error::Parse {
                line: i + 1,
                message,
            };
            if parts.len() != 4 {
                return Err(bad(format!("expected 4 fields, found {}", parts.len())));
            }
            let k1: i64 = parts[0]
                .parse()
                .map_err(|_| bad(format!("bad integer {:?}", parts[0])))?;
            let k2: i64 = parts[1]
                .parse()
                .map_err(|_| bad(format!("bad integer {:?}", parts[1])))?;
            let re: f64 = parts[2]
                .parse()
                .map_err(|_| bad(format!("bad number {:?}", parts[2])))?;
            let im: f64 = parts[3]
                .parse()
                .map_err(|_| bad(format!("bad number {:?}", parts[3])))?;
            if !re.is_finite() || !im.is_finite() {
                return Err(bad("non-finite coefficient".into()));
            }
            p.add_term((k1, k2), C64::new(re, im));
        }
        Ok(p)
    }

    pub fn to_spec_string(&self) -> String {
        self.terms()
            .map(|((a, b), v)| format!("{} {} {} {}\n", a, b, v.re, v.im))
            .collect()
    }
}
