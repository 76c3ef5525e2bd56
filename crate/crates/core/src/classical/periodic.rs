use std::f64::consts::PI;

use super::map::{det, matrix_power, HyperbolicToralMap};
use super::trig::TrigPolynomial;
use crate::{Error, Result, C64};

pub const MAX_PERIOD: usize = 14;

/// Fixed points of Aⁿ on the torus, stored exactly as integer numerators
/// over a common denominator: x = (p, q) / denominator.
#[derive(Debug, Clone)]
pub struct FixedPoints {
    pub period: usize,
    pub denominator: i64,
    pub points: Vec<(i64, i64)>,
    matrix: [[i64; 2]; 2],
}

impl FixedPoints {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn as_f64(&self) -> Vec<(f64, f64)> {
        let d = self.denominator as f64;
        self.points
            .iter()
            .map(|(p, q)| (*p as f64 / d, *q as f64 / d))
            .collect()
    }

    /// Exact image of a stored point under A.
    pub fn step(&self, (p, q): (i64, i64)) -> (i64, i64) {
        let [[a, b], [c, d]] = self.matrix;
        let m = self.denominator;
        ((a * p + b * q).rem_euclid(m), (c * p + d * q).rem_euclid(m))
    }

    /// Birkhoff sums Σ_{t<n} f(Aᵗx) over every fixed point, f real.
    pub fn birkhoff_sums(&self, f: &TrigPolynomial) -> Vec<f64> {
        let m = self.denominator;
        let table: Vec<C64> = (0..m)
            .map(|r| C64::from_polar(1.0, 2.0 * PI * r as f64 / m as f64))
            .collect();
        let terms: Vec<((i64, i64), C64)> = f.terms().collect();
        let eval = |(p, q): (i64, i64)| -> f64 {
            terms
                .iter()
                .map(|((k1, k2), v)| {
                    let r = (k1 * p + k2 * q).rem_euclid(m) as usize;
                    (v * table[r]).re
                })
                .sum()
        };
        self.points
            .iter()
            .map(|&x| {
                let mut y = x;
                let mut s = 0.0;
                for _ in 0..self.period {
                    s += eval(y);
                    y = self.step(y);
                }
                s
            })
            .collect()
    }
}

/// Enumerates Fix(Aⁿ) through the column Hermite normal form of B = Aⁿ − I:
/// with BU = [[h₁₁, 0], [h₂₁, h₂₂]], the integer vectors (i, j), 0 ≤ i < h₁₁,
/// 0 ≤ j < h₂₂ represent ℤ²/Bℤ², and x = B⁻¹m mod 1.
pub fn periodic_points(map: &HyperbolicToralMap, n: usize) -> Result<FixedPoints> {
    if n == 0 || n > MAX_PERIOD {
        return Err(Error::PeriodTooLarge { n, cap: MAX_PERIOD });
    }
    let mut b = matrix_power(&map.matrix(), n as u32);
    b[0][0] -= 1;
    b[1][1] -= 1;
    let dt = det(&b);
    let d = dt.abs();
    let (g, _, _) = ext_gcd(b[0][0], b[0][1]);
    let h11 = g;
    let h22 = d / g;
    let sign = dt.signum();
    let adj = [[b[1][1], -b[0][1]], [-b[1][0], b[0][0]]];
    let mut points = Vec::with_capacity(d as usize);
    for i in 0..h11 {
        for j in 0..h22 {
            let p = (sign * (adj[0][0] * i + adj[0][1] * j)).rem_euclid(d);
            let q = (sign * (adj[1][0] * i + adj[1][1] * j)).rem_euclid(d);
            points.push((p, q));
        }
    }
    Ok(FixedPoints {
        period: n,
        denominator: d,
        points,
        matrix: map.matrix(),
    })
}

/// Returns (g, u, v) with u·a + v·b = g ≥ 0.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1i64, 0i64);
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}
