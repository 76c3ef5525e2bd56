use super::map::HyperbolicToralMap;
use super::periodic::periodic_points;
use super::trig::TrigPolynomial;
use crate::{Error, Result};

/// Pₙ(f) = (1/n)·log Σ_{x ∈ Fix(Aⁿ)} exp(Sₙf(x)) together with Pₙ − Pₙ₋₁.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureReport {
    pub n: usize,
    pub value: f64,
    pub previous: Option<f64>,
    pub fixed_points: usize,
}

impl PressureReport {
    pub fn convergence(&self) -> Option<f64> {
        self.previous.map(|p| self.value - p)
    }
}

pub fn topological_pressure(
    map: &HyperbolicToralMap,
    f: &TrigPolynomial,
    n: usize,
) -> Result<PressureReport> {
    f.require_real()?;
    let fix = periodic_points(map, n)?;
    let sums = fix.birkhoff_sums(f);
    let value = log_sum_exp(sums.iter().copied()) / n as f64;
    let previous = if n > 1 {
        let fp = periodic_points(map, n - 1)?;
        let s = fp.birkhoff_sums(f);
        Some(log_sum_exp(s.iter().copied()) / (n - 1) as f64)
    } else {
        None
    };
    Ok(PressureReport {
        n,
        value,
        previous,
        fixed_points: fix.len(),
    })
}

pub(crate) fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// s ↦ P(s·a + φᵘ) sampled on a grid, where φᵘ = −log λ.
///
/// The deduplicated spectrum of Birkhoff sums Sₙa over Fix(Aⁿ) is kept so
/// the curve and its derivative can be evaluated at any s.
#[derive(Debug, Clone)]
pub struct PressureCurve {
    pub s_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub orbit_order: usize,
    sums: Vec<f64>,
    log_mult: Vec<f64>,
    log_lambda: f64,
}

impl PressureCurve {
    pub fn eval(&self, s: f64) -> f64 {
        let n = self.orbit_order as f64;
        log_sum_exp(
            self.sums
                .iter()
                .zip(&self.log_mult)
                .map(|(x, lm)| s * x + lm),
        ) / n
            - self.log_lambda
    }

    /// dP/ds, the Gibbs average of Sₙa/n.
    pub fn derivative(&self, s: f64) -> f64 {
        let n = self.orbit_order as f64;
        let m = self
            .sums
            .iter()
            .zip(&self.log_mult)
            .map(|(x, lm)| s * x + lm)
            .fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for (x, lm) in self.sums.iter().zip(&self.log_mult) {
            let w = (s * x + lm - m).exp();
            num += w * x;
            den += w;
        }
        num / den / n
    }

    /// Smallest and largest attainable Birkhoff averages Sₙa/n.
    pub fn slope_range(&self) -> (f64, f64) {
        let n = self.orbit_order as f64;
        (
            self.sums.first().copied().unwrap_or(0.0) / n,
            self.sums.last().copied().unwrap_or(0.0) / n,
        )
    }

    /// Central second difference (P(h) − 2P(0) + P(−h))/h².
    pub fn second_difference(&self, h: f64) -> f64 {
        (self.eval(h) - 2.0 * self.eval(0.0) + self.eval(-h)) / (h * h)
    }

    /// Smallest discrete second difference along the grid. On a uniform grid
    /// this is min(P[i+1] − 2P[i] + P[i−1]).
    pub fn min_second_difference(&self) -> f64 {
        self.values
            .windows(3)
            .zip(self.s_grid.windows(3))
            .map(|(v, s)| {
                let (h1, h2) = (s[1] - s[0], s[2] - s[1]);
                let curvature =
                    2.0 * (h1 * v[2] - (h1 + h2) * v[1] + h2 * v[0]) / (h1 * h2 * (h1 + h2));
                curvature * h1 * h2
            })
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn pressure_curve(
    map: &HyperbolicToralMap,
    a: &TrigPolynomial,
    s_grid: &[f64],
    n: usize,
) -> Result<PressureCurve> {
    a.require_real()?;
    a.require_mean_zero()?;
    if s_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "s grid must be strictly increasing".into(),
        ));
    }
    let fix = periodic_points(map, n)?;
    let mut raw = fix.birkhoff_sums(a);
    raw.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut sums: Vec<f64> = Vec::new();
    let mut mult: Vec<f64> = Vec::new();
    for x in raw {
        match sums.last() {
            Some(&last) if (x - last).abs() <= 1e-11 * (1.0 + x.abs()) => {
                *mult.last_mut().unwrap() += 1.0;
            }
            _ => {
                sums.push(x);
                mult.push(1.0);
            }
        }
    }
    let mut curve = PressureCurve {
        s_grid: s_grid.to_vec(),
        values: Vec::new(),
        orbit_order: n,
        sums,
        log_mult: mult.iter().map(|m| m.ln()).collect(),
        log_lambda: map.log_lambda(),
    };
    curve.values = s_grid.iter().map(|&s| curve.eval(s)).collect();
    Ok(curve)
}

/// H(δ) = inf_s {−sδ + P(s·a + φᵘ)} per δ.
#[derive(Debug, Clone)]
pub struct RateFunction {
    pub delta_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub minimizer_s: Vec<f64>,
    /// false where δ lies outside the attainable range and H = −∞.
    pub attainable: Vec<bool>,
}

impl RateFunction {
    /// Linear interpolation on the grid (−∞ outside attainable points).
    pub fn value_at(&self, delta: f64) -> f64 {
        let g = &self.delta_grid;
        if g.is_empty() || delta < g[0] || delta > *g.last().unwrap() {
            return f64::NEG_INFINITY;
        }
        let i = g.partition_point(|x| *x < delta);
        if i < g.len() && g[i] == delta {
            return self.values[i];
        }
        let (x0, x1) = (g[i - 1], g[i]);
        let t = (delta - x0) / (x1 - x0);
        (1.0 - t) * self.values[i - 1] + t * self.values[i]
    }
}

const BRACKET: f64 = 50.0;
const BRACKET_LIMIT: f64 = 1e7;

pub fn rate_function(curve: &PressureCurve, delta_grid: &[f64]) -> Result<RateFunction> {
    if curve.min_second_difference() < -1e-6 {
        return Err(Error::InvalidArgument(
            "pressure curve is not convex along its grid".into(),
        ));
    }
    let mut out = RateFunction {
        delta_grid: delta_grid.to_vec(),
        values: Vec::with_capacity(delta_grid.len()),
        minimizer_s: Vec::with_capacity(delta_grid.len()),
        attainable: Vec::with_capacity(delta_grid.len()),
    };
    let (lo, hi) = curve.slope_range();
    for &delta in delta_grid {
        let inside = delta > lo && delta < hi;
        let s = if inside { minimize(curve, delta) } else { None };
        match s {
            Some(s) => {
                out.values.push(curve.eval(s) - s * delta);
                out.minimizer_s.push(s);
                out.attainable.push(true);
            }
            None => {
                out.values.push(f64::NEG_INFINITY);
                out.minimizer_s.push(if delta >= hi {
                    f64::INFINITY
                } else {
                    f64::NEG_INFINITY
                });
                out.attainable.push(false);
            }
        }
    }
    Ok(out)
}

/// Golden-section search on g(s) = P(s) − sδ, then bisection on g′.
fn minimize(curve: &PressureCurve, delta: f64) -> Option<f64> {
    let dg = |s: f64| curve.derivative(s) - delta;
    let g = |s: f64| curve.eval(s) - s * delta;
    let (mut a, mut b) = (-BRACKET, BRACKET);
    while dg(a) > 0.0 {
        a *= 2.0;
        if a.abs() > BRACKET_LIMIT {
            return None;
        }
    }
    while dg(b) < 0.0 {
        b *= 2.0;
        if b > BRACKET_LIMIT {
            return None;
        }
    }
    let (outer_a, outer_b) = (a, b);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if (b - a) <= 1e-6 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if gc <= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + phi * (b - a);
            gd = g(d);
        }
    }
    if !(dg(a) <= 0.0 && dg(b) >= 0.0) {
        a = outer_a;
        b = outer_b;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if dg(m) > 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    Some(0.5 * (a + b))
}
