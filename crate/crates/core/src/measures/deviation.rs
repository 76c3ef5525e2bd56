use rayon::prelude::*;

use super::family::{gof_position, GOFamily, Provenance};
use super::weights::TimeWeights;
use crate::classical::{HyperbolicToralMap, RateFunction, TrigPolynomial};
use crate::quantum::weyl::check_degree;
use crate::quantum::{CatPropagator, PlanckData, QuantumState, SymbolAction};
use crate::{Error, Result, C64};

/// μ_ℏ,ω(a⊗θ) for one member of a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureEstimate {
    pub value: C64,
    /// Index of the state within its family (0 for a lone state).
    pub state: usize,
}

impl MeasureEstimate {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

fn check_propagator(plk: PlanckData, prop: &CatPropagator) -> Result<()> {
    if prop.plk().n() != plk.n() {
        return Err(Error::InvalidArgument(format!(
            "state lives on N = {} but the propagator on N = {}",
            plk.n(),
            prop.plk().n()
        )));
    }
    Ok(())
}

fn evolve_and_average(
    action: &SymbolAction,
    u: &[C64],
    theta: &TimeWeights,
    prop: &CatPropagator,
) -> C64 {
    let mut psi = u.to_vec();
    if theta.offset() != 0 {
        prop.apply_power(&mut psi, theta.offset());
    }
    let mut acc = C64::new(0.0, 0.0);
    let last = theta.len() - 1;
    for (i, (_, w)) in theta.iter().enumerate() {
        if w != 0.0 {
            acc += action.expectation(&psi) * w;
        }
        if i < last {
            prop.apply(&mut psi);
        }
    }
    acc
}

/// Σ_t θ_t ⟨Uᵗu|Op_N(a)|Uᵗu⟩ by repeated application of the propagator.
pub fn semiclassical_measure(
    u: &QuantumState,
    a: &TrigPolynomial,
    theta: &TimeWeights,
    prop: &CatPropagator,
) -> Result<MeasureEstimate> {
    let plk = u.plk();
    check_propagator(plk, prop)?;
    check_degree(a, plk)?;
    let action = SymbolAction::new(a, plk);
    Ok(MeasureEstimate {
        value: evolve_and_average(&action, u.amplitudes(), theta, prop),
        state: 0,
    })
}

/// Measures of every family member, in family order.
pub fn family_measures(
    fam: &GOFamily,
    a: &TrigPolynomial,
    theta: &TimeWeights,
    prop: &CatPropagator,
) -> Result<Vec<MeasureEstimate>> {
    check_propagator(fam.plk, prop)?;
    check_degree(a, fam.plk)?;
    let action = SymbolAction::new(a, fam.plk);
    Ok(fam
        .states
        .par_iter()
        .enumerate()
        .map(|(state, u)| MeasureEstimate {
            value: evolve_and_average(&action, u, theta, prop),
            state,
        })
        .collect())
}

fn require_threshold(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "deviation threshold must be positive, got {delta}"
        )));
    }
    Ok(())
}

fn mass_above(measures: &[MeasureEstimate], probabilities: &[f64], delta: f64) -> f64 {
    measures
        .iter()
        .zip(probabilities)
        .filter(|(m, _)| m.value.re >= delta)
        .map(|(_, p)| *p)
        .sum()
}

/// ℙ_ℏ(a⊗θ, δ) = Σ{P_ω : μ_ℏ,ω(a⊗θ) ≥ δ}.
pub fn deviation_probability(
    fam: &GOFamily,
    a: &TrigPolynomial,
    theta: &TimeWeights,
    delta: f64,
    prop: &CatPropagator,
) -> Result<f64> {
    a.require_real()?;
    a.require_mean_zero()?;
    require_threshold(delta)?;
    let measures = family_measures(fam, a, theta, prop)?;
    Ok(mass_above(&measures, &fam.probabilities, delta))
}

/// Exact moments of a computed family plus the Chebyshev and Jensen checks.
#[derive(Debug, Clone)]
pub struct FamilyStatistics {
    pub delta: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub probability: f64,
    /// E μ² / δ²
    pub chebyshev_bound: f64,
    pub chebyshev_holds: bool,
    /// (s, E exp(sμ), exp(s·Eμ))
    pub jensen: Vec<(f64, f64, f64)>,
    pub jensen_holds: bool,
}

pub fn family_statistics(
    measures: &[MeasureEstimate],
    probabilities: &[f64],
    delta: f64,
) -> Result<FamilyStatistics> {
    require_threshold(delta)?;
    if measures.len() != probabilities.len() {
        return Err(Error::InvalidArgument(
            "measures and probabilities differ in length".into(),
        ));
    }
    let pairs = || {
        measures
            .iter()
            .zip(probabilities)
            .map(|(m, p)| (m.value.re, *p))
    };
    let mean: f64 = pairs().map(|(m, p)| p * m).sum();
    let second_moment: f64 = pairs().map(|(m, p)| p * m * m).sum();
    let probability = mass_above(measures, probabilities, delta);
    let chebyshev_bound = second_moment / (delta * delta);
    let jensen: Vec<(f64, f64, f64)> = [1.0, 5.0]
        .iter()
        .map(|&s| {
            let lhs: f64 = pairs().map(|(m, p)| p * (s * m).exp()).sum();
            (s, lhs, (s * mean).exp())
        })
        .collect();
    let jensen_holds = jensen
        .iter()
        .all(|(_, lhs, rhs)| *lhs >= rhs * (1.0 - 1e-12));
    Ok(FamilyStatistics {
        delta,
        mean,
        second_moment,
        probability,
        chebyshev_bound,
        chebyshev_holds: probability <= chebyshev_bound * (1.0 + 1e-12),
        jensen,
        jensen_holds,
    })
}

/// Allowed shortfall of the empirical slope below the asymptotic bound.
pub const CONSISTENCY_MARGIN: f64 = 0.2;

/// Decay of ℙ_ℏ with ℏ = 1/(2πN) compared against H(δ)/χ_max.
#[derive(Debug, Clone)]
pub struct DeviationRateReport {
    pub delta: f64,
    /// (N, ℏ, ℙ)
    pub points: Vec<(usize, f64, f64)>,
    /// Least-squares slope of log ℙ against log ℏ over the nonzero points.
    pub slope: Option<f64>,
    pub rate: f64,
    pub chi_max: f64,
    /// −H(δ)/χ_max: ℙ ≲ ℏ^bound as ℏ → 0.
    pub bound: f64,
    /// Same bound under the 1/(2χ_max) normalization.
    pub bound_half: f64,
    pub margin: f64,
    pub consistent: bool,
    /// Every probability is zero: the deviation lies below what N resolves.
    pub below_resolution: bool,
}

impl DeviationRateReport {
    /// CSV with header "N,hbar,prob,log_prob_over_log_hbar".
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,hbar,prob,log_prob_over_log_hbar\n");
        for (n, h, p) in &self.points {
            let ratio = if *p > 0.0 {
                p.ln() / h.ln()
            } else {
                f64::INFINITY
            };
            out.push_str(&format!("{n},{h:.12e},{p:.12e},{ratio:.12e}\n"));
        }
        out
    }
}

pub fn deviation_rate_report(
    scan: &[(usize, f64)],
    delta: f64,
    rate: &RateFunction,
    map: &HyperbolicToralMap,
) -> Result<DeviationRateReport> {
    require_threshold(delta)?;
    if scan.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "slope fit needs ≥ 4 values of N, got {}",
            scan.len()
        )));
    }
    let mut points = Vec::with_capacity(scan.len());
    for &(n, p) in scan {
        let plk = PlanckData::new(n)?;
        if !(0.0..=1.0 + 1e-12).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "probability {p} at N = {n} is outside [0, 1]"
            )));
        }
        points.push((n, plk.hbar(), p));
    }
    let fit: Vec<(f64, f64)> = points
        .iter()
        .filter(|(_, _, p)| *p > 0.0)
        .map(|(_, h, p)| (h.ln(), p.ln()))
        .collect();
    let slope = least_squares_slope(&fit);
    let h = rate.value_at(delta);
    let chi_max = map.chi_max();
    let bound = -h / chi_max;
    let below_resolution = fit.is_empty();
    let consistent = match slope {
        Some(s) => bound.is_finite() && s >= bound - CONSISTENCY_MARGIN,
        None => below_resolution,
    };
    Ok(DeviationRateReport {
        delta,
        points,
        slope,
        rate: h,
        chi_max,
        bound,
        bound_half: bound / 2.0,
        margin: CONSISTENCY_MARGIN,
        consistent,
        below_resolution,
    })
}

fn least_squares_slope(xy: &[(f64, f64)]) -> Option<f64> {
    if xy.len() < 2 {
        return None;
    }
    let m = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / m;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Position-basis family for a = 2cos2πx, θ = δ₀ whose deviation
/// probability at δ is exactly ℏ^exponent: that mass is spread evenly over
/// the sites with 2cos(2πj/N) ≥ δ, the rest over the remaining sites.
pub fn planted_slope_family(
    plk: PlanckData,
    delta: f64,
    exponent: f64,
) -> Result<(GOFamily, TrigPolynomial, TimeWeights)> {
    require_threshold(delta)?;
    let n = plk.n();
    let target = plk.hbar().powf(exponent);
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "planted probability {target} must lie in (0, 1)"
        )));
    }
    let above: Vec<bool> = (0..n)
        .map(|j| 2.0 * (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos() >= delta)
        .collect();
    let hits = above.iter().filter(|b| **b).count();
    if hits == 0 || hits == n {
        return Err(Error::InvalidArgument(format!(
            "δ = {delta} does not split the sites at N = {n}"
        )));
    }
    let probabilities = above
        .iter()
        .map(|&b| {
            if b {
                target / hits as f64
            } else {
                (1.0 - target) / (n - hits) as f64
            }
        })
        .collect();
    let base = gof_position(plk);
    let fam = GOFamily::new(
        plk,
        base.states,
        probabilities,
        Provenance::Custom(format!("planted ℏ^{exponent}")),
    )?;
    Ok((
        fam,
        TrigPolynomial::cosine((1, 0), 2.0),
        TimeWeights::delta(0),
    ))
}

/// Quantum variance Σ P_ω |μ_ω − Σ P μ|² with the 1/N and |log ℏ| scalings.
#[derive(Debug, Clone, Copy)]
pub struct QuantumVarianceReport {
    pub n: usize,
    pub mean: C64,
    pub variance: f64,
    /// N·variance, bounded if the variance decays like c/N.
    pub n_scaled: f64,
    /// variance·|log ℏ|
    pub log_scaled: f64,
}

pub fn quantum_variance(
    fam: &GOFamily,
    a: &TrigPolynomial,
    theta: &TimeWeights,
    prop: &CatPropagator,
) -> Result<QuantumVarianceReport> {
    a.require_real()?;
    a.require_mean_zero()?;
    let measures = family_measures(fam, a, theta, prop)?;
    let mean: C64 = measures
        .iter()
        .zip(&fam.probabilities)
        .map(|(m, p)| m.value * *p)
        .sum();
    let variance: f64 = measures
        .iter()
        .zip(&fam.probabilities)
        .map(|(m, p)| p * (m.value - mean).norm_sqr())
        .sum();
    let n = fam.plk.n();
    Ok(QuantumVarianceReport {
        n,
        mean,
        variance,
        n_scaled: variance * n as f64,
        log_scaled: variance * fam.plk.hbar().ln().abs(),
    })
}
