use std::ops::RangeInclusive;

use super::refined::{max_refined_norm, QuantumPartition, RefinedNormSearch, NODE_BUDGET};
use crate::classical::HyperbolicToralMap;
use crate::measures::TimeWeights;
use crate::quantum::{PlanckData, QuantumState};
use crate::{Error, Result, C64};

/// −Σ w log w with 0·log 0 = 0.
pub fn shannon(weights: &[f64]) -> f64 {
    weights
        .iter()
        .filter(|w| **w > 0.0)
        .map(|w| -w * w.ln())
        .sum()
}

/// Quantum entropies h_n± and the weight tables they come from.
#[derive(Debug, Clone)]
pub struct EntropyReport {
    pub n: usize,
    pub k: usize,
    /// from ‖π_α u‖²
    pub h_plus: f64,
    /// from ‖π_α† u‖²
    pub h_minus: f64,
    pub plus_weights: Vec<f64>,
    pub minus_weights: Vec<f64>,
}

impl EntropyReport {
    fn new(n: usize, k: usize, plus_weights: Vec<f64>, minus_weights: Vec<f64>) -> Self {
        Self {
            n,
            k,
            h_plus: shannon(&plus_weights),
            h_minus: shannon(&minus_weights),
            plus_weights,
            minus_weights,
        }
    }

    /// n·log K
    pub fn max_entropy(&self) -> f64 {
        self.n as f64 * (self.k as f64).ln()
    }

    pub fn plus_total(&self) -> f64 {
        self.plus_weights.iter().sum()
    }

    pub fn minus_total(&self) -> f64 {
        self.minus_weights.iter().sum()
    }
}

fn check_state(u: &QuantumState, qp: &QuantumPartition<'_>) -> Result<()> {
    if u.plk().n() != qp.n_dim() {
        return Err(Error::InvalidArgument(format!(
            "state on N = {} but partition quantized at N = {}",
            u.plk().n(),
            qp.n_dim()
        )));
    }
    Ok(())
}

pub fn quantum_entropies(
    u: &QuantumState,
    n: usize,
    qp: &QuantumPartition<'_>,
) -> Result<EntropyReport> {
    check_state(u, qp)?;
    let plus = qp.plus_weights(u.amplitudes(), n)?;
    let minus = qp.minus_weights(u.amplitudes(), n)?;
    Ok(EntropyReport::new(n, qp.k(), plus, minus))
}

/// Entropies of the time-averaged weights Σ_t θ_t‖π_α Uᵗu‖² (and the
/// adjoint counterpart).
pub fn averaged_entropies(
    u: &QuantumState,
    theta: &TimeWeights,
    n: usize,
    qp: &QuantumPartition<'_>,
) -> Result<EntropyReport> {
    check_state(u, qp)?;
    let prop = qp.propagator();
    let mut psi = u.amplitudes().to_vec();
    prop.apply_power(&mut psi, theta.offset());
    let mut plus: Vec<f64> = Vec::new();
    let mut minus: Vec<f64> = Vec::new();
    let last = theta.len() - 1;
    for (i, (_, w)) in theta.iter().enumerate() {
        if w > 0.0 {
            let p = qp.plus_weights(&psi, n)?;
            let m = qp.minus_weights(&psi, n)?;
            if plus.is_empty() {
                plus = vec![0.0; p.len()];
                minus = vec![0.0; m.len()];
            }
            plus.iter_mut().zip(&p).for_each(|(acc, x)| *acc += w * x);
            minus.iter_mut().zip(&m).for_each(|(acc, x)| *acc += w * x);
        }
        if i < last {
            prop.apply(&mut psi);
        }
    }
    Ok(EntropyReport::new(n, qp.k(), plus, minus))
}

/// ⌊(1−δ)·log N / log λ⌋
pub fn ehrenfest(plk: PlanckData, delta: f64, map: &HyperbolicToralMap) -> Result<usize> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::InvalidArgument(format!(
            "Ehrenfest margin must lie in [0, 1), got {delta}"
        )));
    }
    Ok(((1.0 - delta) * (plk.n() as f64).ln() / map.log_lambda()).floor() as usize)
}

/// c(n) = max_{α,α'} ‖π_{α'}(n)π_α‖.
///
/// Up to unitary factors π_{α'}(n)π_α is the refined element of the
/// concatenated word (α, α') of length 2n, so this is the pruned search
/// over words of length 2n.
pub fn uncertainty_constant(qp: &QuantumPartition<'_>, n: usize) -> Result<RefinedNormSearch> {
    max_refined_norm(qp, 2 * n, NODE_BUDGET)
}

/// h_n⁺(Uⁿu) + h_n⁻(u) ≥ −2 log c(n). The energy cutoff is the identity
/// on H_N, so the leakage term is absent and the inequality is exact.
#[derive(Debug, Clone)]
pub struct UncertaintyReport {
    pub n: usize,
    pub c: f64,
    pub h_plus_evolved: f64,
    pub h_minus: f64,
    pub lhs: f64,
    pub bound: f64,
    /// lhs − bound
    pub gap: f64,
    pub holds: bool,
    pub tolerance: f64,
    pub energy_cutoff_identity: bool,
}

pub const UNCERTAINTY_TOLERANCE: f64 = 1e-8;

pub fn uncertainty_check(
    u: &QuantumState,
    qp: &QuantumPartition<'_>,
    constant: &RefinedNormSearch,
) -> Result<UncertaintyReport> {
    check_state(u, qp)?;
    if constant.length % 2 != 0 {
        return Err(Error::InvalidArgument(
            "uncertainty constant must come from words of even length".into(),
        ));
    }
    let n = constant.length / 2;
    let mut evolved = u.amplitudes().to_vec();
    qp.propagator().apply_power(&mut evolved, n as i64);
    let h_plus_evolved = shannon(&qp.plus_weights(&evolved, n)?);
    let h_minus = shannon(&qp.minus_weights(u.amplitudes(), n)?);
    let lhs = h_plus_evolved + h_minus;
    let bound = -2.0 * constant.value.ln();
    Ok(UncertaintyReport {
        n,
        c: constant.value,
        h_plus_evolved,
        h_minus,
        lhs,
        bound,
        gap: lhs - bound,
        holds: lhs >= bound - UNCERTAINTY_TOLERANCE,
        tolerance: UNCERTAINTY_TOLERANCE,
        energy_cutoff_identity: true,
    })
}

#[derive(Debug, Clone)]
pub struct NormDecayRow {
    pub n: usize,
    pub value: f64,
    pub nodes: usize,
    /// ℏ^{−1/2}·λ^{−n/2}
    pub predicted: f64,
}

/// c(n) across n with an exponential fit below the Ehrenfest time.
#[derive(Debug, Clone)]
pub struct NormDecayReport {
    pub n_dim: usize,
    pub ehrenfest: usize,
    pub rows: Vec<NormDecayRow>,
    /// −d log c(n)/dn fitted over 1 ≤ n ≤ ehrenfest.
    pub fitted_rate: Option<f64>,
    /// log λ / 2
    pub predicted_rate: f64,
}

pub fn norm_decay_scan(
    qp: &QuantumPartition<'_>,
    n_range: RangeInclusive<usize>,
) -> Result<NormDecayReport> {
    let prop = qp.propagator();
    let plk = prop.plk();
    let map = prop.map();
    let ehr = ehrenfest(plk, 0.0, map)?;
    if *n_range.end() > ehr + 4 {
        return Err(Error::InvalidArgument(format!(
            "n = {} exceeds the Ehrenfest time {ehr} by more than 4",
            n_range.end()
        )));
    }
    let lambda = map.lambda();
    let mut rows = Vec::new();
    for n in n_range {
        let s = uncertainty_constant(qp, n)?;
        rows.push(NormDecayRow {
            n,
            value: s.value,
            nodes: s.nodes,
            predicted: plk.hbar().powf(-0.5) * lambda.powf(-(n as f64) / 2.0),
        });
    }
    let fit: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.n >= 1 && r.n <= ehr && r.value > 0.0)
        .map(|r| (r.n as f64, r.value.ln()))
        .collect();
    Ok(NormDecayReport {
        n_dim: plk.n(),
        ehrenfest: ehr,
        fitted_rate: slope(&fit).map(|s| -s),
        predicted_rate: map.log_lambda() / 2.0,
        rows,
    })
}

fn slope(xy: &[(f64, f64)]) -> Option<f64> {
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

/// Measured subadditivity defects
/// R⁺ = h⁺_{n0+m}(u) − h⁺_m(u) − h⁺_{n0}(Uᵐu),
/// R⁻ = h⁻_{n0+m}(u) − h⁻_{n0}(u) − h⁻_m(U^{n0}u).
#[derive(Debug, Clone, Copy)]
pub struct SubadditivityReport {
    pub n0: usize,
    pub m: usize,
    pub r_plus: f64,
    pub r_minus: f64,
    /// max(0, R⁺, R⁻)
    pub defect: f64,
    pub ehrenfest: usize,
}

pub fn subadditivity_check(
    u: &QuantumState,
    n0: usize,
    m: usize,
    qp: &QuantumPartition<'_>,
) -> Result<SubadditivityReport> {
    check_state(u, qp)?;
    let prop = qp.propagator();
    let ehr = ehrenfest(prop.plk(), 0.0, prop.map())?;
    if n0 == 0 || m == 0 || n0 + m > ehr {
        return Err(Error::InvalidArgument(format!(
            "need 1 ≤ n0, m and n0 + m ≤ {ehr}, got n0 = {n0}, m = {m}"
        )));
    }
    let v = u.amplitudes();
    let shifted = |t: usize| -> Vec<C64> {
        let mut w = v.to_vec();
        prop.apply_power(&mut w, t as i64);
        w
    };
    let hp = |w: &[C64], n: usize| qp.plus_weights(w, n).map(|x| shannon(&x));
    let hm = |w: &[C64], n: usize| qp.minus_weights(w, n).map(|x| shannon(&x));
    let r_plus = hp(v, n0 + m)? - hp(v, m)? - hp(&shifted(m), n0)?;
    let r_minus = hm(v, n0 + m)? - hm(v, n0)? - hm(&shifted(n0), m)?;
    Ok(SubadditivityReport {
        n0,
        m,
        r_plus,
        r_minus,
        defect: r_plus.max(r_minus).max(0.0),
        ehrenfest: ehr,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct LimitEntropyRow {
    pub n_dim: usize,
    pub state: usize,
    pub h_plus_rate: f64,
    pub h_minus_rate: f64,
}

/// h_n±/n across N, set against ½·log λ (the analog of the lower bound)
/// and log λ.
#[derive(Debug, Clone)]
pub struct LimitEntropyReport {
    pub n: usize,
    pub rows: Vec<LimitEntropyRow>,
    pub lower_target: f64,
    pub upper: f64,
    /// log K, the largest possible rate.
    pub max_rate: f64,
}

pub fn limit_entropy_estimate(
    cells: &[(&QuantumPartition<'_>, &[QuantumState])],
    n: usize,
) -> Result<LimitEntropyReport> {
    if n == 0 {
        return Err(Error::InvalidArgument("entropy rate needs n ≥ 1".into()));
    }
    let first = cells
        .first()
        .ok_or_else(|| Error::InvalidArgument("no cells".into()))?;
    let k = first.0.k();
    let log_lambda = first.0.propagator().map().log_lambda();
    let mut rows = Vec::new();
    for (qp, states) in cells {
        if qp.k() != k {
            return Err(Error::InvalidArgument(
                "partition differs between cells".into(),
            ));
        }
        for (i, u) in states.iter().enumerate() {
            let e = quantum_entropies(u, n, qp)?;
            rows.push(LimitEntropyRow {
                n_dim: qp.n_dim(),
                state: i,
                h_plus_rate: e.h_plus / n as f64,
                h_minus_rate: e.h_minus / n as f64,
            });
        }
    }
    Ok(LimitEntropyReport {
        n,
        rows,
        lower_target: log_lambda / 2.0,
        upper: log_lambda,
        max_rate: (k as f64).ln(),
    })
}
