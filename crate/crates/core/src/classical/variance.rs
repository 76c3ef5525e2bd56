use super::map::HyperbolicToralMap;
use super::trig::TrigPolynomial;
use crate::Result;

/// C(t) = ∫ a·(a∘Aᵗ) dLeb for t ≥ 0, exact by Fourier orthogonality:
/// C(t) = Σ_m â(m)·â(−(Aᵀ)ᵗm).
pub fn correlation(map: &HyperbolicToralMap, a: &TrigPolynomial, t: usize) -> f64 {
    let deg = a.degree() as i128;
    let [[p, q], [r, s]] = map.matrix().map(|row| row.map(|v| v as i128));
    let mut total = 0.0;
    for (m, v) in a.terms() {
        let (mut k1, mut k2) = (m.0 as i128, m.1 as i128);
        let mut escaped = false;
        for _ in 0..t {
            (k1, k2) = (p * k1 + r * k2, q * k1 + s * k2);
            if k1.abs() > 1 << 80 || k2.abs() > 1 << 80 {
                escaped = true;
                break;
            }
        }
        if escaped || k1.abs() > deg || k2.abs() > deg {
            continue;
        }
        total += (v * a.coeff((-k1 as i64, -k2 as i64))).re;
    }
    total
}

/// σ²(a) = Σ_{|t| ≤ t_max} C(t) = C(0) + 2·Σ_{t=1}^{t_max} C(t).
///
/// Each term is exact; correlations vanish once Aᵀ pushes the support of â
/// out of itself, so for moderate t_max the sum is the full series.
pub fn dynamical_variance(
    map: &HyperbolicToralMap,
    a: &TrigPolynomial,
    t_max: usize,
) -> Result<f64> {
    a.require_real()?;
    a.require_mean_zero()?;
    let mut sigma2 = correlation(map, a, 0);
    for t in 1..=t_max {
        sigma2 += 2.0 * correlation(map, a, t);
    }
    Ok(sigma2)
}
