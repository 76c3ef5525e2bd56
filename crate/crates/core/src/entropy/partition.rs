use std::f64::consts::{PI, SQRT_2};

use anosov_linalg::{dft, C64};

use crate::classical::TrigPolynomial;
use crate::quantum::weyl::check_degree;
use crate::quantum::{PlanckData, SymbolAction};
use crate::{Error, Result};

/// Band-limited strip partition (P_k)_{k<K} in x with Σ_k P_k² ≡ 1.
///
/// All atoms are translates of one even profile h: P_k(x) = h(x − (k+½)/K),
/// so P_k is concentrated on the strip [k/K, (k+1)/K).
#[derive(Debug, Clone)]
pub struct SmoothPartition {
    k: usize,
    width: f64,
    band_limit: usize,
    atoms: Vec<TrigPolynomial>,
    defect: f64,
}

/// Largest tolerated |Σ_k P_k² − 1|.
pub const PARTITION_TOLERANCE: f64 = 1e-10;

impl SmoothPartition {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn band_limit(&self) -> usize {
        self.band_limit
    }

    pub fn atoms(&self) -> &[TrigPolynomial] {
        &self.atoms
    }

    pub fn eval(&self, k: usize, x: f64) -> f64 {
        self.atoms[k].eval_real(x, 0.0)
    }

    /// max |Σ_k P_k² − 1| on the validation grid.
    pub fn defect(&self) -> f64 {
        self.defect
    }

    /// Multiplication operators P̂_k = Op_N(P_k), as their real diagonals.
    pub fn diagonals(&self, plk: PlanckData) -> Result<Vec<Vec<f64>>> {
        self.atoms
            .iter()
            .map(|p| {
                check_degree(p, plk)?;
                let action = SymbolAction::new(p, plk);
                let d = action.diagonal().expect("strip atoms depend on x only");
                Ok(d.iter().map(|z| z.re).collect())
            })
            .collect()
    }
}

fn sum_of_squares_defect(atoms: &[TrigPolynomial], points: usize) -> f64 {
    (0..points)
        .map(|i| {
            let x = i as f64 / points as f64;
            let s: f64 = atoms.iter().map(|p| p.eval_real(x, 0.0).powi(2)).sum();
            (s - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Gaussian-mollified indicator of [−1/(2K), 1/(2K)], periodized.
fn mollified_strip(x: f64, k: usize, width: f64) -> f64 {
    let half = 0.5 / k as f64;
    let s = width * SQRT_2;
    (-3..=3)
        .map(|l| {
            let y = x + l as f64;
            0.5 * (libm::erf((y + half) / s) - libm::erf((y - half) / s))
        })
        .sum()
}

pub fn build_partition(k: usize, width: f64, band_limit: usize) -> Result<SmoothPartition> {
    if k == 0 {
        return Err(Error::InvalidArgument("partition needs K ≥ 1".into()));
    }
    if k == 1 {
        let atoms = vec![TrigPolynomial::constant(1.0)];
        return Ok(SmoothPartition {
            k,
            width,
            band_limit,
            defect: sum_of_squares_defect(&atoms, 4),
            atoms,
        });
    }
    if !(width > 0.0 && width <= 0.25 / k as f64) {
        return Err(Error::InvalidArgument(format!(
            "smoothing width {width} must lie in (0, 1/(4K)] for K = {k}"
        )));
    }
    if band_limit < k {
        return Err(Error::InvalidArgument(format!(
            "band limit {band_limit} cannot resolve {k} strips"
        )));
    }

    let coeffs = refine_profile(k, band_limit, initial_profile(k, width, band_limit))?;
    let atoms: Vec<TrigPolynomial> = (0..k)
        .map(|atom| {
            let centre = (atom as f64 + 0.5) / k as f64;
            TrigPolynomial::from_terms((-(band_limit as i64)..=band_limit as i64).map(|m| {
                let c = coeffs[m.unsigned_abs() as usize];
                ((m, 0), C64::from_polar(c, -2.0 * PI * m as f64 * centre))
            }))
        })
        .collect();
    let points = (4 * k * k).max(16 * band_limit).max(4096);
    let defect = sum_of_squares_defect(&atoms, points);
    if defect > PARTITION_TOLERANCE {
        return Err(Error::PartitionDefect { defect });
    }
    Ok(SmoothPartition {
        k,
        width,
        band_limit,
        atoms,
        defect,
    })
}

/// Fourier coefficients c_0..c_B of q/√(Σ_j q_j²), q the mollified strip.
fn initial_profile(k: usize, width: f64, band: usize) -> Vec<f64> {
    let m = (8 * band).max(1024).next_power_of_two();
    let samples: Vec<C64> = (0..m)
        .map(|i| {
            let x = i as f64 / m as f64;
            let q = mollified_strip(x, k, width);
            let s: f64 = (0..k)
                .map(|j| mollified_strip(x - j as f64 / k as f64, k, width).powi(2))
                .sum();
            C64::new(q / s.sqrt(), 0.0)
        })
        .collect();
    let spectrum = dft(&samples);
    let scale = 1.0 / (m as f64).sqrt();
    (0..=band)
        .map(|j| 0.5 * (spectrum[j].re + spectrum[(m - j) % m].re) * scale)
        .collect()
}

/// Projection onto Σ_k h²(x − k/K) ≡ 1, i.e. the Fourier coefficients of
/// h² vanish at nonzero multiples of K and equal 1/K at 0. Damped
/// minimum-norm Gauss–Newton (Levenberg–Marquardt) steps keep the profile
/// close to its starting point; the pointwise check in `build_partition`
/// decides acceptance.
fn refine_profile(k: usize, band: usize, mut c: Vec<f64>) -> Result<Vec<f64>> {
    let b = band as i64;
    let kk = k as i64;
    let rows = (2 * b / kk) as usize + 1;
    let coef = |c: &[f64], q: i64| -> f64 {
        if q.abs() > b {
            0.0
        } else {
            c[q.unsigned_abs() as usize]
        }
    };
    let residual = |c: &[f64]| -> Vec<f64> {
        (0..rows)
            .map(|j| {
                let p = j as i64 * kk;
                let s: f64 = (-b..=b).map(|m| coef(c, m) * coef(c, p - m)).sum();
                s - if j == 0 { 1.0 / k as f64 } else { 0.0 }
            })
            .collect()
    };
    let size = |f: &[f64]| f.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut f = residual(&c);
    let mut mu = f64::NAN;
    for _ in 0..600 {
        let current = size(&f);
        if current <= 1e-16 {
            break;
        }
        let jac: Vec<Vec<f64>> = (0..rows)
            .map(|j| {
                let p = j as i64 * kk;
                (0..=b)
                    .map(|i| {
                        if i == 0 {
                            2.0 * coef(&c, p)
                        } else {
                            2.0 * (coef(&c, p - i) + coef(&c, p + i))
                        }
                    })
                    .collect()
            })
            .collect();
        let mut gram = vec![vec![0.0; rows]; rows];
        for r in 0..rows {
            for s in 0..=r {
                let v: f64 = jac[r].iter().zip(&jac[s]).map(|(x, y)| x * y).sum();
                gram[r][s] = v;
                gram[s][r] = v;
            }
        }
        let scale = (0..rows).map(|r| gram[r][r]).fold(0.0, f64::max);
        if mu.is_nan() {
            mu = 1e-6 * scale;
        }
        let rhs: Vec<f64> = f.iter().map(|x| -x).collect();
        let mut accepted = false;
        while mu <= 1e8 * scale {
            let mut damped = gram.clone();
            for (r, row) in damped.iter_mut().enumerate() {
                row[r] += mu;
            }
            if let Some(y) = solve(damped, rhs.clone()) {
                let trial: Vec<f64> = c
                    .iter()
                    .enumerate()
                    .map(|(i, ci)| ci + (0..rows).map(|r| jac[r][i] * y[r]).sum::<f64>())
                    .collect();
                let ft = residual(&trial);
                if size(&ft) < current {
                    c = trial;
                    f = ft;
                    mu = (mu / 10.0).max(1e-18 * scale);
                    accepted = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !accepted {
            break;
        }
    }
    Ok(c)
}

/// Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col] == 0.0 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Some(x)
}
