use std::cmp::Ordering;
use std::f64::consts::PI;

use crate::{ComplexMatrix, LinalgError, Result, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumKind {
    Unitary,
    Hermitian,
}

impl SpectrumKind {
    fn name(self) -> &'static str {
        match self {
            SpectrumKind::Unitary => "unitary",
            SpectrumKind::Hermitian => "hermitian",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extremal {
    Min,
    Max,
}

/// Eigenpairs of a normal matrix.
///
/// Unitary input: eigenvalues sorted by phase in (-π, π].
/// Hermitian input: eigenvalues real and ascending.
/// `eigenvectors` holds orthonormal columns, column j paired with `eigenvalues[j]`.
#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub kind: SpectrumKind,
    pub eigenvalues: Vec<C64>,
    pub eigenvectors: ComplexMatrix,
    pub max_residual: f64,
    pub sweeps: usize,
}

impl SpectralResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenphases(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| principal_arg(*z)).collect()
    }

    pub fn eigenvector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }
}

/// Argument in (-π, π].
fn principal_arg(z: C64) -> f64 {
    let a = z.arg();
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// Full eigendecomposition of a unitary or Hermitian matrix.
///
/// Householder reduction to Hessenberg form, then implicit single-shift QR
/// with Wilkinson shifts. Because the input is normal the Schur vectors
/// are eigenvectors, so no triangular back-substitution is needed.
pub fn eigendecompose(a: &ComplexMatrix, kind: SpectrumKind) -> Result<SpectralResult> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    a.check_finite()?;
    let n = a.rows();
    let scale = a.norm_one();
    let defect = match kind {
        SpectrumKind::Unitary => a.unitarity_defect(),
        SpectrumKind::Hermitian => a.hermitian_defect(),
    };
    let tolerance = 1e-10 * scale.max(f64::MIN_POSITIVE);
    if defect > tolerance {
        return Err(LinalgError::KindViolation {
            kind: kind.name(),
            defect,
            tolerance,
        });
    }
    if n == 0 {
        return Ok(SpectralResult {
            kind,
            eigenvalues: Vec::new(),
            eigenvectors: ComplexMatrix::zeros(0, 0),
            max_residual: 0.0,
            sweeps: 0,
        });
    }

    let mut h = a.as_slice().to_vec();
    // zt[j*n..] is the j-th Schur vector.
    let mut zt = ComplexMatrix::identity(n).into_vec();
    hessenberg(n, &mut h, &mut zt);
    let qr = schur_qr(n, &mut h, &mut zt);

    let mut vals: Vec<C64> = (0..n).map(|i| h[i * n + i]).collect();
    if kind == SpectrumKind::Hermitian {
        vals.iter_mut().for_each(|z| z.im = 0.0);
    }
    let residuals = residuals(a, &vals, &zt);
    let worst = residuals.iter().cloned().fold(0.0, f64::max);
    let sweeps = match qr {
        Ok(s) => s,
        Err(iterations) => {
            return Err(LinalgError::NoConvergence {
                iterations,
                worst_residual: worst,
            })
        }
    };
    let tolerance = 1e-9 * scale;
    if worst > tolerance {
        return Err(LinalgError::ResidualTooLarge {
            worst_residual: worst,
            tolerance,
        });
    }

    let order = sort_order(n, kind, &vals, &zt);
    let eigenvalues = order.iter().map(|&j| vals[j]).collect();
    let mut eigenvectors = ComplexMatrix::zeros(n, n);
    for (col, &j) in order.iter().enumerate() {
        eigenvectors.set_column(col, &zt[j * n..(j + 1) * n]);
    }
    Ok(SpectralResult {
        kind,
        eigenvalues,
        eigenvectors,
        max_residual: worst,
        sweeps,
    })
}

/// Smallest or largest eigenvalue of a Hermitian matrix with a unit eigenvector.
pub fn extremal_eigen(hm: &ComplexMatrix, which: Extremal) -> Result<(f64, Vec<C64>)> {
    let spec = eigendecompose(hm, SpectrumKind::Hermitian)?;
    let j = match which {
        Extremal::Min => 0,
        Extremal::Max => spec.len() - 1,
    };
    let v = spec.eigenvector(j);
    let hv = hm.matvec(&v);
    let rq: f64 = crate::vector::dot(&v, &hv).re;
    let res = hv
        .iter()
        .zip(&v)
        .map(|(x, y)| (x - rq * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let tolerance = 1e-10 * hm.norm_one();
    if res > tolerance {
        return Err(LinalgError::ResidualTooLarge {
            worst_residual: res,
            tolerance,
        });
    }
    Ok((rq, v))
}

fn residuals(a: &ComplexMatrix, vals: &[C64], zt: &[C64]) -> Vec<f64> {
    let n = vals.len();
    (0..n)
        .map(|j| {
            let v = &zt[j * n..(j + 1) * n];
            let av = a.matvec(v);
            av.iter()
                .zip(v)
                .map(|(x, y)| (x - vals[j] * y).norm_sqr())
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

fn sort_order(n: usize, kind: SpectrumKind, vals: &[C64], zt: &[C64]) -> Vec<usize> {
    let key: Vec<f64> = match kind {
        SpectrumKind::Unitary => vals.iter().map(|z| principal_arg(*z)).collect(),
        SpectrumKind::Hermitian => vals.iter().map(|z| z.re).collect(),
    };
    let lead_arg = |j: usize| -> f64 {
        let v = &zt[j * n..(j + 1) * n];
        let big = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
        v.iter()
            .find(|z| z.norm() > 1e-8 * big.max(f64::MIN_POSITIVE))
            .map_or(0.0, |z| principal_arg(*z))
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| key[i].partial_cmp(&key[j]).unwrap_or(Ordering::Equal));
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && key[order[end]] - key[order[end - 1]] <= 1e-12 {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&i, &j| {
                lead_arg(i)
                    .partial_cmp(&lead_arg(j))
                    .unwrap_or(Ordering::Equal)
                    .then(i.cmp(&j))
            });
        }
        start = end;
    }
    order
}

/// Reduces `h` (row-major n×n) to upper Hessenberg form by Householder
/// reflections, accumulating them into the transposed basis `zt`.
fn hessenberg(n: usize, h: &mut [C64], zt: &mut [C64]) {
    let mut v = vec![ZERO; n];
    let mut s = vec![ZERO; n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let alpha = (k + 1..n)
            .map(|i| h[i * n + k].norm_sqr())
            .sum::<f64>()
            .sqrt();
        let tail = (k + 2..n).map(|i| h[i * n + k].norm_sqr()).sum::<f64>();
        if tail == 0.0 {
            continue;
        }
        let x0 = h[(k + 1) * n + k];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for l in 0..m {
            v[l] = h[(k + 1 + l) * n + k];
        }
        v[0] += phase * alpha;
        let beta = 2.0 / v[..m].iter().map(|z| z.norm_sqr()).sum::<f64>();

        // H <- P H, P = I - beta v v†, acting on rows k+1..n.
        s[k..n].iter_mut().for_each(|z| *z = ZERO);
        for l in 0..m {
            let vl = v[l].conj();
            let row = &h[(k + 1 + l) * n..(k + 2 + l) * n];
            for j in k..n {
                s[j] += vl * row[j];
            }
        }
        for l in 0..m {
            let f = beta * v[l];
            let row = &mut h[(k + 1 + l) * n..(k + 2 + l) * n];
            for j in k..n {
                row[j] -= f * s[j];
            }
        }
        // H <- H P, acting on columns k+1..n.
        for i in 0..n {
            let row = &mut h[i * n + k + 1..(i + 1) * n];
            let t: C64 = row.iter().zip(&v[..m]).map(|(a, b)| a * b).sum();
            let t = beta * t;
            for (a, b) in row.iter_mut().zip(&v[..m]) {
                *a -= t * b.conj();
            }
        }
        // Z <- Z P
        s.iter_mut().for_each(|z| *z = ZERO);
        for l in 0..m {
            let vl = v[l];
            let zrow = &zt[(k + 1 + l) * n..(k + 2 + l) * n];
            for i in 0..n {
                s[i] += zrow[i] * vl;
            }
        }
        for l in 0..m {
            let f = beta * v[l].conj();
            let zrow = &mut zt[(k + 1 + l) * n..(k + 2 + l) * n];
            for i in 0..n {
                zrow[i] -= s[i] * f;
            }
        }
        h[(k + 1) * n + k] = -phase * alpha;
        for i in k + 2..n {
            h[i * n + k] = ZERO;
        }
    }
}

fn abs1(z: C64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Complex Givens rotation G = [[c, s], [-conj(s), c]] with G (x, y)ᵀ = (r, 0)ᵀ.
fn givens(x: C64, y: C64) -> (f64, C64, C64) {
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, C64::new(1.0, 0.0), y);
    }
    let rho = ax.hypot(y.norm());
    let ph = x / ax;
    (ax / rho, ph * y.conj() / rho, ph * rho)
}

/// Implicit single-shift QR on the Hessenberg matrix. Only the active
/// window is kept up to date (eigenvalues, not the full Schur form); the
/// accumulated unitary goes to `zt`. Returns the sweep count, or the count
/// reached when the cap was hit.
fn schur_qr(n: usize, h: &mut [C64], zt: &mut [C64]) -> std::result::Result<usize, usize> {
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let cap = 100 * n.max(1);
    let mut total = 0usize;
    let mut ihi = n - 1;
    let mut its = 0usize;

    while ihi > 0 {
        // Look for a negligible subdiagonal entry.
        let mut l = ihi;
        while l > 0 {
            let sub = h[l * n + l - 1];
            if abs1(sub) <= smlnum {
                break;
            }
            let mut tst = abs1(h[(l - 1) * n + l - 1]) + abs1(h[l * n + l]);
            if tst == 0.0 {
                if l >= 2 {
                    tst += abs1(h[(l - 1) * n + l - 2]);
                }
                if l + 1 <= ihi {
                    tst += abs1(h[(l + 1) * n + l]);
                }
            }
            if abs1(sub) <= ulp * tst {
                let sup = h[(l - 1) * n + l];
                let ab = abs1(sub).max(abs1(sup));
                let ba = abs1(sub).min(abs1(sup));
                let dd = h[(l - 1) * n + l - 1] - h[l * n + l];
                let aa = abs1(h[l * n + l]).max(abs1(dd));
                let bb = abs1(h[l * n + l]).min(abs1(dd));
                let s = aa + ab;
                if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                    break;
                }
            }
            l -= 1;
        }
        if l > 0 {
            h[l * n + l - 1] = ZERO;
        }
        if l == ihi {
            ihi -= 1;
            its = 0;
            continue;
        }
        if total >= cap {
            return Err(total);
        }

        let i = ihi;
        let mu = if its > 0 && its % 20 == 10 {
            h[l * n + l] + 0.75 * h[(l + 1) * n + l].re.abs()
        } else if its > 0 && its % 20 == 0 {
            h[i * n + i] + 0.75 * h[i * n + i - 1].re.abs()
        } else {
            let a = h[(i - 1) * n + i - 1];
            let b = h[(i - 1) * n + i];
            let c = h[i * n + i - 1];
            let d = h[i * n + i];
            let m = 0.5 * (a + d);
            let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
            let (e1, e2) = (m + disc, m - disc);
            if (e1 - d).norm() <= (e2 - d).norm() {
                e1
            } else {
                e2
            }
        };

        for k in l..i {
            let (x, y) = if k == l {
                (h[l * n + l] - mu, h[(l + 1) * n + l])
            } else {
                (h[k * n + k - 1], h[(k + 1) * n + k - 1])
            };
            let (c, s, _) = givens(x, y);
            let jstart = if k == l { l } else { k - 1 };
            for j in jstart..=i {
                let h1 = h[k * n + j];
                let h2 = h[(k + 1) * n + j];
                h[k * n + j] = c * h1 + s * h2;
                h[(k + 1) * n + j] = -s.conj() * h1 + c * h2;
            }
            if k > l {
                h[(k + 1) * n + k - 1] = ZERO;
            }
            let iend = (k + 2).min(i);
            for r in l..=iend {
                let h1 = h[r * n + k];
                let h2 = h[r * n + k + 1];
                h[r * n + k] = c * h1 + s.conj() * h2;
                h[r * n + k + 1] = -s * h1 + c * h2;
            }
            let (lo, hi) = zt.split_at_mut((k + 1) * n);
            let z1 = &mut lo[k * n..];
            let z2 = &mut hi[..n];
            for (a, b) in z1.iter_mut().zip(z2.iter_mut()) {
                let (p, q) = (*a, *b);
                *a = c * p + s.conj() * q;
                *b = -s * p + c * q;
            }
        }
        its += 1;
        total += 1;
    }
    Ok(total)
}
