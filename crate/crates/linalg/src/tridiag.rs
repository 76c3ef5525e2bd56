use crate::{ComplexMatrix, Extremal, LinalgError, Result, C64};

/// One extreme eigenvalue of a Hermitian matrix, without eigenvectors.
///
/// Householder reduction to a real symmetric tridiagonal matrix, then
/// Sturm-sequence bisection to full precision. Costs about (4/3)n³ flops,
/// a fraction of a full decomposition.
pub fn extremal_eigenvalue(h: &ComplexMatrix, which: Extremal) -> Result<f64> {
    if !h.is_square() {
        return Err(LinalgError::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    h.check_finite()?;
    let scale = h.norm_one();
    let defect = h.hermitian_defect();
    let tolerance = 1e-10 * scale.max(f64::MIN_POSITIVE);
    if defect > tolerance {
        return Err(LinalgError::KindViolation {
            kind: "hermitian",
            defect,
            tolerance,
        });
    }
    let n = h.rows();
    if n == 0 {
        return Err(LinalgError::DimensionMismatch {
            expected: 1,
            got: 0,
        });
    }
    let (d, e) = tridiagonalize(n, h.as_slice().to_vec());
    Ok(bisect(&d, &e, which))
}

/// Diagonal and off-diagonal magnitudes of a unitarily similar tridiagonal.
fn tridiagonalize(n: usize, mut a: Vec<C64>) -> (Vec<f64>, Vec<f64>) {
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![C64::new(0.0, 0.0); n];
    let mut p = vec![C64::new(0.0, 0.0); n];
    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let x = |i: usize| a[(k + 1 + i) * n + k];
        let norm = (0..m).map(|i| x(i).norm_sqr()).sum::<f64>().sqrt();
        d[k] = a[k * n + k].re;
        e[k] = norm;
        if norm == 0.0 {
            continue;
        }
        let x0 = x(0);
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        for i in 0..m {
            v[i] = x(i);
        }
        v[0] -= alpha;
        let vn = (0..m).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vn == 0.0 {
            continue;
        }
        for vi in v.iter_mut().take(m) {
            *vi /= vn;
        }
        // p = A v on the trailing block, w = p − (v†p) v
        let off = k + 1;
        for i in 0..m {
            let row = &a[(off + i) * n + off..(off + i) * n + n];
            p[i] = row.iter().zip(&v[..m]).map(|(r, vj)| r * vj).sum();
        }
        let vp: C64 = (0..m).map(|i| v[i].conj() * p[i]).sum();
        for i in 0..m {
            p[i] -= vp * v[i];
        }
        // A ← A − 2 v w† − 2 w v†
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a[(off + i) * n + off..(off + i) * n + n];
            for (j, r) in row.iter_mut().enumerate() {
                *r -= 2.0 * (vi * p[j].conj() + wi * v[j].conj());
            }
        }
    }
    if n >= 2 {
        d[n - 2] = a[(n - 2) * n + n - 2].re;
        e[n - 2] = a[(n - 1) * n + n - 2].norm();
    }
    d[n - 1] = a[(n - 1) * n + n - 1].re;
    (d, e)
}

/// Number of eigenvalues strictly below x.
fn sturm_count(d: &[f64], e: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..d.len() {
        let coupling = if i == 0 { 0.0 } else { e[i - 1] * e[i - 1] };
        q = d[i] - x - if i == 0 { 0.0 } else { coupling / q };
        if q == 0.0 {
            q = -f64::EPSILON * (d[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect(d: &[f64], e: &[f64], which: Extremal) -> f64 {
    let n = d.len();
    let radius = |i: usize| {
        let left = if i > 0 { e[i - 1] } else { 0.0 };
        let right = if i + 1 < n { e[i] } else { 0.0 };
        left + right
    };
    let mut lo = (0..n)
        .map(|i| d[i] - radius(i))
        .fold(f64::INFINITY, f64::min);
    let mut hi = (0..n)
        .map(|i| d[i] + radius(i))
        .fold(f64::NEG_INFINITY, f64::max);
    let span = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    lo -= 2.0 * f64::EPSILON * span;
    hi += 2.0 * f64::EPSILON * span;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let below = sturm_count(d, e, mid);
        let go_low = match which {
            Extremal::Max => below == n,
            Extremal::Min => below >= 1,
        };
        if go_low {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}
