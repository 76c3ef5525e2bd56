use crate::eigen::{eigendecompose, SpectrumKind};
use crate::vector::{dot, norm, normalize};
use crate::{ComplexMatrix, LinalgError, Result, C64};

const MAX_STEPS: usize = 400;
const BLOCK: usize = 4;

/// Largest singular value with the right singular vector that produced it.
#[derive(Debug, Clone)]
pub struct NormEstimate {
    pub value: f64,
    pub vector: Vec<C64>,
    pub steps: usize,
}

/// Spectral norm by power iteration on A†A from fixed pseudo-random starts.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    operator_norm_from(a, None).map(|e| e.value)
}

/// Same as [`operator_norm`] with an optional warm-start vector.
///
/// A small block of vectors is iterated together and rotated by a
/// Rayleigh–Ritz step each sweep, so clustered top singular values do not
/// stall convergence. Stops once the leading Ritz residual is below
/// 1e-11 of the estimate, or the estimate is stationary to 1e-14. If the
/// sweep cap is reached first, the top eigenpair of A†A is computed
/// densely instead.
pub fn operator_norm_from(a: &ComplexMatrix, start: Option<&[C64]>) -> Result<NormEstimate> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let n = a.cols();
    if n == 0 || a.max_abs() == 0.0 {
        return Ok(NormEstimate {
            value: 0.0,
            vector: vec![C64::new(0.0, 0.0); n],
            steps: 0,
        });
    }
    let b = BLOCK.min(n);
    let mut block: Vec<Vec<C64>> = Vec::with_capacity(b);
    if let Some(s) = start {
        if s.len() == n && norm(s) > 0.0 {
            block.push(s.to_vec());
        }
    }
    let mut seed = 0x9e37_79b9_7f4a_7c15u64;
    while block.len() < b {
        block.push(probe(n, seed));
        seed = seed.wrapping_mul(0xd1b5_4a32_d192_ed03).wrapping_add(1);
    }
    let mut restarts = 0;
    let mut prev = 0.0f64;
    let mut calm = 0;
    let mut step = 0;
    while step < MAX_STEPS {
        step += 1;
        if orthonormalize(&mut block) == 0 {
            // Every start landed in the kernel: restart from fresh probes.
            restarts += 1;
            if restarts > 4 {
                break;
            }
            block = (0..b)
                .map(|i| probe(n, seed.wrapping_add((restarts * b + i) as u64)))
                .collect();
            continue;
        }
        let av: Vec<Vec<C64>> = block.iter().map(|v| a.matvec(v)).collect();
        let m = block.len();
        // Rayleigh–Ritz on span(block): G = (AV)†(AV).
        let g = ComplexMatrix::from_fn(m, m, |i, j| dot(&av[i], &av[j]));
        let g = g.add(&g.adjoint()).scale(C64::new(0.5, 0.0));
        let spec = eigendecompose(&g, SpectrumKind::Hermitian)?;
        let mut ritz: Vec<Vec<C64>> = Vec::with_capacity(m);
        let mut aritz: Vec<Vec<C64>> = Vec::with_capacity(m);
        for jj in (0..m).rev() {
            let c = spec.eigenvector(jj);
            let mut v = vec![C64::new(0.0, 0.0); n];
            let mut w = vec![C64::new(0.0, 0.0); n];
            for (i, ci) in c.iter().enumerate() {
                for t in 0..n {
                    v[t] += block[i][t] * ci;
                    w[t] += av[i][t] * ci;
                }
            }
            ritz.push(v);
            aritz.push(w);
        }
        let theta = spec.eigenvalues[m - 1].re.max(0.0);
        let sigma = theta.sqrt();
        let next: Vec<Vec<C64>> = aritz.iter().map(|w| a.adjoint_matvec(w)).collect();
        let resid = {
            let r: Vec<C64> = next[0]
                .iter()
                .zip(&ritz[0])
                .map(|(x, y)| x - theta * y)
                .collect();
            norm(&r)
        };
        if theta == 0.0 || resid <= 1e-11 * theta {
            return Ok(NormEstimate {
                value: sigma,
                vector: ritz.swap_remove(0),
                steps: step,
            });
        }
        if (sigma - prev).abs() <= 1e-14 * sigma {
            calm += 1;
            if calm >= 3 {
                return Ok(NormEstimate {
                    value: sigma,
                    vector: ritz.swap_remove(0),
                    steps: step,
                });
            }
        } else {
            calm = 0;
        }
        prev = sigma;
        block = next;
    }
    dense_fallback(a, step, prev)
}

fn dense_fallback(a: &ComplexMatrix, steps: usize, estimate: f64) -> Result<NormEstimate> {
    let g = a.adjoint_matmul(a);
    let g = g.add(&g.adjoint()).scale(C64::new(0.5, 0.0));
    let spec =
        eigendecompose(&g, SpectrumKind::Hermitian).map_err(|_| LinalgError::PowerIteration {
            iterations: steps,
            estimate,
        })?;
    let top = spec.len() - 1;
    Ok(NormEstimate {
        value: spec.eigenvalues[top].re.max(0.0).sqrt(),
        vector: spec.eigenvector(top),
        steps,
    })
}

/// Modified Gram–Schmidt (two passes); drops dependent vectors and returns the rank kept.
fn orthonormalize(block: &mut Vec<Vec<C64>>) -> usize {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(block.len());
    for mut v in block.drain(..) {
        let before = norm(&v);
        for _ in 0..2 {
            for q in &out {
                let p = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= p * y);
            }
        }
        if before > 0.0 && norm(&v) > 1e-10 * before {
            normalize(&mut v);
            out.push(v);
        }
    }
    *block = out;
    block.len()
}

/// Deterministic vector from a splitmix sequence.
fn probe(n: usize, mut state: u64) -> Vec<C64> {
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    (0..n).map(|_| C64::new(next(), next())).collect()
}
