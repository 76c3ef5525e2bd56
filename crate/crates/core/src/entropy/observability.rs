use std::f64::consts::PI;

use anosov_linalg::{extremal_eigen, ComplexMatrix, Extremal};

use crate::classical::{HyperbolicToralMap, TrigPolynomial};
use crate::quantum::weyl::check_degree;
use crate::quantum::{CatPropagator, SymbolAction};
use crate::{Error, Result, C64};

/// λ_min at or below this is reported as unobservable.
pub const OBSERVABILITY_FLOOR: f64 = 1e-14;

/// Gram operator G = Σ_{t<T} U⁻ᵗ M_{a²} Uᵗ and C = 1/λ_min(G).
#[derive(Debug, Clone)]
pub struct ObservabilityReport {
    pub n_dim: usize,
    pub t: usize,
    pub lambda_min: f64,
    /// f64::INFINITY when λ_min ≤ OBSERVABILITY_FLOOR.
    pub constant: f64,
    pub observable: bool,
    /// Unit vector attaining λ_min, the hardest state to observe.
    pub minimizer: Vec<C64>,
    pub gram_hermitian_defect: f64,
    pub gram: ComplexMatrix,
    pub survivor: Option<SurvivorReport>,
}

impl ObservabilityReport {
    pub fn with_survivor(mut self, s: SurvivorReport) -> Self {
        self.survivor = Some(s);
        self
    }
}

pub fn observability_constant(
    a: &TrigPolynomial,
    t: usize,
    prop: &CatPropagator,
) -> Result<ObservabilityReport> {
    a.require_real()?;
    if !a.is_x_only() {
        return Err(Error::InvalidArgument(
            "observation symbol must depend on x only".into(),
        ));
    }
    if t == 0 {
        return Err(Error::InvalidArgument(
            "observation time T must be ≥ 1".into(),
        ));
    }
    let plk = prop.plk();
    let n = plk.n();
    check_degree(a, plk)?;
    let action = SymbolAction::new(a, plk);
    let a2: Vec<f64> = match action.diagonal() {
        Some(d) => d.iter().map(|z| z.re * z.re).collect(),
        None => vec![0.0; n],
    };
    // columns of Uᵗ
    let mut cols: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut e = vec![C64::new(0.0, 0.0); n];
            e[j] = C64::new(1.0, 0.0);
            e
        })
        .collect();
    let mut gram = ComplexMatrix::zeros(n, n);
    for step in 0..t {
        let weighted: Vec<Vec<C64>> = cols
            .iter()
            .map(|c| c.iter().zip(&a2).map(|(z, w)| z * w).collect())
            .collect();
        for i in 0..n {
            for j in i..n {
                let v: C64 = cols[i]
                    .iter()
                    .zip(&weighted[j])
                    .map(|(x, y)| x.conj() * y)
                    .sum();
                gram.as_mut_slice()[i * n + j] += v;
                if j != i {
                    gram.as_mut_slice()[j * n + i] += v.conj();
                }
            }
        }
        if step + 1 < t {
            cols.iter_mut().for_each(|c| prop.apply(c));
        }
    }
    let gram_hermitian_defect = gram.hermitian_defect();
    let (lambda_min, minimizer) = extremal_eigen(&gram, Extremal::Min)?;
    let observable = lambda_min > OBSERVABILITY_FLOOR;
    Ok(ObservabilityReport {
        n_dim: n,
        t,
        lambda_min,
        constant: if observable {
            1.0 / lambda_min
        } else {
            f64::INFINITY
        },
        observable,
        minimizer,
        gram_hermitian_defect,
        gram,
        survivor: None,
    })
}

/// Grid points whose orbit avoids the support of a for |t| ≤ n.
#[derive(Debug, Clone)]
pub struct SurvivorReport {
    pub n: usize,
    pub resolution: usize,
    /// survivors (i, j) ↔ (x, ξ) = (i, j)/resolution
    pub points: Vec<(u32, u32)>,
    /// boxes of side 2/resolution containing a survivor
    pub coarse_boxes: usize,
    /// log₂(points / coarse boxes), 0 for an empty set.
    pub dimension: f64,
    /// dimension < 2
    pub hypothesis_holds: bool,
    /// (dimension/2)·log λ
    pub entropy_estimate: f64,
    /// ½·log λ
    pub entropy_target: f64,
}

/// a² ≤ this counts as vanishing.
pub const VANISHING: f64 = 1e-8;

pub const MAX_RESOLUTION: usize = 2048;

impl SurvivorReport {
    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn below_entropy_target(&self) -> bool {
        self.entropy_estimate < self.entropy_target
    }

    /// "x,xi" rows, then a summary comment "n,count,dimension_estimate".
    pub fn to_csv(&self) -> String {
        let r = self.resolution as f64;
        let mut out = String::from("x,xi\n");
        for (i, j) in &self.points {
            out.push_str(&format!("{},{}\n", *i as f64 / r, *j as f64 / r));
        }
        out.push_str("# n,count,dimension_estimate\n");
        out.push_str(&format!(
            "# {},{},{:.6}\n",
            self.n,
            self.count(),
            self.dimension
        ));
        out
    }
}

pub fn survivor_set(
    a: &TrigPolynomial,
    n: usize,
    resolution: usize,
    map: &HyperbolicToralMap,
) -> Result<SurvivorReport> {
    a.require_real()?;
    if !(2..=MAX_RESOLUTION).contains(&resolution) || resolution % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "grid resolution must be even and in [2, {MAX_RESOLUTION}], got {resolution}"
        )));
    }
    let r = resolution as i64;
    let roots: Vec<C64> = (0..resolution)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / resolution as f64))
        .collect();
    let terms: Vec<((i64, i64), C64)> = a.terms().collect();
    let value = |i: i64, j: i64| -> f64 {
        terms
            .iter()
            .map(|((k1, k2), c)| (c * roots[(k1 * i + k2 * j).rem_euclid(r) as usize]).re)
            .sum()
    };
    let fwd = map.matrix();
    let bwd = map.inverse_matrix();
    let step = |m: &[[i64; 2]; 2], (i, j): (i64, i64)| -> (i64, i64) {
        (
            (m[0][0] * i + m[0][1] * j).rem_euclid(r),
            (m[1][0] * i + m[1][1] * j).rem_euclid(r),
        )
    };
    let vanishes = |p: (i64, i64)| value(p.0, p.1).powi(2) <= VANISHING;
    let mut points = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let start = (i, j);
            if !vanishes(start) {
                continue;
            }
            let (mut f, mut b) = (start, start);
            let mut alive = true;
            for _ in 0..n {
                f = step(&fwd, f);
                b = step(&bwd, b);
                if !vanishes(f) || !vanishes(b) {
                    alive = false;
                    break;
                }
            }
            if alive {
                points.push((i as u32, j as u32));
            }
        }
    }
    let mut boxes: Vec<(u32, u32)> = points.iter().map(|(i, j)| (i / 2, j / 2)).collect();
    boxes.sort_unstable();
    boxes.dedup();
    let dimension = if points.is_empty() {
        0.0
    } else {
        (points.len() as f64 / boxes.len() as f64).log2()
    };
    let log_lambda = map.log_lambda();
    Ok(SurvivorReport {
        n,
        resolution,
        coarse_boxes: boxes.len(),
        dimension,
        hypothesis_holds: dimension < 2.0,
        entropy_estimate: dimension / 2.0 * log_lambda,
        entropy_target: log_lambda / 2.0,
        points,
    })
}
