use rand::Rng;
use rayon::prelude::*;

use super::map::HyperbolicToralMap;
use crate::rng::{chunks, stream};
use crate::{Error, Result};

/// Measures from which orbit starting points are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSampler {
    Lebesgue,
    /// Uniform measure on finitely many atoms (a point mass or a periodic orbit).
    Atoms(Vec<(f64, f64)>),
}

impl MeasureSampler {
    /// Uniform measure on the orbit of `start` under the map, `period` points.
    pub fn periodic_orbit(map: &HyperbolicToralMap, start: (f64, f64), period: usize) -> Self {
        let mut pts = Vec::with_capacity(period);
        let mut x = start;
        for _ in 0..period {
            pts.push(x);
            x = map.apply(x);
        }
        MeasureSampler::Atoms(pts)
    }

    fn draw(&self, rng: &mut impl Rng) -> (f64, f64) {
        match self {
            MeasureSampler::Lebesgue => (rng.random::<f64>(), rng.random::<f64>()),
            MeasureSampler::Atoms(pts) => pts[rng.random_range(0..pts.len())],
        }
    }
}

/// Cylinder-entropy estimate for a K×K grid partition.
#[derive(Debug, Clone)]
pub struct KsReport {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    /// H_m for m = 1..=n (plug-in block entropies, nats).
    pub block_entropies: Vec<f64>,
    /// Number of distinct cylinders seen at each length.
    pub cylinder_counts: Vec<usize>,
    /// Primary estimate: H_m − H_{m−1} at `estimate_order`.
    pub estimate: f64,
    /// Largest m ≤ n with at least 10 samples per observed cylinder.
    pub estimate_order: usize,
    /// H_n / n.
    pub per_symbol: f64,
    /// Cylinders of length n hit fewer than 10 times.
    pub undersampled_cylinders: usize,
    /// max over splits p of H_n − H_p − H(symbols p..n); ≤ 0 up to rounding.
    pub subadditivity_defect: f64,
    /// Ruelle bound −∫φᵘ = log λ.
    pub ruelle_bound: f64,
}

pub fn ks_entropy_estimate(
    map: &HyperbolicToralMap,
    sampler: &MeasureSampler,
    k: usize,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<KsReport> {
    if k == 0 || n == 0 || samples == 0 {
        return Err(Error::InvalidArgument(
            "K, n and samples must be positive".into(),
        ));
    }
    let bits = usize::BITS as usize - (k * k - 1).max(1).leading_zeros() as usize;
    if bits * n > 128 {
        return Err(Error::InvalidArgument(format!(
            "{n} symbols of {bits} bits do not fit a 128-bit cylinder code"
        )));
    }
    if let MeasureSampler::Atoms(p) = sampler {
        if p.is_empty() {
            return Err(Error::InvalidArgument("empty atom list".into()));
        }
    }
    let kf = k as f64;
    let cell = |(x, y): (f64, f64)| -> u128 {
        let i = ((x * kf) as usize).min(k - 1);
        let j = ((y * kf) as usize).min(k - 1);
        (i * k + j) as u128
    };
    let parts: Vec<Vec<u128>> = chunks(samples)
        .into_par_iter()
        .map(|(c, range)| {
            let mut rng = stream(seed, c);
            range
                .map(|_| {
                    let mut x = sampler.draw(&mut rng);
                    let mut code = 0u128;
                    for t in 0..n {
                        if t > 0 {
                            x = map.apply(x);
                        }
                        code = (code << bits) | cell(x);
                    }
                    code
                })
                .collect()
        })
        .collect();
    let mut codes: Vec<u128> = parts.into_iter().flatten().collect();
    codes.sort_unstable();

    let total = samples as f64;
    let mut block_entropies = Vec::with_capacity(n);
    let mut cylinder_counts = Vec::with_capacity(n);
    for m in 1..=n {
        let shift = bits * (n - m);
        let (h, c) = sorted_entropy(codes.iter().map(|c| c >> shift), total);
        block_entropies.push(h);
        cylinder_counts.push(c);
    }
    let undersampled_cylinders = run_lengths(codes.iter().copied())
        .into_iter()
        .filter(|&r| r < 10)
        .count();

    let mut subadditivity_defect = f64::NEG_INFINITY;
    for p in 1..n {
        let mask = if bits * (n - p) == 128 {
            u128::MAX
        } else {
            (1u128 << (bits * (n - p))) - 1
        };
        let mut tail: Vec<u128> = codes.iter().map(|c| c & mask).collect();
        tail.sort_unstable();
        let (h_tail, _) = sorted_entropy(tail.into_iter(), total);
        let d = block_entropies[n - 1] - block_entropies[p - 1] - h_tail;
        subadditivity_defect = subadditivity_defect.max(d);
    }
    if n == 1 {
        subadditivity_defect = 0.0;
    }

    let estimate_order = (1..=n)
        .rev()
        .find(|&m| cylinder_counts[m - 1] * 10 <= samples)
        .unwrap_or(1);
    let estimate = if estimate_order == 1 {
        block_entropies[0]
    } else {
        block_entropies[estimate_order - 1] - block_entropies[estimate_order - 2]
    };
    Ok(KsReport {
        n,
        k,
        samples,
        per_symbol: block_entropies[n - 1] / n as f64,
        block_entropies,
        cylinder_counts,
        estimate: estimate.max(0.0),
        estimate_order,
        undersampled_cylinders,
        subadditivity_defect,
        ruelle_bound: map.log_lambda(),
    })
}

fn run_lengths(sorted: impl Iterator<Item = u128>) -> Vec<usize> {
    let mut runs = Vec::new();
    let mut prev: Option<u128> = None;
    for c in sorted {
        if prev == Some(c) {
            *runs.last_mut().unwrap() += 1;
        } else {
            runs.push(1);
            prev = Some(c);
        }
    }
    runs
}

/// Plug-in entropy and number of distinct values of a sorted code stream.
fn sorted_entropy(sorted: impl Iterator<Item = u128>, total: f64) -> (f64, usize) {
    let runs = run_lengths(sorted);
    let h = runs
        .iter()
        .map(|&r| {
            let p = r as f64 / total;
            -p * p.ln()
        })
        .sum::<f64>();
    (h.max(0.0), runs.len())
}
