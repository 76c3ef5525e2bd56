use rand::Rng;
use rayon::prelude::*;

use super::map::HyperbolicToralMap;
use super::trig::TrigPolynomial;
use crate::rng::{chunks, stream};
use crate::{Error, Result};

/// Monte-Carlo estimate of Leb{x : (1/n)·Σ_{t<n} a(Aᵗx) > δ}.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationEstimate {
    pub n: usize,
    pub delta: f64,
    pub samples: usize,
    pub hits: usize,
    pub probability: f64,
    /// log(probability)/n, −∞ when no sample crossed the level.
    pub log_rate: f64,
    /// True when the estimate is zero, i.e. below Monte-Carlo resolution.
    pub below_resolution: bool,
    /// Predicted bound exp(n·H(δ)) when a rate value is supplied.
    pub predicted: Option<f64>,
}

pub fn empirical_deviation(
    map: &HyperbolicToralMap,
    a: &TrigPolynomial,
    delta: f64,
    n: usize,
    samples: usize,
    seed: u64,
    rate: Option<f64>,
) -> Result<DeviationEstimate> {
    a.require_real()?;
    a.require_mean_zero()?;
    if n == 0 || samples == 0 {
        return Err(Error::InvalidArgument(
            "n and samples must be positive".into(),
        ));
    }
    let hits: usize = chunks(samples)
        .into_par_iter()
        .map(|(c, range)| {
            let mut rng = stream(seed, c);
            let mut hits = 0usize;
            for _ in range {
                let mut x: (f64, f64) = (rng.random(), rng.random());
                let mut s = 0.0;
                for t in 0..n {
                    if t > 0 {
                        x = map.apply(x);
                    }
                    s += a.eval_real(x.0, x.1);
                }
                if s / n as f64 > delta {
                    hits += 1;
                }
            }
            hits
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let probability = hits as f64 / samples as f64;
    Ok(DeviationEstimate {
        n,
        delta,
        samples,
        hits,
        probability,
        log_rate: probability.ln() / n as f64,
        below_resolution: hits == 0,
        predicted: rate.map(|h| (n as f64 * h).exp()),
    })
}
