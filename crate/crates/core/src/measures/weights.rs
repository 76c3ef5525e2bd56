use crate::quantum::PlanckData;
use crate::{Error, Result};

/// Discrete time weights θ_t ≥ 0 with Σθ_t = 1, supported on
/// t = offset, offset + 1, ….
#[derive(Debug, Clone, PartialEq)]
pub struct TimeWeights {
    weights: Vec<f64>,
    offset: i64,
}

impl TimeWeights {
    pub fn new(weights: Vec<f64>, offset: i64) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidArgument("time weights are empty".into()));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::InvalidArgument(
                "time weights must be finite and ≥ 0".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "time weights sum to {total}, expected 1"
            )));
        }
        Ok(Self { weights, offset })
    }

    /// Uniform on {0, …, T−1}.
    pub fn uniform(t: usize) -> Result<Self> {
        if t == 0 {
            return Err(Error::InvalidArgument(
                "averaging window must be ≥ 1".into(),
            ));
        }
        Self::new(vec![1.0 / t as f64; t], 0)
    }

    /// Point mass at time t.
    pub fn delta(t: i64) -> Self {
        Self {
            weights: vec![1.0],
            offset: t,
        }
    }

    /// The default window T = N, the discrete analog of times of order 1/ℏ.
    pub fn long_window(plk: PlanckData) -> Self {
        Self::uniform(plk.n()).expect("N ≥ 2")
    }

    /// Short window T = ⌊log N⌋.
    pub fn short_window(plk: PlanckData) -> Self {
        Self::uniform(((plk.n() as f64).ln().floor() as usize).max(1)).expect("T ≥ 1")
    }

    pub fn shifted(&self, s: i64) -> Self {
        Self {
            weights: self.weights.clone(),
            offset: self.offset + s,
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// (t, θ_t) pairs in increasing t.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, w)| (self.offset + i as i64, *w))
    }
}
