use anosov_linalg::vector::norm_sqr;
use anosov_linalg::{extremal_eigenvalue, operator_norm, ComplexMatrix, Extremal, C64};
use rayon::prelude::*;

use super::partition::SmoothPartition;
use crate::quantum::CatPropagator;
use crate::{Error, Result};

/// Largest word count enumerated for weight tables.
pub const WORD_CAP: f64 = 1e6;

/// Refined element π_α = P̂_{α_{n−1}}(n−1)···P̂_{α_0} with Â(t) = U⁻ᵗÂUᵗ.
#[derive(Debug, Clone)]
pub struct RefinedElement {
    pub word: Vec<usize>,
    pub matrix: ComplexMatrix,
}

impl RefinedElement {
    pub fn norm(&self) -> Result<f64> {
        Ok(operator_norm(&self.matrix)?)
    }
}

/// A partition quantized at one N together with the propagator.
#[derive(Debug, Clone)]
pub struct QuantumPartition<'a> {
    prop: &'a CatPropagator,
    diags: Vec<Vec<f64>>,
}

impl<'a> QuantumPartition<'a> {
    pub fn new(partition: &SmoothPartition, prop: &'a CatPropagator) -> Result<Self> {
        Ok(Self {
            prop,
            diags: partition.diagonals(prop.plk())?,
        })
    }

    pub fn k(&self) -> usize {
        self.diags.len()
    }

    pub fn n_dim(&self) -> usize {
        self.prop.plk().n()
    }

    pub fn propagator(&self) -> &CatPropagator {
        self.prop
    }

    pub fn diagonal(&self, letter: usize) -> &[f64] {
        &self.diags[letter]
    }

    fn word_count(&self, n: usize) -> Result<usize> {
        let count = (self.k() as f64).powi(n as i32);
        if count > WORD_CAP {
            return Err(Error::EnumerationCap {
                count,
                cap: WORD_CAP,
            });
        }
        Ok(count as usize)
    }

    fn check_word(&self, word: &[usize]) -> Result<()> {
        if word.is_empty() {
            return Err(Error::InvalidArgument("words have length ≥ 1".into()));
        }
        if let Some(bad) = word.iter().find(|&&a| a >= self.k()) {
            return Err(Error::InvalidArgument(format!(
                "letter {bad} outside an alphabet of {}",
                self.k()
            )));
        }
        Ok(())
    }

    fn scale(&self, letter: usize, v: &mut [C64]) {
        v.iter_mut()
            .zip(&self.diags[letter])
            .for_each(|(z, d)| *z *= d);
    }

    /// π_α v
    pub fn apply(&self, word: &[usize], v: &mut [C64]) -> Result<()> {
        self.check_word(word)?;
        self.scale(word[0], v);
        for &a in &word[1..] {
            self.prop.apply(v);
            self.scale(a, v);
        }
        self.prop.apply_power(v, -(word.len() as i64 - 1));
        Ok(())
    }

    /// π_α† v
    pub fn apply_adjoint(&self, word: &[usize], v: &mut [C64]) -> Result<()> {
        self.check_word(word)?;
        let n = word.len();
        self.prop.apply_power(v, n as i64 - 1);
        self.scale(word[n - 1], v);
        for &a in word[..n - 1].iter().rev() {
            self.prop.apply_adjoint(v);
            self.scale(a, v);
        }
        Ok(())
    }

    pub fn element(&self, word: &[usize]) -> Result<RefinedElement> {
        self.check_word(word)?;
        let n = self.n_dim();
        let mut matrix = ComplexMatrix::zeros(n, n);
        let mut col = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[j] = C64::new(1.0, 0.0);
            self.apply(word, &mut col)?;
            matrix.set_column(j, &col);
        }
        Ok(RefinedElement {
            word: word.to_vec(),
            matrix,
        })
    }

    /// Letters of the word with index `index` among words of length n;
    /// α_0 is the most significant digit.
    pub fn word(&self, n: usize, mut index: usize) -> Vec<usize> {
        let k = self.k();
        let mut w = vec![0; n];
        for slot in w.iter_mut().rev() {
            *slot = index % k;
            index /= k;
        }
        w
    }

    /// ‖π_α v‖² for every α of length n, indexed as in [`Self::word`].
    pub fn plus_weights(&self, v: &[C64], n: usize) -> Result<Vec<f64>> {
        let count = self.word_count(n)?;
        if n == 0 {
            return Ok(vec![norm_sqr(v)]);
        }
        let k = self.k();
        let stride = count / k;
        let mut out = vec![0.0; count];
        out.par_chunks_mut(stride)
            .enumerate()
            .for_each(|(first, chunk)| {
                let mut w = v.to_vec();
                self.scale(first, &mut w);
                self.descend_plus(w, n - 1, chunk);
            });
        Ok(out)
    }

    fn descend_plus(&self, v: Vec<C64>, remaining: usize, out: &mut [f64]) {
        if remaining == 0 {
            out[0] = norm_sqr(&v);
            return;
        }
        let mut w = v;
        self.prop.apply(&mut w);
        let stride = out.len() / self.k();
        for (a, chunk) in out.chunks_mut(stride).enumerate() {
            let mut child = w.clone();
            self.scale(a, &mut child);
            self.descend_plus(child, remaining - 1, chunk);
        }
    }

    /// ‖π_α† v‖² for every α of length n, indexed as in [`Self::word`].
    pub fn minus_weights(&self, v: &[C64], n: usize) -> Result<Vec<f64>> {
        let count = self.word_count(n)?;
        if n == 0 {
            return Ok(vec![norm_sqr(v)]);
        }
        let k = self.k();
        let mut start = v.to_vec();
        self.prop.apply_power(&mut start, n as i64 - 1);
        // Letters are chosen last-to-first, so the table fills in
        // reversed-digit order and is permuted at the end.
        let stride = count / k;
        let mut reversed = vec![0.0; count];
        reversed
            .par_chunks_mut(stride)
            .enumerate()
            .for_each(|(last, chunk)| {
                let mut w = start.clone();
                self.scale(last, &mut w);
                self.descend_minus(w, n - 1, chunk);
            });
        let mut out = vec![0.0; count];
        for (r, value) in reversed.into_iter().enumerate() {
            out[reverse_digits(r, k, n)] = value;
        }
        Ok(out)
    }

    fn descend_minus(&self, v: Vec<C64>, remaining: usize, out: &mut [f64]) {
        if remaining == 0 {
            out[0] = norm_sqr(&v);
            return;
        }
        let mut w = v;
        self.prop.apply_adjoint(&mut w);
        let stride = out.len() / self.k();
        for (a, chunk) in out.chunks_mut(stride).enumerate() {
            let mut child = w.clone();
            self.scale(a, &mut child);
            self.descend_minus(child, remaining - 1, chunk);
        }
    }
}

fn reverse_digits(mut r: usize, k: usize, n: usize) -> usize {
    let mut out = 0;
    for _ in 0..n {
        out = out * k + r % k;
        r /= k;
    }
    out
}

/// Result of the pruned search for max_{|β|=L} ‖D_{β_{L−1}}U···UD_{β_0}‖.
#[derive(Debug, Clone)]
pub struct RefinedNormSearch {
    pub length: usize,
    pub value: f64,
    pub word: Vec<usize>,
    pub nodes: usize,
    pub exact_evaluations: usize,
}

/// Default node budget of the pruned word search.
pub const NODE_BUDGET: usize = 2_000_000;

/// max over words of length L of ‖π_β‖, by depth-first search over
/// prefixes carrying G = MM† (M the prefix product). Children satisfy
/// λ_max(G_child) ≤ λ_max(G_parent), so a subtree is skipped once the
/// row-sum bound of its root is no larger than the best value found.
pub fn max_refined_norm(
    qp: &QuantumPartition<'_>,
    length: usize,
    node_budget: usize,
) -> Result<RefinedNormSearch> {
    let n = qp.n_dim();
    if length == 0 {
        return Ok(RefinedNormSearch {
            length,
            value: 1.0,
            word: Vec::new(),
            nodes: 0,
            exact_evaluations: 0,
        });
    }
    let k = qp.k();
    let roots: Vec<Vec<C64>> = (0..k)
        .map(|a| {
            let mut g = vec![C64::new(0.0, 0.0); n * n];
            for (i, d) in qp.diagonal(a).iter().enumerate() {
                g[i * n + i] = C64::new(d * d, 0.0);
            }
            g
        })
        .collect();

    // Greedy descent for a starting lower bound shared by every branch.
    let greedy = {
        let mut best_word = Vec::new();
        let mut g = roots
            .iter()
            .enumerate()
            .max_by(|a, b| max_diag(n, a.1).total_cmp(&max_diag(n, b.1)))
            .map(|(a, g)| {
                best_word.push(a);
                g.clone()
            })
            .expect("K ≥ 1");
        for _ in 1..length {
            let c = conjugate(qp.propagator(), n, &g);
            let (a, child) = (0..k)
                .map(|a| (a, scale_both(n, &c, qp.diagonal(a))))
                .max_by(|x, y| max_diag(n, &x.1).total_cmp(&max_diag(n, &y.1)))
                .expect("K ≥ 1");
            best_word.push(a);
            g = child;
        }
        (top_eigenvalue(n, &g)?, best_word)
    };

    let mut branches: Vec<Result<Search>> = roots
        .into_par_iter()
        .enumerate()
        .map(|(a, g)| {
            let mut s = Search {
                qp,
                n,
                length,
                best: greedy.0,
                word: greedy.1.clone(),
                prefix: vec![a],
                nodes: 1,
                exact: 0,
                budget: node_budget / k + 1,
            };
            s.visit(g)?;
            Ok(s)
        })
        .collect();
    let mut out = RefinedNormSearch {
        length,
        value: greedy.0,
        word: greedy.1,
        nodes: 0,
        exact_evaluations: 1,
    };
    for s in branches.drain(..) {
        let s = s?;
        out.nodes += s.nodes;
        out.exact_evaluations += s.exact;
        if s.best > out.value {
            out.value = s.best;
            out.word = s.word;
        }
    }
    out.value = out.value.max(0.0).sqrt();
    Ok(out)
}

struct Search<'q, 'a> {
    qp: &'q QuantumPartition<'a>,
    n: usize,
    length: usize,
    best: f64,
    word: Vec<usize>,
    prefix: Vec<usize>,
    nodes: usize,
    exact: usize,
    budget: usize,
}

impl Search<'_, '_> {
    fn visit(&mut self, g: Vec<C64>) -> Result<()> {
        let n = self.n;
        if self.prefix.len() == self.length {
            if row_sum_bound(n, &g) > self.best {
                self.exact += 1;
                let lam = top_eigenvalue(n, &g)?;
                if lam > self.best {
                    self.best = lam;
                    self.word = self.prefix.clone();
                }
            }
            return Ok(());
        }
        let c = conjugate(self.qp.propagator(), n, &g);
        drop(g);
        for a in 0..self.qp.k() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(Error::EnumerationCap {
                    count: self.nodes as f64,
                    cap: self.budget as f64,
                });
            }
            let child = scale_both(n, &c, self.qp.diagonal(a));
            if row_sum_bound(n, &child) <= self.best {
                continue;
            }
            self.prefix.push(a);
            self.visit(child)?;
            self.prefix.pop();
        }
        Ok(())
    }
}

fn top_eigenvalue(n: usize, g: &[C64]) -> Result<f64> {
    let m = ComplexMatrix::from_row_major(n, n, g.to_vec())?;
    Ok(extremal_eigenvalue(&m, Extremal::Max)?)
}

fn max_diag(n: usize, g: &[C64]) -> f64 {
    (0..n)
        .map(|i| g[i * n + i].re)
        .fold(f64::NEG_INFINITY, f64::max)
}

/// ‖G‖_∞ ≥ λ_max(G)
fn row_sum_bound(n: usize, g: &[C64]) -> f64 {
    g.chunks(n)
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// D G D for real diagonal D.
fn scale_both(n: usize, g: &[C64], d: &[f64]) -> Vec<C64> {
    let mut out = g.to_vec();
    for (i, row) in out.chunks_mut(n).enumerate() {
        let di = d[i];
        row.iter_mut().zip(d).for_each(|(z, dj)| *z *= di * dj);
    }
    out
}

/// U G U† for Hermitian G, using only vector applications of U:
/// X = UG column by column (column j of G is the conjugate of row j),
/// then UGU† = U X†, whose row j is the conjugate of its column j.
fn conjugate(u: &CatPropagator, n: usize, g: &[C64]) -> Vec<C64> {
    let mut x_cols = vec![C64::new(0.0, 0.0); n * n];
    for (j, col) in x_cols.chunks_mut(n).enumerate() {
        col.iter_mut()
            .zip(&g[j * n..(j + 1) * n])
            .for_each(|(c, z)| *c = z.conj());
        u.apply(col);
    }
    let mut out = vec![C64::new(0.0, 0.0); n * n];
    for (j, row) in out.chunks_mut(n).enumerate() {
        for (i, r) in row.iter_mut().enumerate() {
            *r = x_cols[i * n + j].conj();
        }
        u.apply(row);
        row.iter_mut().for_each(|z| *z = z.conj());
    }
    out
}
