//! Order statistics used as ground truth everywhere else in the crate.
//!
//! `q_k(values, k)` is the k-th largest element (1-indexed): `k = 1` is the
//! maximum and `k = n` the minimum. The scheduling objective talks about a
//! τ-quantile instead, the `⌈τ·n⌉`-th smallest element; [`tau_to_k`] converts
//! between the two conventions.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuantileError {
    #[error("empty population")]
    Empty,
    #[error("rank k = {k} out of range 1..={n}")]
    RankOutOfRange { k: usize, n: usize },
    #[error("quantile level tau = {0} outside (0, 1]")]
    TauOutOfRange(f64),
}

/// A validated `(values, k)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileQuery {
    values: Vec<f64>,
    k: usize,
}

impl QuantileQuery {
    pub fn new(values: Vec<f64>, k: usize) -> Result<Self, QuantileError> {
        check_rank(values.len(), k)?;
        Ok(Self { values, k })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn evaluate(&self) -> f64 {
        kth_largest(&self.values, self.k)
    }
}

fn check_rank(n: usize, k: usize) -> Result<(), QuantileError> {
    if n == 0 {
        return Err(QuantileError::Empty);
    }
    if k == 0 || k > n {
        return Err(QuantileError::RankOutOfRange { k, n });
    }
    Ok(())
}

/// The k-th largest element of `values`.
pub fn q_k(values: &[f64], k: usize) -> Result<f64, QuantileError> {
    check_rank(values.len(), k)?;
    Ok(kth_largest(values, k))
}

// Full sort; populations are small in every caller.
pub(crate) fn kth_largest(values: &[f64], k: usize) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    sorted[k - 1]
}

/// Indices of the `k` largest entries, ties broken by lowest index, returned
/// in ascending index order.
pub fn top_k_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut top: Vec<usize> = order.into_iter().take(k).collect();
    top.sort_unstable();
    top
}

/// Rank `k` such that `q_k(values, k)` is the τ-quantile of a population of
/// size `n`, i.e. the `⌈τ·n⌉`-th smallest element.
pub fn tau_to_k(n: usize, tau: f64) -> Result<usize, QuantileError> {
    if n == 0 {
        return Err(QuantileError::Empty);
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(QuantileError::TauOutOfRange(tau));
    }
    Ok(n + 1 - smallest_rank(n, tau))
}

/// `⌈τ·n⌉`, clamped to `1..=n`. The product is nudged down by a few ulps so
/// that e.g. `0.3 * 10` does not round up to 4.
pub(crate) fn smallest_rank(n: usize, tau: f64) -> usize {
    let scaled = tau * n as f64;
    let rank = (scaled - scaled * 4.0 * f64::EPSILON).ceil() as usize;
    rank.clamp(1, n)
}
