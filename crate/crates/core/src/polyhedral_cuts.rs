//! Valid inequalities for `y >= Q_k(x)` over a box, and their separation.
//!
//! On the unit box every support `W` with `|W| >= k` gives
//!
//! ```text
//! Q_k(x) >= (sum_{i in W} x_i - k + 1) / (|W| - k + 1)
//! ```
//!
//! and on a general box `l <= x <= u`, with `L = Q_k(l)` and any `U > L`,
//!
//! ```text
//! Q_k(x) >= L + (U - L) / (|W| - k + 1) * (sum_{i in W} (x_i - L) / (max(U, u_i) - L) - k + 1)
//! ```
//!
//! For a fixed `U` the right-hand side grows with the sum over `W`, so the
//! best support of each size is a prefix of the coordinates sorted by their
//! rescaled value. Separation therefore reduces to a sort and a prefix scan
//! per candidate threshold.

use std::cmp::Ordering;

use crate::cut::{check_support, CutError, CutFamily, VIOLATION_TOLERANCE};
use crate::quantile::{kth_largest, q_k};

/// Largest dimension accepted by [`brute_force_separation`].
pub const BRUTE_FORCE_MAX_DIM: usize = 15;

#[derive(Debug, Clone, PartialEq)]
pub struct BoxBounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl BoxBounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, CutError> {
        if lower.len() != upper.len() {
            return Err(CutError::DimensionMismatch { expected: lower.len(), actual: upper.len() });
        }
        for (index, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(l.is_finite() && u.is_finite() && l <= u) {
                return Err(CutError::InvalidBox { index, lower: l, upper: u });
            }
        }
        Ok(Self { lower, upper })
    }

    /// The box `[0, 1]^n`.
    pub fn unit(n: usize) -> Self {
        Self { lower: vec![0.0; n], upper: vec![1.0; n] }
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    /// `L = Q_k(l)`.
    pub fn floor(&self, k: usize) -> Result<f64, CutError> {
        Ok(q_k(&self.lower, k)?)
    }
}

/// A quantile cut `y >= sum_i coefficients[i] * x_i + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantileCut {
    pub family: CutFamily,
    /// Support `W`, ascending.
    pub support: Vec<usize>,
    /// `U`; 1 for symmetric cuts.
    pub threshold: f64,
    /// `L`; 0 for symmetric cuts.
    pub floor: f64,
    /// Dense, zero outside the support.
    pub coefficients: Vec<f64>,
    pub constant: f64,
}

impl QuantileCut {
    /// Lower bound on `Q_k(x)` implied by the cut.
    pub fn bound_at(&self, x: &[f64]) -> f64 {
        self.constant + self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }
}

fn check_rank(n: usize, k: usize) -> Result<(), CutError> {
    if n == 0 || k == 0 || k > n {
        return Err(crate::quantile::QuantileError::RankOutOfRange { k, n }.into());
    }
    Ok(())
}

fn check_dim(expected: usize, actual: usize) -> Result<(), CutError> {
    if expected != actual {
        return Err(CutError::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Unit-box lower bound for support `support`.
pub fn symmetric_bound(x: &[f64], k: usize, support: &[usize]) -> Result<f64, CutError> {
    check_rank(x.len(), k)?;
    check_support(support, k, x.len())?;
    let sum: f64 = support.iter().map(|&i| x[i]).sum();
    Ok((sum - k as f64 + 1.0) / (support.len() - k + 1) as f64)
}

/// Linearized unit-box cut for support `support`.
pub fn symmetric_cut(n: usize, k: usize, support: &[usize]) -> Result<QuantileCut, CutError> {
    check_rank(n, k)?;
    check_support(support, k, n)?;
    let scale = 1.0 / (support.len() - k + 1) as f64;
    let mut coefficients = vec![0.0; n];
    for &i in support {
        coefficients[i] = scale;
    }
    let mut support = support.to_vec();
    support.sort_unstable();
    Ok(QuantileCut {
        family: CutFamily::Symmetric,
        support,
        threshold: 1.0,
        floor: 0.0,
        coefficients,
        constant: -((k - 1) as f64) * scale,
    })
}

/// Descending by value, ascending by index on ties.
fn descending(values: &[f64]) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b))
}

/// Best prefix of `order` for the scan `(prefix_sum(w) - k + 1) / (w - k + 1)`
/// over `w = k..=n`. Returns `(w, value)`; the first maximum wins.
fn best_prefix(order: &[usize], scaled: impl Fn(usize) -> f64, k: usize) -> (usize, f64) {
    let mut sum: f64 = order[..k - 1].iter().map(|&i| scaled(i)).sum();
    let mut best = (k, f64::NEG_INFINITY);
    for w in k..=order.len() {
        sum += scaled(order[w - 1]);
        let value = (sum - k as f64 + 1.0) / (w - k + 1) as f64;
        if value > best.1 {
            best = (w, value);
        }
    }
    best
}

/// Most violated unit-box cut at `x`, whether or not it is violated.
pub fn best_symmetric_cut(x: &[f64], k: usize) -> Result<QuantileCut, CutError> {
    check_rank(x.len(), k)?;
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(descending(x));
    let (w, _) = best_prefix(&order, |i| x[i], k);
    symmetric_cut(x.len(), k, &order[..w])
}

/// Unit-box separation: the cut with the largest bound at `x`, if that bound
/// exceeds `y` by more than [`VIOLATION_TOLERANCE`].
pub fn separate_symmetric(x: &[f64], k: usize, y: f64) -> Result<Option<QuantileCut>, CutError> {
    let cut = best_symmetric_cut(x, k)?;
    Ok((cut.bound_at(x) > y + VIOLATION_TOLERANCE).then_some(cut))
}

fn check_threshold(threshold: f64, floor: f64) -> Result<(), CutError> {
    if threshold.partial_cmp(&floor) != Some(Ordering::Greater) {
        return Err(CutError::ThresholdNotAboveFloor { threshold, floor });
    }
    Ok(())
}

/// General-box lower bound for support `support` and threshold `threshold`.
pub fn asymmetric_bound(
    x: &[f64],
    k: usize,
    support: &[usize],
    threshold: f64,
    bounds: &BoxBounds,
) -> Result<f64, CutError> {
    check_dim(bounds.len(), x.len())?;
    check_rank(x.len(), k)?;
    check_support(support, k, x.len())?;
    let floor = bounds.floor(k)?;
    check_threshold(threshold, floor)?;
    let sum: f64 = support
        .iter()
        .map(|&i| (x[i] - floor) / (threshold.max(bounds.upper[i]) - floor))
        .sum();
    Ok(floor + (threshold - floor) / (support.len() - k + 1) as f64 * (sum - k as f64 + 1.0))
}

/// Linearized general-box cut.
pub fn asymmetric_cut(
    k: usize,
    support: &[usize],
    threshold: f64,
    bounds: &BoxBounds,
) -> Result<QuantileCut, CutError> {
    let n = bounds.len();
    check_rank(n, k)?;
    check_support(support, k, n)?;
    let floor = bounds.floor(k)?;
    check_threshold(threshold, floor)?;
    let scale = (threshold - floor) / (support.len() - k + 1) as f64;
    let mut coefficients = vec![0.0; n];
    let mut shift = 0.0;
    for &i in support {
        let denom = threshold.max(bounds.upper[i]) - floor;
        coefficients[i] = scale / denom;
        shift += floor / denom;
    }
    let mut support = support.to_vec();
    support.sort_unstable();
    Ok(QuantileCut {
        family: CutFamily::Asymmetric,
        support,
        threshold,
        floor,
        coefficients,
        constant: floor + scale * (-shift - k as f64 + 1.0),
    })
}

/// Distinct upper bounds strictly above `floor`, ascending.
fn candidate_thresholds(bounds: &BoxBounds, floor: f64) -> Vec<f64> {
    let mut candidates: Vec<f64> = bounds.upper.iter().copied().filter(|&u| u > floor).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    candidates
}

/// Most violated general-box cut at `x`, whether or not it is violated.
/// `None` when no upper bound exceeds `L`.
///
/// Two initial sorts (by `x_i` and by `(x_i - L) / (u_i - L)`) are merged
/// once per candidate threshold, so the whole search is quadratic.
pub fn best_asymmetric_cut(
    x: &[f64],
    k: usize,
    bounds: &BoxBounds,
) -> Result<Option<QuantileCut>, CutError> {
    let n = x.len();
    check_dim(bounds.len(), n)?;
    check_rank(n, k)?;
    let floor = bounds.floor(k)?;
    let upper = &bounds.upper;

    let mut by_value: Vec<usize> = (0..n).collect();
    by_value.sort_by(descending(x));
    let ratio: Vec<f64> = (0..n)
        .map(|i| if upper[i] > floor { (x[i] - floor) / (upper[i] - floor) } else { f64::NAN })
        .collect();
    let mut by_ratio: Vec<usize> = (0..n).filter(|&i| upper[i] > floor).collect();
    by_ratio.sort_by(descending(&ratio));

    let mut best: Option<(f64, f64, Vec<usize>)> = None;
    let mut merged = Vec::with_capacity(n);
    let mut scaled = vec![0.0; n];
    for threshold in candidate_thresholds(bounds, floor) {
        // coordinates with u_i <= U are rescaled by U, the others by u_i
        let span = threshold - floor;
        for i in 0..n {
            scaled[i] = if upper[i] <= threshold { (x[i] - floor) / span } else { ratio[i] };
        }
        let mut capped = by_value.iter().copied().filter(|&i| upper[i] <= threshold).peekable();
        let mut wide = by_ratio.iter().copied().filter(|&i| upper[i] > threshold).peekable();
        merged.clear();
        loop {
            let next = match (capped.peek(), wide.peek()) {
                (Some(&a), Some(&b)) => {
                    if descending(&scaled)(&a, &b) != Ordering::Greater {
                        capped.next()
                    } else {
                        wide.next()
                    }
                }
                (Some(_), None) => capped.next(),
                (None, Some(_)) => wide.next(),
                (None, None) => break,
            };
            merged.extend(next);
        }
        let (w, value) = best_prefix(&merged, |i| scaled[i], k);
        let bound = floor + span * value;
        if best.as_ref().is_none_or(|(b, _, _)| bound > *b) {
            best = Some((bound, threshold, merged[..w].to_vec()));
        }
    }
    best.map(|(_, threshold, support)| asymmetric_cut(k, &support, threshold, bounds)).transpose()
}

/// General-box separation: the best cut over all supports and all thresholds
/// `U in {u_i : u_i > L}`, returned only if it exceeds `y` by more than
/// [`VIOLATION_TOLERANCE`].
pub fn separate_asymmetric(
    x: &[f64],
    k: usize,
    y: f64,
    bounds: &BoxBounds,
) -> Result<Option<QuantileCut>, CutError> {
    Ok(best_asymmetric_cut(x, k, bounds)?.filter(|cut| cut.bound_at(x) > y + VIOLATION_TOLERANCE))
}

/// Exhaustive maximization of [`asymmetric_bound`] over every support with at
/// least `k` elements and every threshold in `{u_i : u_i > L}`. Ties keep the
/// smallest threshold, then the smallest subset mask.
pub fn brute_force_separation(
    x: &[f64],
    k: usize,
    bounds: &BoxBounds,
) -> Result<Option<QuantileCut>, CutError> {
    let n = x.len();
    if n > BRUTE_FORCE_MAX_DIM {
        return Err(CutError::TooLarge { n, max: BRUTE_FORCE_MAX_DIM });
    }
    check_dim(bounds.len(), n)?;
    check_rank(n, k)?;
    let floor = kth_largest(&bounds.lower, k);
    let mut best: Option<(f64, f64, u32)> = None;
    for threshold in candidate_thresholds(bounds, floor) {
        let scaled: Vec<f64> =
            (0..n).map(|i| (x[i] - floor) / (threshold.max(bounds.upper[i]) - floor)).collect();
        for mask in 0u32..(1 << n) {
            let size = mask.count_ones() as usize;
            if size < k {
                continue;
            }
            let sum: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| scaled[i]).sum();
            let bound = floor + (threshold - floor) * (sum - k as f64 + 1.0) / (size - k + 1) as f64;
            if best.is_none_or(|(b, _, _)| bound > b) {
                best = Some((bound, threshold, mask));
            }
        }
    }
    best.map(|(_, threshold, mask)| {
        let support: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        asymmetric_cut(k, &support, threshold, bounds)
    })
    .transpose()
}
