//! Constraint families for `y >= Q_k(A x)` where `A >= 0` is a scenario
//! matrix (rows are scenarios, columns binary decisions).
//!
//! All of them rest on the max-min form of the quantile: for any scenario set
//! `P` with `|P| >= k`, `Q_k(A x) >= min_{i in P} (A x)_i`.
//!
//! * [`simple_generated_cut`]: tight no-good style bound at an incumbent.
//! * [`subset_cut`]: column minima over `P`; [`per_column_subsets`] picks one
//!   `P` per column.
//! * [`generated_subset_cut`]: subset cut made tight at an incumbent.
//! * [`general_subset_cut`]: box and `β` generalization of the previous one.
//!
//! Separation of the subset family is NP-hard, so only exhaustive (small `n`)
//! and heuristic separation are provided.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cut::{check_support, CutError, CutFamily};
use crate::polyhedral_cuts::BoxBounds;
use crate::quantile::{kth_largest, top_k_indices, QuantileError};

/// Largest scenario count accepted by the exhaustive separators.
pub const EXHAUSTIVE_MAX_ROWS: usize = 20;

/// Tolerance under which a separation point coordinate counts as integral.
const INTEGRALITY_TOLERANCE: f64 = 1e-9;

/// Dense row-major matrix, rows = scenarios, columns = decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl ScenarioMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, CutError> {
        if data.len() != rows * cols {
            return Err(CutError::DimensionMismatch { expected: rows * cols, actual: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, CutError> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(CutError::DimensionMismatch { expected: cols, actual: row.len() });
            }
            data.extend_from_slice(row);
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.cols + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.cols..(row + 1) * self.cols]
    }

    pub fn column(&self, col: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, col)).collect()
    }

    /// `A x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, v)| a * v).sum()).collect()
    }

    pub fn check_nonnegative(&self) -> Result<(), CutError> {
        match self.data.iter().position(|&v| v.is_nan() || v < 0.0) {
            Some(p) => Err(CutError::NegativeEntry {
                row: p / self.cols,
                col: p % self.cols,
                value: self.data[p],
            }),
            None => Ok(()),
        }
    }

    fn column_min(&self, col: usize, scenarios: &[usize]) -> f64 {
        scenarios.iter().map(|&i| self.get(i, col)).fold(f64::INFINITY, f64::min)
    }

    fn column_max(&self, col: usize, scenarios: &[usize]) -> f64 {
        scenarios.iter().map(|&i| self.get(i, col)).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// A cut `y >= sum_j coefficients[j] * x_j + constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetCut {
    pub family: CutFamily,
    /// Scenario set `P`, ascending; `None` for the simple family.
    pub scenarios: Option<Vec<usize>>,
    /// `β`, general family only.
    pub beta: Option<Vec<f64>>,
    pub coefficients: Vec<f64>,
    pub constant: f64,
}

impl SubsetCut {
    pub fn rhs_at(&self, x: &[f64]) -> f64 {
        self.constant + self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum::<f64>()
    }

    /// True when every coefficient and the constant are zero.
    pub fn is_trivial(&self) -> bool {
        self.constant == 0.0 && self.coefficients.iter().all(|&c| c == 0.0)
    }
}

fn check_rank(n: usize, k: usize) -> Result<(), CutError> {
    if k == 0 || k > n {
        return Err(QuantileError::RankOutOfRange { k, n }.into());
    }
    Ok(())
}

fn check_incumbent(a: &ScenarioMatrix, incumbent: &[f64]) -> Result<(), CutError> {
    if incumbent.len() != a.cols {
        return Err(CutError::DimensionMismatch { expected: a.cols, actual: incumbent.len() });
    }
    match incumbent.iter().position(|&v| v != 0.0 && v != 1.0) {
        Some(index) => Err(CutError::NonBinaryIncumbent { index, value: incumbent[index] }),
        None => Ok(()),
    }
}

/// `Q_k(A x) >= Q_k(A x~) * (sum_j x~_j x_j - sum_j x~_j + 1)`.
pub fn simple_generated_cut(
    a: &ScenarioMatrix,
    k: usize,
    incumbent: &[f64],
) -> Result<SubsetCut, CutError> {
    check_rank(a.rows, k)?;
    a.check_nonnegative()?;
    check_incumbent(a, incumbent)?;
    let value = kth_largest(&a.apply(incumbent), k);
    let ones: f64 = incumbent.iter().sum();
    Ok(SubsetCut {
        family: CutFamily::Simple,
        scenarios: None,
        beta: None,
        coefficients: incumbent.iter().map(|&v| value * v).collect(),
        constant: value * (1.0 - ones),
    })
}

/// `Q_k(A x) >= sum_j min_{i in P} a_ij x_j`.
pub fn subset_cut(a: &ScenarioMatrix, k: usize, scenarios: &[usize]) -> Result<SubsetCut, CutError> {
    check_rank(a.rows, k)?;
    check_support(scenarios, k, a.rows)?;
    let mut scenarios = scenarios.to_vec();
    scenarios.sort_unstable();
    Ok(SubsetCut {
        family: CutFamily::Subset,
        coefficients: (0..a.cols).map(|j| a.column_min(j, &scenarios)).collect(),
        scenarios: Some(scenarios),
        beta: None,
        constant: 0.0,
    })
}

/// One subset cut per column `j`, with `P_j` the rows of the `k` largest
/// entries of that column. Duplicate scenario sets are emitted once, in
/// order of first appearance.
pub fn per_column_subsets(a: &ScenarioMatrix, k: usize) -> Result<Vec<SubsetCut>, CutError> {
    check_rank(a.rows, k)?;
    let mut seen = BTreeSet::new();
    let mut cuts = Vec::new();
    for j in 0..a.cols {
        let scenarios = top_k_indices(&a.column(j), k);
        if seen.insert(scenarios.clone()) {
            cuts.push(subset_cut(a, k, &scenarios)?);
        }
    }
    Ok(cuts)
}

/// Subset cut tight at the incumbent: with `P` the rows of the `k` largest
/// entries of `A x~`,
///
/// ```text
/// Q_k(A x) >= Q_k(A x~) + sum_{x~_j = 1} (x_j - 1) max_P a_ij + sum_{x~_j = 0} x_j min_P a_ij
/// ```
pub fn generated_subset_cut(
    a: &ScenarioMatrix,
    k: usize,
    incumbent: &[f64],
) -> Result<SubsetCut, CutError> {
    check_rank(a.rows, k)?;
    check_incumbent(a, incumbent)?;
    let risk = a.apply(incumbent);
    let scenarios = top_k_indices(&risk, k);
    let value = scenarios.iter().map(|&i| risk[i]).fold(f64::INFINITY, f64::min);
    let mut constant = value;
    let coefficients = (0..a.cols)
        .map(|j| {
            if incumbent[j] == 1.0 {
                let high = a.column_max(j, &scenarios);
                constant -= high;
                high
            } else {
                a.column_min(j, &scenarios)
            }
        })
        .collect();
    Ok(SubsetCut {
        family: CutFamily::GeneratedSubset,
        scenarios: Some(scenarios),
        beta: None,
        coefficients,
        constant,
    })
}

/// General subset cut, valid for every `x` in `bounds`:
///
/// ```text
/// Q_k(A x) >= sum_j (1 - β_j) min_P(a_ij) (x_j - l_j) + sum_j β_j max_P(a_ij) (x_j - u_j)
///           + min_P sum_j (1 - β_j) a_ij l_j + min_P sum_j β_j a_ij u_j
/// ```
pub fn general_subset_cut(
    a: &ScenarioMatrix,
    k: usize,
    scenarios: &[usize],
    beta: &[f64],
    bounds: &BoxBounds,
) -> Result<SubsetCut, CutError> {
    check_rank(a.rows, k)?;
    check_support(scenarios, k, a.rows)?;
    for len in [beta.len(), bounds.len()] {
        if len != a.cols {
            return Err(CutError::DimensionMismatch { expected: a.cols, actual: len });
        }
    }
    if let Some(index) = beta.iter().position(|b| !(0.0..=1.0).contains(b)) {
        return Err(CutError::BetaOutOfRange { index, value: beta[index] });
    }
    let (lower, upper) = (bounds.lower(), bounds.upper());
    let mut scenarios = scenarios.to_vec();
    scenarios.sort_unstable();

    let mut coefficients = Vec::with_capacity(a.cols);
    let mut constant = 0.0;
    for j in 0..a.cols {
        let low_part = (1.0 - beta[j]) * a.column_min(j, &scenarios);
        let high_part = beta[j] * a.column_max(j, &scenarios);
        coefficients.push(low_part + high_part);
        constant -= low_part * lower[j] + high_part * upper[j];
    }
    let min_over_p = |weight: &dyn Fn(usize, usize) -> f64| {
        scenarios
            .iter()
            .map(|&i| (0..a.cols).map(|j| weight(i, j)).sum::<f64>())
            .fold(f64::INFINITY, f64::min)
    };
    constant += min_over_p(&|i, j| (1.0 - beta[j]) * a.get(i, j) * lower[j]);
    constant += min_over_p(&|i, j| beta[j] * a.get(i, j) * upper[j]);

    Ok(SubsetCut {
        family: CutFamily::GeneralSubset,
        scenarios: Some(scenarios),
        beta: Some(beta.to_vec()),
        coefficients,
        constant,
    })
}

/// Lexicographic enumeration of the `k`-subsets of `0..n`.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        visit(&current);
        let Some(pos) = (0..k).rev().find(|&p| current[p] < n - k + p) else {
            return;
        };
        current[pos] += 1;
        for q in pos + 1..k {
            current[q] = current[q - 1] + 1;
        }
    }
}

fn subset_value(a: &ScenarioMatrix, scenarios: &[usize], point: &[f64]) -> f64 {
    (0..a.cols).map(|j| a.column_min(j, scenarios) * point[j]).sum()
}

fn check_exhaustive(a: &ScenarioMatrix, k: usize, point: &[f64]) -> Result<(), CutError> {
    check_rank(a.rows, k)?;
    if a.rows > EXHAUSTIVE_MAX_ROWS {
        return Err(CutError::TooLarge { n: a.rows, max: EXHAUSTIVE_MAX_ROWS });
    }
    if point.len() != a.cols {
        return Err(CutError::DimensionMismatch { expected: a.cols, actual: point.len() });
    }
    Ok(())
}

/// Subset cut maximizing `sum_j min_{i in P} a_ij x*_j`. Only `|P| = k` is
/// enumerated: enlarging `P` can only lower every column minimum.
pub fn separate_subset_exhaustive(
    a: &ScenarioMatrix,
    k: usize,
    point: &[f64],
) -> Result<SubsetCut, CutError> {
    check_exhaustive(a, k, point)?;
    let mut best: Option<(f64, Vec<usize>)> = None;
    for_each_subset(a.rows, k, |p| {
        let value = subset_value(a, p, point);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, p.to_vec()));
        }
    });
    let (_, scenarios) = best.expect("at least one subset");
    subset_cut(a, k, &scenarios)
}

/// General subset cut on the unit box maximizing its right-hand side at
/// `point`.
///
/// `β_j` is fixed to 1 where `x*_j = 1` and to 0 where `x*_j = 0`; either
/// choice is dominated otherwise. The remaining fractional coordinates are
/// enumerated over `{0, 1}` jointly with `P` when there are at most
/// `max_free_beta` of them, and rounded otherwise.
pub fn separate_general_exhaustive(
    a: &ScenarioMatrix,
    k: usize,
    point: &[f64],
    max_free_beta: usize,
) -> Result<SubsetCut, CutError> {
    check_exhaustive(a, k, point)?;
    let unit = BoxBounds::unit(a.cols);
    let fractional: Vec<usize> = (0..a.cols)
        .filter(|&j| point[j] > INTEGRALITY_TOLERANCE && point[j] < 1.0 - INTEGRALITY_TOLERANCE)
        .collect();
    let base: Vec<f64> = point.iter().map(|&v| if v >= 0.5 { 1.0 } else { 0.0 }).collect();
    let free = if fractional.len() <= max_free_beta { fractional.len() } else { 0 };

    let mut best: Option<(f64, SubsetCut)> = None;
    let mut failure = None;
    for_each_subset(a.rows, k, |p| {
        for mask in 0u64..(1u64 << free) {
            let mut beta = base.clone();
            for (bit, &j) in fractional.iter().take(free).enumerate() {
                beta[j] = (mask >> bit & 1) as f64;
            }
            match general_subset_cut(a, k, p, &beta, &unit) {
                Ok(cut) => {
                    let value = cut.rhs_at(point);
                    if best.as_ref().is_none_or(|(b, _)| value > *b) {
                        best = Some((value, cut));
                    }
                }
                Err(e) => failure = Some(e),
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.expect("at least one subset").1)
}

#[derive(Debug, Clone, PartialEq)]
struct Candidate {
    value: f64,
    scenarios: Vec<usize>,
}

impl Eq for Candidate {}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on value, lexicographically smaller sets first on ties
        self.value.total_cmp(&other.value).then_with(|| other.scenarios.cmp(&self.scenarios))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Best-first local search over `k`-subsets of scenarios, seeded with the
/// per-column optima. Neighbors swap one member of `P` for a non-member.
/// The search restarts from a random unvisited subset when the frontier is
/// exhausted or after `2 n` expansions without improvement.
///
/// `budget` counts search steps; the seeding step is the first, so a budget
/// of 1 returns the best per-column cut.
pub fn separate_subset_bestfirst(
    a: &ScenarioMatrix,
    k: usize,
    point: &[f64],
    budget: usize,
    seed: u64,
) -> Result<SubsetCut, CutError> {
    check_rank(a.rows, k)?;
    if point.len() != a.cols {
        return Err(CutError::DimensionMismatch { expected: a.cols, actual: point.len() });
    }
    let n = a.rows;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut visited: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut frontier = BinaryHeap::new();
    let mut best: Option<Candidate> = None;

    let consider = |scenarios: Vec<usize>,
                        visited: &mut BTreeSet<Vec<usize>>,
                        frontier: &mut BinaryHeap<Candidate>,
                        best: &mut Option<Candidate>|
     -> bool {
        if !visited.insert(scenarios.clone()) {
            return false;
        }
        let candidate = Candidate { value: subset_value(a, &scenarios, point), scenarios };
        let improved = best.as_ref().is_none_or(|b| candidate > *b);
        if improved {
            *best = Some(candidate.clone());
        }
        frontier.push(candidate);
        improved
    };

    let seeds: Vec<Vec<usize>> = if a.cols == 0 {
        vec![(0..k).collect()]
    } else {
        (0..a.cols).map(|j| top_k_indices(&a.column(j), k)).collect()
    };
    for scenarios in seeds {
        consider(scenarios, &mut visited, &mut frontier, &mut best);
    }

    let total_subsets = binomial(n, k);
    let mut stall = 0usize;
    for _ in 1..budget {
        if visited.len() as u128 >= total_subsets {
            break;
        }
        if frontier.is_empty() || stall >= 2 * n {
            frontier.clear();
            stall = 0;
            // rejection sampling is fine: at least one subset is unvisited
            loop {
                let mut scenarios = sample(&mut rng, n, k).into_vec();
                scenarios.sort_unstable();
                if consider(scenarios, &mut visited, &mut frontier, &mut best) {
                    break;
                }
                if frontier.len() == 1 {
                    break;
                }
            }
            continue;
        }
        let node = frontier.pop().expect("non-empty frontier");
        let mut improved = false;
        for out in 0..k {
            for incoming in (0..n).filter(|i| !node.scenarios.contains(i)) {
                let mut next = node.scenarios.clone();
                next[out] = incoming;
                next.sort_unstable();
                improved |= consider(next, &mut visited, &mut frontier, &mut best);
            }
        }
        stall = if improved { 0 } else { stall + 1 };
    }
    subset_cut(a, k, &best.expect("seeded").scenarios)
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::q_k;
    use proptest::prelude::*;

    fn example() -> ScenarioMatrix {
        ScenarioMatrix::from_rows(&[vec![3.0, 1.0], vec![0.0, 2.0], vec![2.0, 2.0]]).unwrap()
    }

    fn binary_points(m: usize) -> impl Iterator<Item = Vec<f64>> {
        (0u32..1 << m).map(move |mask| (0..m).map(|j| (mask >> j & 1) as f64).collect())
    }

    fn assert_valid_on_binaries(a: &ScenarioMatrix, k: usize, cut: &SubsetCut) {
        for x in binary_points(a.cols()) {
            let q = q_k(&a.apply(&x), k).unwrap();
            assert!(cut.rhs_at(&x) <= q + 1e-9, "{cut:?} violated at {x:?}");
        }
    }

    #[test]
    fn subset_cut_example() {
        let cut = subset_cut(&example(), 2, &[0, 2]).unwrap();
        assert_eq!(cut.coefficients, vec![2.0, 1.0]);
        assert_eq!(cut.constant, 0.0);
        assert_valid_on_binaries(&example(), 2, &cut);
        assert_eq!(
            subset_cut(&example(), 2, &[1]),
            Err(CutError::SupportTooSmall { size: 1, k: 2 })
        );
    }

    #[test]
    fn all_rows_with_k_equal_n_gives_column_minima() {
        let cut = subset_cut(&example(), 3, &[0, 1, 2]).unwrap();
        assert_eq!(cut.coefficients, vec![0.0, 1.0]);
    }

    #[test]
    fn per_column_example() {
        let cuts = per_column_subsets(&example(), 2).unwrap();
        assert_eq!(cuts.len(), 2);
        assert_eq!(cuts[0].scenarios.as_deref(), Some(&[0, 2][..]));
        assert_eq!(cuts[0].coefficients, vec![2.0, 1.0]);
        assert_eq!(cuts[1].scenarios.as_deref(), Some(&[1, 2][..]));
        assert_eq!(cuts[1].coefficients, vec![0.0, 2.0]);
    }

    #[test]
    fn single_column_cut_is_the_column_quantile() {
        let a = ScenarioMatrix::from_rows(&[vec![4.0], vec![1.0], vec![7.0], vec![3.0]]).unwrap();
        for k in 1..=4 {
            let cuts = per_column_subsets(&a, k).unwrap();
            assert_eq!(cuts.len(), 1);
            assert_eq!(cuts[0].coefficients[0], q_k(&a.column(0), k).unwrap());
        }
    }

    #[test]
    fn per_column_deduplicates() {
        let a = ScenarioMatrix::from_rows(&[vec![5.0, 5.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(per_column_subsets(&a, 1).unwrap().len(), 1);
    }

    #[test]
    fn simple_cut_examples() {
        let a = example();
        let inc = [1.0, 0.0];
        let cut = simple_generated_cut(&a, 2, &inc).unwrap();
        let q = q_k(&a.apply(&inc), 2).unwrap();
        assert!((cut.rhs_at(&inc) - q).abs() <= 1e-12);
        // a coordinate dropped below the incumbent makes the bound non-positive
        assert!(cut.rhs_at(&[0.0, 1.0]) <= 0.0);

        let negative = ScenarioMatrix::from_rows(&[vec![1.0, -0.5]]).unwrap();
        assert!(matches!(
            simple_generated_cut(&negative, 1, &[1.0, 1.0]),
            Err(CutError::NegativeEntry { row: 0, col: 1, .. })
        ));
        assert!(matches!(
            simple_generated_cut(&a, 1, &[0.5, 1.0]),
            Err(CutError::NonBinaryIncumbent { index: 0, .. })
        ));
    }

    #[test]
    fn simple_cut_valid_on_5x6() {
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..6).map(|j| ((i * 7 + j * 3) % 5) as f64 + 0.5 * j as f64).collect())
            .collect();
        let a = ScenarioMatrix::from_rows(&rows).unwrap();
        for inc in binary_points(6) {
            assert_valid_on_binaries(&a, 2, &simple_generated_cut(&a, 2, &inc).unwrap());
        }
    }

    #[test]
    fn generated_cut_with_zero_incumbent_is_first_rows_subset_cut() {
        let a = example();
        let generated = generated_subset_cut(&a, 2, &[0.0, 0.0]).unwrap();
        let subset = subset_cut(&a, 2, &[0, 1]).unwrap();
        assert_eq!(generated.scenarios, subset.scenarios);
        assert_eq!(generated.coefficients, subset.coefficients);
        assert_eq!(generated.constant, 0.0);
    }

    #[test]
    fn general_specializations() {
        let a = example();
        for inc in binary_points(2) {
            let generated = generated_subset_cut(&a, 2, &inc).unwrap();
            let p = generated.scenarios.clone().unwrap();
            let general = general_subset_cut(&a, 2, &p, &inc, &BoxBounds::unit(2)).unwrap();
            assert_eq!(general.coefficients, generated.coefficients);
            assert!((general.constant - generated.constant).abs() <= 1e-12);
        }
        let general = general_subset_cut(&a, 2, &[0, 2], &[0.0, 0.0], &BoxBounds::unit(2)).unwrap();
        assert_eq!(general.coefficients, subset_cut(&a, 2, &[0, 2]).unwrap().coefficients);
        assert_eq!(general.constant, 0.0);
        assert!(matches!(
            general_subset_cut(&a, 2, &[0, 2], &[1.5, 0.0], &BoxBounds::unit(2)),
            Err(CutError::BetaOutOfRange { index: 0, .. })
        ));
    }

    #[test]
    fn exhaustive_separation_cases() {
        let a = example();
        let forced = separate_subset_exhaustive(&a, 3, &[0.3, 0.7]).unwrap();
        assert_eq!(forced.scenarios.as_deref(), Some(&[0, 1, 2][..]));
        for j in 0..2 {
            let mut unit = vec![0.0; 2];
            unit[j] = 1.0;
            let best = separate_subset_exhaustive(&a, 2, &unit).unwrap();
            assert_eq!(best.rhs_at(&unit), q_k(&a.column(j), 2).unwrap());
        }
        let big = ScenarioMatrix::zeros(21, 1);
        assert!(matches!(
            separate_subset_exhaustive(&big, 1, &[1.0]),
            Err(CutError::TooLarge { n: 21, .. })
        ));
    }

    #[test]
    fn bestfirst_budget_one_is_best_seed() {
        let a = example();
        let point = [0.4, 0.9];
        let cut = separate_subset_bestfirst(&a, 2, &point, 1, 3).unwrap();
        let best_seed = per_column_subsets(&a, 2)
            .unwrap()
            .iter()
            .map(|c| c.rhs_at(&point))
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(cut.rhs_at(&point), best_seed);
    }

    #[test]
    fn enumerates_every_subset_once() {
        let mut seen = Vec::new();
        for_each_subset(5, 3, |p| seen.push(p.to_vec()));
        assert_eq!(seen.len(), 10);
        assert_eq!(seen.first().unwrap(), &vec![0, 1, 2]);
        assert_eq!(seen.last().unwrap(), &vec![2, 3, 4]);
    }

    fn matrix_case(max_rows: usize, max_cols: usize) -> impl Strategy<Value = (ScenarioMatrix, usize)> {
        (1..=max_rows, 1..=max_cols).prop_flat_map(|(n, m)| {
            (prop::collection::vec(0u8..6, n * m), 1..=n).prop_map(move |(raw, k)| {
                let data = raw.into_iter().map(|v| v as f64 * 0.5).collect();
                (ScenarioMatrix::new(n, m, data).unwrap(), k)
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn every_family_is_valid_and_generated_ones_are_tight(
            (a, k) in matrix_case(6, 10),
            inc_mask in any::<u16>(),
            p_mask in any::<u8>(),
            beta_raw in prop::collection::vec(0.0f64..=1.0, 10),
        ) {
            let m = a.cols();
            let inc: Vec<f64> = (0..m).map(|j| (inc_mask >> j & 1) as f64).collect();
            let q = q_k(&a.apply(&inc), k).unwrap();

            let simple = simple_generated_cut(&a, k, &inc).unwrap();
            let generated = generated_subset_cut(&a, k, &inc).unwrap();
            prop_assert!((simple.rhs_at(&inc) - q).abs() <= 1e-9);
            prop_assert!((generated.rhs_at(&inc) - q).abs() <= 1e-9);

            let mut p: Vec<usize> = (0..a.rows()).filter(|i| p_mask >> i & 1 == 1).collect();
            for i in 0..a.rows() { if p.len() < k && !p.contains(&i) { p.push(i); } }
            let subset = subset_cut(&a, k, &p).unwrap();
            let general = general_subset_cut(&a, k, &p, &beta_raw[..m], &BoxBounds::unit(m)).unwrap();

            for x in binary_points(m) {
                let qx = q_k(&a.apply(&x), k).unwrap();
                for cut in [&simple, &generated, &subset, &general] {
                    prop_assert!(cut.rhs_at(&x) <= qx + 1e-9);
                }
                // the simple cut is only positive on x >= x~, where the generated one dominates it
                if x.iter().zip(&inc).all(|(a, b)| a >= b) {
                    prop_assert!(generated.rhs_at(&x) >= simple.rhs_at(&x) - 1e-9);
                }
            }
        }

        #[test]
        fn general_family_valid_at_box_vertices(
            (a, k) in matrix_case(5, 8),
            p_mask in any::<u8>(),
            raw in prop::collection::vec((-2.0f64..2.0, 0.0f64..3.0, 0.0f64..=1.0), 8),
        ) {
            let m = a.cols();
            let lower: Vec<f64> = raw[..m].iter().map(|r| r.0).collect();
            let upper: Vec<f64> = raw[..m].iter().map(|r| r.0 + r.1).collect();
            let beta: Vec<f64> = raw[..m].iter().map(|r| r.2).collect();
            let bounds = BoxBounds::new(lower.clone(), upper.clone()).unwrap();
            let mut p: Vec<usize> = (0..a.rows()).filter(|i| p_mask >> i & 1 == 1).collect();
            for i in 0..a.rows() { if p.len() < k && !p.contains(&i) { p.push(i); } }
            let cut = general_subset_cut(&a, k, &p, &beta, &bounds).unwrap();
            for mask in 0u32..1 << m {
                let x: Vec<f64> = (0..m).map(|j| if mask >> j & 1 == 1 { upper[j] } else { lower[j] }).collect();
                prop_assert!(cut.rhs_at(&x) <= q_k(&a.apply(&x), k).unwrap() + 1e-9);
            }
        }

        #[test]
        fn exhaustive_dominates_per_column_and_bestfirst(
            (a, k) in matrix_case(8, 6),
            point in prop::collection::vec(0.0f64..=1.0, 6),
            seed in any::<u64>(),
        ) {
            let point = &point[..a.cols()];
            let best = separate_subset_exhaustive(&a, k, point).unwrap().rhs_at(point);
            let per_column_best = per_column_subsets(&a, k).unwrap().iter()
                .map(|c| c.rhs_at(point)).fold(f64::NEG_INFINITY, f64::max);
            let heuristic = separate_subset_bestfirst(&a, k, point, 50, seed).unwrap().rhs_at(point);
            prop_assert!(best >= per_column_best - 1e-12);
            prop_assert!(best >= heuristic - 1e-12);
            prop_assert!(heuristic >= per_column_best - 1e-12);
            prop_assert_eq!(
                separate_subset_bestfirst(&a, k, point, 50, seed).unwrap(),
                separate_subset_bestfirst(&a, k, point, 50, seed).unwrap()
            );
        }

        #[test]
        fn general_separation_beats_generated_at_integral_points(
            (a, k) in matrix_case(5, 6),
            inc_mask in any::<u8>(),
        ) {
            let m = a.cols();
            let inc: Vec<f64> = (0..m).map(|j| (inc_mask >> j & 1) as f64).collect();
            let general = separate_general_exhaustive(&a, k, &inc, 8).unwrap();
            let generated = generated_subset_cut(&a, k, &inc).unwrap();
            prop_assert!(general.rhs_at(&inc) >= generated.rhs_at(&inc) - 1e-9);
        }
    }
}
