//! Types shared by the two cut modules.

use std::fmt;

use thiserror::Error;

use crate::quantile::QuantileError;

/// Absolute slack a candidate cut must exceed the current `y` value by before
/// separation reports it as violated.
pub const VIOLATION_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutFamily {
    /// Quantile lower bound on the unit box.
    Symmetric,
    /// Quantile lower bound on an arbitrary box.
    Asymmetric,
    /// No-good style constraint generated from an incumbent.
    Simple,
    /// Column-minimum constraint over a scenario subset.
    Subset,
    /// Subset constraint made tight at an incumbent.
    GeneratedSubset,
    /// Box-and-β generalization of the generated subset constraint.
    GeneralSubset,
}

impl CutFamily {
    pub const ALL: [CutFamily; 6] = [
        CutFamily::Symmetric,
        CutFamily::Asymmetric,
        CutFamily::Simple,
        CutFamily::Subset,
        CutFamily::GeneratedSubset,
        CutFamily::GeneralSubset,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CutFamily::Symmetric => "symmetric",
            CutFamily::Asymmetric => "asymmetric",
            CutFamily::Simple => "simple",
            CutFamily::Subset => "subset",
            CutFamily::GeneratedSubset => "generated-subset",
            CutFamily::GeneralSubset => "general-subset",
        }
    }
}

impl fmt::Display for CutFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CutError {
    #[error(transparent)]
    Rank(#[from] QuantileError),
    #[error("support of size {size} is smaller than k = {k}")]
    SupportTooSmall { size: usize, k: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("duplicate index {0} in support")]
    DuplicateIndex(usize),
    #[error("threshold U = {threshold} must exceed the floor L = {floor}")]
    ThresholdNotAboveFloor { threshold: f64, floor: f64 },
    #[error("invalid box at coordinate {index}: [{lower}, {upper}]")]
    InvalidBox { index: usize, lower: f64, upper: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("negative matrix entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },
    #[error("incumbent coordinate {index} is {value}, expected 0 or 1")]
    NonBinaryIncumbent { index: usize, value: f64 },
    #[error("beta coordinate {index} is {value}, expected a value in [0, 1]")]
    BetaOutOfRange { index: usize, value: f64 },
    #[error("exhaustive enumeration over {n} elements exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },
}

/// Checks that `support` is a duplicate-free subset of `0..dim` with at least
/// `k` elements.
pub(crate) fn check_support(support: &[usize], k: usize, dim: usize) -> Result<(), CutError> {
    if support.len() < k {
        return Err(CutError::SupportTooSmall { size: support.len(), k });
    }
    let mut seen = vec![false; dim];
    for &i in support {
        if i >= dim {
            return Err(CutError::IndexOutOfRange { index: i, dim });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(CutError::DuplicateIndex(i));
        }
    }
    Ok(())
}
