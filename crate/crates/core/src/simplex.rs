//! Domain types shared across the crate: vote counts, simplex weights,
//! Dirichlet concentration vectors and normalized objective values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the sum of a weight vector.
pub const SIMPLEX_TOL: f64 = 1e-12;

/// Tolerance for cross-checks between two independent computations of the
/// same quantity.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Sums values in ascending order so the result does not depend on the
/// order of the input. Symmetric functions built on it are exactly
/// permutation invariant.
pub fn ordered_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().collect();
    v.sort_by(f64::total_cmp);
    v.into_iter().sum()
}

/// Votes per category from a single-choice survey.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PreferenceCounts {
    counts: Vec<u64>,
    total: u64,
}

impl PreferenceCounts {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::TooFewCategories(counts.len()));
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::AllZero);
        }
        Ok(Self { counts, total })
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn has_zero_category(&self) -> bool {
        self.counts.contains(&0)
    }

    /// Multiplies every count by `k`.
    pub fn scaled(&self, k: u64) -> Result<Self> {
        Self::new(self.counts.iter().map(|c| c * k).collect())
    }
}

impl TryFrom<Vec<u64>> for PreferenceCounts {
    type Error = Error;

    fn try_from(v: Vec<u64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PreferenceCounts> for Vec<u64> {
    fn from(c: PreferenceCounts) -> Self {
        c.counts
    }
}

/// Validates raw (possibly signed) counts as parsed from user input.
pub fn validate_counts(counts: &[i64]) -> Result<PreferenceCounts> {
    if counts.len() < 2 {
        return Err(Error::TooFewCategories(counts.len()));
    }
    let mut out = Vec::with_capacity(counts.len());
    for (index, &value) in counts.iter().enumerate() {
        if value < 0 {
            return Err(Error::NegativeCount { index, value });
        }
        out.push(value as u64);
    }
    PreferenceCounts::new(out)
}

/// A point in the open simplex: strictly positive weights summing to one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Normalizes strictly positive raw values onto the simplex.
    pub fn new(raw: Vec<f64>) -> Result<Self> {
        if raw.len() < 2 {
            return Err(Error::TooFewCategories(raw.len()));
        }
        for (index, &value) in raw.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        let sum = ordered_sum(raw.iter().copied());
        let weights: Vec<f64> = raw.iter().map(|w| w / sum).collect();
        for (index, &value) in weights.iter().enumerate() {
            if value <= 0.0 {
                return Err(Error::InvalidWeight { index, value });
            }
        }
        Ok(Self(weights))
    }

    /// `l` equal weights.
    pub fn uniform(l: usize) -> Result<Self> {
        Self::new(vec![1.0; l])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.0
    }
}

/// Equivalent free-function form of [`WeightVector::new`].
pub fn make_weight_vector(raw: Vec<f64>) -> Result<WeightVector> {
    WeightVector::new(raw)
}

/// Dirichlet concentration parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DirichletParams {
    alpha: Vec<f64>,
    alpha0: f64,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 {
            return Err(Error::TooFewCategories(alpha.len()));
        }
        for (index, &value) in alpha.iter().enumerate() {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidConcentration { index, value });
            }
        }
        let alpha0 = ordered_sum(alpha.iter().copied());
        if !alpha0.is_finite() {
            return Err(Error::InvalidConcentration {
                index: 0,
                value: alpha0,
            });
        }
        Ok(Self { alpha, alpha0 })
    }

    pub fn symmetric(value: f64, l: usize) -> Result<Self> {
        Self::new(vec![value; l])
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn alpha0(&self) -> f64 {
        self.alpha0
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }
}

impl TryFrom<Vec<f64>> for DirichletParams {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DirichletParams> for Vec<f64> {
    fn from(p: DirichletParams) -> Self {
        p.alpha
    }
}

/// Normalized objective function outputs, each in `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveValues(Vec<f64>);

impl ObjectiveValues {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (index, &value) in values.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ObjectiveOutOfRange { index, value });
            }
        }
        Ok(Self(values))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub(crate) fn check_len(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::LengthMismatch { left, right });
    }
    Ok(())
}
