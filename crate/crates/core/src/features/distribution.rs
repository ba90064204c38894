use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::model::Rational;
use crate::scalar::Scalar;

/// Tolerance on the total mass of a non-empty distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SupportKind {
    Numeric,
    Categorical,
}

impl SupportKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SupportKind::Numeric => "numeric",
            SupportKind::Categorical => "categorical",
        }
    }
}

impl fmt::Display for SupportKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistributionError {
    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),
    #[error("mass {0} outside [0, 1]")]
    MassOutOfRange(f64),
    #[error("support value `{0}` repeated or out of order")]
    Unsorted(String),
}

/// Probability mass over an ordered numeric support or a set of labels.
///
/// Numeric supports are exact rationals sorted ascending; categorical
/// entries are sorted by label. Either may be empty (no observations).
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution<T> {
    Numeric(Vec<(Rational, T)>),
    Categorical(Vec<(String, T)>),
}

impl<T: Scalar> Distribution<T> {
    pub fn kind(&self) -> SupportKind {
        match self {
            Distribution::Numeric(_) => SupportKind::Numeric,
            Distribution::Categorical(_) => SupportKind::Categorical,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Distribution::Numeric(e) => e.len(),
            Distribution::Categorical(e) => e.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn total_mass(&self) -> T {
        match self {
            Distribution::Numeric(e) => e.iter().fold(T::zero(), |acc, (_, m)| acc + *m),
            Distribution::Categorical(e) => e.iter().fold(T::zero(), |acc, (_, m)| acc + *m),
        }
    }

    /// Mass at a numeric support point (zero if absent).
    pub fn mass_at(&self, x: Rational) -> T {
        match self {
            Distribution::Numeric(e) => e
                .binary_search_by(|(v, _)| v.cmp(&x))
                .map(|i| e[i].1)
                .unwrap_or_else(|_| T::zero()),
            Distribution::Categorical(_) => T::zero(),
        }
    }

    /// Mass on a categorical label (zero if absent).
    pub fn mass_of(&self, label: &str) -> T {
        match self {
            Distribution::Categorical(e) => e
                .binary_search_by(|(l, _)| l.as_str().cmp(label))
                .map(|i| e[i].1)
                .unwrap_or_else(|_| T::zero()),
            Distribution::Numeric(_) => T::zero(),
        }
    }

    /// Builds a numeric distribution from explicit entries, validating the invariants.
    pub fn numeric(entries: Vec<(Rational, T)>) -> Result<Self, DistributionError> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(DistributionError::Unsorted(w[1].0.to_string()));
            }
        }
        let d = Distribution::Numeric(entries);
        d.check_masses()?;
        Ok(d)
    }

    /// Builds a categorical distribution from explicit entries, validating the invariants.
    pub fn categorical(entries: Vec<(String, T)>) -> Result<Self, DistributionError> {
        for w in entries.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(DistributionError::Unsorted(w[1].0.clone()));
            }
        }
        let d = Distribution::Categorical(entries);
        d.check_masses()?;
        Ok(d)
    }

    fn check_masses(&self) -> Result<(), DistributionError> {
        let masses: Vec<f64> = match self {
            Distribution::Numeric(e) => e.iter().map(|(_, m)| m.as_f64()).collect(),
            Distribution::Categorical(e) => e.iter().map(|(_, m)| m.as_f64()).collect(),
        };
        if let Some(&m) = masses.iter().find(|m| !(0.0..=1.0).contains(*m)) {
            return Err(DistributionError::MassOutOfRange(m));
        }
        if masses.is_empty() {
            return Ok(());
        }
        let total: f64 = masses.iter().sum();
        // Looser tolerance for f32 masses.
        let tol = MASS_TOLERANCE.max(T::epsilon().as_f64() * masses.len() as f64);
        if (total - 1.0).abs() > tol {
            return Err(DistributionError::NotNormalized(total));
        }
        Ok(())
    }
}

/// Raw observation counts for one feature, before normalization.
///
/// Counts pool by addition, which is how corpus profiles are built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Histogram {
    Numeric(BTreeMap<Rational, u64>),
    Categorical(BTreeMap<String, u64>),
}

impl Histogram {
    pub fn numeric() -> Self {
        Histogram::Numeric(BTreeMap::new())
    }

    pub fn categorical() -> Self {
        Histogram::Categorical(BTreeMap::new())
    }

    pub fn kind(&self) -> SupportKind {
        match self {
            Histogram::Numeric(_) => SupportKind::Numeric,
            Histogram::Categorical(_) => SupportKind::Categorical,
        }
    }

    pub fn add_value(&mut self, x: Rational, n: u64) {
        match self {
            Histogram::Numeric(m) => *m.entry(x).or_default() += n,
            Histogram::Categorical(_) => panic!("numeric value added to categorical histogram"),
        }
    }

    pub fn add_label(&mut self, label: impl Into<String>, n: u64) {
        match self {
            Histogram::Categorical(m) => *m.entry(label.into()).or_default() += n,
            Histogram::Numeric(_) => panic!("label added to numeric histogram"),
        }
    }

    pub fn total(&self) -> u64 {
        match self {
            Histogram::Numeric(m) => m.values().sum(),
            Histogram::Categorical(m) => m.values().sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Adds another histogram's counts into this one. Kinds must agree.
    pub fn merge(&mut self, other: &Histogram) {
        match (self, other) {
            (Histogram::Numeric(a), Histogram::Numeric(b)) => {
                for (k, n) in b {
                    *a.entry(*k).or_default() += n;
                }
            }
            (Histogram::Categorical(a), Histogram::Categorical(b)) => {
                for (k, n) in b {
                    *a.entry(k.clone()).or_default() += n;
                }
            }
            _ => panic!("merging histograms of different kinds"),
        }
    }

    pub fn normalize<T: Scalar>(&self) -> Distribution<T> {
        let total = T::of_count(self.total());
        match self {
            Histogram::Numeric(m) => Distribution::Numeric(
                m.iter()
                    .filter(|(_, &n)| n > 0)
                    .map(|(k, &n)| (*k, T::of_count(n) / total))
                    .collect(),
            ),
            Histogram::Categorical(m) => Distribution::Categorical(
                m.iter()
                    .filter(|(_, &n)| n > 0)
                    .map(|(k, &n)| (k.clone(), T::of_count(n) / total))
                    .collect(),
            ),
        }
    }
}
