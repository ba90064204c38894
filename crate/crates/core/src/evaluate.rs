//! Set-level evaluation: per-feature medians and spreads, KS separation of
//! overall grades, and paired discrimination accuracy.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::features::FeatureId;
use crate::grade::{grade, GradeError, GradeReport};
use crate::metrics::{ks_two_sample, KsResult, MetricError};
use crate::model::Chorale;
use crate::profile::CorpusProfile;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvaluateError {
    #[error("only {0} chorales graded successfully, at least 2 required")]
    TooFewGraded(usize),
    #[error("no pair could be graded")]
    NoValidPairs,
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Median and sample standard deviation of a list of values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryStats<T> {
    pub median: T,
    pub std_dev: T,
    pub n: usize,
}

impl<T: Scalar> SummaryStats<T> {
    /// Returns `None` for an empty slice. A single value has spread 0.
    pub fn of(values: &[T]) -> Option<Self> {
        let n = values.len();
        if n == 0 {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            (v[n / 2 - 1] + v[n / 2]) / T::of(2.0)
        };
        let std_dev = if n < 2 {
            T::zero()
        } else {
            // Welford's update: identical values give exactly zero spread.
            let (mut mean, mut m2) = (v[0], T::zero());
            for (k, &x) in v.iter().enumerate().skip(1) {
                let delta = x - mean;
                mean = mean + delta / T::of_count(k as u64 + 1);
                m2 = m2 + delta * (x - mean);
            }
            (m2 / T::of_count(n as u64 - 1)).sqrt()
        };
        Some(SummaryStats { median, std_dev, n })
    }
}

/// Grades of one set with per-feature and overall statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct SetEvaluation<T> {
    pub reports: Vec<GradeReport<T>>,
    /// Chorales that could not be graded, by id.
    pub failures: Vec<(String, GradeError)>,
    pub per_feature: BTreeMap<FeatureId, SummaryStats<T>>,
    pub overall: SummaryStats<T>,
}

impl<T: Scalar> SetEvaluation<T> {
    /// Builds statistics over the successful outcomes, keeping input order.
    pub fn from_outcomes(
        outcomes: Vec<(String, Result<GradeReport<T>, GradeError>)>,
    ) -> Result<Self, EvaluateError> {
        let mut reports = Vec::new();
        let mut failures = Vec::new();
        for (id, r) in outcomes {
            match r {
                Ok(r) => reports.push(r),
                Err(e) => failures.push((id, e)),
            }
        }
        if reports.len() < 2 {
            return Err(EvaluateError::TooFewGraded(reports.len()));
        }
        let per_feature = FeatureId::ALL
            .iter()
            .map(|&f| {
                let xs: Vec<T> = reports.iter().map(|r| r.contribution(f)).collect();
                (f, SummaryStats::of(&xs).expect("non-empty"))
            })
            .collect();
        let overall = SummaryStats::of(&overall_grades(&reports)).expect("non-empty");
        Ok(SetEvaluation {
            reports,
            failures,
            per_feature,
            overall,
        })
    }

    pub fn overall_grades(&self) -> Vec<T> {
        overall_grades(&self.reports)
    }
}

fn overall_grades<T: Scalar>(reports: &[GradeReport<T>]) -> Vec<T> {
    reports.iter().map(|r| r.overall_grade).collect()
}

/// Grades every chorale of a set against one profile.
pub fn grade_set<T: Scalar>(
    set: &[Chorale],
    profile: &CorpusProfile<T>,
) -> Result<SetEvaluation<T>, EvaluateError> {
    SetEvaluation::from_outcomes(
        set.iter()
            .map(|c| (c.id().to_string(), grade(c, profile)))
            .collect(),
    )
}

/// Two graded sets compared by a KS test on their overall grades.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSummary<T> {
    pub set_a: SetEvaluation<T>,
    pub set_b: SetEvaluation<T>,
    pub ks: KsResult<T>,
    pub discrimination_accuracy: Option<T>,
}

impl<T: Scalar> EvaluationSummary<T> {
    pub fn compare(
        set_a: SetEvaluation<T>,
        set_b: SetEvaluation<T>,
    ) -> Result<Self, EvaluateError> {
        let ks = ks_two_sample(&set_a.overall_grades(), &set_b.overall_grades())?;
        Ok(EvaluationSummary {
            set_a,
            set_b,
            ks,
            discrimination_accuracy: None,
        })
    }

    /// One row per set with `median (σ)` cells for every feature and the
    /// overall grade, followed by the KS line.
    pub fn render_table(&self, name_a: &str, name_b: &str) -> String {
        let width = name_a.len().max(name_b.len()).max(3);
        let col = |f: &str| f.len().max(13);
        let mut out = String::new();
        let _ = write!(out, "{:<width$} {:>4}", "set", "n");
        for f in FeatureId::ALL {
            let _ = write!(out, "  {:>w$}", f.title(), w = col(f.title()));
        }
        let _ = writeln!(out, "  {:>13}", "Overall");
        for (name, set) in [(name_a, &self.set_a), (name_b, &self.set_b)] {
            let _ = write!(out, "{:<width$} {:>4}", name, set.reports.len());
            for f in FeatureId::ALL {
                let s = set.per_feature[&f];
                let _ = write!(out, "  {:>w$}", cell(s), w = col(f.title()));
            }
            let _ = writeln!(out, "  {:>13}", cell(set.overall));
        }
        let _ = writeln!(
            out,
            "KS D = {:.4}, p = {:.3e}{}",
            self.ks.statistic.as_f64(),
            self.ks.p_value.as_f64(),
            if self.ks.approximate {
                " (approximate)"
            } else {
                ""
            }
        );
        if let Some(acc) = self.discrimination_accuracy {
            let _ = writeln!(out, "discrimination accuracy = {:.4}", acc.as_f64());
        }
        out
    }
}

fn cell<T: Scalar>(s: SummaryStats<T>) -> String {
    format!("{:.2} ({:.2})", s.median.as_f64(), s.std_dev.as_f64())
}

/// Outcome of one (real, other) pair.
#[derive(Debug, Clone, PartialEq)]
pub enum PairOutcome<T> {
    Graded {
        real: T,
        other: T,
        correct: bool,
    },
    /// Grading failed for one of the two chorales; the pair is not counted.
    Void(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discrimination<T> {
    pub outcomes: Vec<PairOutcome<T>>,
    pub correct: usize,
    pub total: usize,
    pub accuracy: T,
}

impl<T: Scalar> Discrimination<T> {
    /// A pair is correct iff the real chorale grades strictly lower; ties
    /// count as mistakes.
    pub fn from_grades(grades: Vec<Result<(T, T), String>>) -> Result<Self, EvaluateError> {
        let outcomes: Vec<PairOutcome<T>> = grades
            .into_iter()
            .map(|g| match g {
                Ok((real, other)) => PairOutcome::Graded {
                    real,
                    other,
                    correct: real < other,
                },
                Err(why) => PairOutcome::Void(why),
            })
            .collect();
        let total = outcomes
            .iter()
            .filter(|o| matches!(o, PairOutcome::Graded { .. }))
            .count();
        if total == 0 {
            return Err(EvaluateError::NoValidPairs);
        }
        let correct = outcomes
            .iter()
            .filter(|o| matches!(o, PairOutcome::Graded { correct: true, .. }))
            .count();
        Ok(Discrimination {
            outcomes,
            correct,
            total,
            accuracy: T::of_count(correct as u64) / T::of_count(total as u64),
        })
    }
}

/// Picks the better-graded chorale of each pair; the first element of a pair
/// is the reference-class chorale.
pub fn discriminate<T: Scalar>(
    pairs: &[(Chorale, Chorale)],
    profile: &CorpusProfile<T>,
) -> Result<Discrimination<T>, EvaluateError> {
    Discrimination::from_grades(
        pairs
            .iter()
            .map(|(a, b)| {
                let ga = grade(a, profile).map_err(|e| format!("{}: {e}", a.id()))?;
                let gb = grade(b, profile).map_err(|e| format!("{}: {e}", b.id()))?;
                Ok((ga.overall_grade, gb.overall_grade))
            })
            .collect(),
    )
}
