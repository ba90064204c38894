//! Grading a chorale against a corpus profile.
//!
//! The grade is a weighted sum over features of the distance between the
//! chorale's distribution and the profile's. Weights are 1 except for
//! parallel errors, which are weighted by the chorale's error-to-note ratio
//! relative to the corpus ratio. Lower grades are better.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::features::{FeatureCounts, FeatureError, FeatureId};
use crate::metrics::{wasserstein, MetricError};
use crate::model::Chorale;
use crate::profile::{CorpusProfile, METRIC_CONVENTION};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GradeError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("{feature}: {source}")]
    Metric {
        feature: FeatureId,
        source: MetricError,
    },
    #[error("profile has zero parallel errors; the parallel-error weight is undefined")]
    DegenerateProfile,
    #[error("profile metric convention `{0}` does not match `{METRIC_CONVENTION}`")]
    ConventionMismatch(String),
    #[error("invalid report at {path}: {message}")]
    Report { path: String, message: String },
}

/// Distance, weight and weighted contribution of one feature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScore<T> {
    pub distance: T,
    pub weight: T,
    pub contribution: T,
    /// Set when the chorale had no repeated sequences and the profile's
    /// fallback distance was charged.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GradeReport<T> {
    pub chorale_id: String,
    pub per_feature: BTreeMap<FeatureId, FeatureScore<T>>,
    pub overall_grade: T,
    pub parallel_error_count: u64,
    pub note_count: u64,
}

fn parallel_weight_from_counts<T: Scalar>(
    counts: &FeatureCounts,
    profile: &CorpusProfile<T>,
) -> Result<T, GradeError> {
    if counts.error_count == 0 {
        return Ok(T::zero());
    }
    if profile.is_degenerate() {
        return Err(GradeError::DegenerateProfile);
    }
    Ok(counts.error_note_ratio::<T>() / profile.corpus_error_note_ratio)
}

/// Ratio of the chorale's error-to-note ratio to the corpus ratio.
///
/// A chorale without errors has weight 0 under any profile.
pub fn parallel_weight<T: Scalar>(
    c: &Chorale,
    profile: &CorpusProfile<T>,
) -> Result<T, GradeError> {
    let counts = FeatureCounts::extract(c)?;
    parallel_weight_from_counts(&counts, profile)
}

pub fn grade<T: Scalar>(
    c: &Chorale,
    profile: &CorpusProfile<T>,
) -> Result<GradeReport<T>, GradeError> {
    if profile.metric_convention != METRIC_CONVENTION {
        return Err(GradeError::ConventionMismatch(
            profile.metric_convention.clone(),
        ));
    }
    let counts = FeatureCounts::extract(c)?;
    let mut per_feature = BTreeMap::new();
    for f in FeatureId::ALL {
        let hist = counts.histogram(f);
        let score = match f {
            FeatureId::ParallelErrors if hist.is_empty() => FeatureScore {
                distance: T::zero(),
                weight: T::zero(),
                contribution: T::zero(),
                fallback: false,
            },
            FeatureId::RepeatedSequence if hist.is_empty() => FeatureScore {
                distance: profile.repeated_sequence_fallback,
                weight: T::one(),
                contribution: profile.repeated_sequence_fallback,
                fallback: true,
            },
            _ => {
                let weight = match f {
                    FeatureId::ParallelErrors => parallel_weight_from_counts(&counts, profile)?,
                    _ => T::one(),
                };
                let distance = wasserstein(&hist.normalize(), profile.distribution(f))
                    .map_err(|source| GradeError::Metric { feature: f, source })?;
                FeatureScore {
                    distance,
                    weight,
                    contribution: weight * distance,
                    fallback: false,
                }
            }
        };
        per_feature.insert(f, score);
    }
    Ok(GradeReport::new(
        c.id().to_string(),
        per_feature,
        counts.error_count,
        counts.note_count,
    ))
}

impl<T: Scalar> GradeReport<T> {
    /// Assembles a report; the overall grade is the sum of contributions.
    pub fn new(
        chorale_id: String,
        per_feature: BTreeMap<FeatureId, FeatureScore<T>>,
        parallel_error_count: u64,
        note_count: u64,
    ) -> Self {
        let overall_grade = FeatureId::ALL
            .iter()
            .filter_map(|f| per_feature.get(f))
            .fold(T::zero(), |acc, s| acc + s.contribution);
        GradeReport {
            chorale_id,
            per_feature,
            overall_grade,
            parallel_error_count,
            note_count,
        }
    }

    pub fn contribution(&self, f: FeatureId) -> T {
        self.per_feature
            .get(&f)
            .map_or_else(T::zero, |s| s.contribution)
    }

    /// Features ordered by contribution, largest first.
    pub fn ranked(&self) -> Vec<(FeatureId, FeatureScore<T>)> {
        let mut v: Vec<_> = FeatureId::ALL
            .iter()
            .filter_map(|f| self.per_feature.get(f).map(|s| (*f, *s)))
            .collect();
        v.sort_by(|a, b| {
            b.1.contribution
                .partial_cmp(&a.1.contribution)
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        v
    }

    /// Aligned text table, dominant weakness first.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{}  overall {:.2}  ({} parallel errors / {} notes)",
            self.chorale_id,
            self.overall_grade.as_f64(),
            self.parallel_error_count,
            self.note_count
        );
        let _ = writeln!(
            out,
            "  {:<18} {:>8} {:>8} {:>12}",
            "feature", "distance", "weight", "contribution"
        );
        for (f, s) in self.ranked() {
            let mark = if s.fallback { " *" } else { "" };
            let _ = writeln!(
                out,
                "  {:<18} {:>8.2} {:>8.2} {:>12.2}{}",
                f.as_str(),
                s.distance.as_f64(),
                s.weight.as_f64(),
                s.contribution.as_f64(),
                mark
            );
        }
        out
    }

    pub fn to_json_value(&self) -> Value {
        let features: Map<String, Value> = self
            .per_feature
            .iter()
            .map(|(f, s)| {
                (
                    f.as_str().to_string(),
                    json!({
                        "distance": s.distance.as_f64(),
                        "weight": s.weight.as_f64(),
                        "contribution": s.contribution.as_f64(),
                        "fallback": s.fallback,
                    }),
                )
            })
            .collect();
        json!({
            "chorale_id": self.chorale_id,
            "overall_grade": self.overall_grade.as_f64(),
            "parallel_error_count": self.parallel_error_count,
            "note_count": self.note_count,
            "features": features,
        })
    }

    pub fn from_json_value(v: &Value) -> Result<Self, GradeError> {
        let bad = |path: &str, message: &str| GradeError::Report {
            path: path.to_string(),
            message: message.to_string(),
        };
        let id = v
            .get("chorale_id")
            .and_then(Value::as_str)
            .ok_or_else(|| bad("$.chorale_id", "expected a string"))?;
        let count = |name: &str| {
            v.get(name)
                .and_then(Value::as_u64)
                .ok_or_else(|| bad(&format!("$.{name}"), "expected an integer"))
        };
        let feats = v
            .get("features")
            .and_then(Value::as_object)
            .ok_or_else(|| bad("$.features", "expected an object"))?;
        let mut per_feature = BTreeMap::new();
        for (k, s) in feats {
            let path = format!("$.features.{k}");
            let f: FeatureId = k.parse().map_err(|_| bad(&path, "unknown feature"))?;
            let num = |name: &str| {
                s.get(name)
                    .and_then(Value::as_f64)
                    .map(T::of)
                    .ok_or_else(|| bad(&format!("{path}.{name}"), "expected a number"))
            };
            per_feature.insert(
                f,
                FeatureScore {
                    distance: num("distance")?,
                    weight: num("weight")?,
                    contribution: num("contribution")?,
                    fallback: s.get("fallback").and_then(Value::as_bool).unwrap_or(false),
                },
            );
        }
        let report = GradeReport::new(
            id.to_string(),
            per_feature,
            count("parallel_error_count")?,
            count("note_count")?,
        );
        let stored = v
            .get("overall_grade")
            .and_then(Value::as_f64)
            .ok_or_else(|| bad("$.overall_grade", "expected a number"))?;
        if (report.overall_grade.as_f64() - stored).abs() > 1e-9 {
            return Err(bad(
                "$.overall_grade",
                "does not equal the sum of contributions",
            ));
        }
        Ok(report)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::build_profile;
    use crate::test_support::{clean_chorale, parallel_chorale};

    fn with_fifths() -> Chorale {
        parallel_chorale()
    }

    fn clean() -> Chorale {
        clean_chorale()
    }

    #[test]
    fn self_grade_is_zero() {
        let c = clean();
        let p: CorpusProfile<f64> = build_profile(&[c.clone(), c.clone()]).unwrap();
        let r = grade(&c, &p).unwrap();
        assert_eq!(r.overall_grade, 0.0);
        assert_eq!(r.per_feature.len(), 9);
        assert_eq!(r.contribution(FeatureId::ParallelErrors), 0.0);
    }

    #[test]
    fn parallel_weight_is_ratio_of_ratios() {
        let f = with_fifths();
        let p: CorpusProfile<f64> = build_profile(&[f.clone(), clean()]).unwrap();
        let counts = FeatureCounts::extract(&f).unwrap();
        let expected = counts.error_note_ratio::<f64>() / p.corpus_error_note_ratio;
        assert_eq!(parallel_weight(&f, &p).unwrap(), expected);
        assert_eq!(parallel_weight(&clean(), &p).unwrap(), 0.0);

        let same: CorpusProfile<f64> = build_profile(&[f.clone(), f.clone()]).unwrap();
        assert_eq!(parallel_weight(&f, &same).unwrap(), 1.0);
    }

    #[test]
    fn degenerate_profile_rejects_erroneous_chorales() {
        let p: CorpusProfile<f64> = build_profile(&[clean(), clean()]).unwrap();
        assert_eq!(
            grade(&with_fifths(), &p),
            Err(GradeError::DegenerateProfile)
        );
        assert!(grade(&clean(), &p).is_ok());
    }

    #[test]
    fn overall_is_sum_of_contributions() {
        let mut per_feature = BTreeMap::new();
        for (f, d) in [
            (FeatureId::Pitch, 1.0),
            (FeatureId::Rhythm, 2.0),
            (FeatureId::HarmonicQuality, 0.5),
        ] {
            per_feature.insert(
                f,
                FeatureScore {
                    distance: d,
                    weight: 1.0,
                    contribution: d,
                    fallback: false,
                },
            );
        }
        let r = GradeReport::new("x".into(), per_feature, 0, 8);
        assert_eq!(r.overall_grade, 3.5);
        assert_eq!(r.ranked()[0].0, FeatureId::Rhythm);
    }

    #[test]
    fn json_round_trip() {
        let p: CorpusProfile<f64> = build_profile(&[with_fifths(), clean()]).unwrap();
        let r = grade(&with_fifths(), &p).unwrap();
        let back = GradeReport::<f64>::from_json_value(&r.to_json_value()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn table_lists_dominant_feature_first() {
        let p: CorpusProfile<f64> = build_profile(&[clean(), with_fifths()]).unwrap();
        let r = grade(&with_fifths(), &p).unwrap();
        let table = r.render_table();
        let first_row = table.lines().nth(2).unwrap();
        let top = r.ranked()[0].0;
        assert!(first_row.trim_start().starts_with(top.as_str()), "{table}");
    }

    #[test]
    fn convention_mismatch() {
        let mut p: CorpusProfile<f64> = build_profile(&[clean(), with_fifths()]).unwrap();
        p.metric_convention = "other".into();
        assert!(matches!(
            grade(&clean(), &p),
            Err(GradeError::ConventionMismatch(_))
        ));
    }
}
