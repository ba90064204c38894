//! Corpus profiles: pooled reference distributions for every feature.
//!
//! A profile pools the raw observations of every corpus chorale and
//! normalizes once, so chorales weigh in proportion to their note, slice
//! and pattern counts. It also stores the corpus error-to-note ratio used
//! to weight the parallel-error feature.
//!
//! Profile file layout (keys sorted, two-space indent):
//!
//! ```json
//! {
//!   "content_hash": "sha256:…",
//!   "corpus_error_note_ratio": 0.0123,
//!   "corpus_size": 40,
//!   "features": {
//!     "rhythm": { "entries": [["1/2", 0.31], ["1", 0.6]], "kind": "numeric" },
//!     "pitch": { "entries": [["#4", 0.01], ["1", 0.2]], "kind": "categorical" }
//!   },
//!   "metric_convention": "numeric=w1-cdf;categorical=total-variation",
//!   "repeated_sequence_fallback": 1.75,
//!   "version": 1
//! }
//! ```

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::features::{
    Distribution, DistributionError, FeatureCounts, FeatureError, FeatureId, SupportKind,
};
use crate::metrics::wasserstein_numeric;
use crate::model::{parse_rational, Chorale};
use crate::scalar::Scalar;

/// Identifies the ground metrics used for numeric and categorical features.
/// Grades computed under different conventions are not comparable.
pub const METRIC_CONVENTION: &str = "numeric=w1-cdf;categorical=total-variation";

pub const PROFILE_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProfileError {
    #[error("corpus has {0} chorales, at least 2 required")]
    CorpusTooSmall(usize),
    #[error("chorale `{chorale}`: {source}")]
    Build {
        chorale: String,
        source: FeatureError,
    },
    #[error("no chorale in the corpus has a repeated sequence")]
    NoRepeatedSequences,
    #[error("invalid profile at {path}: {message}")]
    Format { path: String, message: String },
    #[error("profile uses metric convention `{found}`, this build uses `{METRIC_CONVENTION}`")]
    ConventionMismatch { found: String },
    #[error("profile content hash mismatch: stored {stored}, computed {computed}")]
    HashMismatch { stored: String, computed: String },
    #[error("feature {feature}: {source}")]
    Distribution {
        feature: FeatureId,
        source: DistributionError,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusProfile<T> {
    pub features: BTreeMap<FeatureId, Distribution<T>>,
    pub corpus_error_note_ratio: T,
    pub corpus_size: usize,
    pub metric_convention: String,
    /// Distance charged to a chorale with no repeated sequences: the largest
    /// repeated-sequence distance observed among corpus chorales.
    pub repeated_sequence_fallback: T,
    pub content_hash: String,
}

/// Pools per-chorale counts into a profile.
pub fn build_profile<T: Scalar>(corpus: &[Chorale]) -> Result<CorpusProfile<T>, ProfileError> {
    if corpus.len() < 2 {
        return Err(ProfileError::CorpusTooSmall(corpus.len()));
    }
    let per_chorale = corpus
        .iter()
        .map(|c| {
            FeatureCounts::extract(c).map_err(|source| ProfileError::Build {
                chorale: c.id().to_string(),
                source,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut pooled = per_chorale[0].clone();
    for counts in &per_chorale[1..] {
        pooled.merge(counts);
    }
    if pooled.repeated_sequence.is_empty() {
        return Err(ProfileError::NoRepeatedSequences);
    }

    let features: BTreeMap<FeatureId, Distribution<T>> = FeatureId::ALL
        .into_iter()
        .map(|f| (f, pooled.histogram(f).normalize()))
        .collect();

    let reference = &features[&FeatureId::RepeatedSequence];
    let mut fallback = T::zero();
    for counts in per_chorale
        .iter()
        .filter(|c| !c.repeated_sequence.is_empty())
    {
        let d = wasserstein_numeric(&counts.repeated_sequence.normalize(), reference)
            .expect("both numeric and non-empty");
        fallback = fallback.max(d);
    }

    let mut profile = CorpusProfile {
        features,
        corpus_error_note_ratio: pooled.error_note_ratio(),
        corpus_size: corpus.len(),
        metric_convention: METRIC_CONVENTION.to_string(),
        repeated_sequence_fallback: fallback,
        content_hash: String::new(),
    };
    profile.content_hash = profile.compute_hash();
    Ok(profile)
}

fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .expect("finite value")
}

fn distribution_to_json<T: Scalar>(d: &Distribution<T>) -> Value {
    let entries: Vec<Value> = match d {
        Distribution::Numeric(e) => e
            .iter()
            .map(|(x, m)| json!([x.to_string(), number(m.as_f64())]))
            .collect(),
        Distribution::Categorical(e) => e
            .iter()
            .map(|(l, m)| json!([l, number(m.as_f64())]))
            .collect(),
    };
    json!({ "kind": d.kind().as_str(), "entries": entries })
}

fn fmt_err(path: &str, message: impl Into<String>) -> ProfileError {
    ProfileError::Format {
        path: path.to_string(),
        message: message.into(),
    }
}

fn distribution_from_json<T: Scalar>(
    feature: FeatureId,
    v: &Value,
) -> Result<Distribution<T>, ProfileError> {
    let path = format!("$.features.{feature}");
    let kind = v
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| fmt_err(&path, "missing kind"))?;
    if kind != feature.kind().as_str() {
        return Err(fmt_err(
            &path,
            format!("kind `{kind}`, expected `{}`", feature.kind()),
        ));
    }
    let entries = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| fmt_err(&path, "missing entries"))?;
    let mut pairs = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        let p = format!("{path}.entries[{i}]");
        let (Some(value), Some(mass)) = (
            e.get(0).and_then(Value::as_str),
            e.get(1).and_then(Value::as_f64),
        ) else {
            return Err(fmt_err(&p, "expected [string, number]"));
        };
        pairs.push((value.to_string(), T::of(mass)));
    }
    let built = match feature.kind() {
        SupportKind::Numeric => {
            let entries = pairs
                .into_iter()
                .map(|(x, m)| {
                    parse_rational(&x)
                        .map(|x| (x, m))
                        .map_err(|e| fmt_err(&path, e.to_string()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            Distribution::numeric(entries)
        }
        SupportKind::Categorical => Distribution::categorical(pairs),
    };
    built.map_err(|source| ProfileError::Distribution { feature, source })
}

impl<T: Scalar> CorpusProfile<T> {
    fn hashed_content(&self) -> Value {
        let features: Map<String, Value> = self
            .features
            .iter()
            .map(|(f, d)| (f.as_str().to_string(), distribution_to_json(d)))
            .collect();
        json!({
            "corpus_error_note_ratio": number(self.corpus_error_note_ratio.as_f64()),
            "features": features,
            "repeated_sequence_fallback": number(self.repeated_sequence_fallback.as_f64()),
        })
    }

    /// SHA-256 over the distributions, the error ratio and the fallback distance.
    pub fn compute_hash(&self) -> String {
        let bytes = serde_json::to_vec(&self.hashed_content()).expect("serializable");
        format!("sha256:{}", hex::encode(Sha256::digest(bytes)))
    }

    pub fn distribution(&self, f: FeatureId) -> &Distribution<T> {
        &self.features[&f]
    }

    /// True when the corpus has no parallel errors, which leaves the
    /// parallel-error weight undefined for any chorale that has some.
    pub fn is_degenerate(&self) -> bool {
        self.corpus_error_note_ratio == T::zero()
    }

    pub fn to_json(&self) -> String {
        let mut v = self.hashed_content();
        let obj = v.as_object_mut().expect("object");
        obj.insert("content_hash".into(), json!(self.content_hash));
        obj.insert("corpus_size".into(), json!(self.corpus_size));
        obj.insert("metric_convention".into(), json!(self.metric_convention));
        obj.insert("version".into(), json!(PROFILE_VERSION));
        let mut s = serde_json::to_string_pretty(&v).expect("serializable");
        s.push('\n');
        s
    }

    /// Parses and validates a profile file, rejecting other metric
    /// conventions and content that does not match its hash.
    pub fn from_json(text: &str) -> Result<Self, ProfileError> {
        let v: Value = serde_json::from_str(text).map_err(|e| fmt_err("$", e.to_string()))?;
        let obj = v
            .as_object()
            .ok_or_else(|| fmt_err("$", "expected an object"))?;
        let field = |name: &str| {
            obj.get(name)
                .ok_or_else(|| fmt_err(&format!("$.{name}"), "missing field"))
        };

        let version = field("version")?.as_u64();
        if version != Some(PROFILE_VERSION) {
            return Err(fmt_err(
                "$.version",
                format!("unsupported version {:?}", field("version")?),
            ));
        }
        let convention = field("metric_convention")?
            .as_str()
            .ok_or_else(|| fmt_err("$.metric_convention", "expected a string"))?;
        if convention != METRIC_CONVENTION {
            return Err(ProfileError::ConventionMismatch {
                found: convention.to_string(),
            });
        }
        let corpus_size = field("corpus_size")?
            .as_u64()
            .ok_or_else(|| fmt_err("$.corpus_size", "expected an integer"))?
            as usize;
        if corpus_size < 2 {
            return Err(ProfileError::CorpusTooSmall(corpus_size));
        }
        let real = |name: &str| -> Result<T, ProfileError> {
            let x = field(name)?
                .as_f64()
                .filter(|x| *x >= 0.0)
                .ok_or_else(|| fmt_err(&format!("$.{name}"), "expected a non-negative number"))?;
            Ok(T::of(x))
        };
        let ratio = real("corpus_error_note_ratio")?;
        let fallback = real("repeated_sequence_fallback")?;
        let feats = field("features")?
            .as_object()
            .ok_or_else(|| fmt_err("$.features", "expected an object"))?;
        if let Some(k) = feats.keys().find(|k| k.parse::<FeatureId>().is_err()) {
            return Err(fmt_err(&format!("$.features.{k}"), "unknown feature"));
        }
        let mut features = BTreeMap::new();
        for f in FeatureId::ALL {
            let d = feats
                .get(f.as_str())
                .ok_or_else(|| fmt_err(&format!("$.features.{f}"), "missing feature"))?;
            features.insert(f, distribution_from_json(f, d)?);
        }
        let stored = field("content_hash")?
            .as_str()
            .ok_or_else(|| fmt_err("$.content_hash", "expected a string"))?
            .to_string();
        let profile = CorpusProfile {
            features,
            corpus_error_note_ratio: ratio,
            corpus_size,
            metric_convention: convention.to_string(),
            repeated_sequence_fallback: fallback,
            content_hash: stored.clone(),
        };
        let computed = profile.compute_hash();
        if computed != stored {
            return Err(ProfileError::HashMismatch { stored, computed });
        }
        Ok(profile)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Rational;
    use crate::test_support::{chorale_from_lines, clean_chorale};

    fn toy(a: &str) -> Chorale {
        chorale_from_lines(&[
            a,
            "G4:1 F4:1 E4:1 D4:1",
            "E4:1 D4:1 C4:1 B3:1",
            "C3:1 B2:1 A2:1 G2:1",
        ])
    }

    #[test]
    fn duplicated_chorale_profile_matches_chorale() {
        let c = toy("C5:1 D5:1 C5:1 D5:1");
        let p: CorpusProfile<f64> = build_profile(&[c.clone(), c.clone()]).unwrap();
        let counts = FeatureCounts::extract(&c).unwrap();
        for f in FeatureId::ALL {
            assert_eq!(
                p.distribution(f),
                &counts.histogram(f).normalize::<f64>(),
                "{f}"
            );
        }
        assert_eq!(p.corpus_size, 2);
        assert_eq!(p.repeated_sequence_fallback, 0.0);
    }

    #[test]
    fn pooling_weights_by_note_count() {
        // 10 quarter notes against 30 eighth notes
        let a = chorale_from_lines(&["C5:1 C5:1 C5:1 D5:1", "C4:1 C4:1", "C4:1 C4:1", "C3:1 D3:1"]);
        let eighths = |p: &str, n: usize| format!("{p}:1/2 ").repeat(n);
        let (s, a2, t, b2) = (
            eighths("C5", 12),
            eighths("G4", 6),
            eighths("E4", 6),
            eighths("C3", 6),
        );
        let b = chorale_from_lines(&[&s, &a2, &t, &b2]);
        assert_eq!((a.note_count(), b.note_count()), (10, 30));
        let p: CorpusProfile<f64> = build_profile(&[a, b]).unwrap();
        assert_eq!(
            p.distribution(FeatureId::Rhythm),
            &Distribution::Numeric(vec![
                (Rational::new(1, 2), 0.75),
                (Rational::from_integer(1), 0.25)
            ])
        );
    }

    #[test]
    fn zero_error_corpus_is_degenerate() {
        let c = clean_chorale();
        let p: CorpusProfile<f64> = build_profile(&[c.clone(), c]).unwrap();
        assert_eq!(p.corpus_error_note_ratio, 0.0);
        assert!(p.is_degenerate());
        assert!(p.distribution(FeatureId::ParallelErrors).is_empty());
    }

    #[test]
    fn corpus_needs_two_chorales() {
        let c = toy("C5:1 D5:1 C5:1 D5:1");
        assert_eq!(
            build_profile::<f64>(&[c]),
            Err(ProfileError::CorpusTooSmall(1))
        );
    }

    #[test]
    fn corpus_without_repeats_is_rejected() {
        let c = toy("C5:1 D5:1 E5:1 F5:1");
        assert_eq!(
            build_profile::<f64>(&[c.clone(), c]),
            Err(ProfileError::NoRepeatedSequences)
        );
    }

    #[test]
    fn json_round_trip_and_tamper_detection() {
        let a = toy("C5:1 D5:1 C5:1 D5:1");
        let b = toy("E5:1 D5:1 E5:1 D5:1");
        let p: CorpusProfile<f64> = build_profile(&[a, b]).unwrap();
        let text = p.to_json();
        let back = CorpusProfile::<f64>::from_json(&text).unwrap();
        assert_eq!(back, p);
        assert_eq!(back.to_json(), text);

        let tampered = text.replacen("\"corpus_size\": 2", "\"corpus_size\": 3", 1);
        assert!(CorpusProfile::<f64>::from_json(&tampered).is_ok());
        let tampered = text.replacen("0.5", "0.25", 1);
        assert!(matches!(
            CorpusProfile::<f64>::from_json(&tampered),
            Err(ProfileError::HashMismatch { .. }) | Err(ProfileError::Distribution { .. })
        ));
        let other = text.replace(METRIC_CONVENTION, "numeric=w1-cdf;categorical=index-line");
        assert!(matches!(
            CorpusProfile::<f64>::from_json(&other),
            Err(ProfileError::ConventionMismatch { .. })
        ));
    }

    #[test]
    fn f32_profile_round_trips() {
        let a = toy("C5:1 D5:1 C5:1 D5:1");
        let b = toy("E5:1/2 D5:1 E5:1/2 D5:1");
        let p: CorpusProfile<f32> = build_profile(&[a, b]).unwrap();
        assert_eq!(CorpusProfile::<f32>::from_json(&p.to_json()).unwrap(), p);
    }
}
