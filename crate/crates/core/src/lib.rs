//! Grade four-part chorales against a reference corpus.
//!
//! Each chorale is reduced to nine feature distributions (scale degrees,
//! note lengths, per-voice melodic intervals, chord qualities, parallel
//! fifths and octaves, and repeated-sequence lengths). The grade is the sum
//! over features of the Wasserstein distance between the chorale's
//! distribution and the corpus distribution, with parallel errors weighted
//! by how often the chorale commits them relative to the corpus. Lower is
//! better.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, with `F32` variants for
//! single precision.
//!
//! ```no_run
//! use chorale_grader::{build_profile, grade, load_chorale, CorpusProfile};
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let corpus = vec![
//!     load_chorale("bwv1.6.json".as_ref())?,
//!     load_chorale("bwv10.7.json".as_ref())?,
//! ];
//! let profile: CorpusProfile = build_profile(&corpus)?;
//! let report = grade(&corpus[0], &profile)?;
//! print!("{}", report.render_table());
//! # Ok(())
//! # }
//! ```

pub mod corrupt;
pub mod evaluate;
pub mod features;
pub mod grade;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod profile;
pub mod scalar;

#[cfg(test)]
mod test_support;

pub use corrupt::{corrupt, CorruptError};
pub use evaluate::{discriminate, grade_set, EvaluateError};
pub use features::{FeatureCounts, FeatureError, FeatureId, Histogram, SupportKind};
pub use grade::{grade, parallel_weight, FeatureScore, GradeError};
pub use ingest::{
    load_chorale, parse_canonical_json, parse_musicxml, write_canonical_json, IngestError,
};
pub use metrics::{
    ks_two_sample, wasserstein, wasserstein_categorical, wasserstein_numeric, MetricError,
};
pub use model::{
    Chorale, Key, Mode, NoteEvent, Rational, ScaleDegree, SpelledPitch, Voice, VoiceLabel,
};
pub use profile::{build_profile, ProfileError, METRIC_CONVENTION};
pub use scalar::Scalar;

pub type Distribution = features::Distribution<f64>;
pub type CorpusProfile = profile::CorpusProfile<f64>;
pub type GradeReport = grade::GradeReport<f64>;
pub type KsResult = metrics::KsResult<f64>;
pub type SummaryStats = evaluate::SummaryStats<f64>;
pub type SetEvaluation = evaluate::SetEvaluation<f64>;
pub type EvaluationSummary = evaluate::EvaluationSummary<f64>;
pub type Discrimination = evaluate::Discrimination<f64>;

pub type DistributionF32 = features::Distribution<f32>;
pub type CorpusProfileF32 = profile::CorpusProfile<f32>;
pub type GradeReportF32 = grade::GradeReport<f32>;
pub type KsResultF32 = metrics::KsResult<f32>;
