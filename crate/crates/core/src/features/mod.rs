//! The nine per-chorale feature distributions.

pub mod distribution;
pub mod harmony;
pub mod parallels;
pub mod patterns;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use distribution::{Distribution, DistributionError, Histogram, SupportKind};
pub use harmony::{harmonic_quality_distribution, harmonic_slices, HarmonicQuality, Slice};
pub use parallels::{find_parallel_errors, parallel_errors, ParallelError, ParallelErrorKind};
pub use patterns::{find_repeated_patterns, repeated_sequence_distribution, RepeatedPattern};

use crate::model::{directed_interval, scale_degree, Chorale, Rational, Voice, VoiceLabel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("{feature} undefined: {reason}")]
    Undefined { feature: FeatureId, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureId {
    Pitch,
    Rhythm,
    IntervalsSoprano,
    IntervalsAlto,
    IntervalsTenor,
    IntervalsBass,
    HarmonicQuality,
    ParallelErrors,
    RepeatedSequence,
}

impl FeatureId {
    /// In report column order: note, rhythm, parallel errors, harmonic
    /// quality, S/A/T/B intervals, repeated sequence.
    pub const ALL: [FeatureId; 9] = [
        FeatureId::Pitch,
        FeatureId::Rhythm,
        FeatureId::ParallelErrors,
        FeatureId::HarmonicQuality,
        FeatureId::IntervalsSoprano,
        FeatureId::IntervalsAlto,
        FeatureId::IntervalsTenor,
        FeatureId::IntervalsBass,
        FeatureId::RepeatedSequence,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            FeatureId::Pitch => "pitch",
            FeatureId::Rhythm => "rhythm",
            FeatureId::IntervalsSoprano => "intervals-soprano",
            FeatureId::IntervalsAlto => "intervals-alto",
            FeatureId::IntervalsTenor => "intervals-tenor",
            FeatureId::IntervalsBass => "intervals-bass",
            FeatureId::HarmonicQuality => "harmonic-quality",
            FeatureId::ParallelErrors => "parallel-errors",
            FeatureId::RepeatedSequence => "repeated-sequence",
        }
    }

    /// Short column title for tables.
    pub fn title(self) -> &'static str {
        match self {
            FeatureId::Pitch => "Note",
            FeatureId::Rhythm => "Rhythm",
            FeatureId::IntervalsSoprano => "S Intervals",
            FeatureId::IntervalsAlto => "A Intervals",
            FeatureId::IntervalsTenor => "T Intervals",
            FeatureId::IntervalsBass => "B Intervals",
            FeatureId::HarmonicQuality => "Harmonic Quality",
            FeatureId::ParallelErrors => "Parallel Errors",
            FeatureId::RepeatedSequence => "Repeated Sequence",
        }
    }

    pub fn kind(self) -> SupportKind {
        match self {
            FeatureId::Pitch | FeatureId::HarmonicQuality | FeatureId::ParallelErrors => {
                SupportKind::Categorical
            }
            _ => SupportKind::Numeric,
        }
    }

    pub fn intervals(voice: VoiceLabel) -> FeatureId {
        match voice {
            VoiceLabel::Soprano => FeatureId::IntervalsSoprano,
            VoiceLabel::Alto => FeatureId::IntervalsAlto,
            VoiceLabel::Tenor => FeatureId::IntervalsTenor,
            VoiceLabel::Bass => FeatureId::IntervalsBass,
        }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FeatureId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FeatureId::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| format!("unknown feature `{s}`"))
    }
}

fn pitch_histogram(c: &Chorale) -> Histogram {
    let mut h = Histogram::categorical();
    let key = c.key();
    for v in c.voices() {
        for e in v.events() {
            h.add_label(scale_degree(e.pitch, key).to_string(), 1);
        }
    }
    h
}

fn rhythm_histogram(c: &Chorale) -> Histogram {
    let mut h = Histogram::numeric();
    for v in c.voices() {
        for e in v.events() {
            h.add_value(e.duration, 1);
        }
    }
    h
}

fn interval_histogram(v: &Voice) -> Result<Histogram, FeatureError> {
    if v.events().len() < 2 {
        return Err(FeatureError::Undefined {
            feature: FeatureId::intervals(v.label()),
            reason: format!("{} has fewer than 2 notes", v.label()),
        });
    }
    let mut h = Histogram::numeric();
    for w in v.events().windows(2) {
        let step = directed_interval(w[0].pitch, w[1].pitch);
        h.add_value(Rational::from_integer(step as i64), 1);
    }
    Ok(h)
}

/// Scale degrees of every note in all voices, one count per note.
pub fn pitch_distribution<T: Scalar>(c: &Chorale) -> Distribution<T> {
    pitch_histogram(c).normalize()
}

/// Note lengths in quarter notes, one count per note.
pub fn rhythm_distribution<T: Scalar>(c: &Chorale) -> Distribution<T> {
    rhythm_histogram(c).normalize()
}

/// Directed melodic intervals in semitones between consecutive notes of one voice.
pub fn interval_distribution<T: Scalar>(v: &Voice) -> Result<Distribution<T>, FeatureError> {
    Ok(interval_histogram(v)?.normalize())
}

/// Raw counts for every feature of one chorale. Corpus profiles pool these
/// before normalizing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureCounts {
    pub pitch: Histogram,
    pub rhythm: Histogram,
    pub intervals: [Histogram; 4],
    pub harmonic_quality: Histogram,
    pub parallel_errors: Histogram,
    pub repeated_sequence: Histogram,
    pub error_count: u64,
    pub note_count: u64,
}

impl FeatureCounts {
    /// Extracts all counts. Fails when a voice has fewer than two notes.
    pub fn extract(c: &Chorale) -> Result<Self, FeatureError> {
        let [s, a, t, b] = c.voices();
        let intervals = [
            interval_histogram(s)?,
            interval_histogram(a)?,
            interval_histogram(t)?,
            interval_histogram(b)?,
        ];
        let (parallel_errors, error_count) = parallels::parallel_error_histogram(c);
        Ok(FeatureCounts {
            pitch: pitch_histogram(c),
            rhythm: rhythm_histogram(c),
            intervals,
            harmonic_quality: harmony::harmonic_quality_histogram(c),
            parallel_errors,
            repeated_sequence: patterns::repeated_sequence_histogram(c),
            error_count,
            note_count: c.note_count() as u64,
        })
    }

    pub fn histogram(&self, f: FeatureId) -> &Histogram {
        match f {
            FeatureId::Pitch => &self.pitch,
            FeatureId::Rhythm => &self.rhythm,
            FeatureId::IntervalsSoprano => &self.intervals[0],
            FeatureId::IntervalsAlto => &self.intervals[1],
            FeatureId::IntervalsTenor => &self.intervals[2],
            FeatureId::IntervalsBass => &self.intervals[3],
            FeatureId::HarmonicQuality => &self.harmonic_quality,
            FeatureId::ParallelErrors => &self.parallel_errors,
            FeatureId::RepeatedSequence => &self.repeated_sequence,
        }
    }

    pub fn merge(&mut self, other: &FeatureCounts) {
        self.pitch.merge(&other.pitch);
        self.rhythm.merge(&other.rhythm);
        for (a, b) in self.intervals.iter_mut().zip(&other.intervals) {
            a.merge(b);
        }
        self.harmonic_quality.merge(&other.harmonic_quality);
        self.parallel_errors.merge(&other.parallel_errors);
        self.repeated_sequence.merge(&other.repeated_sequence);
        self.error_count += other.error_count;
        self.note_count += other.note_count;
    }

    /// Errors per note.
    pub fn error_note_ratio<T: Scalar>(&self) -> T {
        T::of_count(self.error_count) / T::of_count(self.note_count)
    }
}
