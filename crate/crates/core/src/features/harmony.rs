//! Vertical sonorities: onset slicing and chord-quality classification.

use std::collections::BTreeSet;
use std::fmt;

use super::distribution::{Distribution, Histogram};
use crate::model::{Chorale, Rational, SpelledPitch};
use crate::scalar::Scalar;

/// The pitches sounding in all four voices at one onset, soprano first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slice {
    pub onset: Rational,
    pub pitches: [SpelledPitch; 4],
}

/// One slice per distinct onset in any voice. Onsets where some voice is
/// silent are skipped.
pub fn harmonic_slices(c: &Chorale) -> Vec<Slice> {
    let onsets: BTreeSet<Rational> = c
        .voices()
        .iter()
        .flat_map(|v| v.events().iter().map(|e| e.onset))
        .collect();
    onsets
        .into_iter()
        .filter_map(|t| {
            let mut pitches = [None; 4];
            for (slot, v) in pitches.iter_mut().zip(c.voices()) {
                *slot = Some(v.sounding_at(t)?.pitch);
            }
            Some(Slice {
                onset: t,
                pitches: pitches.map(|p| p.expect("all voices sounding")),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HarmonicQuality {
    Major,
    Minor,
    Diminished,
    Augmented,
    DominantSeventh,
    MajorSeventh,
    MinorSeventh,
    HalfDiminishedSeventh,
    DiminishedSeventh,
    Other,
}

/// Pitch-class templates relative to the chord root, in match order.
const TEMPLATES: [(HarmonicQuality, &[i32]); 9] = [
    (HarmonicQuality::Major, &[0, 4, 7]),
    (HarmonicQuality::Minor, &[0, 3, 7]),
    (HarmonicQuality::Diminished, &[0, 3, 6]),
    (HarmonicQuality::Augmented, &[0, 4, 8]),
    (HarmonicQuality::DominantSeventh, &[0, 4, 7, 10]),
    (HarmonicQuality::MajorSeventh, &[0, 4, 7, 11]),
    (HarmonicQuality::MinorSeventh, &[0, 3, 7, 10]),
    (HarmonicQuality::HalfDiminishedSeventh, &[0, 3, 6, 10]),
    (HarmonicQuality::DiminishedSeventh, &[0, 3, 6, 9]),
];

impl HarmonicQuality {
    pub fn as_str(self) -> &'static str {
        match self {
            HarmonicQuality::Major => "major",
            HarmonicQuality::Minor => "minor",
            HarmonicQuality::Diminished => "diminished",
            HarmonicQuality::Augmented => "augmented",
            HarmonicQuality::DominantSeventh => "dominant-seventh",
            HarmonicQuality::MajorSeventh => "major-seventh",
            HarmonicQuality::MinorSeventh => "minor-seventh",
            HarmonicQuality::HalfDiminishedSeventh => "half-diminished-seventh",
            HarmonicQuality::DiminishedSeventh => "diminished-seventh",
            HarmonicQuality::Other => "other",
        }
    }

    /// Classifies a set of pitch classes by exact template match under transposition.
    pub fn classify_pitch_classes(pcs: impl IntoIterator<Item = i32>) -> HarmonicQuality {
        let set = pcs
            .into_iter()
            .fold(0u16, |acc, pc| acc | 1 << pc.rem_euclid(12));
        for (quality, template) in TEMPLATES {
            for root in 0..12 {
                let mask = template
                    .iter()
                    .fold(0u16, |acc, i| acc | 1 << (root + i).rem_euclid(12));
                if mask == set {
                    return quality;
                }
            }
        }
        HarmonicQuality::Other
    }

    pub fn classify(pitches: &[SpelledPitch]) -> HarmonicQuality {
        Self::classify_pitch_classes(pitches.iter().map(|p| p.pitch_class()))
    }
}

impl fmt::Display for HarmonicQuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub(crate) fn harmonic_quality_histogram(c: &Chorale) -> Histogram {
    let mut h = Histogram::categorical();
    for s in harmonic_slices(c) {
        h.add_label(HarmonicQuality::classify(&s.pitches).as_str(), 1);
    }
    h
}

/// Distribution of chord qualities over all harmonic slices.
pub fn harmonic_quality_distribution<T: Scalar>(c: &Chorale) -> Distribution<T> {
    harmonic_quality_histogram(c).normalize()
}
