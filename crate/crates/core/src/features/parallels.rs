//! Parallel fifths, octaves and unisons between adjacent harmonic slices.

use std::fmt;

use super::distribution::{Distribution, Histogram};
use super::harmony::{harmonic_slices, Slice};
use crate::model::{Chorale, Rational, VoiceLabel};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ParallelErrorKind {
    UnisonSimilar,
    FifthSimilar,
    FifthContrary,
    OctaveSimilar,
    OctaveContrary,
}

impl ParallelErrorKind {
    pub const ALL: [ParallelErrorKind; 5] = [
        ParallelErrorKind::UnisonSimilar,
        ParallelErrorKind::FifthSimilar,
        ParallelErrorKind::FifthContrary,
        ParallelErrorKind::OctaveSimilar,
        ParallelErrorKind::OctaveContrary,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ParallelErrorKind::UnisonSimilar => "P1-similar",
            ParallelErrorKind::FifthSimilar => "P5-similar",
            ParallelErrorKind::FifthContrary => "P5-contrary",
            ParallelErrorKind::OctaveSimilar => "P8-similar",
            ParallelErrorKind::OctaveContrary => "P8-contrary",
        }
    }
}

impl fmt::Display for ParallelErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One detected error: the pair of voices and the slice onsets it spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ParallelError {
    pub kind: ParallelErrorKind,
    pub upper: VoiceLabel,
    pub lower: VoiceLabel,
    pub from: Rational,
    pub to: Rational,
}

/// Checks one voice pair across two adjacent slices.
///
/// Intervals are taken as absolute semitone distances, so the result does
/// not depend on which voice is passed first.
pub fn classify_motion(a: (i32, i32), b: (i32, i32)) -> Option<ParallelErrorKind> {
    let (a1, a2) = a;
    let (b1, b2) = b;
    let da = a2 - a1;
    let db = b2 - b1;
    if da == 0 || db == 0 {
        return None;
    }
    let i1 = (a1 - b1).abs();
    let i2 = (a2 - b2).abs();
    let residue = i1 % 12;
    if residue != i2 % 12 || (residue != 0 && residue != 7) {
        return None;
    }
    let similar = da.signum() == db.signum();
    Some(match (residue, i1 == 0 && i2 == 0, similar) {
        (0, true, _) => ParallelErrorKind::UnisonSimilar,
        (0, false, true) => ParallelErrorKind::OctaveSimilar,
        (0, false, false) => ParallelErrorKind::OctaveContrary,
        (_, _, true) => ParallelErrorKind::FifthSimilar,
        (_, _, false) => ParallelErrorKind::FifthContrary,
    })
}

fn errors_between(prev: &Slice, next: &Slice, out: &mut Vec<ParallelError>) {
    for i in 0..4 {
        for j in i + 1..4 {
            let upper = (prev.pitches[i].midi(), next.pitches[i].midi());
            let lower = (prev.pitches[j].midi(), next.pitches[j].midi());
            if let Some(kind) = classify_motion(upper, lower) {
                out.push(ParallelError {
                    kind,
                    upper: VoiceLabel::ALL[i],
                    lower: VoiceLabel::ALL[j],
                    from: prev.onset,
                    to: next.onset,
                });
            }
        }
    }
}

/// Every parallel error in the chorale, in slice order then voice-pair order.
pub fn find_parallel_errors(c: &Chorale) -> Vec<ParallelError> {
    let slices = harmonic_slices(c);
    let mut out = Vec::new();
    for w in slices.windows(2) {
        errors_between(&w[0], &w[1], &mut out);
    }
    out
}

pub(crate) fn parallel_error_histogram(c: &Chorale) -> (Histogram, u64) {
    let mut h = Histogram::categorical();
    let errors = find_parallel_errors(c);
    for e in &errors {
        h.add_label(e.kind.as_str(), 1);
    }
    (h, errors.len() as u64)
}

/// Distribution over error kinds plus the raw error count. The
/// distribution is empty when there are no errors.
pub fn parallel_errors<T: Scalar>(c: &Chorale) -> (Distribution<T>, u64) {
    let (h, n) = parallel_error_histogram(c);
    (h.normalize(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::chorale_from_lines;

    fn kinds(lines: [&str; 4]) -> Vec<&'static str> {
        find_parallel_errors(&chorale_from_lines(&lines))
            .iter()
            .map(|e| e.kind.as_str())
            .collect()
    }

    #[test]
    fn similar_fifth_between_soprano_and_alto() {
        assert_eq!(
            kinds(["C5:1 D5:1", "F4:1 G4:1", "C4:1 C4:1", "F3:1 F3:1"]),
            ["P5-similar"]
        );
    }

    #[test]
    fn octave_to_double_octave_in_contrary_motion() {
        let c = chorale_from_lines(&["E5:1 E5:1", "G4:1 G4:1", "C4:1 G4:1", "C3:1 G2:1"]);
        let errors = find_parallel_errors(&c);
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].kind, ParallelErrorKind::OctaveContrary);
        assert_eq!(
            (errors[0].upper, errors[0].lower),
            (VoiceLabel::Tenor, VoiceLabel::Bass)
        );
    }

    #[test]
    fn oblique_motion_is_not_an_error() {
        assert!(kinds(["G4:1 G4:1", "C4:1 C4:1", "C4:1 D4:1", "C3:1 C3:1"]).is_empty());
    }

    #[test]
    fn pair_order_does_not_matter() {
        let a = ((60, 62), (53, 55));
        let b = ((53, 55), (60, 62));
        assert_eq!(classify_motion(a.0, a.1), classify_motion(b.0, b.1));
        assert_eq!(
            classify_motion((60, 67), (48, 43)),
            classify_motion((48, 43), (60, 67))
        );
    }

    #[test]
    fn empty_distribution_without_errors() {
        let c = chorale_from_lines(&["E5:1 D5:1", "C5:1 B4:1", "G4:1 G4:1", "C3:1 G2:1"]);
        let (d, n) = parallel_errors::<f64>(&c);
        assert_eq!(n, 0);
        assert!(d.is_empty());
    }
}
