//! Repeated-sequence discovery over a voice's token string.
//!
//! A correlative matrix `T` over token pairs `i < j` records the length of
//! the common run ending at `i` and `j`: `T[i][j] = T[i-1][j-1] + 1` when the
//! tokens match, else 0. Every entry `T[i][j] >= L` witnesses a substring of
//! length `L` occurring (at least) at `i - L + 1` and `j - L + 1`.
//!
//! Occurrences are counted non-overlapping, leftmost first. A substring is
//! reported when it has at least two tokens and at least two occurrences, and
//! is not contained in a longer reported substring with the same count.

use std::collections::{BTreeSet, HashMap};
use std::hash::Hash;

use num_traits::Zero;

use super::distribution::{Distribution, Histogram};
use super::{FeatureError, FeatureId};
use crate::model::{Chorale, PitchName, Rational, Voice, VoiceLabel};
use crate::scalar::Scalar;

/// A repeated substring found in one token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repeat {
    pub len: usize,
    /// Start indices of the non-overlapping occurrences, ascending.
    pub starts: Vec<usize>,
}

impl Repeat {
    pub fn count(&self) -> usize {
        self.starts.len()
    }
}

/// Leftmost-greedy selection of non-overlapping occurrences from all start positions.
pub fn non_overlapping(starts: &BTreeSet<usize>, len: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut free_from = 0;
    for &s in starts {
        if s >= free_from {
            out.push(s);
            free_from = s + len;
        }
    }
    out
}

fn contains<K: PartialEq>(haystack: &[K], needle: &[K]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}

/// Drops repeats contained in a longer repeat with the same occurrence count.
pub fn suppress_contained<K: PartialEq>(tokens: &[K], repeats: Vec<Repeat>) -> Vec<Repeat> {
    let slice = |r: &Repeat| &tokens[r.starts[0]..r.starts[0] + r.len];
    let keep: Vec<bool> = repeats
        .iter()
        .map(|p| {
            !repeats
                .iter()
                .any(|q| q.len > p.len && q.count() == p.count() && contains(slice(q), slice(p)))
        })
        .collect();
    repeats
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then_some(r))
        .collect()
}

/// All maximal repeated substrings of at least two tokens occurring at least twice.
///
/// Results are ordered by first occurrence, then length.
pub fn find_repeats<K: Eq + Hash>(tokens: &[K]) -> Vec<Repeat> {
    let n = tokens.len();
    // One row of the correlative matrix at a time: prev[j] = T[i-1][j].
    let mut prev = vec![0usize; n];
    let mut cur = vec![0usize; n];
    let mut occurrences: HashMap<&[K], BTreeSet<usize>> = HashMap::new();
    for i in 0..n {
        for j in (i + 1)..n {
            cur[j] = if tokens[i] == tokens[j] {
                if i > 0 {
                    prev[j - 1] + 1
                } else {
                    1
                }
            } else {
                0
            };
            for len in 2..=cur[j] {
                let (a, b) = (i + 1 - len, j + 1 - len);
                let starts = occurrences.entry(&tokens[a..a + len]).or_default();
                starts.insert(a);
                starts.insert(b);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }

    let mut repeats: Vec<Repeat> = occurrences
        .into_iter()
        .map(|(sub, starts)| Repeat {
            len: sub.len(),
            starts: non_overlapping(&starts, sub.len()),
        })
        .filter(|r| r.count() >= 2)
        .collect();
    repeats.sort_by_key(|r| (r.starts[0], r.len));
    suppress_contained(tokens, repeats)
}

/// Token used for pattern matching: octave-free spelling plus duration.
pub type PatternToken = (PitchName, Rational);

pub fn voice_tokens(v: &Voice) -> Vec<PatternToken> {
    v.events()
        .iter()
        .map(|e| (e.pitch.name(), e.duration))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatedPattern {
    pub voice: VoiceLabel,
    pub token_length: usize,
    pub quarter_length: Rational,
    pub occurrence_count: usize,
    pub occurrence_onsets: Vec<Rational>,
}

/// Repeated patterns within a single voice.
pub fn find_repeated_patterns(v: &Voice) -> Vec<RepeatedPattern> {
    let tokens = voice_tokens(v);
    let events = v.events();
    find_repeats(&tokens)
        .into_iter()
        .map(|r| {
            let first = r.starts[0];
            let quarter_length = tokens[first..first + r.len]
                .iter()
                .fold(Rational::zero(), |acc, t| acc + t.1);
            RepeatedPattern {
                voice: v.label(),
                token_length: r.len,
                quarter_length,
                occurrence_count: r.count(),
                occurrence_onsets: r.starts.iter().map(|&s| events[s].onset).collect(),
            }
        })
        .collect()
}

pub(crate) fn repeated_sequence_histogram(c: &Chorale) -> Histogram {
    let mut h = Histogram::numeric();
    for v in c.voices() {
        for p in find_repeated_patterns(v) {
            h.add_value(p.quarter_length, p.occurrence_count as u64);
        }
    }
    h
}

/// Pattern lengths in quarter notes, pooled over all voices and weighted by
/// occurrence count. Undefined when the chorale has no repeats.
pub fn repeated_sequence_distribution<T: Scalar>(
    c: &Chorale,
) -> Result<Distribution<T>, FeatureError> {
    let h = repeated_sequence_histogram(c);
    if h.is_empty() {
        return Err(FeatureError::Undefined {
            feature: FeatureId::RepeatedSequence,
            reason: "no repeated sequences".into(),
        });
    }
    Ok(h.normalize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::{chorale_from_lines, voice_from_line};

    #[test]
    fn abab() {
        let r = find_repeats(&['A', 'B', 'A', 'B']);
        assert_eq!(
            r,
            vec![Repeat {
                len: 2,
                starts: vec![0, 2]
            }]
        );
    }

    #[test]
    fn distinct_tokens_have_no_repeats() {
        assert!(find_repeats(&[1, 2, 3, 4, 5, 6]).is_empty());
        assert!(find_repeats::<u8>(&[]).is_empty());
    }

    #[test]
    fn overlapping_only_is_not_a_repeat() {
        // "AA" occurs at 0 and 1 but only once without overlap.
        assert!(find_repeats(&['A', 'A', 'A']).is_empty());
    }

    #[test]
    fn eight_identical_tokens() {
        let r = find_repeats(&[0u8; 8]);
        let summary: Vec<(usize, usize)> = r.iter().map(|r| (r.len, r.count())).collect();
        // length 3 (2 occurrences) is inside length 4 (2 occurrences)
        assert_eq!(summary, vec![(2, 4), (4, 2)]);
    }

    #[test]
    fn pattern_lengths_in_quarters() {
        let v = voice_from_line(VoiceLabel::Soprano, "C5:1 D5:1/2 E5:1 C5:1 D5:1/2 G5:2");
        let p = find_repeated_patterns(&v);
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].token_length, 2);
        assert_eq!(p[0].quarter_length, Rational::new(3, 2));
        assert_eq!(
            p[0].occurrence_onsets,
            vec![Rational::from_integer(0), Rational::new(5, 2)]
        );
    }

    #[test]
    fn octave_is_ignored_in_tokens() {
        let v = voice_from_line(VoiceLabel::Bass, "C3:1 G3:1 C2:1 G2:1");
        assert_eq!(find_repeated_patterns(&v).len(), 1);
    }

    #[test]
    fn single_motif_gives_point_mass() {
        let c = chorale_from_lines(&[
            "C5:1 D5:1 E5:1 C5:1 D5:1",
            "G4:1 F4:1 E4:1 D4:1 E4:1",
            "E4:1 D4:1 C4:1 B3:1 G3:1",
            "C3:1 B2:1 A2:1 G2:1 C3:1",
        ]);
        let d = repeated_sequence_distribution::<f64>(&c).unwrap();
        assert_eq!(
            d,
            Distribution::Numeric(vec![(Rational::from_integer(2), 1.0)])
        );
    }

    #[test]
    fn two_patterns_pool_by_occurrence() {
        let c = chorale_from_lines(&[
            "C5:1 D5:1 E5:1 C5:1 D5:1",
            "G4:1 F4:1 E4:1/2 G4:1 F4:1 E4:1/2",
            "E4:1 D4:1 C4:1 B3:1 G3:1",
            "C3:1 B2:1 A2:1 G2:1 C3:1",
        ]);
        let d = repeated_sequence_distribution::<f64>(&c).unwrap();
        assert_eq!(
            d,
            Distribution::Numeric(vec![
                (Rational::from_integer(2), 0.5),
                (Rational::new(5, 2), 0.5)
            ])
        );
    }

    #[test]
    fn no_repeats_is_undefined() {
        let c = chorale_from_lines(&[
            "C5:1 D5:1 E5:1",
            "G4:1 F4:1 E4:1",
            "E4:1 D4:1 C4:1",
            "C3:1 B2:1 A2:1",
        ]);
        assert!(repeated_sequence_distribution::<f64>(&c).is_err());
    }
}
