//! Deterministic pitch corruption, a stand-in for model-generated chorales.
//!
//! Every note draws a uniform number and a shift from {-2, -1, +1, +2}
//! regardless of the rate, so for a fixed seed the notes altered at a lower
//! rate are a subset of those altered at a higher one. Rhythm is untouched.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ingest::{detect_key, write_canonical_json};
use crate::model::{Chorale, Letter, ModelError, NoteEvent, SpelledPitch, Voice};

const SHIFTS: [i32; 4] = [-2, -1, 1, 2];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorruptError {
    #[error("corruption rate must be in (0, 1], got {0}")]
    InvalidRate(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Spells `midi` with the fewest accidentals: a natural when one exists,
/// otherwise a sharp for upward shifts and a flat for downward ones.
pub fn respell(midi: i32, upward: bool) -> Result<SpelledPitch, ModelError> {
    let pc = midi.rem_euclid(12);
    let (letter, alter) = match Letter::ALL.iter().find(|l| l.natural_pc() == pc) {
        Some(&l) => (l, 0),
        None if upward => (natural_at((pc + 11) % 12), 1),
        None => (natural_at((pc + 1) % 12), -1),
    };
    let octave = (midi - letter.natural_pc() - alter).div_euclid(12) - 1;
    SpelledPitch::new(letter, alter, octave)
}

fn natural_at(pc: i32) -> Letter {
    *Letter::ALL
        .iter()
        .find(|l| l.natural_pc() == pc)
        .expect("a natural exists next to every black key")
}

fn rng_for(c: &Chorale, seed: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(write_canonical_json(c));
    h.update(seed.to_le_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

/// Transposes each note with probability `rate`, visiting voices soprano to
/// bass and notes in time order. The key is re-detected afterwards, using
/// the original key's signature for spelling. Ids are kept.
pub fn corrupt(c: &Chorale, rate: f64, seed: u64) -> Result<Chorale, CorruptError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(CorruptError::InvalidRate(rate));
    }
    let mut rng = rng_for(c, seed);
    let mut changed = false;
    let mut voices = Vec::with_capacity(4);
    for v in c.voices() {
        let mut events = Vec::with_capacity(v.events().len());
        for e in v.events() {
            let u: f64 = rng.gen();
            let shift = SHIFTS[rng.gen_range(0..SHIFTS.len())];
            let pitch = if u < rate {
                changed = true;
                respell(e.pitch.midi() + shift, shift > 0)?
            } else {
                e.pitch
            };
            events.push(NoteEvent::new(e.onset, e.duration, pitch));
        }
        voices.push(Voice::new(v.label(), events)?);
    }
    if !changed {
        return Ok(c.clone());
    }
    let key = detect_key(&voices, Some(c.key().fifths()));
    Ok(Chorale::new(c.id(), voices, key)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_support::chorale_from_lines;

    fn c() -> Chorale {
        chorale_from_lines(&[
            "E5:1 D5:1 C5:1 E5:1 D5:1 C5:2",
            "C5:1 B4:1 A4:1 C5:1 B4:1 G4:2",
            "G4:1 G4:1 E4:1 G4:1 G4:1 E4:2",
            "C3:1 G2:1 A2:1 C3:1 G2:1 C3:2",
        ])
    }

    #[test]
    fn respelling_is_minimal() {
        let cases = [
            (61, true, "C#4"),
            (61, false, "Db4"),
            (60, false, "C4"),
            (71, true, "B4"),
            (59, false, "B3"),
            (70, true, "A#4"),
        ];
        for (m, up, s) in cases {
            let p = respell(m, up).unwrap();
            assert_eq!(p.to_string(), s);
            assert_eq!(p.midi(), m);
        }
    }

    #[test]
    fn deterministic_and_shape_preserving() {
        let x = corrupt(&c(), 0.5, 7).unwrap();
        assert_eq!(x, corrupt(&c(), 0.5, 7).unwrap());
        assert_eq!(x.id(), c().id());
        for (a, b) in x.voices().iter().zip(c().voices()) {
            assert_eq!(a.events().len(), b.events().len());
            for (ea, eb) in a.events().iter().zip(b.events()) {
                assert_eq!((ea.onset, ea.duration), (eb.onset, eb.duration));
                assert!([0, 1, 2].contains(&(ea.pitch.midi() - eb.pitch.midi()).abs()));
            }
        }
    }

    #[test]
    fn rate_one_changes_every_note() {
        let x = corrupt(&c(), 1.0, 3).unwrap();
        let moved = x
            .voices()
            .iter()
            .zip(c().voices())
            .flat_map(|(a, b)| a.events().iter().zip(b.events()))
            .filter(|(a, b)| a.pitch.midi() != b.pitch.midi())
            .count();
        assert_eq!(moved, c().note_count());
    }

    #[test]
    fn tiny_rate_is_identity() {
        assert_eq!(corrupt(&c(), 1e-12, 1).unwrap(), c());
    }

    #[test]
    fn lower_rate_alters_a_subset() {
        let altered = |rate| {
            let x = corrupt(&c(), rate, 11).unwrap();
            x.voices()
                .iter()
                .zip(c().voices())
                .flat_map(|(a, b)| a.events().iter().zip(b.events()))
                .map(|(a, b)| a.pitch != b.pitch)
                .collect::<Vec<_>>()
        };
        let (lo, hi) = (altered(0.2), altered(0.6));
        assert!(lo.iter().zip(&hi).all(|(l, h)| !l || *h));
    }

    #[test]
    fn invalid_rates() {
        for r in [0.0, -0.1, 1.5, f64::NAN] {
            assert!(matches!(
                corrupt(&c(), r, 0),
                Err(CorruptError::InvalidRate(_))
            ));
        }
    }
}
