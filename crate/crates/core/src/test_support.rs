//! Compact chorale builders for unit tests.
//!
//! A line is a space-separated list of `PITCH:DUR` tokens played back to back,
//! e.g. `"C5:1 D5:1/2 r:1/2 E5:2"`; `r` is a rest.

use crate::model::{
    parse_rational, Chorale, Key, Mode, NoteEvent, Rational, SpelledPitch, Voice, VoiceLabel,
};

pub fn pitches(s: &str) -> Vec<SpelledPitch> {
    s.split_whitespace().map(|p| p.parse().unwrap()).collect()
}

pub fn voice_from_line(label: VoiceLabel, line: &str) -> Voice {
    let mut t = Rational::from_integer(0);
    let mut events = Vec::new();
    for tok in line.split_whitespace() {
        let (p, d) = tok.split_once(':').expect("PITCH:DUR");
        let d = parse_rational(d).unwrap();
        if p != "r" {
            events.push(NoteEvent::new(t, d, p.parse().unwrap()));
        }
        t += d;
    }
    Voice::new(label, events).unwrap()
}

pub fn chorale_in_key(lines: &[&str], key: Key) -> Chorale {
    assert_eq!(lines.len(), 4);
    let voices = VoiceLabel::ALL
        .iter()
        .zip(lines)
        .map(|(&l, line)| voice_from_line(l, line))
        .collect();
    Chorale::new("test", voices, key).unwrap()
}

/// Chorale in C major.
pub fn chorale_from_lines(lines: &[&str]) -> Chorale {
    chorale_in_key(lines, Key::new("C".parse().unwrap(), Mode::Major).unwrap())
}

/// Seven slices in C major with no parallel fifths or octaves and one
/// repeated soprano motif.
pub fn clean_chorale() -> Chorale {
    chorale_from_lines(&[
        "E5:1 D5:1 C5:1 B4:1 C5:1 E5:1 D5:1",
        "G4:1 G4:1 E4:1 D4:1 E4:1 G4:1 G4:1",
        "C4:1 B3:1 A3:1 B3:1 G3:1 C4:1 B3:1",
        "C3:1 G2:1 A2:1 D3:1 C3:1 C3:1 G2:1",
    ])
}

/// Every voice pair moves in parallel; full of fifths and octaves.
pub fn parallel_chorale() -> Chorale {
    chorale_from_lines(&[
        "C5:1 D5:1 E5:1 C5:1 D5:1",
        "F4:1 G4:1 A4:1 F4:1 G4:1",
        "A3:1 B3:1 C4:1 A3:1 B3:1",
        "F3:1 G3:1 A3:1 F3:1 G3:1",
    ])
}
