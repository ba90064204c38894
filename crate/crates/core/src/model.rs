//! Score model: spelled pitches, keys, timed notes, voices and chorales.
//!
//! All types are immutable once constructed. Time is measured in exact
//! rational quarter-note units.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, Zero};
use thiserror::Error;

/// Exact time and length value in quarter-note units.
pub type Rational = Ratio<i64>;

/// Minimum number of notes a chorale must contain to be graded.
pub const MIN_NOTE_COUNT: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid pitch `{0}`")]
    InvalidPitch(String),
    #[error("alteration {0} outside [-2, 2]")]
    AlterOutOfRange(i32),
    #[error("invalid key `{0}`")]
    InvalidKey(String),
    #[error("invalid rational `{0}`")]
    InvalidRational(String),
    #[error("{voice}: note {index} has non-positive duration {duration}")]
    NonPositiveDuration {
        voice: VoiceLabel,
        index: usize,
        duration: Rational,
    },
    #[error("{voice}: note {index} has negative onset {onset}")]
    NegativeOnset {
        voice: VoiceLabel,
        index: usize,
        onset: Rational,
    },
    #[error("{voice}: note {index} at {onset} overlaps the previous note")]
    Overlap {
        voice: VoiceLabel,
        index: usize,
        onset: Rational,
    },
    #[error("voice {0} is missing")]
    MissingVoice(VoiceLabel),
    #[error("voice {0} appears more than once")]
    DuplicateVoice(VoiceLabel),
    #[error("chorale has {0} notes, at least {MIN_NOTE_COUNT} required")]
    TooFewNotes(usize),
}

/// Parses `"3"`, `"-1"` or `"num/den"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational, ModelError> {
    let bad = || ModelError::InvalidRational(s.to_string());
    let int = |t: &str| -> Result<i64, ModelError> {
        if t.is_empty() || t.starts_with('+') {
            return Err(bad());
        }
        t.parse::<i64>().map_err(|_| bad())
    };
    match s.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (int(n)?, int(d)?);
            if d <= 0 {
                return Err(bad());
            }
            Ok(Ratio::new(n, d))
        }
        None => Ok(Ratio::from_integer(int(s)?)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    C,
    D,
    E,
    F,
    G,
    A,
    B,
}

impl Letter {
    pub const ALL: [Letter; 7] = [
        Letter::C,
        Letter::D,
        Letter::E,
        Letter::F,
        Letter::G,
        Letter::A,
        Letter::B,
    ];

    /// Diatonic index, C = 0 through B = 6.
    pub fn index(self) -> i32 {
        self as i32
    }

    pub fn from_index(i: i32) -> Letter {
        Letter::ALL[i.rem_euclid(7) as usize]
    }

    /// Pitch class of the natural note.
    pub fn natural_pc(self) -> i32 {
        [0, 2, 4, 5, 7, 9, 11][self as usize]
    }

    /// Position on the line of fifths relative to C.
    pub fn fifths(self) -> i32 {
        [0, 2, 4, -1, 1, 3, 5][self as usize]
    }

    pub fn from_char(c: char) -> Option<Letter> {
        Some(match c.to_ascii_uppercase() {
            'C' => Letter::C,
            'D' => Letter::D,
            'E' => Letter::E,
            'F' => Letter::F,
            'G' => Letter::G,
            'A' => Letter::A,
            'B' => Letter::B,
            _ => return None,
        })
    }

    pub fn as_char(self) -> char {
        ['C', 'D', 'E', 'F', 'G', 'A', 'B'][self as usize]
    }
}

fn accidental_str(alter: i32) -> String {
    if alter >= 0 {
        "#".repeat(alter as usize)
    } else {
        "b".repeat((-alter) as usize)
    }
}

/// Splits a leading run of `#` or `b` characters off `s` and returns the alteration.
fn take_accidentals(s: &str) -> (i32, &str) {
    let sharps = s.chars().take_while(|&c| c == '#').count();
    if sharps > 0 {
        return (sharps as i32, &s[sharps..]);
    }
    let flats = s.chars().take_while(|&c| c == 'b').count();
    (-(flats as i32), &s[flats..])
}

/// A pitch spelling without octave, e.g. F♯ or B♭.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PitchName {
    pub letter: Letter,
    pub alter: i8,
}

impl PitchName {
    pub fn new(letter: Letter, alter: i32) -> Result<Self, ModelError> {
        if !(-2..=2).contains(&alter) {
            return Err(ModelError::AlterOutOfRange(alter));
        }
        Ok(PitchName {
            letter,
            alter: alter as i8,
        })
    }

    pub fn pitch_class(self) -> i32 {
        (self.letter.natural_pc() + self.alter as i32).rem_euclid(12)
    }

    /// Position on the line of fifths (C = 0, G = 1, F = -1, F♯ = 6, ...).
    pub fn fifths(self) -> i32 {
        self.letter.fifths() + 7 * self.alter as i32
    }
}

impl fmt::Display for PitchName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            self.letter.as_char(),
            accidental_str(self.alter as i32)
        )
    }
}

impl FromStr for PitchName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        let letter = chars
            .next()
            .and_then(Letter::from_char)
            .ok_or_else(|| ModelError::InvalidPitch(s.to_string()))?;
        let (alter, rest) = take_accidentals(chars.as_str());
        if !rest.is_empty() {
            return Err(ModelError::InvalidPitch(s.to_string()));
        }
        PitchName::new(letter, alter)
    }
}

/// A notated pitch: letter, alteration and octave in scientific pitch notation.
///
/// Enharmonic spellings are distinct values: F♯4 != G♭4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpelledPitch {
    pub letter: Letter,
    pub alter: i8,
    pub octave: i8,
}

impl SpelledPitch {
    pub fn new(letter: Letter, alter: i32, octave: i32) -> Result<Self, ModelError> {
        if !(-2..=2).contains(&alter) {
            return Err(ModelError::AlterOutOfRange(alter));
        }
        if !(-1..=9).contains(&octave) {
            return Err(ModelError::InvalidPitch(format!(
                "{}{}{}",
                letter.as_char(),
                accidental_str(alter),
                octave
            )));
        }
        Ok(SpelledPitch {
            letter,
            alter: alter as i8,
            octave: octave as i8,
        })
    }

    pub fn name(self) -> PitchName {
        PitchName {
            letter: self.letter,
            alter: self.alter,
        }
    }

    /// MIDI note number; C4 = 60.
    pub fn midi(self) -> i32 {
        midi(self)
    }

    pub fn pitch_class(self) -> i32 {
        self.name().pitch_class()
    }
}

impl fmt::Display for SpelledPitch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name(), self.octave)
    }
}

impl FromStr for SpelledPitch {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidPitch(s.to_string());
        let mut chars = s.chars();
        let letter = chars.next().and_then(Letter::from_char).ok_or_else(bad)?;
        let (alter, rest) = take_accidentals(chars.as_str());
        if rest.is_empty() || rest.starts_with('+') {
            return Err(bad());
        }
        let octave: i32 = rest.parse().map_err(|_| bad())?;
        SpelledPitch::new(letter, alter, octave)
    }
}

/// Chromatic note number of a spelled pitch (C4 = 60).
pub fn midi(p: SpelledPitch) -> i32 {
    p.letter.natural_pc() + p.alter as i32 + 12 * (p.octave as i32 + 1)
}

/// Signed semitone distance from `a` to `b`; ascending intervals are positive.
pub fn directed_interval(a: SpelledPitch, b: SpelledPitch) -> i32 {
    midi(b) - midi(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Major,
    Minor,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Major => "major",
            Mode::Minor => "minor",
        }
    }

    /// Semitone offsets of the diatonic reference scale (natural minor for minor keys).
    pub fn scale_steps(self) -> [i32; 7] {
        match self {
            Mode::Major => [0, 2, 4, 5, 7, 9, 11],
            Mode::Minor => [0, 2, 3, 5, 7, 8, 10],
        }
    }
}

impl FromStr for Mode {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "major" => Ok(Mode::Major),
            "minor" => Ok(Mode::Minor),
            _ => Err(ModelError::InvalidKey(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Key {
    pub tonic: PitchName,
    pub mode: Mode,
}

impl Key {
    pub fn new(tonic: PitchName, mode: Mode) -> Result<Self, ModelError> {
        if !(-1..=1).contains(&tonic.alter) {
            return Err(ModelError::InvalidKey(format!(
                "{} {}",
                tonic,
                mode.as_str()
            )));
        }
        Ok(Key { tonic, mode })
    }

    /// Number of sharps (positive) or flats (negative) in the key signature.
    pub fn fifths(self) -> i32 {
        match self.mode {
            Mode::Major => self.tonic.fifths(),
            Mode::Minor => self.tonic.fifths() - 3,
        }
    }

    /// Diatonic pitch of the given scale degree (1..=7).
    pub fn diatonic(self, degree: u8) -> PitchName {
        let d = degree as i32 - 1;
        let letter = Letter::from_index(self.tonic.letter.index() + d);
        let pc = self.tonic.pitch_class() + self.mode.scale_steps()[d as usize];
        let alter = wrap_semitones(pc - letter.natural_pc());
        PitchName {
            letter,
            alter: alter as i8,
        }
    }
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.tonic, self.mode.as_str())
    }
}

/// Reduces a semitone difference into `[-6, 5]`.
fn wrap_semitones(x: i32) -> i32 {
    (x + 6).rem_euclid(12) - 6
}

/// A scale degree with an accidental relative to the key's diatonic scale.
///
/// Ordering and equality are on (degree, accidental), so ♯4̂ and ♭5̂ differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScaleDegree {
    pub degree: u8,
    pub accidental: i8,
}

impl fmt::Display for ScaleDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            accidental_str(self.accidental as i32),
            self.degree
        )
    }
}

/// Scale degree of `p` in key `k`, ignoring octave.
pub fn scale_degree(p: SpelledPitch, k: Key) -> ScaleDegree {
    let degree = (p.letter.index() - k.tonic.letter.index()).rem_euclid(7) + 1;
    let reference = k.diatonic(degree as u8);
    let accidental = wrap_semitones(p.pitch_class() - reference.pitch_class());
    ScaleDegree {
        degree: degree as u8,
        accidental: accidental as i8,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NoteEvent {
    pub onset: Rational,
    pub duration: Rational,
    pub pitch: SpelledPitch,
}

impl NoteEvent {
    pub fn new(onset: Rational, duration: Rational, pitch: SpelledPitch) -> Self {
        NoteEvent {
            onset,
            duration,
            pitch,
        }
    }

    pub fn end(&self) -> Rational {
        self.onset + self.duration
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VoiceLabel {
    Soprano,
    Alto,
    Tenor,
    Bass,
}

impl VoiceLabel {
    /// Top to bottom.
    pub const ALL: [VoiceLabel; 4] = [
        VoiceLabel::Soprano,
        VoiceLabel::Alto,
        VoiceLabel::Tenor,
        VoiceLabel::Bass,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            VoiceLabel::Soprano => "soprano",
            VoiceLabel::Alto => "alto",
            VoiceLabel::Tenor => "tenor",
            VoiceLabel::Bass => "bass",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Case-insensitive match on the full voice name.
    pub fn from_name(s: &str) -> Option<VoiceLabel> {
        let s = s.trim().to_ascii_lowercase();
        VoiceLabel::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

impl fmt::Display for VoiceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Voice {
    label: VoiceLabel,
    events: Vec<NoteEvent>,
}

impl Voice {
    /// Builds a voice, checking durations are positive and events do not overlap.
    pub fn new(label: VoiceLabel, events: Vec<NoteEvent>) -> Result<Self, ModelError> {
        let mut prev_end: Option<Rational> = None;
        for (index, e) in events.iter().enumerate() {
            if !e.duration.is_positive() {
                return Err(ModelError::NonPositiveDuration {
                    voice: label,
                    index,
                    duration: e.duration,
                });
            }
            if e.onset.is_negative() {
                return Err(ModelError::NegativeOnset {
                    voice: label,
                    index,
                    onset: e.onset,
                });
            }
            if prev_end.is_some_and(|end| e.onset < end) {
                return Err(ModelError::Overlap {
                    voice: label,
                    index,
                    onset: e.onset,
                });
            }
            prev_end = Some(e.end());
        }
        Ok(Voice { label, events })
    }

    pub fn label(&self) -> VoiceLabel {
        self.label
    }

    pub fn events(&self) -> &[NoteEvent] {
        &self.events
    }

    /// The note sounding at time `t`, if any.
    pub fn sounding_at(&self, t: Rational) -> Option<&NoteEvent> {
        let idx = self.events.partition_point(|e| e.onset <= t);
        let e = self.events[..idx].last()?;
        (t < e.end()).then_some(e)
    }
}

/// A four-part chorale: one voice per SATB label plus its key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chorale {
    id: String,
    voices: [Voice; 4],
    key: Key,
    total_quarters: Rational,
}

impl Chorale {
    /// Accepts the four voices in any order; they are stored top to bottom.
    pub fn new(id: impl Into<String>, voices: Vec<Voice>, key: Key) -> Result<Self, ModelError> {
        let mut slots: [Option<Voice>; 4] = Default::default();
        for v in voices {
            let slot = &mut slots[v.label.index()];
            if slot.is_some() {
                return Err(ModelError::DuplicateVoice(v.label));
            }
            *slot = Some(v);
        }
        if let Some(i) = slots.iter().position(Option::is_none) {
            return Err(ModelError::MissingVoice(VoiceLabel::ALL[i]));
        }
        let voices = slots.map(|v| v.expect("checked above"));
        let note_count: usize = voices.iter().map(|v| v.events.len()).sum();
        if note_count < MIN_NOTE_COUNT {
            return Err(ModelError::TooFewNotes(note_count));
        }
        let total_quarters = voices
            .iter()
            .filter_map(|v| v.events.last().map(NoteEvent::end))
            .max()
            .unwrap_or_else(Rational::zero);
        Ok(Chorale {
            id: id.into(),
            voices,
            key,
            total_quarters,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn key(&self) -> Key {
        self.key
    }

    /// Voices ordered soprano, alto, tenor, bass.
    pub fn voices(&self) -> &[Voice; 4] {
        &self.voices
    }

    pub fn voice(&self, label: VoiceLabel) -> &Voice {
        &self.voices[label.index()]
    }

    pub fn total_quarters(&self) -> Rational {
        self.total_quarters
    }

    pub fn note_count(&self) -> usize {
        self.voices.iter().map(|v| v.events.len()).sum()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }
}
