//! Reader for the uncompressed `score-partwise` MusicXML subset used by chorale scores.
//!
//! Supported: pitched notes and rests, `<tie>`, `<backup>`/`<forward>`,
//! divisions, key and time signatures, 3:2 tuplets, and up to two voices per
//! part. Grace notes, cue notes, unpitched notes, chords within a voice, other
//! tuplet ratios and microtonal alterations are rejected. Purely notational
//! elements (lyrics, directions, fermatas, barlines, layout) are ignored.

use std::collections::BTreeMap;

use num_traits::Zero;
use roxmltree::{Document, Node, ParsingOptions};

use super::key::detect_key;
use super::IngestError;
use crate::model::{Chorale, Letter, NoteEvent, Rational, SpelledPitch, Voice, VoiceLabel};

/// A note or rest as read from the score, timed in quarter notes from the
/// start of the part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawNote {
    pub voice: String,
    pub onset: Rational,
    pub duration: Rational,
    /// `None` for a rest.
    pub pitch: Option<SpelledPitch>,
    pub tie_start: bool,
    pub tie_stop: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawPart {
    pub name: String,
    pub notes: Vec<RawNote>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawScore {
    pub parts: Vec<RawPart>,
    /// First key signature seen, in fifths.
    pub key_signature_fifths: Option<i32>,
}

fn xml_err(message: impl Into<String>) -> IngestError {
    IngestError::Parse {
        path: "musicxml".into(),
        message: message.into(),
    }
}

fn child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Option<Node<'a, 'i>> {
    node.children().find(|c| c.has_tag_name(name))
}

fn child_text<'a>(node: Node<'a, '_>, name: &str) -> Option<&'a str> {
    child(node, name).and_then(|c| c.text()).map(str::trim)
}

fn int_child(node: Node, name: &str) -> Result<Option<i64>, IngestError> {
    child_text(node, name)
        .map(|t| {
            t.parse::<i64>()
                .map_err(|_| xml_err(format!("<{name}> is not an integer: `{t}`")))
        })
        .transpose()
}

fn parse_pitch(pitch: Node) -> Result<SpelledPitch, IngestError> {
    let step = child_text(pitch, "step").ok_or_else(|| xml_err("<pitch> without <step>"))?;
    let letter = step
        .chars()
        .next()
        .filter(|_| step.len() == 1)
        .and_then(Letter::from_char)
        .ok_or_else(|| xml_err(format!("bad <step> `{step}`")))?;
    let alter = match child_text(pitch, "alter") {
        None => 0,
        Some(t) => {
            let a: f64 = t
                .parse()
                .map_err(|_| xml_err(format!("bad <alter> `{t}`")))?;
            if a.fract() != 0.0 {
                return Err(IngestError::Unsupported(format!("microtonal alter {t}")));
            }
            a as i32
        }
    };
    let octave = int_child(pitch, "octave")?.ok_or_else(|| xml_err("<pitch> without <octave>"))?;
    Ok(SpelledPitch::new(letter, alter, octave as i32)?)
}

fn check_tuplet(note: Node) -> Result<(), IngestError> {
    if let Some(tm) = child(note, "time-modification") {
        let actual = int_child(tm, "actual-notes")?.unwrap_or(0);
        let normal = int_child(tm, "normal-notes")?.unwrap_or(0);
        if (actual, normal) != (3, 2) {
            return Err(IngestError::Unsupported(format!(
                "tuplet {actual}:{normal}"
            )));
        }
    }
    Ok(())
}

fn read_part(part: Node, name: String, fifths: &mut Option<i32>) -> Result<RawPart, IngestError> {
    let mut divisions: Option<i64> = None;
    let mut measure_start = Rational::zero();
    let mut notes = Vec::new();
    for measure in part.children().filter(|n| n.has_tag_name("measure")) {
        let mut pos = Rational::zero();
        let mut extent = Rational::zero();
        for el in measure.children().filter(Node::is_element) {
            let quarters = |el: Node, divisions: Option<i64>| -> Result<Rational, IngestError> {
                let d = int_child(el, "duration")?.ok_or_else(|| {
                    xml_err(format!("<{}> without <duration>", el.tag_name().name()))
                })?;
                let div = divisions.ok_or_else(|| xml_err("duration before <divisions>"))?;
                if d < 0 {
                    return Err(xml_err("negative duration"));
                }
                Ok(Rational::new(d, div))
            };
            match el.tag_name().name() {
                "attributes" => {
                    if let Some(d) = int_child(el, "divisions")? {
                        if d <= 0 {
                            return Err(xml_err("divisions must be positive"));
                        }
                        divisions = Some(d);
                    }
                    if let Some(key) = child(el, "key") {
                        if let (None, Some(f)) = (*fifths, int_child(key, "fifths")?) {
                            *fifths = Some(f as i32);
                        }
                    }
                }
                "note" => {
                    for unsupported in ["grace", "cue", "unpitched"] {
                        if child(el, unsupported).is_some() {
                            return Err(IngestError::Unsupported(unsupported.into()));
                        }
                    }
                    if child(el, "chord").is_some() {
                        return Err(IngestError::Unsupported("chord".into()));
                    }
                    check_tuplet(el)?;
                    let duration = quarters(el, divisions)?;
                    let pitch = match (child(el, "pitch"), child(el, "rest")) {
                        (Some(p), _) => Some(parse_pitch(p)?),
                        (None, Some(_)) => None,
                        (None, None) => return Err(xml_err("<note> without <pitch> or <rest>")),
                    };
                    let ties = |kind: &str| {
                        el.children()
                            .any(|t| t.has_tag_name("tie") && t.attribute("type") == Some(kind))
                    };
                    notes.push(RawNote {
                        voice: child_text(el, "voice").unwrap_or("1").to_string(),
                        onset: measure_start + pos,
                        duration,
                        pitch,
                        tie_start: ties("start"),
                        tie_stop: ties("stop"),
                    });
                    pos += duration;
                }
                "backup" => pos -= quarters(el, divisions)?,
                "forward" => pos += quarters(el, divisions)?,
                _ => {}
            }
            if pos < Rational::zero() {
                return Err(xml_err("<backup> before the start of the measure"));
            }
            extent = extent.max(pos);
        }
        measure_start += extent;
    }
    Ok(RawPart { name, notes })
}

/// Reads the raw note records of a MusicXML document.
pub fn read_raw_score(document: &[u8]) -> Result<RawScore, IngestError> {
    let text = std::str::from_utf8(document).map_err(|e| xml_err(format!("not UTF-8: {e}")))?;
    let opts = ParsingOptions {
        allow_dtd: true,
        ..ParsingOptions::default()
    };
    let doc = Document::parse_with_options(text, opts).map_err(|e| xml_err(e.to_string()))?;
    let root = doc.root_element();
    match root.tag_name().name() {
        "score-partwise" => {}
        "score-timewise" => return Err(IngestError::Unsupported("score-timewise".into())),
        other => return Err(xml_err(format!("unexpected root element <{other}>"))),
    }

    let mut names = BTreeMap::new();
    if let Some(list) = child(root, "part-list") {
        for sp in list.children().filter(|n| n.has_tag_name("score-part")) {
            if let Some(id) = sp.attribute("id") {
                names.insert(id, child_text(sp, "part-name").unwrap_or("").to_string());
            }
        }
    }

    let mut fifths = None;
    let parts = root
        .children()
        .filter(|n| n.has_tag_name("part"))
        .map(|p| {
            let name = p
                .attribute("id")
                .and_then(|id| names.get(id).cloned())
                .unwrap_or_default();
            read_part(p, name, &mut fifths)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RawScore {
        parts,
        key_signature_fifths: fifths,
    })
}

/// Merges tied notes of one voice into single events, dropping rests.
pub fn merge_ties(notes: &[RawNote]) -> Vec<NoteEvent> {
    let mut out: Vec<NoteEvent> = Vec::new();
    let mut open = false;
    for n in notes {
        let Some(pitch) = n.pitch else {
            open = false;
            continue;
        };
        if let Some(last) = out.last_mut() {
            if n.tie_stop && open && last.pitch == pitch && last.end() == n.onset {
                last.duration += n.duration;
                open = n.tie_start;
                continue;
            }
        }
        out.push(NoteEvent::new(n.onset, n.duration, pitch));
        open = n.tie_start;
    }
    out
}

fn voice_order(v: &str) -> (i64, String) {
    (v.parse().unwrap_or(i64::MAX), v.to_string())
}

/// Splits raw parts into exactly four voice streams and assigns SATB labels.
fn assign_voices(score: &RawScore) -> Result<Vec<Voice>, IngestError> {
    // (part index, notes of one voice)
    let mut streams: Vec<(usize, Vec<RawNote>)> = Vec::new();
    for (pi, part) in score.parts.iter().enumerate() {
        let mut by_voice: BTreeMap<(i64, String), Vec<RawNote>> = BTreeMap::new();
        for n in part.notes.iter().filter(|n| n.pitch.is_some()) {
            by_voice
                .entry(voice_order(&n.voice))
                .or_default()
                .push(n.clone());
        }
        for (_, mut notes) in by_voice {
            // tie flags need the rests removed but original order kept
            notes.sort_by_key(|n| n.onset);
            streams.push((pi, notes));
        }
    }
    if streams.len() != 4 {
        return Err(IngestError::VoiceCount(streams.len()));
    }

    let one_voice_per_part =
        score.parts.len() == 4 && streams.iter().enumerate().all(|(i, s)| s.0 == i);
    let mut labels = VoiceLabel::ALL;
    if one_voice_per_part {
        let named: Vec<Option<VoiceLabel>> = score
            .parts
            .iter()
            .map(|p| VoiceLabel::from_name(&p.name))
            .collect();
        if let [Some(a), Some(b), Some(c), Some(d)] = named[..] {
            let mut sorted = [a, b, c, d];
            sorted.sort();
            if sorted == VoiceLabel::ALL {
                labels = [a, b, c, d];
            }
        }
    }

    let merged: Vec<Vec<NoteEvent>> = streams.iter().map(|(_, n)| merge_ties(n)).collect();
    let start = merged
        .iter()
        .filter_map(|events| events.first().map(|e| e.onset))
        .min()
        .unwrap_or_else(Rational::zero);
    merged
        .into_iter()
        .zip(labels)
        .map(|(events, label)| {
            let events = events
                .into_iter()
                .map(|e| NoteEvent::new(e.onset - start, e.duration, e.pitch))
                .collect();
            Voice::new(label, events).map_err(IngestError::from)
        })
        .collect()
}

/// Parses a MusicXML chorale. The key is always detected from the notes;
/// the key signature only guides the spelling of the tonic.
pub fn parse_musicxml(document: &[u8], id: &str) -> Result<Chorale, IngestError> {
    let score = read_raw_score(document)?;
    let voices = assign_voices(&score)?;
    let key = detect_key(&voices, score.key_signature_fifths);
    Ok(Chorale::new(id, voices, key)?)
}
