//! Canonical JSON chorale format.
//!
//! ```json
//! {
//!   "id": "bwv1.6",
//!   "key": { "mode": "major", "tonic": "F" },
//!   "voices": {
//!     "alto": [{ "dur": "1", "on": "0", "pitch": "C5" }],
//!     ...
//!   }
//! }
//! ```
//!
//! Times are exact rationals written as `"n"` or `"n/d"`. Output has sorted
//! keys, two-space indentation and a trailing newline. `key` may be omitted
//! on input, in which case it is detected.

use serde_json::{Map, Value};

use super::key::detect_key;
use super::IngestError;
use crate::model::{
    parse_rational, Chorale, Key, Mode, NoteEvent, PitchName, SpelledPitch, Voice, VoiceLabel,
};

fn err(path: &str, msg: impl Into<String>) -> IngestError {
    IngestError::Parse {
        path: path.to_string(),
        message: msg.into(),
    }
}

fn object<'a>(
    v: &'a Value,
    path: &str,
    allowed: &[&str],
) -> Result<&'a Map<String, Value>, IngestError> {
    let obj = v
        .as_object()
        .ok_or_else(|| err(path, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(err(&format!("{path}.{k}"), "unexpected field"));
    }
    Ok(obj)
}

fn string<'a>(
    obj: &'a Map<String, Value>,
    field: &str,
    path: &str,
) -> Result<&'a str, IngestError> {
    let p = format!("{path}.{field}");
    obj.get(field)
        .ok_or_else(|| err(&p, "missing field"))?
        .as_str()
        .ok_or_else(|| err(&p, "expected a string"))
}

fn parse_event(v: &Value, path: &str) -> Result<NoteEvent, IngestError> {
    let obj = object(v, path, &["on", "dur", "pitch"])?;
    let field = |name: &str| -> Result<_, IngestError> {
        let s = string(obj, name, path)?;
        Ok((s, format!("{path}.{name}")))
    };
    let (on, on_path) = field("on")?;
    let onset = parse_rational(on).map_err(|e| err(&on_path, e.to_string()))?;
    let (dur, dur_path) = field("dur")?;
    let duration = parse_rational(dur).map_err(|e| err(&dur_path, e.to_string()))?;
    if duration <= 0.into() {
        return Err(err(&dur_path, "duration must be positive"));
    }
    let (pitch, pitch_path) = field("pitch")?;
    let pitch: SpelledPitch = pitch
        .parse()
        .map_err(|e: crate::model::ModelError| err(&pitch_path, e.to_string()))?;
    Ok(NoteEvent::new(onset, duration, pitch))
}

fn parse_key(v: &Value) -> Result<Key, IngestError> {
    let obj = object(v, "$.key", &["tonic", "mode"])?;
    let tonic: PitchName = string(obj, "tonic", "$.key")?
        .parse()
        .map_err(|e: crate::model::ModelError| err("$.key.tonic", e.to_string()))?;
    let mode: Mode = string(obj, "mode", "$.key")?
        .parse()
        .map_err(|e: crate::model::ModelError| err("$.key.mode", e.to_string()))?;
    Key::new(tonic, mode).map_err(|e| err("$.key.tonic", e.to_string()))
}

/// Parses a canonical JSON document into a chorale.
pub fn parse_canonical_json(document: &[u8]) -> Result<Chorale, IngestError> {
    let root: Value =
        serde_json::from_slice(document).map_err(|e| err("$", format!("invalid JSON: {e}")))?;
    let obj = object(&root, "$", &["id", "key", "voices"])?;
    let id = string(obj, "id", "$")?;
    let voices_obj = object(
        obj.get("voices")
            .ok_or_else(|| err("$.voices", "missing field"))?,
        "$.voices",
        &["soprano", "alto", "tenor", "bass"],
    )?;

    let mut voices = Vec::with_capacity(4);
    for label in VoiceLabel::ALL {
        let path = format!("$.voices.{label}");
        let events = voices_obj
            .get(label.as_str())
            .ok_or_else(|| err(&path, "missing voice"))?
            .as_array()
            .ok_or_else(|| err(&path, "expected an array"))?
            .iter()
            .enumerate()
            .map(|(i, e)| parse_event(e, &format!("{path}[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        voices.push(Voice::new(label, events).map_err(|e| err(&path, e.to_string()))?);
    }

    let key = match obj.get("key") {
        Some(k) => parse_key(k)?,
        None => detect_key(&voices, None),
    };
    Chorale::new(id, voices, key).map_err(IngestError::from)
}

/// Serializes a chorale deterministically.
pub fn write_canonical_json(c: &Chorale) -> Vec<u8> {
    let mut voices = Map::new();
    for v in c.voices() {
        let events: Vec<Value> = v
            .events()
            .iter()
            .map(|e| {
                let mut m = Map::new();
                m.insert("on".into(), Value::String(e.onset.to_string()));
                m.insert("dur".into(), Value::String(e.duration.to_string()));
                m.insert("pitch".into(), Value::String(e.pitch.to_string()));
                Value::Object(m)
            })
            .collect();
        voices.insert(v.label().as_str().into(), Value::Array(events));
    }
    let mut key = Map::new();
    key.insert("tonic".into(), Value::String(c.key().tonic.to_string()));
    key.insert("mode".into(), Value::String(c.key().mode.as_str().into()));

    let mut root = Map::new();
    root.insert("id".into(), Value::String(c.id().to_string()));
    root.insert("key".into(), Value::Object(key));
    root.insert("voices".into(), Value::Object(voices));
    let mut out = serde_json::to_vec_pretty(&Value::Object(root)).expect("serializable");
    out.push(b'\n');
    out
}
