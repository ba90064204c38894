//! Reading chorales from MusicXML and the canonical JSON format.

pub mod json;
pub mod key;
pub mod musicxml;

use std::path::Path;

use thiserror::Error;

pub use json::{parse_canonical_json, write_canonical_json};
pub use key::detect_key;
pub use musicxml::{parse_musicxml, read_raw_score, RawScore};

use crate::model::{Chorale, ModelError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IngestError {
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("expected 4 voices, found {0}")]
    VoiceCount(usize),
    #[error("unsupported element: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Loads a chorale from a file, choosing the reader by extension:
/// `.json` for canonical JSON, `.xml`/`.musicxml` for MusicXML. MusicXML
/// chorales take the file stem as their id.
pub fn load_chorale(path: &Path) -> Result<Chorale, IngestError> {
    let io = |message: String| IngestError::Io {
        path: path.display().to_string(),
        message,
    };
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase)
        .unwrap_or_default();
    let bytes = || std::fs::read(path).map_err(|e| io(e.to_string()));
    match ext.as_str() {
        "json" => parse_canonical_json(&bytes()?),
        "xml" | "musicxml" => {
            let id = path
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or("chorale");
            parse_musicxml(&bytes()?, id)
        }
        "mxl" => Err(IngestError::Unsupported(
            "compressed MusicXML (.mxl)".into(),
        )),
        _ => Err(io(format!("unrecognized extension `{ext}`"))),
    }
}

/// Whether `load_chorale` would attempt to read this path.
pub fn is_chorale_file(path: &Path) -> bool {
    matches!(
        path.extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .as_deref(),
        Some("json" | "xml" | "musicxml")
    )
}
