//! Translation between JSON Schema documents and algebra documents.

mod from;
mod refs;
mod to;

use thiserror::Error;

use crate::algebra::Document;
use crate::json::JsonValue;
use crate::patterns::PatternError;

pub use from::from_json_schema;
pub use refs::{escape_pointer_segment, normalize_refs, parse_pointer, resolve_pointer};
pub use to::{to_json_schema, ExportMode, Exported};

/// Which keyword set `from_json_schema` accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DraftDialect {
    #[default]
    Draft06,
    /// Draft-06 plus `minContains`/`maxContains`, `dependentSchemas` and
    /// `dependentRequired`.
    Draft2019Subset,
}

impl DraftDialect {
    /// From `$schema`; Draft-06 when absent or unrecognized.
    pub fn infer(raw: &JsonValue) -> DraftDialect {
        match raw.get("$schema").and_then(JsonValue::as_str) {
            Some(s) if s.contains("2019-09") || s.contains("2020-12") => DraftDialect::Draft2019Subset,
            _ => DraftDialect::Draft06,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("unresolved reference {0}")]
    UnresolvedRef(String),
    #[error("invalid schema at {path}: {message}")]
    InvalidSchema { path: String, message: String },
    #[error("pattern at {path}: {source}")]
    Pattern { path: String, source: PatternError },
}

/// A translated document with the warnings collected on the way.
#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub document: Document,
    /// `pointer: message` for ignored keywords and similar.
    pub warnings: Vec<String>,
}
