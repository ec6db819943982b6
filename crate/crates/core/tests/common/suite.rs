//! The vendored Draft-06 test-suite subset.

use std::fs;
use std::path::PathBuf;

use jsnot::algebra::Schema;
use jsnot::json::{parse_json, JsonValue};
use jsnot::notelim::{not_eliminate, OneOfMode};
use jsnot::semantics::Validator;
use jsnot::translate::{from_json_schema, DraftDialect, TranslateError};

pub struct Case {
    pub data: JsonValue,
    pub valid: bool,
    pub description: String,
}

pub struct Group {
    pub file: String,
    pub description: String,
    pub schema: JsonValue,
    pub cases: Vec<Case>,
}

pub fn dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/draft6")
}

pub fn groups() -> Vec<Group> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    let mut out = Vec::new();
    for path in files {
        let file = path.file_name().unwrap().to_string_lossy().into_owned();
        let raw = parse_json(&fs::read_to_string(&path).unwrap()).unwrap();
        for g in raw.as_array().unwrap() {
            let cases = g
                .get("tests")
                .and_then(JsonValue::as_array)
                .unwrap()
                .iter()
                .map(|t| Case {
                    data: t.get("data").unwrap().clone(),
                    valid: t.get("valid").and_then(JsonValue::as_bool).unwrap(),
                    description: t
                        .get("description")
                        .and_then(JsonValue::as_str)
                        .unwrap_or("")
                        .to_string(),
                })
                .collect();
            out.push(Group {
                file: file.clone(),
                description: g
                    .get("description")
                    .and_then(JsonValue::as_str)
                    .unwrap_or("")
                    .to_string(),
                schema: g.get("schema").unwrap().clone(),
                cases,
            });
        }
    }
    out
}

#[derive(Debug, Default)]
pub struct Conformance {
    pub applicable: usize,
    pub passed: usize,
    /// Cases where the not-eliminated negation agrees with negated validation.
    pub negation_agree: usize,
    pub excluded_groups: Vec<String>,
    pub failures: Vec<String>,
    pub negation_failures: Vec<String>,
}

/// Groups whose schema needs a remote or `$id`-relative reference, or a
/// pattern outside the supported ECMA subset, are not applicable.
pub fn conformance() -> Conformance {
    let mut c = Conformance::default();
    for g in groups() {
        let label = format!("{} / {}", g.file, g.description);
        let doc = match from_json_schema(&g.schema, DraftDialect::Draft06) {
            Ok(t) => t.document,
            Err(TranslateError::UnresolvedRef(_) | TranslateError::Pattern { .. }) => {
                c.excluded_groups.push(label);
                continue;
            }
            Err(e) => {
                c.applicable += g.cases.len();
                c.failures.push(format!("{label}: {e}"));
                continue;
            }
        };
        let v = Validator::new(&doc).unwrap();
        let neg = not_eliminate(&doc.with_root(Schema::not(doc.root.clone())), OneOfMode::Linear).unwrap();
        let nv = Validator::new(&neg).unwrap();
        for case in &g.cases {
            c.applicable += 1;
            let got = v.is_valid(&case.data);
            if got == case.valid {
                c.passed += 1;
            } else {
                c.failures.push(format!("{label} / {}", case.description));
            }
            if nv.is_valid(&case.data) == !got {
                c.negation_agree += 1;
            } else {
                c.negation_failures.push(format!("{label} / {}", case.description));
            }
        }
    }
    c
}
