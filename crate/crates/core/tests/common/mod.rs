#![allow(dead_code)]

pub mod regex_oracle;
pub mod rows;
pub mod suite;

use std::fs;
use std::path::PathBuf;

use jsnot::algebra::{parse_document, Document};
use jsnot::json::{parse_json, JsonValue};
use jsnot::semantics::{equiv_sample, EquivVerdict, InstanceGenerator};
use jsnot::translate::{from_json_schema, DraftDialect};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

/// `(file name, raw schema)` for every bundled corpus file, sorted by name.
pub fn corpus() -> Vec<(String, JsonValue)> {
    let mut out: Vec<(String, JsonValue)> = fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .map(|p| {
            let raw = parse_json(&fs::read_to_string(&p).unwrap()).unwrap();
            (p.file_name().unwrap().to_string_lossy().into_owned(), raw)
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

pub fn translate(raw: &JsonValue) -> Document {
    from_json_schema(raw, DraftDialect::infer(raw)).unwrap().document
}

pub fn corpus_file(name: &str) -> Document {
    let text = fs::read_to_string(corpus_dir().join(name)).unwrap();
    translate(&parse_json(&text).unwrap())
}

pub fn doc(src: &str) -> Document {
    parse_document(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

/// `Err` with the disagreeing instance when the documents differ on one of
/// `n` generated instances.
pub fn agree(a: &Document, b: &Document, n: usize, seed: u64) -> Result<usize, String> {
    let mut gen = InstanceGenerator::for_documents(&[a, b], seed);
    match equiv_sample(a, b, &mut gen, n).map_err(|e| e.to_string())? {
        EquivVerdict::Indistinguishable { tested } => Ok(tested),
        EquivVerdict::Counterexample { instance, left, right } => {
            Err(format!("{} gives {left} / {right}", instance.to_canonical()))
        }
    }
}

fn collect_patterns(v: &JsonValue, out: &mut Vec<String>) {
    match v {
        JsonValue::Obj(m) => {
            for (k, x) in m {
                match (k.as_str(), x) {
                    ("pattern", JsonValue::Str(s)) => out.push(s.clone()),
                    ("patternProperties", JsonValue::Obj(pp))
                        if pp.values().all(|s| matches!(s, JsonValue::Obj(_) | JsonValue::Bool(_))) =>
                    {
                        out.extend(pp.keys().cloned())
                    }
                    _ => {}
                }
                collect_patterns(x, out);
            }
        }
        JsonValue::Arr(a) => a.iter().for_each(|x| collect_patterns(x, out)),
        _ => {}
    }
}

/// Distinct `pattern` and `patternProperties` sources in the corpus, in
/// file order.
pub fn corpus_patterns() -> Vec<String> {
    let mut out = Vec::new();
    for (_, raw) in corpus() {
        collect_patterns(&raw, &mut out);
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|p| seen.insert(p.clone()));
    out
}
