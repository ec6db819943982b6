//! JSON pointers and `$ref` normalization.

use std::collections::{BTreeMap, HashMap};

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};

use super::TranslateError;
use crate::json::JsonValue;

const FRAGMENT: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'<')
    .add(b'>')
    .add(b'\\')
    .add(b'^')
    .add(b'`')
    .add(b'{')
    .add(b'|')
    .add(b'}');

/// The decoded segments of a `#/…` fragment; `#` gives no segments.
pub fn parse_pointer(reference: &str) -> Option<Vec<String>> {
    let frag = reference.strip_prefix('#')?;
    let frag = percent_decode_str(frag).decode_utf8().ok()?;
    if frag.is_empty() {
        return Some(Vec::new());
    }
    let rest = frag.strip_prefix('/')?;
    Some(
        rest.split('/')
            .map(|s| s.replace("~1", "/").replace("~0", "~"))
            .collect(),
    )
}

pub fn escape_pointer_segment(s: &str) -> String {
    let s = s.replace('~', "~0").replace('/', "~1");
    utf8_percent_encode(&s, FRAGMENT).to_string()
}

pub fn resolve_pointer<'a>(root: &'a JsonValue, segments: &[String]) -> Option<&'a JsonValue> {
    let mut cur = root;
    for seg in segments {
        cur = match cur {
            JsonValue::Obj(m) => m.get(seg)?,
            JsonValue::Arr(a) => {
                if seg.len() > 1 && seg.starts_with('0') {
                    return None;
                }
                a.get(seg.parse::<usize>().ok()?)?
            }
            _ => return None,
        };
    }
    Some(cur)
}

/// Keywords whose value is a schema.
pub(super) const SCHEMA_KEYWORDS: &[&str] = &[
    "not",
    "additionalProperties",
    "additionalItems",
    "contains",
    "propertyNames",
    "if",
    "then",
    "else",
];
/// Keywords whose value is an array of schemas.
pub(super) const SCHEMA_ARRAY_KEYWORDS: &[&str] = &["allOf", "anyOf", "oneOf"];
/// Keywords whose value maps names to schemas.
pub(super) const SCHEMA_MAP_KEYWORDS: &[&str] = &[
    "properties",
    "patternProperties",
    "definitions",
    "dependentSchemas",
    "$defs",
];

/// Calls `f` on every direct subschema of `v`.
fn for_each_child(v: &mut JsonValue, f: &mut dyn FnMut(&mut JsonValue)) {
    let JsonValue::Obj(m) = v else { return };
    for (k, x) in m.iter_mut() {
        let k = k.as_str();
        if SCHEMA_KEYWORDS.contains(&k) {
            f(x);
        } else if SCHEMA_ARRAY_KEYWORDS.contains(&k) {
            if let JsonValue::Arr(a) = x {
                a.iter_mut().for_each(&mut *f);
            }
        } else if SCHEMA_MAP_KEYWORDS.contains(&k) {
            if let JsonValue::Obj(mm) = x {
                mm.values_mut().for_each(&mut *f);
            }
        } else if k == "items" {
            match x {
                JsonValue::Arr(a) => a.iter_mut().for_each(&mut *f),
                x => f(x),
            }
        } else if k == "dependencies" {
            if let JsonValue::Obj(mm) = x {
                mm.values_mut()
                    .filter(|d| !matches!(d, JsonValue::Arr(_)))
                    .for_each(&mut *f);
            }
        } else if k == "x-pattReq" {
            if let JsonValue::Arr(a) = x {
                for pair in a {
                    if let JsonValue::Arr(p) = pair {
                        p.iter_mut().skip(1).for_each(&mut *f);
                    }
                }
            }
        } else if k == "x-contAfter" {
            if let JsonValue::Obj(mm) = x {
                mm.get_mut("schema").into_iter().for_each(&mut *f);
            }
        }
    }
}

fn visit(v: &mut JsonValue, f: &mut dyn FnMut(&mut JsonValue)) {
    f(v);
    for_each_child(v, &mut |c| visit(c, f));
}

fn is_normal(reference: &str, defs: Option<&BTreeMap<String, JsonValue>>) -> bool {
    match parse_pointer(reference).as_deref() {
        Some([]) => true,
        Some([d, x]) => d == "definitions" && defs.is_some_and(|m| m.contains_key(x)),
        _ => false,
    }
}

/// Rewrites every `$ref` other than `#` and `#/definitions/x` by copying
/// its target under `definitions` and pointing the reference there.
pub fn normalize_refs(raw: &JsonValue) -> Result<JsonValue, TranslateError> {
    let JsonValue::Obj(_) = raw else { return Ok(raw.clone()) };
    let mut out = raw.clone();
    let mut copied: HashMap<Vec<String>, String> = HashMap::new();
    loop {
        // collect the pointers that still need a copy
        let defs = out.get("definitions").and_then(JsonValue::as_object).cloned();
        let mut pending: Vec<String> = Vec::new();
        let mut bad = None;
        visit(&mut out, &mut |s| {
            if let Some(r) = s.get("$ref").and_then(JsonValue::as_str) {
                if is_normal(r, defs.as_ref()) {
                    return;
                }
                match parse_pointer(r) {
                    Some(seg) if !copied.contains_key(&seg) => pending.push(r.to_string()),
                    Some(_) => {}
                    None => bad = Some(r.to_string()),
                }
            }
        });
        if let Some(r) = bad {
            return Err(TranslateError::UnresolvedRef(r));
        }
        if pending.is_empty() {
            break;
        }
        for r in pending {
            let seg = parse_pointer(&r).unwrap();
            if copied.contains_key(&seg) {
                continue;
            }
            let target = resolve_pointer(raw, &seg)
                .ok_or_else(|| TranslateError::UnresolvedRef(r.clone()))?
                .clone();
            let JsonValue::Obj(root) = &mut out else { unreachable!() };
            let defs = root
                .entry("definitions".to_string())
                .or_insert_with(|| JsonValue::Obj(BTreeMap::new()));
            let JsonValue::Obj(defs) = defs else {
                return Err(TranslateError::InvalidSchema {
                    path: "/definitions".into(),
                    message: "definitions must be an object".into(),
                });
            };
            let base = seg.join("_");
            let mut name = base.clone();
            let mut k = 1;
            while defs.get(&name).is_some_and(|v| *v != target) {
                k += 1;
                name = format!("{base}_{k}");
            }
            defs.insert(name.clone(), target);
            copied.insert(seg, name);
        }
        // retarget
        visit(&mut out, &mut |s| {
            let Some(r) = s.get("$ref").and_then(JsonValue::as_str) else {
                return;
            };
            let Some(seg) = parse_pointer(r) else { return };
            if let Some(name) = copied.get(&seg) {
                if let JsonValue::Obj(m) = s {
                    m.insert(
                        "$ref".into(),
                        JsonValue::str(format!("#/definitions/{}", escape_pointer_segment(name))),
                    );
                }
            }
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::json::parse_json;

    #[test]
    fn copies_non_definition_targets() {
        let raw =
            parse_json(r##"{"properties":{"Country":{"type":"string"},"City":{"$ref":"#/properties/Country"}}}"##)
                .unwrap();
        let out = normalize_refs(&raw).unwrap();
        assert_eq!(
            out.to_canonical(),
            r##"{"definitions":{"properties_Country":{"type":"string"}},"properties":{"City":{"$ref":"#/definitions/properties_Country"},"Country":{"type":"string"}}}"##
        );
        assert_eq!(normalize_refs(&out).unwrap(), out);
    }

    #[test]
    fn leaves_normal_refs() {
        let raw = parse_json(r##"{"$ref":"#"}"##).unwrap();
        assert_eq!(normalize_refs(&raw).unwrap(), raw);
        let raw = parse_json(
            r##"{"definitions":{"a b":{}},"enum":[{"$ref":"#/x"}],"items":{"$ref":"#/definitions/a%20b"}}"##,
        )
        .unwrap();
        assert_eq!(normalize_refs(&raw).unwrap(), raw);
    }

    #[test]
    fn nested_copies_and_errors() {
        let raw =
            parse_json(r##"{"items":[{"type":"integer"},{"$ref":"#/items/0"}],"not":{"$ref":"#/items/1"}}"##).unwrap();
        let out = normalize_refs(&raw).unwrap();
        let defs = out.get("definitions").unwrap().as_object().unwrap();
        assert_eq!(defs.keys().collect::<Vec<_>>(), ["items_0", "items_1"]);
        assert_eq!(
            defs["items_1"].get("$ref").unwrap().as_str(),
            Some("#/definitions/items_0")
        );
        for bad in [
            r##"{"$ref":"#/nope"}"##,
            r##"{"$ref":"http://x/y.json"}"##,
            r##"{"$ref":"#/definitions/z"}"##,
        ] {
            assert!(matches!(
                normalize_refs(&parse_json(bad).unwrap()),
                Err(TranslateError::UnresolvedRef(_))
            ));
        }
        assert_eq!(
            parse_pointer("#/a~1b/c~0d/%25"),
            Some(vec!["a/b".into(), "c~d".into(), "%".into()])
        );
    }
}
