use std::collections::BTreeMap;

use num_rational::BigRational;

use super::refs::escape_pointer_segment;
use crate::algebra::{Document, Env, ExtBound, Schema, Upper};
use crate::json::{decimal_string, format_rational, JsonValue};
use crate::notelim::lower_cont_after;

/// Target keyword set for [`to_json_schema`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExportMode {
    /// Dual operators as `x-` vendor keywords.
    #[default]
    Extended,
    /// Draft 2019-09 keywords; duals through `not`, `contAfter` through `cnt`.
    Draft2019,
    /// Draft-06 keywords plus `not`. Counting that Draft-06 cannot express
    /// falls back to `minContains`/`maxContains` with a warning.
    Draft06WithNot,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Exported {
    pub schema: JsonValue,
    pub warnings: Vec<String>,
}

/// Writes a document as JSON Schema; definitions go under `definitions`.
pub fn to_json_schema(d: &Document, mode: ExportMode) -> Exported {
    let mut ex = Exporter {
        mode,
        names: d.env.clone(),
        added: Vec::new(),
        warnings: Vec::new(),
    };
    let root = ex.schema(&d.root);
    let mut defs = BTreeMap::new();
    for (x, body) in &d.env {
        defs.insert(x.clone(), ex.schema(body));
    }
    let mut i = 0;
    while i < ex.added.len() {
        let x = ex.added[i].clone();
        let body = ex.names[&x].clone();
        defs.insert(x, ex.schema(&body));
        i += 1;
    }
    let schema = if defs.is_empty() {
        root
    } else {
        let mut m = match root {
            JsonValue::Obj(m) if !m.contains_key("definitions") => m,
            other => BTreeMap::from([("allOf".to_string(), JsonValue::Arr(vec![other]))]),
        };
        m.insert("definitions".into(), JsonValue::Obj(defs));
        JsonValue::Obj(m)
    };
    Exported {
        schema,
        warnings: ex.warnings,
    }
}

struct Exporter {
    mode: ExportMode,
    /// Every variable name in use, including those added by lowering.
    names: Env,
    added: Vec<String>,
    warnings: Vec<String>,
}

fn obj<const N: usize>(members: [(&str, JsonValue); N]) -> JsonValue {
    JsonValue::Obj(members.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

fn nat(n: u64) -> JsonValue {
    JsonValue::Num(BigRational::from_integer(n.into()))
}

fn negate(s: &Schema) -> Schema {
    match s {
        Schema::True => Schema::False,
        Schema::False => Schema::True,
        Schema::Not(t) => (**t).clone(),
        s => Schema::not(s.clone()),
    }
}

/// Merges keyword objects with disjoint keys into one object.
fn all_of(parts: Vec<JsonValue>) -> JsonValue {
    let mut parts: Vec<JsonValue> = parts.into_iter().filter(|p| *p != JsonValue::Bool(true)).collect();
    if parts.contains(&JsonValue::Bool(false)) {
        return JsonValue::Bool(false);
    }
    match parts.len() {
        0 => return JsonValue::Bool(true),
        1 => return parts.pop().unwrap(),
        _ => {}
    }
    let mut merged: BTreeMap<String, JsonValue> = BTreeMap::new();
    let mut rest = Vec::new();
    for p in parts {
        match p {
            JsonValue::Obj(m)
                if !m.contains_key("$ref")
                    && !merged.contains_key("$ref")
                    && m.keys().all(|k| !merged.contains_key(k) && !clashes(k, &merged)) =>
            {
                merged.extend(m)
            }
            p => rest.push(p),
        }
    }
    if rest.is_empty() {
        return JsonValue::Obj(merged);
    }
    let mut items = vec![JsonValue::Obj(merged)];
    items.extend(rest);
    obj([("allOf", JsonValue::Arr(items))])
}

/// Keywords whose meaning depends on a sibling.
fn clashes(k: &str, m: &BTreeMap<String, JsonValue>) -> bool {
    let groups: [&[&str]; 4] = [
        &["properties", "patternProperties", "additionalProperties"],
        &["items", "additionalItems"],
        &["contains", "minContains", "maxContains"],
        &["if", "then", "else"],
    ];
    groups
        .iter()
        .any(|g| g.contains(&k) && g.iter().any(|o| m.contains_key(*o)))
}

impl Exporter {
    fn number(&mut self, q: &BigRational) -> JsonValue {
        if decimal_string(q).is_none() {
            self.warnings.push(format!(
                "{} has no exact decimal form; written as a string",
                format_rational(q)
            ));
            return JsonValue::Str(format_rational(q));
        }
        JsonValue::Num(q.clone())
    }

    fn bounds(&mut self, m: &ExtBound, n: &ExtBound, strict: bool) -> JsonValue {
        let (lo, hi) = if strict {
            ("exclusiveMinimum", "exclusiveMaximum")
        } else {
            ("minimum", "maximum")
        };
        if matches!(m, ExtBound::PosInf) || matches!(n, ExtBound::NegInf) {
            return obj([("not", obj([("type", JsonValue::str("number"))]))]);
        }
        let mut out = BTreeMap::new();
        if let ExtBound::Fin(q) = m {
            out.insert(lo.to_string(), self.number(q));
        }
        if let ExtBound::Fin(q) = n {
            out.insert(hi.to_string(), self.number(q));
        }
        JsonValue::Obj(out)
    }

    fn range(&mut self, l: u64, j: Upper, lo: &str, hi: &str) -> JsonValue {
        let mut out = BTreeMap::new();
        if l > 0 {
            out.insert(lo.to_string(), nat(l));
        }
        if let Upper::Fin(j) = j {
            out.insert(hi.to_string(), nat(j));
        }
        JsonValue::Obj(out)
    }

    fn prefix(&mut self, n: u64, last: Option<&Schema>, tail: &Schema) -> JsonValue {
        let mut head: Vec<JsonValue> = (0..n).map(|_| JsonValue::Bool(true)).collect();
        if let Some(s) = last {
            head.push(self.schema(s));
        }
        if head.is_empty() {
            return obj([("items", self.schema(tail))]);
        }
        let mut out = BTreeMap::from([("items".to_string(), JsonValue::Arr(head))]);
        if *tail != Schema::True {
            out.insert("additionalItems".into(), self.schema(tail));
        }
        JsonValue::Obj(out)
    }

    fn counted(&mut self, l: u64, j: Upper, s: &Schema) -> JsonValue {
        if l == 0 && j == Upper::Inf {
            return JsonValue::Bool(true);
        }
        if l == 1 && j == Upper::Inf {
            return obj([("contains", self.schema(s))]);
        }
        if self.mode == ExportMode::Draft06WithNot {
            match s {
                Schema::True => return self.range(l, j, "minItems", "maxItems"),
                Schema::False if l == 0 => return JsonValue::Bool(true),
                Schema::False => return obj([("not", obj([("type", JsonValue::str("array"))]))]),
                _ if l == 0 && j == Upper::Fin(0) => return obj([("items", self.schema(&negate(s)))]),
                _ => self.warnings.push(format!(
                    "cnt({l}, {j}, …) has no Draft-06 form; written with minContains/maxContains",
                    j = match j {
                        Upper::Fin(j) => j.to_string(),
                        Upper::Inf => "inf".into(),
                    }
                )),
            }
        }
        let mut out = BTreeMap::from([("contains".to_string(), self.schema(s))]);
        if l != 1 {
            out.insert("minContains".into(), nat(l));
        }
        if let Upper::Fin(j) = j {
            out.insert("maxContains".into(), nat(j));
        }
        JsonValue::Obj(out)
    }

    fn pattern_map(&mut self, pairs: &[(crate::patterns::Regex, Schema)]) -> (JsonValue, JsonValue) {
        let mut props: BTreeMap<String, Vec<JsonValue>> = BTreeMap::new();
        let mut patts: BTreeMap<String, Vec<JsonValue>> = BTreeMap::new();
        for (r, s) in pairs {
            let v = self.schema(s);
            match r.as_keykey() {
                Some(k) => props.entry(k).or_default().push(v),
                None => patts.entry(r.ecma_source()).or_default().push(v),
            }
        }
        let join = |m: BTreeMap<String, Vec<JsonValue>>| {
            JsonValue::Obj(
                m.into_iter()
                    .map(|(k, v)| {
                        (
                            k,
                            if v.len() == 1 {
                                v.into_iter().next().unwrap()
                            } else {
                                obj([("allOf", JsonValue::Arr(v))])
                            },
                        )
                    })
                    .collect(),
            )
        };
        (join(props), join(patts))
    }

    fn schema(&mut self, s: &Schema) -> JsonValue {
        let b = JsonValue::Bool;
        let extended = self.mode == ExportMode::Extended;
        match s {
            Schema::True => b(true),
            Schema::False => b(false),
            Schema::Type(ts) => match ts.as_slice() {
                [] => b(false),
                [t] => obj([("type", JsonValue::str(t.schema_name()))]),
                ts => obj([(
                    "type",
                    JsonValue::Arr(ts.iter().map(|t| JsonValue::str(t.schema_name())).collect()),
                )]),
            },
            Schema::Const(v) => obj([("const", v.clone())]),
            Schema::Enum(vs) => obj([("enum", JsonValue::Arr(vs.clone()))]),
            Schema::Len(l, j) => self.range(*l, *j, "minLength", "maxLength"),
            Schema::Pattern(r) => obj([("pattern", JsonValue::Str(r.ecma_source()))]),
            Schema::Betw(m, n) => self.bounds(m, n, false),
            Schema::XBetw(m, n) => self.bounds(m, n, true),
            Schema::MulOf(q) => obj([("multipleOf", self.number(q))]),
            Schema::NotMulOf(q) if extended => obj([("x-notMulOf", self.number(q))]),
            Schema::NotMulOf(q) => obj([(
                "not",
                obj([("type", JsonValue::str("number")), ("multipleOf", self.number(q))]),
            )]),
            Schema::Props(pairs, add) => {
                let (props, patts) = self.pattern_map(pairs);
                let mut out = BTreeMap::new();
                if props != JsonValue::Obj(BTreeMap::new()) {
                    out.insert("properties".to_string(), props);
                }
                if patts != JsonValue::Obj(BTreeMap::new()) {
                    out.insert("patternProperties".to_string(), patts);
                }
                if **add != Schema::True {
                    out.insert("additionalProperties".to_string(), self.schema(add));
                }
                JsonValue::Obj(out)
            }
            Schema::Pro(l, j) => self.range(*l, *j, "minProperties", "maxProperties"),
            Schema::Req(ks) => obj([("required", JsonValue::Arr(ks.iter().map(JsonValue::str).collect()))]),
            Schema::PNames(t) => obj([("propertyNames", self.schema(t))]),
            Schema::PattReq(pairs) if extended => {
                let items = pairs
                    .iter()
                    .map(|(r, t)| JsonValue::Arr(vec![JsonValue::Str(r.ecma_source()), self.schema(t)]))
                    .collect();
                obj([("x-pattReq", JsonValue::Arr(items))])
            }
            Schema::PattReq(pairs) => {
                let parts = pairs
                    .iter()
                    .map(|(r, t)| {
                        let inner = obj([(
                            "patternProperties",
                            JsonValue::Obj(BTreeMap::from([(r.ecma_source(), self.schema(&negate(t)))])),
                        )]);
                        obj([("not", all_of(vec![obj([("type", JsonValue::str("object"))]), inner]))])
                    })
                    .collect();
                all_of(parts)
            }
            Schema::Items(head, tail) => {
                if head.is_empty() {
                    return obj([("items", self.schema(tail))]);
                }
                let mut out = BTreeMap::from([(
                    "items".to_string(),
                    JsonValue::Arr(head.iter().map(|t| self.schema(t)).collect()),
                )]);
                if **tail != Schema::True {
                    out.insert("additionalItems".into(), self.schema(tail));
                }
                JsonValue::Obj(out)
            }
            Schema::ItemAt(i, t) => self.prefix(i.saturating_sub(1), Some(t), &Schema::True),
            Schema::ItemsAfter(n, t) => self.prefix(*n, None, t),
            Schema::Ite(l, j) => self.range(*l, *j, "minItems", "maxItems"),
            Schema::Contains(t) => obj([("contains", self.schema(t))]),
            Schema::ContAfter(n, t) => match self.mode {
                ExportMode::Extended => obj([("x-contAfter", obj([("after", nat(*n)), ("schema", self.schema(t))]))]),
                ExportMode::Draft2019 => {
                    let before: Vec<String> = self.names.keys().cloned().collect();
                    let lowered = lower_cont_after(*n, t, &mut self.names);
                    self.added.extend(
                        self.names
                            .keys()
                            .filter(|x| !before.contains(x))
                            .cloned()
                            .collect::<Vec<_>>(),
                    );
                    self.schema(&lowered)
                }
                ExportMode::Draft06WithNot => {
                    let inner = all_of(vec![
                        obj([("type", JsonValue::str("array"))]),
                        self.prefix(*n, None, &negate(t)),
                    ]);
                    obj([("not", inner)])
                }
            },
            Schema::Cnt(l, j, t) => self.counted(*l, *j, t),
            Schema::UniqueItems => obj([("uniqueItems", b(true))]),
            Schema::RepeatedItems if extended => obj([("x-repeatedItems", b(true))]),
            Schema::RepeatedItems => obj([(
                "not",
                obj([("type", JsonValue::str("array")), ("uniqueItems", b(true))]),
            )]),
            Schema::Ref(x) => obj([(
                "$ref",
                JsonValue::Str(format!("#/definitions/{}", escape_pointer_segment(x))),
            )]),
            Schema::Not(t) => obj([("not", self.schema(t))]),
            Schema::And(v) | Schema::Group(v) => {
                let parts = v.iter().map(|t| self.schema(t)).collect();
                all_of(parts)
            }
            Schema::Or(v) => match v.len() {
                0 => b(false),
                1 => self.schema(&v[0]),
                _ => obj([("anyOf", JsonValue::Arr(v.iter().map(|t| self.schema(t)).collect()))]),
            },
            Schema::OneOf(v) => obj([("oneOf", JsonValue::Arr(v.iter().map(|t| self.schema(t)).collect()))]),
            Schema::Implies(a, c) => obj([("anyOf", JsonValue::Arr(vec![self.schema(&negate(a)), self.schema(c)]))]),
            Schema::IfThenElse(a, c, e) if self.mode != ExportMode::Draft06WithNot => obj([
                ("if", self.schema(a)),
                ("then", self.schema(c)),
                ("else", self.schema(e)),
            ]),
            Schema::IfThenElse(a, c, e) => {
                let yes = all_of(vec![self.schema(a), self.schema(c)]);
                let no = all_of(vec![self.schema(&negate(a)), self.schema(e)]);
                obj([("anyOf", JsonValue::Arr(vec![yes, no]))])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_schema;

    fn out(src: &str, mode: ExportMode) -> String {
        to_json_schema(&Document::from_schema(parse_schema(src).unwrap()), mode)
            .schema
            .to_canonical()
    }

    #[test]
    fn keywords() {
        assert_eq!(
            out("cnt(2, inf, type(Num))", ExportMode::Draft2019),
            r#"{"contains":{"type":"number"},"minContains":2}"#
        );
        assert_eq!(
            out("pattReq(\"^x\": t)", ExportMode::Draft2019),
            r#"{"not":{"patternProperties":{"^x":false},"type":"object"}}"#
        );
        assert_eq!(
            out("pattReq(\"^x\": t)", ExportMode::Extended),
            r#"{"x-pattReq":[["^x",true]]}"#
        );
        assert_eq!(
            out("(type(Obj) ∧ props(\"^size$\": f; t))", ExportMode::Draft06WithNot),
            r#"{"properties":{"size":false},"type":"object"}"#
        );
        assert_eq!(
            out("itemAt(3, type(Null))", ExportMode::Extended),
            r#"{"items":[true,true,{"type":"null"}]}"#
        );
    }

    #[test]
    fn lowering_adds_definitions() {
        let e = to_json_schema(
            &Document::from_schema(parse_schema("contAfter(2, type(Num))").unwrap()),
            ExportMode::Draft2019,
        );
        assert!(e.schema.get("definitions").is_some());
        let e = to_json_schema(
            &Document::from_schema(parse_schema("cnt(2, 3, type(Num))").unwrap()),
            ExportMode::Draft06WithNot,
        );
        assert_eq!(e.warnings.len(), 1);
    }
}
