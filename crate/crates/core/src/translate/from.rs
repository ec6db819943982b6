use num_traits::Signed;

use super::refs::{normalize_refs, parse_pointer};
use super::{DraftDialect, TranslateError, Translation};
use crate::algebra::{fresh_name, Document, Env, ExtBound, Schema, Upper};
use crate::json::{JsonType, JsonValue};
use crate::patterns::Regex;

/// Keywords with no effect on validation.
const ANNOTATIONS: &[&str] = &[
    "$schema",
    "$id",
    "id",
    "$comment",
    "title",
    "description",
    "default",
    "examples",
    "readOnly",
    "writeOnly",
    "deprecated",
    "definitions",
    "contentMediaType",
    "contentEncoding",
];

/// Translates a JSON Schema document. References are normalized first;
/// when the document refers to itself with `#` the root becomes the
/// variable `xroot`.
pub fn from_json_schema(raw: &JsonValue, dialect: DraftDialect) -> Result<Translation, TranslateError> {
    let norm = normalize_refs(raw)?;
    let defs: Vec<(String, JsonValue)> = match norm.get("definitions") {
        Some(JsonValue::Obj(m)) => m.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        Some(_) => return Err(invalid("/definitions", "definitions must be an object")),
        None => Vec::new(),
    };
    let mut names = Env::new();
    for (k, _) in &defs {
        names.insert(k.clone(), Schema::True);
    }
    let root_var = fresh_name(&names, "xroot");
    let mut t = Translator {
        dialect,
        root_var: root_var.clone(),
        root_used: false,
        warnings: Vec::new(),
    };
    let root = t.schema(&norm, "")?;
    let mut env = Env::new();
    let mut def_bodies = Vec::new();
    for (k, v) in &defs {
        def_bodies.push((
            k.clone(),
            t.schema(v, &format!("/definitions/{}", super::escape_pointer_segment(k)))?,
        ));
    }
    let root = if t.root_used {
        env.insert(root_var.clone(), root);
        Schema::Ref(root_var)
    } else {
        root
    };
    env.extend(def_bodies);
    Ok(Translation {
        document: Document::new(root, env),
        warnings: t.warnings,
    })
}

fn invalid(path: &str, message: impl Into<String>) -> TranslateError {
    TranslateError::InvalidSchema {
        path: path.to_string(),
        message: message.into(),
    }
}

struct Translator {
    dialect: DraftDialect,
    root_var: String,
    root_used: bool,
    warnings: Vec<String>,
}

fn count(v: &JsonValue, path: &str, key: &str) -> Result<u64, TranslateError> {
    v.as_u64().ok_or_else(|| {
        invalid(
            &format!("{path}/{key}"),
            format!("{key} must be a non-negative integer"),
        )
    })
}

fn number(v: &JsonValue, path: &str, key: &str) -> Result<ExtBound, TranslateError> {
    match v {
        JsonValue::Num(q) => Ok(ExtBound::Fin(q.clone())),
        JsonValue::Bool(_) => Err(invalid(
            &format!("{path}/{key}"),
            format!("boolean {key} is a Draft-04 form; use a number"),
        )),
        _ => Err(invalid(&format!("{path}/{key}"), format!("{key} must be a number"))),
    }
}

fn type_name(v: &JsonValue, path: &str) -> Result<String, TranslateError> {
    v.as_str()
        .map(str::to_string)
        .ok_or_else(|| invalid(path, "type names must be strings"))
}

impl Translator {
    fn warn(&mut self, path: &str, msg: impl Into<String>) {
        let path = if path.is_empty() { "/" } else { path };
        self.warnings.push(format!("{path}: {}", msg.into()));
    }

    fn schema(&mut self, v: &JsonValue, path: &str) -> Result<Schema, TranslateError> {
        let m = match v {
            JsonValue::Bool(true) => return Ok(Schema::True),
            JsonValue::Bool(false) => return Ok(Schema::False),
            JsonValue::Obj(m) => m,
            _ => return Err(invalid(path, "a schema must be an object or a boolean")),
        };
        if let Some(r) = m.get("$ref") {
            let r = r
                .as_str()
                .ok_or_else(|| invalid(&format!("{path}/$ref"), "$ref must be a string"))?;
            let ignored: Vec<&str> = m
                .keys()
                .map(String::as_str)
                .filter(|k| *k != "$ref" && !ANNOTATIONS.contains(k))
                .collect();
            if !ignored.is_empty() {
                self.warn(
                    path,
                    format!("keywords next to $ref are ignored: {}", ignored.join(", ")),
                );
            }
            return self.reference(r, path);
        }
        let draft2019 = self.dialect == DraftDialect::Draft2019Subset;
        let mut parts = Vec::new();
        let at = |k: &str| format!("{path}/{k}");
        for (k, x) in m {
            let k = k.as_str();
            let s = match k {
                "type" => self.types(x, &at(k))?,
                "enum" => match x {
                    JsonValue::Arr(a) => Schema::Enum(a.clone()),
                    _ => return Err(invalid(&at(k), "enum must be an array")),
                },
                "const" => Schema::Const(x.clone()),
                "minimum" => Schema::Betw(number(x, path, k)?, ExtBound::PosInf),
                "maximum" => Schema::Betw(ExtBound::NegInf, number(x, path, k)?),
                "exclusiveMinimum" => Schema::XBetw(number(x, path, k)?, ExtBound::PosInf),
                "exclusiveMaximum" => Schema::XBetw(ExtBound::NegInf, number(x, path, k)?),
                "multipleOf" => match x {
                    JsonValue::Num(q) if q.is_positive() => Schema::MulOf(q.clone()),
                    _ => return Err(invalid(&at(k), "multipleOf must be a positive number")),
                },
                "minLength" => Schema::Len(count(x, path, k)?, Upper::Inf),
                "maxLength" => Schema::Len(0, Upper::Fin(count(x, path, k)?)),
                "pattern" => Schema::Pattern(self.regex(x, &at(k))?),
                "uniqueItems" => match x {
                    JsonValue::Bool(true) => Schema::UniqueItems,
                    JsonValue::Bool(false) => Schema::True,
                    _ => return Err(invalid(&at(k), "uniqueItems must be a boolean")),
                },
                "minItems" => Schema::Ite(count(x, path, k)?, Upper::Inf),
                "maxItems" => Schema::Ite(0, Upper::Fin(count(x, path, k)?)),
                "minProperties" => Schema::Pro(count(x, path, k)?, Upper::Inf),
                "maxProperties" => Schema::Pro(0, Upper::Fin(count(x, path, k)?)),
                "required" => Schema::Req(self.names(x, &at(k))?),
                "propertyNames" => Schema::PNames(Box::new(self.schema(x, &at(k))?)),
                "not" => Schema::not(self.schema(x, &at(k))?),
                "allOf" => Schema::And(self.schemas(x, &at(k))?),
                "anyOf" => Schema::Or(self.schemas(x, &at(k))?),
                "oneOf" => Schema::OneOf(self.schemas(x, &at(k))?),
                "contains" => {
                    let s = Box::new(self.schema(x, &at(k))?);
                    let lo = m.get("minContains").filter(|_| draft2019);
                    let hi = m.get("maxContains").filter(|_| draft2019);
                    if lo.is_none() && hi.is_none() {
                        Schema::Contains(s)
                    } else {
                        let l = lo.map(|v| count(v, path, "minContains")).transpose()?.unwrap_or(1);
                        let j = hi
                            .map(|v| count(v, path, "maxContains"))
                            .transpose()?
                            .map_or(Upper::Inf, Upper::Fin);
                        Schema::Cnt(l, j, s)
                    }
                }
                "minContains" | "maxContains" if draft2019 => {
                    if !m.contains_key("contains") {
                        self.warn(&at(k), "ignored without contains");
                    }
                    continue;
                }
                "items" => match x {
                    JsonValue::Arr(a) => {
                        let head = a
                            .iter()
                            .enumerate()
                            .map(|(i, s)| self.schema(s, &format!("{path}/items/{i}")))
                            .collect::<Result<_, _>>()?;
                        let tail = match m.get("additionalItems") {
                            Some(s) => self.schema(s, &at("additionalItems"))?,
                            None => Schema::True,
                        };
                        Schema::Items(head, Box::new(tail))
                    }
                    s => {
                        if m.contains_key("additionalItems") {
                            self.warn(&at("additionalItems"), "ignored next to a schema-valued items");
                        }
                        Schema::Items(Vec::new(), Box::new(self.schema(s, &at(k))?))
                    }
                },
                "additionalItems" => {
                    if !m.contains_key("items") {
                        self.warn(&at(k), "ignored without items");
                    }
                    continue;
                }
                "properties" | "patternProperties" | "additionalProperties" => {
                    // grouped into one props node at the first of the three
                    let first = ["additionalProperties", "patternProperties", "properties"]
                        .into_iter()
                        .find(|p| m.contains_key(*p))
                        .unwrap();
                    if k != first {
                        continue;
                    }
                    self.props(m, path)?
                }
                "dependencies" => self.dependencies(x, &at(k), true, true)?,
                "dependentSchemas" if draft2019 => self.dependencies(x, &at(k), false, true)?,
                "dependentRequired" if draft2019 => self.dependencies(x, &at(k), true, false)?,
                "if" => {
                    let c = self.schema(x, &at(k))?;
                    let then = m
                        .get("then")
                        .map(|s| self.schema(s, &at("then")))
                        .transpose()?
                        .unwrap_or(Schema::True);
                    let other = m
                        .get("else")
                        .map(|s| self.schema(s, &at("else")))
                        .transpose()?
                        .unwrap_or(Schema::True);
                    Schema::IfThenElse(Box::new(c), Box::new(then), Box::new(other))
                }
                "then" | "else" => {
                    if !m.contains_key("if") {
                        self.warn(&at(k), "ignored without if");
                    }
                    continue;
                }
                "x-pattReq" => self.patt_req(x, &at(k))?,
                "x-contAfter" => {
                    let n = x.get("after").map(|v| count(v, &at(k), "after")).transpose()?;
                    let s = x
                        .get("schema")
                        .ok_or_else(|| invalid(&at(k), "x-contAfter needs a schema"))?;
                    Schema::ContAfter(n.unwrap_or(0), Box::new(self.schema(s, &format!("{}/schema", at(k)))?))
                }
                "x-notMulOf" => match x {
                    JsonValue::Num(q) if q.is_positive() => Schema::NotMulOf(q.clone()),
                    _ => return Err(invalid(&at(k), "x-notMulOf must be a positive number")),
                },
                "x-repeatedItems" => match x {
                    JsonValue::Bool(true) => Schema::RepeatedItems,
                    JsonValue::Bool(false) => Schema::True,
                    _ => return Err(invalid(&at(k), "x-repeatedItems must be a boolean")),
                },
                "format" => {
                    self.warn(&at(k), "format is not checked");
                    continue;
                }
                k if ANNOTATIONS.contains(&k) => continue,
                _ => {
                    self.warn(&at(k), "unknown keyword ignored");
                    continue;
                }
            };
            parts.push(s);
        }
        Ok(match parts.len() {
            0 => Schema::True,
            1 => parts.pop().unwrap(),
            _ => Schema::And(parts),
        })
    }

    fn reference(&mut self, r: &str, path: &str) -> Result<Schema, TranslateError> {
        match parse_pointer(r).as_deref() {
            Some([]) => {
                self.root_used = true;
                Ok(Schema::Ref(self.root_var.clone()))
            }
            Some([d, x]) if d == "definitions" => Ok(Schema::Ref(x.clone())),
            _ => Err(TranslateError::UnresolvedRef(format!("{r} at {path}"))),
        }
    }

    fn schemas(&mut self, v: &JsonValue, path: &str) -> Result<Vec<Schema>, TranslateError> {
        match v {
            JsonValue::Arr(a) => a
                .iter()
                .enumerate()
                .map(|(i, s)| self.schema(s, &format!("{path}/{i}")))
                .collect(),
            _ => Err(invalid(path, "expected an array of schemas")),
        }
    }

    fn names(&mut self, v: &JsonValue, path: &str) -> Result<Vec<String>, TranslateError> {
        match v {
            JsonValue::Arr(a) => a
                .iter()
                .map(|k| {
                    k.as_str()
                        .map(str::to_string)
                        .ok_or_else(|| invalid(path, "expected strings"))
                })
                .collect(),
            _ => Err(invalid(path, "expected an array of strings")),
        }
    }

    fn regex(&mut self, v: &JsonValue, path: &str) -> Result<Regex, TranslateError> {
        let src = v.as_str().ok_or_else(|| invalid(path, "patterns must be strings"))?;
        Regex::parse(src).map_err(|source| TranslateError::Pattern {
            path: path.to_string(),
            source,
        })
    }

    fn types(&mut self, v: &JsonValue, path: &str) -> Result<Schema, TranslateError> {
        let names = match v {
            JsonValue::Arr(a) => a.iter().map(|t| type_name(t, path)).collect::<Result<Vec<_>, _>>()?,
            t => vec![type_name(t, path)?],
        };
        let mut plain = Vec::new();
        let mut integer = false;
        for n in &names {
            if n == "integer" {
                integer = true;
            } else {
                plain.push(JsonType::from_schema_name(n).ok_or_else(|| invalid(path, format!("unknown type {n}")))?);
            }
        }
        if integer && !plain.contains(&JsonType::Num) {
            let int = Schema::And(vec![
                Schema::ty(JsonType::Num),
                Schema::MulOf(num_rational::BigRational::from_integer(1.into())),
            ]);
            if plain.is_empty() {
                return Ok(int);
            }
            return Ok(Schema::Or(vec![Schema::types(plain), int]));
        }
        Ok(Schema::types(plain))
    }

    fn props(
        &mut self,
        m: &std::collections::BTreeMap<String, JsonValue>,
        path: &str,
    ) -> Result<Schema, TranslateError> {
        let mut pairs = Vec::new();
        if let Some(p) = m.get("properties") {
            let p = p
                .as_object()
                .ok_or_else(|| invalid(&format!("{path}/properties"), "expected an object"))?;
            for (k, s) in p {
                let sp = format!("{path}/properties/{}", super::escape_pointer_segment(k));
                pairs.push((Regex::keykey(k), self.schema(s, &sp)?));
            }
        }
        if let Some(p) = m.get("patternProperties") {
            let pp = format!("{path}/patternProperties");
            let p = p.as_object().ok_or_else(|| invalid(&pp, "expected an object"))?;
            for (r, s) in p {
                let sp = format!("{pp}/{}", super::escape_pointer_segment(r));
                let re = self.regex(&JsonValue::Str(r.clone()), &sp)?;
                pairs.push((re, self.schema(s, &sp)?));
            }
        }
        let add = match m.get("additionalProperties") {
            Some(s) => self.schema(s, &format!("{path}/additionalProperties"))?,
            None => Schema::True,
        };
        Ok(Schema::Props(pairs, Box::new(add)))
    }

    fn dependencies(
        &mut self,
        v: &JsonValue,
        path: &str,
        arrays: bool,
        schemas: bool,
    ) -> Result<Schema, TranslateError> {
        let m = v.as_object().ok_or_else(|| invalid(path, "expected an object"))?;
        let mut parts = Vec::new();
        for (k, d) in m {
            let sp = format!("{path}/{}", super::escape_pointer_segment(k));
            match d {
                JsonValue::Arr(_) if arrays => {
                    let ks = self.names(d, &sp)?;
                    parts.push(Schema::Implies(
                        Box::new(Schema::Req(vec![k.clone()])),
                        Box::new(Schema::Req(ks)),
                    ));
                }
                JsonValue::Obj(_) | JsonValue::Bool(_) if schemas => {
                    let guard = Schema::And(vec![Schema::ty(JsonType::Obj), Schema::Req(vec![k.clone()])]);
                    parts.push(Schema::Implies(Box::new(guard), Box::new(self.schema(d, &sp)?)));
                }
                _ => return Err(invalid(&sp, "unexpected dependency shape")),
            }
        }
        Ok(match parts.len() {
            0 => Schema::True,
            1 => parts.pop().unwrap(),
            _ => Schema::And(parts),
        })
    }

    fn patt_req(&mut self, v: &JsonValue, path: &str) -> Result<Schema, TranslateError> {
        let a = v
            .as_array()
            .ok_or_else(|| invalid(path, "x-pattReq must be an array of [pattern, schema] pairs"))?;
        let mut pairs = Vec::new();
        for (i, p) in a.iter().enumerate() {
            let sp = format!("{path}/{i}");
            match p.as_array() {
                Some([r, s]) => pairs.push((self.regex(r, &format!("{sp}/0"))?, self.schema(s, &format!("{sp}/1"))?)),
                _ => return Err(invalid(&sp, "expected a [pattern, schema] pair")),
            }
        }
        Ok(Schema::PattReq(pairs))
    }
}
