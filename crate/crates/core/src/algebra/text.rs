//! Text form of schemas and documents.
//!
//! ```text
//! (props("^a$": ¬x; t) ∧ type(Obj))
//! defs(
//!   x: ...
//! )
//! ```
//!
//! n-ary `∧`/`∨` and `⇒` are written infix and always parenthesized by the
//! printer; the parser also accepts them bare at the top of an expression.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use super::{Document, Env, ExtBound, Schema, Upper};
use crate::json::{json_string_literal, parse_json_prefix, JsonType};
use crate::patterns::{parse_pattern, Pattern, Regex};

const RESERVED: &[&str] = &["t", "f", "uniqueItems", "repeatedItems", "inf", "defs", "ref"];

fn is_bare_name(x: &str) -> bool {
    let mut chars = x.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && !RESERVED.contains(&x)
}

fn name_text(x: &str) -> String {
    if is_bare_name(x) {
        x.to_string()
    } else {
        json_string_literal(x)
    }
}

pub(super) fn schema_to_string(s: &Schema) -> String {
    let mut out = String::new();
    write_schema(&mut out, s);
    out
}

pub(super) fn document_to_string(d: &Document) -> String {
    let mut out = schema_to_string(&d.root);
    if !d.env.is_empty() {
        out.push_str("\ndefs(\n");
        for (i, (x, s)) in d.env.iter().enumerate() {
            out.push_str("  ");
            out.push_str(&name_text(x));
            out.push_str(": ");
            write_schema(&mut out, s);
            if i + 1 < d.env.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push(')');
    }
    out
}

fn write_list(out: &mut String, items: &[Schema]) {
    for (i, s) in items.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_schema(out, s);
    }
}

fn write_pairs(out: &mut String, pairs: &[(Regex, Schema)]) {
    for (i, (r, s)) in pairs.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&r.to_string());
        out.push_str(": ");
        write_schema(out, s);
    }
}

fn write_schema(out: &mut String, s: &Schema) {
    use std::fmt::Write;
    match s {
        Schema::Type(ts) => {
            let names: Vec<&str> = ts.iter().map(|t| t.algebra_name()).collect();
            let _ = write!(out, "type({})", names.join(", "));
        }
        Schema::Const(v) => {
            let _ = write!(out, "const({})", v.to_canonical());
        }
        Schema::Enum(vs) => {
            let items: Vec<String> = vs.iter().map(|v| v.to_canonical()).collect();
            let _ = write!(out, "enum({})", items.join(", "));
        }
        Schema::Len(l, j) | Schema::Pro(l, j) | Schema::Ite(l, j) => {
            let _ = write!(out, "{}({l}, {j})", s.operator_name());
        }
        Schema::Pattern(r) => {
            let _ = write!(out, "pattern({r})");
        }
        Schema::Betw(m, n) | Schema::XBetw(m, n) => {
            let _ = write!(out, "{}({m}, {n})", s.operator_name());
        }
        Schema::MulOf(q) | Schema::NotMulOf(q) => {
            let _ = write!(out, "{}({})", s.operator_name(), crate::json::format_rational(q));
        }
        Schema::Props(pairs, add) => {
            out.push_str("props(");
            write_pairs(out, pairs);
            out.push_str("; ");
            write_schema(out, add);
            out.push(')');
        }
        Schema::PattReq(pairs) => {
            out.push_str("pattReq(");
            write_pairs(out, pairs);
            out.push(')');
        }
        Schema::Req(ks) => {
            let items: Vec<String> = ks.iter().map(|k| json_string_literal(k)).collect();
            let _ = write!(out, "req({})", items.join(", "));
        }
        Schema::Items(head, tail) => {
            out.push_str("items(");
            write_list(out, head);
            out.push_str("; ");
            write_schema(out, tail);
            out.push(')');
        }
        Schema::PNames(t) | Schema::Contains(t) => {
            let _ = write!(out, "{}(", s.operator_name());
            write_schema(out, t);
            out.push(')');
        }
        Schema::ItemAt(i, t) | Schema::ItemsAfter(i, t) | Schema::ContAfter(i, t) => {
            let _ = write!(out, "{}({i}, ", s.operator_name());
            write_schema(out, t);
            out.push(')');
        }
        Schema::Cnt(l, j, t) => {
            let _ = write!(out, "cnt({l}, {j}, ");
            write_schema(out, t);
            out.push(')');
        }
        Schema::UniqueItems => out.push_str("uniqueItems"),
        Schema::RepeatedItems => out.push_str("repeatedItems"),
        Schema::True => out.push('t'),
        Schema::False => out.push('f'),
        Schema::Ref(x) => {
            if is_bare_name(x) {
                out.push_str(x);
            } else {
                let _ = write!(out, "ref({})", json_string_literal(x));
            }
        }
        Schema::Not(t) => {
            out.push('¬');
            write_schema(out, t);
        }
        Schema::And(v) | Schema::Or(v) if v.len() >= 2 => {
            let op = if matches!(s, Schema::And(_)) { " ∧ " } else { " ∨ " };
            out.push('(');
            for (i, t) in v.iter().enumerate() {
                if i > 0 {
                    out.push_str(op);
                }
                write_schema(out, t);
            }
            out.push(')');
        }
        Schema::And(v) | Schema::Or(v) => {
            let _ = write!(out, "{}(", s.operator_name());
            write_list(out, v);
            out.push(')');
        }
        Schema::Implies(a, b) => {
            out.push('(');
            write_schema(out, a);
            out.push_str(" ⇒ ");
            write_schema(out, b);
            out.push(')');
        }
        Schema::IfThenElse(a, b, c) => {
            out.push_str("ifThenElse(");
            write_list(out, &[(**a).clone(), (**b).clone(), (**c).clone()]);
            out.push(')');
        }
        Schema::OneOf(v) => {
            out.push_str("⊕(");
            write_list(out, v);
            out.push(')');
        }
        Schema::Group(v) => {
            out.push('{');
            write_list(out, v);
            out.push('}');
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("algebra text, offset {offset}: {message}")]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

pub fn parse_schema(src: &str) -> Result<Schema, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let s = p.expr()?;
    p.ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(s)
}

pub fn parse_document(src: &str) -> Result<Document, ParseError> {
    let mut p = Parser { src, pos: 0 };
    let root = p.expr()?;
    let mut env = Env::new();
    p.ws();
    if p.rest().starts_with("defs") {
        p.pos += 4;
        p.expect("(")?;
        p.ws();
        if !p.eat(")") {
            loop {
                let name = p.name()?;
                p.expect(":")?;
                let body = p.expr()?;
                if env.insert(name.clone(), body).is_some() {
                    return Err(p.err(&format!("variable {name} defined twice")));
                }
                p.ws();
                if p.eat(")") {
                    break;
                }
                p.expect(",")?;
            }
        }
    }
    p.ws();
    if p.pos != src.len() {
        return Err(p.err("trailing input (nested defs are not supported)"));
    }
    Ok(Document { root, env })
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> ParseError {
        ParseError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &str) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {tok:?}")))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_alphanumeric() || c == '_') || (i == 0 && c.is_ascii_digit()))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        let id = rest[..len].to_string();
        self.pos += len;
        Some(id)
    }

    fn string(&mut self) -> Result<String, ParseError> {
        self.ws();
        if !self.rest().starts_with('"') {
            return Err(self.err("expected string"));
        }
        let (v, used) = parse_json_prefix(self.rest()).map_err(|e| self.err(&e.to_string()))?;
        self.pos += used;
        v.as_str()
            .map(str::to_string)
            .ok_or_else(|| self.err("expected string"))
    }

    fn name(&mut self) -> Result<String, ParseError> {
        self.ws();
        if self.rest().starts_with('"') {
            return self.string();
        }
        self.ident().ok_or_else(|| self.err("expected name"))
    }

    fn json(&mut self) -> Result<crate::json::JsonValue, ParseError> {
        self.ws();
        let (v, used) = parse_json_prefix(self.rest()).map_err(|e| self.err(&e.to_string()))?;
        self.pos += used;
        Ok(v)
    }

    fn nat(&mut self) -> Result<u64, ParseError> {
        self.ws();
        let rest = self.rest();
        let len = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected natural number"));
        }
        let n = rest[..len].parse().map_err(|_| self.err("number too large"))?;
        self.pos += len;
        Ok(n)
    }

    fn upper(&mut self) -> Result<Upper, ParseError> {
        if self.eat("inf") {
            Ok(Upper::Inf)
        } else {
            Ok(Upper::Fin(self.nat()?))
        }
    }

    fn rational(&mut self) -> Result<BigRational, ParseError> {
        self.ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_ascii_digit() || matches!(c, '-' | '+' | '.' | 'e' | 'E')))
            .unwrap_or(rest.len());
        let num_text = &rest[..len];
        let v = crate::json::parse_json(num_text).map_err(|_| self.err("expected number"))?;
        let mut q = v.as_num().cloned().ok_or_else(|| self.err("expected number"))?;
        self.pos += len;
        if self.rest().starts_with('/') {
            self.pos += 1;
            let d = self.nat()?;
            if d == 0 {
                return Err(self.err("zero denominator"));
            }
            q /= BigRational::from_integer(BigInt::from(d));
        }
        Ok(q)
    }

    fn ext_bound(&mut self) -> Result<ExtBound, ParseError> {
        if self.eat("-inf") {
            Ok(ExtBound::NegInf)
        } else if self.eat("inf") {
            Ok(ExtBound::PosInf)
        } else {
            Ok(ExtBound::Fin(self.rational()?))
        }
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        self.ws();
        if self.eat("Not•(") {
            let p = self.pattern()?;
            self.expect(")")?;
            return Ok(Pattern::not(p));
        }
        if self.eat("And•(") {
            let a = self.pattern()?;
            self.expect(",")?;
            let b = self.pattern()?;
            self.expect(")")?;
            return Ok(Pattern::and(a, b));
        }
        if self.eat("Or•(") {
            let mut items = Vec::new();
            if !self.eat(")") {
                loop {
                    items.push(self.pattern()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(Pattern::Union(items));
        }
        let at = self.pos;
        let src = self.string()?;
        parse_pattern(&src).map_err(|e| ParseError {
            offset: at,
            message: e.to_string(),
        })
    }

    fn regex(&mut self) -> Result<Regex, ParseError> {
        let at = self.pos;
        let p = self.pattern()?;
        Regex::new(p).map_err(|e| ParseError {
            offset: at,
            message: e.to_string(),
        })
    }

    fn pairs(&mut self, terminators: &[&str]) -> Result<Vec<(Regex, Schema)>, ParseError> {
        let mut out = Vec::new();
        self.ws();
        if terminators.iter().any(|t| self.rest().starts_with(t)) {
            return Ok(out);
        }
        loop {
            let r = self.regex()?;
            self.expect(":")?;
            let s = self.expr()?;
            out.push((r, s));
            self.ws();
            if terminators.iter().any(|t| self.rest().starts_with(t)) {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn list(&mut self, close: &str) -> Result<Vec<Schema>, ParseError> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat(close) {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn expr(&mut self) -> Result<Schema, ParseError> {
        let first = self.unary()?;
        self.ws();
        for (tok, is_and) in [("∧", true), ("∨", false)] {
            if self.rest().starts_with(tok) {
                let mut items = vec![first];
                while self.eat(tok) {
                    items.push(self.unary()?);
                }
                self.ws();
                if self.rest().starts_with("∧") || self.rest().starts_with("∨") || self.rest().starts_with("⇒") {
                    return Err(self.err("mixed connectives need parentheses"));
                }
                return Ok(if is_and { Schema::And(items) } else { Schema::Or(items) });
            }
        }
        if self.eat("⇒") {
            let second = self.unary()?;
            return Ok(Schema::Implies(Box::new(first), Box::new(second)));
        }
        Ok(first)
    }

    fn unary(&mut self) -> Result<Schema, ParseError> {
        if self.eat("¬") {
            return Ok(Schema::not(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Schema, ParseError> {
        self.ws();
        if self.eat("(") {
            let s = self.expr()?;
            self.expect(")")?;
            return Ok(s);
        }
        if self.eat("⊕(") {
            return Ok(Schema::OneOf(self.list(")")?));
        }
        if self.eat("{") {
            return Ok(Schema::Group(self.list("}")?));
        }
        let at = self.pos;
        let id = self.ident().ok_or_else(|| self.err("expected schema"))?;
        if !self.rest().starts_with('(') {
            return Ok(match id.as_str() {
                "t" => Schema::True,
                "f" => Schema::False,
                "uniqueItems" => Schema::UniqueItems,
                "repeatedItems" => Schema::RepeatedItems,
                x if RESERVED.contains(&x) => {
                    return Err(ParseError {
                        offset: at,
                        message: format!("unexpected {x}"),
                    })
                }
                x => Schema::Ref(x.to_string()),
            });
        }
        self.pos += 1;
        let b = Box::new;
        let s = match id.as_str() {
            "type" => {
                let mut ts = Vec::new();
                if !self.eat(")") {
                    loop {
                        let n = self.ident().ok_or_else(|| self.err("expected type name"))?;
                        ts.push(JsonType::from_algebra_name(&n).ok_or_else(|| self.err("unknown type"))?);
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                return Ok(Schema::Type(ts));
            }
            "const" => Schema::Const(self.json()?),
            "enum" => {
                let mut vs = Vec::new();
                if !self.eat(")") {
                    loop {
                        vs.push(self.json()?);
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                return Ok(Schema::Enum(vs));
            }
            "len" | "pro" | "ite" => {
                let l = self.nat()?;
                self.expect(",")?;
                let j = self.upper()?;
                match id.as_str() {
                    "len" => Schema::Len(l, j),
                    "pro" => Schema::Pro(l, j),
                    _ => Schema::Ite(l, j),
                }
            }
            "pattern" => Schema::Pattern(self.regex()?),
            "betw" | "xBetw" => {
                let m = self.ext_bound()?;
                self.expect(",")?;
                let n = self.ext_bound()?;
                if id == "betw" {
                    Schema::Betw(m, n)
                } else {
                    Schema::XBetw(m, n)
                }
            }
            "mulOf" => Schema::MulOf(self.rational()?),
            "notMulOf" => Schema::NotMulOf(self.rational()?),
            "props" => {
                let pairs = self.pairs(&[";"])?;
                self.expect(";")?;
                let add = self.expr()?;
                Schema::Props(pairs, b(add))
            }
            "pattReq" => Schema::PattReq(self.pairs(&[")"])?),
            "req" => {
                let mut ks = Vec::new();
                if !self.eat(")") {
                    loop {
                        ks.push(self.string()?);
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                return Ok(Schema::Req(ks));
            }
            "pNames" => Schema::PNames(b(self.expr()?)),
            "contains" => Schema::Contains(b(self.expr()?)),
            "items" => {
                let mut head = Vec::new();
                if !self.eat(";") {
                    loop {
                        head.push(self.expr()?);
                        if self.eat(";") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Schema::Items(head, b(self.expr()?))
            }
            "itemAt" | "itemsAfter" | "contAfter" => {
                let i = self.nat()?;
                self.expect(",")?;
                let t = b(self.expr()?);
                match id.as_str() {
                    "itemAt" if i == 0 => return Err(self.err("itemAt positions start at 1")),
                    "itemAt" => Schema::ItemAt(i, t),
                    "itemsAfter" => Schema::ItemsAfter(i, t),
                    _ => Schema::ContAfter(i, t),
                }
            }
            "cnt" => {
                let l = self.nat()?;
                self.expect(",")?;
                let j = self.upper()?;
                self.expect(",")?;
                Schema::Cnt(l, j, b(self.expr()?))
            }
            "ref" => Schema::Ref(self.name()?),
            "and" => return Ok(Schema::And(self.list(")")?)),
            "or" => return Ok(Schema::Or(self.list(")")?)),
            "ifThenElse" => {
                let v = self.list(")")?;
                let [a, c, d]: [Schema; 3] = v.try_into().map_err(|_| self.err("ifThenElse takes three arguments"))?;
                return Ok(Schema::IfThenElse(b(a), b(c), b(d)));
            }
            other => {
                return Err(ParseError {
                    offset: at,
                    message: format!("unknown operator {other}"),
                })
            }
        };
        self.expect(")")?;
        Ok(s)
    }
}
