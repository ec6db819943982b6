//! Exact JSON values.
//!
//! Numbers are kept as arbitrary-precision rationals, so `1`, `1.0` and
//! `10e-1` are the same value and `multipleOf` can be decided exactly.
//! Objects never hold two members with the same name.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// The six JSON types.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JsonType {
    Null,
    Bool,
    Num,
    Str,
    Arr,
    Obj,
}

impl JsonType {
    pub const ALL: [JsonType; 6] = [
        JsonType::Null,
        JsonType::Bool,
        JsonType::Num,
        JsonType::Str,
        JsonType::Arr,
        JsonType::Obj,
    ];

    /// Name used by the algebra text format.
    pub fn algebra_name(self) -> &'static str {
        match self {
            JsonType::Null => "Null",
            JsonType::Bool => "Bool",
            JsonType::Num => "Num",
            JsonType::Str => "Str",
            JsonType::Arr => "Arr",
            JsonType::Obj => "Obj",
        }
    }

    /// Name used by the JSON Schema `type` keyword.
    pub fn schema_name(self) -> &'static str {
        match self {
            JsonType::Null => "null",
            JsonType::Bool => "boolean",
            JsonType::Num => "number",
            JsonType::Str => "string",
            JsonType::Arr => "array",
            JsonType::Obj => "object",
        }
    }

    pub fn from_algebra_name(s: &str) -> Option<JsonType> {
        JsonType::ALL.into_iter().find(|t| t.algebra_name() == s)
    }

    pub fn from_schema_name(s: &str) -> Option<JsonType> {
        JsonType::ALL.into_iter().find(|t| t.schema_name() == s)
    }
}

impl fmt::Display for JsonType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.algebra_name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum JsonValue {
    Null,
    Bool(bool),
    Num(BigRational),
    Str(String),
    Arr(Vec<JsonValue>),
    Obj(BTreeMap<String, JsonValue>),
}

impl JsonValue {
    pub fn int(n: i64) -> JsonValue {
        JsonValue::Num(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn str(s: impl Into<String>) -> JsonValue {
        JsonValue::Str(s.into())
    }

    pub fn obj<K: Into<String>>(members: impl IntoIterator<Item = (K, JsonValue)>) -> JsonValue {
        JsonValue::Obj(members.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    pub fn json_type(&self) -> JsonType {
        type_of(self)
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            JsonValue::Str(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_num(&self) -> Option<&BigRational> {
        match self {
            JsonValue::Num(q) => Some(q),
            _ => None,
        }
    }

    pub fn as_array(&self) -> Option<&[JsonValue]> {
        match self {
            JsonValue::Arr(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_object(&self) -> Option<&BTreeMap<String, JsonValue>> {
        match self {
            JsonValue::Obj(m) => Some(m),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            JsonValue::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Non-negative integer value, if this is one that fits in `u64`.
    pub fn as_u64(&self) -> Option<u64> {
        match self {
            JsonValue::Num(q) if q.is_integer() => q.to_integer().to_u64(),
            _ => None,
        }
    }

    pub fn get(&self, key: &str) -> Option<&JsonValue> {
        self.as_object().and_then(|m| m.get(key))
    }

    /// Canonical text: sorted keys, no whitespace, shortest exact decimals.
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        write_value(&mut out, self, None, 0);
        out
    }

    /// Indented canonical text.
    pub fn to_pretty(&self) -> String {
        let mut out = String::new();
        write_value(&mut out, self, Some(2), 0);
        out
    }
}

impl fmt::Display for JsonValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical())
    }
}

impl From<bool> for JsonValue {
    fn from(b: bool) -> Self {
        JsonValue::Bool(b)
    }
}

impl From<&str> for JsonValue {
    fn from(s: &str) -> Self {
        JsonValue::Str(s.to_string())
    }
}

impl From<i64> for JsonValue {
    fn from(n: i64) -> Self {
        JsonValue::int(n)
    }
}

impl From<BigRational> for JsonValue {
    fn from(q: BigRational) -> Self {
        JsonValue::Num(q)
    }
}

pub fn type_of(v: &JsonValue) -> JsonType {
    match v {
        JsonValue::Null => JsonType::Null,
        JsonValue::Bool(_) => JsonType::Bool,
        JsonValue::Num(_) => JsonType::Num,
        JsonValue::Str(_) => JsonType::Str,
        JsonValue::Arr(_) => JsonType::Arr,
        JsonValue::Obj(_) => JsonType::Obj,
    }
}

/// Structural equality with numbers compared as rationals.
pub fn deep_equal(a: &JsonValue, b: &JsonValue) -> bool {
    a == b
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsonError {
    #[error("syntax error at byte {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("duplicate key {key:?} at byte {offset}")]
    DuplicateKey { offset: usize, key: String },
}

const MAX_DEPTH: usize = 512;
const MAX_EXPONENT: i64 = 100_000;

pub fn parse_json(text: &str) -> Result<JsonValue, JsonError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let v = p.value(0)?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing characters"));
    }
    Ok(v)
}

/// Parses one JSON value at the start of `text`, returning it with the
/// number of bytes consumed. Leading whitespace is skipped.
pub fn parse_json_prefix(text: &str) -> Result<(JsonValue, usize), JsonError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    p.skip_ws();
    let v = p.value(0)?;
    Ok((v, p.pos))
}

pub fn parse_json_bytes(bytes: &[u8]) -> Result<JsonValue, JsonError> {
    let text = std::str::from_utf8(bytes).map_err(|e| JsonError::SyntaxError {
        offset: e.valid_up_to(),
        message: "invalid UTF-8".into(),
    })?;
    parse_json(text)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, message: &str) -> JsonError {
        JsonError::SyntaxError {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while let Some(b' ' | b'\t' | b'\n' | b'\r') = self.peek() {
            self.pos += 1;
        }
    }

    fn expect_lit(&mut self, lit: &str, v: JsonValue) -> Result<JsonValue, JsonError> {
        if self.src[self.pos..].starts_with(lit.as_bytes()) {
            self.pos += lit.len();
            Ok(v)
        } else {
            Err(self.err("invalid literal"))
        }
    }

    fn value(&mut self, depth: usize) -> Result<JsonValue, JsonError> {
        if depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'n') => self.expect_lit("null", JsonValue::Null),
            Some(b't') => self.expect_lit("true", JsonValue::Bool(true)),
            Some(b'f') => self.expect_lit("false", JsonValue::Bool(false)),
            Some(b'"') => Ok(JsonValue::Str(self.string()?)),
            Some(b'[') => {
                self.pos += 1;
                let mut items = Vec::new();
                self.skip_ws();
                if self.peek() == Some(b']') {
                    self.pos += 1;
                    return Ok(JsonValue::Arr(items));
                }
                loop {
                    self.skip_ws();
                    items.push(self.value(depth + 1)?);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b']') => {
                            self.pos += 1;
                            return Ok(JsonValue::Arr(items));
                        }
                        _ => return Err(self.err("expected ',' or ']'")),
                    }
                }
            }
            Some(b'{') => {
                self.pos += 1;
                let mut members = BTreeMap::new();
                self.skip_ws();
                if self.peek() == Some(b'}') {
                    self.pos += 1;
                    return Ok(JsonValue::Obj(members));
                }
                loop {
                    self.skip_ws();
                    if self.peek() != Some(b'"') {
                        return Err(self.err("expected member name"));
                    }
                    let at = self.pos;
                    let key = self.string()?;
                    self.skip_ws();
                    if self.peek() != Some(b':') {
                        return Err(self.err("expected ':'"));
                    }
                    self.pos += 1;
                    self.skip_ws();
                    let v = self.value(depth + 1)?;
                    if members.contains_key(&key) {
                        return Err(JsonError::DuplicateKey { offset: at, key });
                    }
                    members.insert(key, v);
                    self.skip_ws();
                    match self.peek() {
                        Some(b',') => self.pos += 1,
                        Some(b'}') => {
                            self.pos += 1;
                            return Ok(JsonValue::Obj(members));
                        }
                        _ => return Err(self.err("expected ',' or '}'")),
                    }
                }
            }
            Some(b'-' | b'0'..=b'9') => self.number(),
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn hex4(&mut self) -> Result<u32, JsonError> {
        let digits = self
            .src
            .get(self.pos..self.pos + 4)
            .ok_or_else(|| self.err("short \\u escape"))?;
        let s = std::str::from_utf8(digits).map_err(|_| self.err("bad \\u escape"))?;
        let v = u32::from_str_radix(s, 16).map_err(|_| self.err("bad \\u escape"))?;
        self.pos += 4;
        Ok(v)
    }

    fn string(&mut self) -> Result<String, JsonError> {
        self.pos += 1;
        let mut out = String::new();
        loop {
            let start = self.pos;
            while let Some(b) = self.peek() {
                if b == b'"' || b == b'\\' || b < 0x20 {
                    break;
                }
                self.pos += 1;
            }
            // Input came from a &str and we only stop on ASCII bytes, so this slice is valid UTF-8.
            out.push_str(std::str::from_utf8(&self.src[start..self.pos]).unwrap());
            match self.peek() {
                None => return Err(self.err("unterminated string")),
                Some(b'"') => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some(b'\\') => {
                    self.pos += 1;
                    let c = self.peek().ok_or_else(|| self.err("unterminated escape"))?;
                    self.pos += 1;
                    match c {
                        b'"' => out.push('"'),
                        b'\\' => out.push('\\'),
                        b'/' => out.push('/'),
                        b'b' => out.push('\u{8}'),
                        b'f' => out.push('\u{c}'),
                        b'n' => out.push('\n'),
                        b'r' => out.push('\r'),
                        b't' => out.push('\t'),
                        b'u' => {
                            let hi = self.hex4()?;
                            let cp = if (0xD800..0xDC00).contains(&hi) {
                                if !self.src[self.pos..].starts_with(b"\\u") {
                                    return Err(self.err("lone surrogate"));
                                }
                                self.pos += 2;
                                let lo = self.hex4()?;
                                if !(0xDC00..0xE000).contains(&lo) {
                                    return Err(self.err("lone surrogate"));
                                }
                                0x10000 + ((hi - 0xD800) << 10) + (lo - 0xDC00)
                            } else if (0xDC00..0xE000).contains(&hi) {
                                return Err(self.err("lone surrogate"));
                            } else {
                                hi
                            };
                            out.push(char::from_u32(cp).ok_or_else(|| self.err("bad code point"))?);
                        }
                        _ => return Err(self.err("invalid escape")),
                    }
                }
                Some(_) => return Err(self.err("control character in string")),
            }
        }
    }

    fn digits(&mut self) -> &[u8] {
        let start = self.pos;
        while let Some(b'0'..=b'9') = self.peek() {
            self.pos += 1;
        }
        &self.src[start..self.pos]
    }

    fn number(&mut self) -> Result<JsonValue, JsonError> {
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        let int_part = self.digits().to_vec();
        if int_part.is_empty() || (int_part.len() > 1 && int_part[0] == b'0') {
            return Err(self.err("invalid number"));
        }
        let mut frac = Vec::new();
        if self.peek() == Some(b'.') {
            self.pos += 1;
            frac = self.digits().to_vec();
            if frac.is_empty() {
                return Err(self.err("invalid fraction"));
            }
        }
        let mut exp: i64 = 0;
        if let Some(b'e' | b'E') = self.peek() {
            self.pos += 1;
            let neg_exp = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let ds = self.digits();
            if ds.is_empty() {
                return Err(self.err("invalid exponent"));
            }
            let s = std::str::from_utf8(ds).unwrap();
            exp = s.parse::<i64>().map_err(|_| self.err("exponent out of range"))?;
            if neg_exp {
                exp = -exp;
            }
        }
        let mut mantissa_digits = int_part;
        mantissa_digits.extend_from_slice(&frac);
        let mantissa = BigInt::parse_bytes(&mantissa_digits, 10).unwrap();
        let scale = exp - frac.len() as i64;
        if scale.abs() > MAX_EXPONENT {
            return Err(self.err("exponent out of supported range"));
        }
        let mut q = if scale >= 0 {
            BigRational::from_integer(mantissa * pow10(scale as u64))
        } else {
            BigRational::new(mantissa, pow10((-scale) as u64))
        };
        if negative {
            q = -q;
        }
        Ok(JsonValue::Num(q))
    }
}

fn pow10(n: u64) -> BigInt {
    num_traits::pow(BigInt::from(10), n as usize)
}

/// Shortest exact decimal for `q` when one exists, `p/q` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    match decimal_string(q) {
        Some(s) => s,
        None => format!("{}/{}", q.numer(), q.denom()),
    }
}

/// Decimal form of `q` if its denominator only has factors 2 and 5.
pub fn decimal_string(q: &BigRational) -> Option<String> {
    let den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut d, mut twos, mut fives) = (den, 0u64, 0u64);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = (q * BigRational::from_integer(pow10(places))).to_integer();
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let mut s = String::new();
    if neg {
        s.push('-');
    }
    if places == 0 {
        s.push_str(&digits);
        return Some(s);
    }
    let places = places as usize;
    if digits.len() <= places {
        s.push_str("0.");
        s.push_str(&"0".repeat(places - digits.len()));
        s.push_str(&digits);
    } else {
        let (a, b) = digits.split_at(digits.len() - places);
        s.push_str(a);
        s.push('.');
        s.push_str(b);
    }
    Some(s)
}

/// Number as it should appear in JSON text. Non-decimal rationals are
/// rounded to 30 significant decimal places.
fn json_number(q: &BigRational) -> String {
    if let Some(s) = decimal_string(q) {
        return s;
    }
    let scale = pow10(30);
    let approx = (q * BigRational::from_integer(scale.clone())).round() / BigRational::from_integer(scale);
    decimal_string(&approx).unwrap_or_else(|| "0".into())
}

pub fn write_json_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if (c as u32) < 0x20 || c == '\u{7f}' => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
}

pub fn json_string_literal(s: &str) -> String {
    let mut out = String::new();
    write_json_string(&mut out, s);
    out
}

fn newline(out: &mut String, indent: Option<usize>, level: usize) {
    if let Some(n) = indent {
        out.push('\n');
        out.push_str(&" ".repeat(n * level));
    }
}

fn write_value(out: &mut String, v: &JsonValue, indent: Option<usize>, level: usize) {
    match v {
        JsonValue::Null => out.push_str("null"),
        JsonValue::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        JsonValue::Num(q) => out.push_str(&json_number(q)),
        JsonValue::Str(s) => write_json_string(out, s),
        JsonValue::Arr(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent, level + 1);
                write_value(out, item, indent, level + 1);
            }
            newline(out, indent, level);
            out.push(']');
        }
        JsonValue::Obj(members) => {
            if members.is_empty() {
                out.push_str("{}");
                return;
            }
            out.push('{');
            for (i, (k, item)) in members.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                newline(out, indent, level + 1);
                write_json_string(out, k);
                out.push(':');
                if indent.is_some() {
                    out.push(' ');
                }
                write_value(out, item, indent, level + 1);
            }
            newline(out, indent, level);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> JsonValue {
        parse_json(s).unwrap()
    }

    #[test]
    fn numbers_are_exact() {
        assert_eq!(p("1e2"), JsonValue::int(100));
        assert!(deep_equal(&p("1"), &p("1.0")));
        assert!(deep_equal(&p("0.1"), &p("1e-1")));
        assert_eq!(p("-0"), JsonValue::int(0));
        assert_eq!(p("2.50").to_canonical(), "2.5");
        assert_eq!(p("-0.0125").to_canonical(), "-0.0125");
        assert_eq!(p("1.5e3").to_canonical(), "1500");
    }

    #[test]
    fn objects() {
        assert_eq!(p(r#"{"size":"S"}"#), JsonValue::obj([("size", JsonValue::str("S"))]));
        assert!(deep_equal(&p(r#"{"a":1,"b":2}"#), &p(r#"{"b":2,"a":1}"#)));
        assert!(!deep_equal(&p("[1,2]"), &p("[2,1]")));
        assert!(matches!(
            parse_json(r#"{"a":1,"a":2}"#),
            Err(JsonError::DuplicateKey { .. })
        ));
    }

    #[test]
    fn syntax_errors() {
        for bad in [
            "",
            "01",
            "[1,]",
            "{\"a\"}",
            "tru",
            "\"\\ud800\"",
            "1.",
            "-",
            "[1] 2",
            "\"a\u{1}\"",
        ] {
            assert!(matches!(parse_json(bad), Err(JsonError::SyntaxError { .. })), "{bad:?}");
        }
    }

    #[test]
    fn strings_and_escapes() {
        assert_eq!(p(r#""\u00e9\ud83d\ude00\n""#), JsonValue::str("é😀\n"));
        assert_eq!(JsonValue::str("a\"b\u{1}").to_canonical(), r#""a\"b\u0001""#);
    }

    #[test]
    fn types() {
        assert_eq!(type_of(&p("[]")), JsonType::Arr);
        assert_eq!(type_of(&p("null")), JsonType::Null);
        assert_eq!(type_of(&p(r#"{"VAL": 3}"#)), JsonType::Obj);
    }

    #[test]
    fn canonical_sorts_keys() {
        assert_eq!(
            p(r#"{"b":[true,null],"a":1.0}"#).to_canonical(),
            r#"{"a":1,"b":[true,null]}"#
        );
    }
}
