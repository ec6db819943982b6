//! Regular expressions with complement and intersection.
//!
//! Patterns follow the ECMA-262 subset used by JSON Schema, minus
//! back-references and lookaround. A pattern denotes the set of strings that
//! contain a match (search semantics); `^` and `$` pin the match to the
//! string boundaries. [`Pattern::Not`] and [`Pattern::And`] complement and
//! intersect those sets and are compiled away into DFAs.

mod dfa;
mod of_schema;
mod parse;

use std::fmt;
use std::sync::Arc;

pub use dfa::CompiledDfa;
pub use of_schema::{patt_of_schema, regex_of_schema, PattOfSchemaError};
pub use parse::parse_pattern;

use thiserror::Error;

use crate::json::json_string_literal;

pub const MAX_CODE_POINT: u32 = 0x10FFFF;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("invalid pattern {pattern:?} at offset {offset}: {message}")]
    Syntax {
        pattern: String,
        offset: usize,
        message: String,
    },
    #[error("unsupported pattern {pattern:?}: {feature}")]
    Unsupported { pattern: String, feature: String },
    #[error("limit exceeded: {0}")]
    LimitExceeded(String),
}

/// A set of code points given as sorted, disjoint, non-adjacent ranges.
/// `negated` only affects printing: `ranges` always holds the members.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CharClass {
    pub ranges: Vec<(u32, u32)>,
    pub negated: bool,
}

impl CharClass {
    pub fn new(ranges: Vec<(u32, u32)>) -> CharClass {
        CharClass {
            ranges: normalize_ranges(ranges),
            negated: false,
        }
    }

    /// The class `[^ranges]`.
    pub fn negated(ranges: Vec<(u32, u32)>) -> CharClass {
        CharClass {
            ranges: complement_ranges(&normalize_ranges(ranges)),
            negated: true,
        }
    }

    pub fn dot() -> CharClass {
        CharClass::negated(vec![(0x0A, 0x0A), (0x0D, 0x0D), (0x2028, 0x2029)])
    }

    pub fn any() -> CharClass {
        CharClass::negated(vec![])
    }

    pub fn contains(&self, c: char) -> bool {
        let c = c as u32;
        self.ranges.iter().any(|&(a, b)| a <= c && c <= b)
    }

    /// Listed members of the class as it would be written between brackets.
    fn written_ranges(&self) -> Vec<(u32, u32)> {
        if self.negated {
            complement_ranges(&self.ranges)
        } else {
            self.ranges.clone()
        }
    }
}

pub fn normalize_ranges(mut ranges: Vec<(u32, u32)>) -> Vec<(u32, u32)> {
    ranges.retain(|&(a, b)| a <= b);
    ranges.sort_unstable();
    let mut out: Vec<(u32, u32)> = Vec::with_capacity(ranges.len());
    for (a, b) in ranges {
        match out.last_mut() {
            Some(last) if a <= last.1.saturating_add(1) => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

pub fn complement_ranges(ranges: &[(u32, u32)]) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut next = 0u32;
    for &(a, b) in ranges {
        if a > next {
            out.push((next, a - 1));
        }
        next = b + 1;
    }
    if next <= MAX_CODE_POINT {
        out.push((next, MAX_CODE_POINT));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Pattern {
    /// Matches nothing, written `[]`.
    Empty,
    Epsilon,
    Char(char),
    Class(CharClass),
    Concat(Vec<Pattern>),
    Union(Vec<Pattern>),
    Star(Box<Pattern>),
    Plus(Box<Pattern>),
    Opt(Box<Pattern>),
    Repeat(Box<Pattern>, u32, Option<u32>),
    AnchorStart,
    AnchorEnd,
    Not(Box<Pattern>),
    And(Box<Pattern>, Box<Pattern>),
}

impl Pattern {
    /// `T•`: every string.
    pub fn top() -> Pattern {
        Pattern::Star(Box::new(Pattern::Class(CharClass::dot())))
    }

    /// `F•`: no string.
    pub fn bottom() -> Pattern {
        Pattern::Empty
    }

    pub fn concat(mut items: Vec<Pattern>) -> Pattern {
        items.retain(|p| *p != Pattern::Epsilon);
        match items.len() {
            0 => Pattern::Epsilon,
            1 => items.pop().unwrap(),
            _ => Pattern::Concat(items),
        }
    }

    pub fn union(mut items: Vec<Pattern>) -> Pattern {
        match items.len() {
            0 => Pattern::Empty,
            1 => items.pop().unwrap(),
            _ => Pattern::Union(items),
        }
    }

    /// `Not•(p)`, cancelling a double complement.
    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Pattern) -> Pattern {
        match p {
            Pattern::Not(inner) => *inner,
            p => Pattern::Not(Box::new(p)),
        }
    }

    /// `And•(p, q)`.
    pub fn and(p: Pattern, q: Pattern) -> Pattern {
        Pattern::And(Box::new(p), Box::new(q))
    }

    /// True when the tree contains `Not` or `And`.
    pub fn has_meta(&self) -> bool {
        match self {
            Pattern::Not(_) | Pattern::And(..) => true,
            Pattern::Concat(v) | Pattern::Union(v) => v.iter().any(Pattern::has_meta),
            Pattern::Star(p) | Pattern::Plus(p) | Pattern::Opt(p) | Pattern::Repeat(p, ..) => p.has_meta(),
            _ => false,
        }
    }

    /// The key `k` when this is the anchored literal produced by [`keykey`].
    pub fn as_keykey(&self) -> Option<String> {
        let Pattern::Concat(items) = self else {
            return None;
        };
        if items.len() < 2 || items[0] != Pattern::AnchorStart || items[items.len() - 1] != Pattern::AnchorEnd {
            return None;
        }
        let mut key = String::new();
        for item in &items[1..items.len() - 1] {
            match item {
                Pattern::Char(c) => key.push(*c),
                _ => return None,
            }
        }
        Some(key)
    }

    pub fn compile(&self) -> Result<CompiledDfa, PatternError> {
        dfa::compile(self)
    }

    /// ECMA-262 source text. Only meaningful when `!self.has_meta()`.
    fn regex_source(&self) -> String {
        let mut out = String::new();
        write_regex(&mut out, self, Prec::Alt);
        out
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Alt,
    Cat,
    Atom,
}

fn needs_group(p: &Pattern, ctx: Prec) -> bool {
    match p {
        Pattern::Union(_) => ctx > Prec::Alt,
        Pattern::Concat(_) => ctx > Prec::Cat,
        Pattern::Epsilon | Pattern::AnchorStart | Pattern::AnchorEnd => ctx == Prec::Atom,
        Pattern::Star(_) | Pattern::Plus(_) | Pattern::Opt(_) | Pattern::Repeat(..) => ctx == Prec::Atom,
        _ => false,
    }
}

fn write_regex(out: &mut String, p: &Pattern, ctx: Prec) {
    if needs_group(p, ctx) {
        out.push_str("(?:");
        write_regex(out, p, Prec::Alt);
        out.push(')');
        return;
    }
    match p {
        Pattern::Empty => out.push_str("[]"),
        Pattern::Epsilon => {}
        Pattern::Char(c) => write_char(out, *c, false),
        Pattern::Class(cls) => write_class(out, cls),
        Pattern::Concat(items) => {
            for item in items {
                write_regex(out, item, Prec::Cat);
            }
        }
        Pattern::Union(items) => {
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push('|');
                }
                write_regex(out, item, Prec::Cat);
            }
        }
        Pattern::Star(q) => {
            write_regex(out, q, Prec::Atom);
            out.push('*');
        }
        Pattern::Plus(q) => {
            write_regex(out, q, Prec::Atom);
            out.push('+');
        }
        Pattern::Opt(q) => {
            write_regex(out, q, Prec::Atom);
            out.push('?');
        }
        Pattern::Repeat(q, lo, hi) => {
            write_regex(out, q, Prec::Atom);
            match hi {
                Some(h) if h == lo => out.push_str(&format!("{{{lo}}}")),
                Some(h) => out.push_str(&format!("{{{lo},{h}}}")),
                None => out.push_str(&format!("{{{lo},}}")),
            }
        }
        Pattern::AnchorStart => out.push('^'),
        Pattern::AnchorEnd => out.push('$'),
        Pattern::Not(_) | Pattern::And(..) => {
            // Nested meta-operators have no ECMA syntax; print the DFA instead.
            match p.compile() {
                Ok(d) => write_regex(out, &d.to_pattern(), ctx),
                Err(_) => out.push_str("[]"),
            }
        }
    }
}

fn write_code_point(out: &mut String, cp: u32) {
    if cp <= 0xFFFF {
        out.push_str(&format!("\\u{cp:04X}"));
    } else {
        out.push_str(&format!("\\u{{{cp:X}}}"));
    }
}

fn write_char(out: &mut String, c: char, in_class: bool) {
    let special: &[char] = if in_class {
        &['\\', ']', '[', '^', '-']
    } else {
        &[
            '\\', '^', '$', '.', '|', '?', '*', '+', '(', ')', '[', ']', '{', '}', '/',
        ]
    };
    match c {
        '\n' => out.push_str("\\n"),
        '\r' => out.push_str("\\r"),
        '\t' => out.push_str("\\t"),
        c if special.contains(&c) => {
            out.push('\\');
            out.push(c);
        }
        c if c.is_control() || (c.is_whitespace() && c != ' ') || (c as u32) >= 0xFFF0 => {
            write_code_point(out, c as u32)
        }
        c => out.push(c),
    }
}

fn write_class_member(out: &mut String, cp: u32) {
    match char::from_u32(cp) {
        Some(c) => write_char(out, c, true),
        None => write_code_point(out, cp),
    }
}

fn write_class(out: &mut String, cls: &CharClass) {
    if *cls == CharClass::dot() {
        out.push('.');
        return;
    }
    if cls.ranges.len() == 1 && cls.ranges[0].0 == cls.ranges[0].1 && !cls.negated {
        if let Some(c) = char::from_u32(cls.ranges[0].0) {
            out.push('[');
            write_char(out, c, true);
            out.push(']');
            return;
        }
    }
    out.push('[');
    if cls.negated {
        out.push('^');
    }
    for (a, b) in cls.written_ranges() {
        write_class_member(out, a);
        if b > a {
            if b > a + 1 {
                out.push('-');
            }
            write_class_member(out, b);
        }
    }
    out.push(']');
}

impl fmt::Display for Pattern {
    /// Algebra text: plain patterns as JSON string literals of their source,
    /// meta-operators as `Not•(…)`, `And•(…, …)` and `Or•(…)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pattern::Not(p) => write!(f, "Not•({p})"),
            Pattern::And(p, q) => write!(f, "And•({p}, {q})"),
            Pattern::Union(items) if self.has_meta() => {
                f.write_str("Or•(")?;
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{item}")?;
                }
                f.write_str(")")
            }
            p => f.write_str(&json_string_literal(&p.ecma_source())),
        }
    }
}

impl Pattern {
    /// ECMA-262 source for this pattern. Meta-operators are compiled and the
    /// resulting automaton is printed as an anchored expression.
    pub fn ecma_source(&self) -> String {
        if self.has_meta() {
            match self.compile() {
                Ok(d) => d.to_pattern().regex_source(),
                Err(_) => "[]".into(),
            }
        } else {
            self.regex_source()
        }
    }
}

/// The anchored pattern whose language is exactly `{k}`.
pub fn keykey(k: &str) -> Pattern {
    let mut items = vec![Pattern::AnchorStart];
    items.extend(k.chars().map(Pattern::Char));
    items.push(Pattern::AnchorEnd);
    Pattern::Concat(items)
}

/// A pattern together with its compiled automaton. Equality ignores the
/// automaton.
#[derive(Clone)]
pub struct Regex {
    pattern: Pattern,
    dfa: Arc<CompiledDfa>,
}

impl Regex {
    pub fn new(pattern: Pattern) -> Result<Regex, PatternError> {
        let dfa = Arc::new(pattern.compile()?);
        Ok(Regex { pattern, dfa })
    }

    pub fn parse(source: &str) -> Result<Regex, PatternError> {
        Regex::new(parse_pattern(source)?)
    }

    pub fn keykey(k: &str) -> Regex {
        Regex::new(keykey(k)).expect("literal patterns always compile")
    }

    pub fn top() -> Regex {
        Regex::new(Pattern::top()).expect("T always compiles")
    }

    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn dfa(&self) -> &CompiledDfa {
        &self.dfa
    }

    pub fn is_match(&self, s: &str) -> bool {
        self.dfa.matches(s)
    }

    pub fn as_keykey(&self) -> Option<String> {
        self.pattern.as_keykey()
    }

    pub fn ecma_source(&self) -> String {
        if self.pattern.has_meta() {
            self.dfa.to_pattern().regex_source()
        } else {
            self.pattern.regex_source()
        }
    }

    /// `Not•(self)` without recompiling the operand.
    pub fn complement(&self) -> Regex {
        Regex {
            pattern: Pattern::not(self.pattern.clone()),
            dfa: Arc::new(self.dfa.complement()),
        }
    }
}

impl PartialEq for Regex {
    fn eq(&self, other: &Self) -> bool {
        self.pattern == other.pattern
    }
}

impl Eq for Regex {}

impl fmt::Debug for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pattern)
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pattern)
    }
}
