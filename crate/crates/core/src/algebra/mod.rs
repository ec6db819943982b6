//! The schema algebra: operators, environments and documents.

mod text;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use indexmap::IndexMap;
use num_rational::BigRational;
use thiserror::Error;

use crate::json::{JsonType, JsonValue};
use crate::patterns::Regex;

pub use text::{parse_document, parse_schema, ParseError};

/// A numeric bound extended with both infinities.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtBound {
    NegInf,
    Fin(BigRational),
    PosInf,
}

impl ExtBound {
    pub fn int(n: i64) -> ExtBound {
        ExtBound::Fin(BigRational::from_integer(n.into()))
    }

    /// Compares the bound with a finite number.
    pub fn cmp_num(&self, q: &BigRational) -> Ordering {
        match self {
            ExtBound::NegInf => Ordering::Less,
            ExtBound::Fin(b) => b.cmp(q),
            ExtBound::PosInf => Ordering::Greater,
        }
    }
}

impl fmt::Display for ExtBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtBound::NegInf => f.write_str("-inf"),
            ExtBound::Fin(q) => f.write_str(&crate::json::format_rational(q)),
            ExtBound::PosInf => f.write_str("inf"),
        }
    }
}

/// Upper end of a cardinality interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Upper {
    Fin(u64),
    Inf,
}

impl Upper {
    pub fn admits(self, n: u64) -> bool {
        match self {
            Upper::Fin(j) => n <= j,
            Upper::Inf => true,
        }
    }
}

impl fmt::Display for Upper {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Upper::Fin(j) => write!(f, "{j}"),
            Upper::Inf => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schema {
    Type(Vec<JsonType>),
    Const(JsonValue),
    Enum(Vec<JsonValue>),
    Len(u64, Upper),
    Pattern(Regex),
    Betw(ExtBound, ExtBound),
    XBetw(ExtBound, ExtBound),
    MulOf(BigRational),
    NotMulOf(BigRational),
    Props(Vec<(Regex, Schema)>, Box<Schema>),
    Pro(u64, Upper),
    Req(Vec<String>),
    PNames(Box<Schema>),
    PattReq(Vec<(Regex, Schema)>),
    Items(Vec<Schema>, Box<Schema>),
    /// 1-based position.
    ItemAt(u64, Box<Schema>),
    ItemsAfter(u64, Box<Schema>),
    Ite(u64, Upper),
    Contains(Box<Schema>),
    ContAfter(u64, Box<Schema>),
    Cnt(u64, Upper, Box<Schema>),
    UniqueItems,
    RepeatedItems,
    Ref(String),
    True,
    False,
    Not(Box<Schema>),
    Or(Vec<Schema>),
    And(Vec<Schema>),
    Implies(Box<Schema>, Box<Schema>),
    IfThenElse(Box<Schema>, Box<Schema>, Box<Schema>),
    OneOf(Vec<Schema>),
    Group(Vec<Schema>),
}

impl Schema {
    /// `type(T)` with a deduplicated, sorted list.
    pub fn types(mut ts: Vec<JsonType>) -> Schema {
        ts.sort();
        ts.dedup();
        Schema::Type(ts)
    }

    pub fn ty(t: JsonType) -> Schema {
        Schema::Type(vec![t])
    }

    pub fn reference(name: impl Into<String>) -> Schema {
        Schema::Ref(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(s: Schema) -> Schema {
        Schema::Not(Box::new(s))
    }

    /// Conjunction with `t`/`f` absorption and flattening.
    pub fn conj(items: Vec<Schema>) -> Schema {
        let mut out: Vec<Schema> = Vec::new();
        for s in items {
            match s {
                Schema::True => {}
                Schema::False => return Schema::False,
                Schema::And(v) => {
                    for x in v {
                        if !out.contains(&x) {
                            out.push(x);
                        }
                    }
                }
                s => {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        match out.len() {
            0 => Schema::True,
            1 => out.pop().unwrap(),
            _ => Schema::And(out),
        }
    }

    /// Disjunction with `t`/`f` absorption and flattening.
    pub fn disj(items: Vec<Schema>) -> Schema {
        let mut out: Vec<Schema> = Vec::new();
        for s in items {
            match s {
                Schema::False => {}
                Schema::True => return Schema::True,
                Schema::Or(v) => {
                    for x in v {
                        if !out.contains(&x) {
                            out.push(x);
                        }
                    }
                }
                s => {
                    if !out.contains(&s) {
                        out.push(s);
                    }
                }
            }
        }
        match out.len() {
            0 => Schema::False,
            1 => out.pop().unwrap(),
            _ => Schema::Or(out),
        }
    }

    /// Operators whose sub-schemas are applied to proper parts of the
    /// instance; references below them are guarded.
    pub fn is_typed_operator(&self) -> bool {
        matches!(
            self,
            Schema::Props(..)
                | Schema::PNames(_)
                | Schema::PattReq(_)
                | Schema::Items(..)
                | Schema::ItemAt(..)
                | Schema::ItemsAfter(..)
                | Schema::Contains(_)
                | Schema::ContAfter(..)
                | Schema::Cnt(..)
        )
    }

    /// Operator name as written in the text format.
    pub fn operator_name(&self) -> &'static str {
        match self {
            Schema::Type(_) => "type",
            Schema::Const(_) => "const",
            Schema::Enum(_) => "enum",
            Schema::Len(..) => "len",
            Schema::Pattern(_) => "pattern",
            Schema::Betw(..) => "betw",
            Schema::XBetw(..) => "xBetw",
            Schema::MulOf(_) => "mulOf",
            Schema::NotMulOf(_) => "notMulOf",
            Schema::Props(..) => "props",
            Schema::Pro(..) => "pro",
            Schema::Req(_) => "req",
            Schema::PNames(_) => "pNames",
            Schema::PattReq(_) => "pattReq",
            Schema::Items(..) => "items",
            Schema::ItemAt(..) => "itemAt",
            Schema::ItemsAfter(..) => "itemsAfter",
            Schema::Ite(..) => "ite",
            Schema::Contains(_) => "contains",
            Schema::ContAfter(..) => "contAfter",
            Schema::Cnt(..) => "cnt",
            Schema::UniqueItems => "uniqueItems",
            Schema::RepeatedItems => "repeatedItems",
            Schema::Ref(_) => "ref",
            Schema::True => "t",
            Schema::False => "f",
            Schema::Not(_) => "not",
            Schema::Or(_) => "or",
            Schema::And(_) => "and",
            Schema::Implies(..) => "implies",
            Schema::IfThenElse(..) => "ifThenElse",
            Schema::OneOf(_) => "oneOf",
            Schema::Group(_) => "group",
        }
    }

    pub fn children(&self) -> Vec<&Schema> {
        match self {
            Schema::Props(pairs, add) => pairs.iter().map(|(_, s)| s).chain(std::iter::once(&**add)).collect(),
            Schema::PattReq(pairs) => pairs.iter().map(|(_, s)| s).collect(),
            Schema::Items(head, tail) => head.iter().chain(std::iter::once(&**tail)).collect(),
            Schema::PNames(s)
            | Schema::ItemAt(_, s)
            | Schema::ItemsAfter(_, s)
            | Schema::Contains(s)
            | Schema::ContAfter(_, s)
            | Schema::Cnt(_, _, s)
            | Schema::Not(s) => vec![s],
            Schema::Or(v) | Schema::And(v) | Schema::OneOf(v) | Schema::Group(v) => v.iter().collect(),
            Schema::Implies(a, b) => vec![a, b],
            Schema::IfThenElse(a, b, c) => vec![a, b, c],
            _ => Vec::new(),
        }
    }

    /// Rebuilds the node with every direct sub-schema replaced by `f` of it.
    pub fn map_children(&self, f: &mut dyn FnMut(&Schema) -> Schema) -> Schema {
        let b = |s: &Schema, f: &mut dyn FnMut(&Schema) -> Schema| Box::new(f(s));
        match self {
            Schema::Props(pairs, add) => {
                Schema::Props(pairs.iter().map(|(r, s)| (r.clone(), f(s))).collect(), b(add, f))
            }
            Schema::PattReq(pairs) => Schema::PattReq(pairs.iter().map(|(r, s)| (r.clone(), f(s))).collect()),
            Schema::Items(head, tail) => Schema::Items(head.iter().map(&mut *f).collect(), b(tail, f)),
            Schema::PNames(s) => Schema::PNames(b(s, f)),
            Schema::ItemAt(i, s) => Schema::ItemAt(*i, b(s, f)),
            Schema::ItemsAfter(i, s) => Schema::ItemsAfter(*i, b(s, f)),
            Schema::Contains(s) => Schema::Contains(b(s, f)),
            Schema::ContAfter(i, s) => Schema::ContAfter(*i, b(s, f)),
            Schema::Cnt(l, j, s) => Schema::Cnt(*l, *j, b(s, f)),
            Schema::Not(s) => Schema::Not(b(s, f)),
            Schema::Or(v) => Schema::Or(v.iter().map(&mut *f).collect()),
            Schema::And(v) => Schema::And(v.iter().map(&mut *f).collect()),
            Schema::OneOf(v) => Schema::OneOf(v.iter().map(&mut *f).collect()),
            Schema::Group(v) => Schema::Group(v.iter().map(&mut *f).collect()),
            Schema::Implies(a, c) => Schema::Implies(b(a, f), b(c, f)),
            Schema::IfThenElse(a, c, d) => Schema::IfThenElse(b(a, f), b(c, f), b(d, f)),
            other => other.clone(),
        }
    }

    /// Visits every node, parents before children.
    pub fn walk(&self, f: &mut dyn FnMut(&Schema)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }
}

pub type Env = IndexMap<String, Schema>;

/// A root schema with its definitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub root: Schema,
    pub env: Env,
}

impl Document {
    pub fn new(root: Schema, env: Env) -> Document {
        Document { root, env }
    }

    pub fn from_schema(root: Schema) -> Document {
        Document { root, env: Env::new() }
    }

    pub fn lookup(&self, x: &str) -> Option<&Schema> {
        self.env.get(x)
    }

    /// Closing and guarded.
    pub fn check(&self) -> Result<(), AlgebraError> {
        check_guarded(self)
    }

    /// Same definitions, different root.
    pub fn with_root(&self, root: Schema) -> Document {
        Document {
            root,
            env: self.env.clone(),
        }
    }

    /// A name not yet used in the environment, starting from `base`.
    pub fn fresh_name(&self, base: &str) -> String {
        fresh_name(&self.env, base)
    }
}

pub fn fresh_name(env: &Env, base: &str) -> String {
    if !env.contains_key(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}_{i}"))
        .find(|n| !env.contains_key(n))
        .unwrap()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("variable {0} is used but not defined")]
    NotClosing(String),
    #[error("unguarded recursion: {}", .0.join(" -> "))]
    Unguarded(Vec<String>),
}

pub fn free_vars(s: &Schema) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    s.walk(&mut |n| {
        if let Schema::Ref(x) = n {
            out.insert(x.clone());
        }
    });
    out
}

/// References reachable from `s` without crossing a typed operator.
pub fn unguarded_refs(s: &Schema) -> Vec<String> {
    fn go(s: &Schema, out: &mut Vec<String>) {
        if let Schema::Ref(x) = s {
            if !out.contains(x) {
                out.push(x.clone());
            }
            return;
        }
        if s.is_typed_operator() {
            return;
        }
        for c in s.children() {
            go(c, out);
        }
    }
    let mut out = Vec::new();
    go(s, &mut out);
    out
}

pub fn check_closing(d: &Document) -> Result<(), AlgebraError> {
    for s in std::iter::once(&d.root).chain(d.env.values()) {
        for x in free_vars(s) {
            if !d.env.contains_key(&x) {
                return Err(AlgebraError::NotClosing(x));
            }
        }
    }
    Ok(())
}

/// Rejects documents where a variable depends on itself through a chain
/// of unguarded occurrences; the error carries the cycle.
pub fn check_guarded(d: &Document) -> Result<(), AlgebraError> {
    check_closing(d)?;
    let deps: HashMap<&str, Vec<String>> = d.env.iter().map(|(x, s)| (x.as_str(), unguarded_refs(s))).collect();
    // 0 = new, 1 = on the current path, 2 = finished
    let mut color: HashMap<&str, u8> = HashMap::new();
    for start in d.env.keys() {
        if color.get(start.as_str()).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut path: Vec<&str> = vec![start];
        let mut iters: Vec<usize> = vec![0];
        color.insert(start, 1);
        while let Some(&x) = path.last() {
            let k = iters.last_mut().unwrap();
            let ds = &deps[x];
            if *k < ds.len() {
                let y = ds[*k].as_str();
                *k += 1;
                match color.get(y).copied().unwrap_or(0) {
                    1 => {
                        let from = path.iter().position(|&p| p == y).unwrap();
                        let mut cycle: Vec<String> = path[from..].iter().map(|s| s.to_string()).collect();
                        cycle.push(y.to_string());
                        return Err(AlgebraError::Unguarded(cycle));
                    }
                    0 => {
                        let key = d.env.get_key_value(y).unwrap().0.as_str();
                        color.insert(key, 1);
                        path.push(key);
                        iters.push(0);
                    }
                    _ => {}
                }
            } else {
                color.insert(x, 2);
                path.pop();
                iters.pop();
            }
        }
    }
    Ok(())
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// Weighted node count. Positional array operators pay for the bits of
/// their index; patterns pay for their text.
pub fn size(s: &Schema) -> u64 {
    let pattern_len = |r: &Regex| r.to_string().chars().count() as u64;
    match s {
        Schema::ItemAt(i, t) | Schema::ItemsAfter(i, t) | Schema::ContAfter(i, t) => 1 + ceil_log2(i + 1) + size(t),
        Schema::Pattern(r) => 1 + pattern_len(r),
        Schema::Props(pairs, add) => 1 + pairs.iter().map(|(r, t)| pattern_len(r) + size(t)).sum::<u64>() + size(add),
        Schema::PattReq(pairs) => 1 + pairs.iter().map(|(r, t)| pattern_len(r) + size(t)).sum::<u64>(),
        s => 1 + s.children().into_iter().map(size).sum::<u64>(),
    }
}

pub fn document_size(d: &Document) -> u64 {
    size(&d.root) + d.env.values().map(|s| 1 + size(s)).sum::<u64>()
}

/// Rewrites `implies`, `ifThenElse`, `oneOf`, `group` and `enum` into
/// `¬`, `∧`, `∨` and `const`, following their semantic definitions.
pub fn expand_derived(s: &Schema) -> Schema {
    let s = s.map_children(&mut expand_derived);
    match s {
        Schema::Implies(a, b) => Schema::Or(vec![Schema::Not(a), *b]),
        Schema::IfThenElse(a, b, c) => Schema::Or(vec![
            Schema::And(vec![(*a).clone(), *b]),
            Schema::And(vec![Schema::Not(a), *c]),
        ]),
        Schema::OneOf(v) => one_of_naive(v),
        Schema::Group(v) => Schema::And(v),
        Schema::Enum(vs) => Schema::Or(vs.into_iter().map(Schema::Const).collect()),
        s => s,
    }
}

/// `⊕(S1..Sn)` as the disjunction of the n ways exactly one holds.
pub fn one_of_naive(mut v: Vec<Schema>) -> Schema {
    match v.len() {
        0 => Schema::False,
        1 => v.pop().unwrap(),
        n => Schema::Or(
            (0..n)
                .map(|l| {
                    Schema::And(
                        (0..n)
                            .map(|m| {
                                if m == l {
                                    v[m].clone()
                                } else {
                                    Schema::not(v[m].clone())
                                }
                            })
                            .collect(),
                    )
                })
                .collect(),
        ),
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::schema_to_string(self))
    }
}

impl fmt::Display for Document {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::document_to_string(self))
    }
}
