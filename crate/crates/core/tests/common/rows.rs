//! The not-pushing table, one entry per operator: `¬LHS` next to the
//! right-hand side written out by hand in the text syntax.

use jsnot::algebra::{parse_document, Document};

pub const TYPES: [&str; 6] = ["Null", "Bool", "Num", "Str", "Arr", "Obj"];

pub const SUBSCHEMAS: [&str; 15] = [
    "type(Str)",
    "len(1, 3)",
    "const(1)",
    "betw(0, 5)",
    "type(Null, Num)",
    r#"props("^a$": type(Num); t)"#,
    "items(type(Str); t)",
    "t",
    "f",
    r#"pattern("^a")"#,
    r#"req("a")"#,
    "uniqueItems",
    "mulOf(2)",
    r#"enum(1, "a", null, [1, 1])"#,
    "contains(const(true))",
];

pub const PATTERNS: [&str; 7] = [
    r#""^a""#,
    r#""b$""#,
    r#""^[0-9]+$""#,
    r#""^(ab)*$""#,
    r#""x""#,
    r#""^$""#,
    r#""^.{2}$""#,
];

pub const RATIONALS: [&str; 5] = ["1", "2", "0.5", "3", "0.25"];

const BOUNDS: [&str; 7] = ["-inf", "-2", "0", "0.5", "1", "3", "inf"];

/// Free parameters of a row instance; every field is reduced modulo the
/// size of whatever it indexes.
#[derive(Debug, Clone, Copy)]
pub struct RowParams {
    pub a: u64,
    pub b: u64,
    pub s1: usize,
    pub s2: usize,
    pub pat: usize,
    pub q: usize,
    pub ty: usize,
}

pub struct Row {
    pub name: &'static str,
    /// `(¬LHS, RHS)` as document sources.
    pub build: fn(&RowParams) -> (String, String),
}

fn s1(p: &RowParams) -> &'static str {
    SUBSCHEMAS[p.s1 % SUBSCHEMAS.len()]
}

fn s2(p: &RowParams) -> &'static str {
    SUBSCHEMAS[p.s2 % SUBSCHEMAS.len()]
}

fn pat(p: &RowParams) -> &'static str {
    PATTERNS[p.pat % PATTERNS.len()]
}

fn q(p: &RowParams) -> &'static str {
    RATIONALS[p.q % RATIONALS.len()]
}

/// `i ∈ 0..4` and `j ∈ i..i+3` or unbounded.
fn interval(p: &RowParams) -> (u64, Option<u64>) {
    let i = p.a % 4;
    let j = if p.b % 4 == 3 { None } else { Some(i + p.b % 4) };
    (i, j)
}

fn fmt_upper(j: Option<u64>) -> String {
    j.map_or("inf".into(), |j| j.to_string())
}

fn disj(parts: Vec<String>) -> String {
    match parts.len() {
        0 => "f".into(),
        1 => parts.into_iter().next().unwrap(),
        _ => format!("({})", parts.join(" ∨ ")),
    }
}

fn other_types(keep: &str) -> Vec<String> {
    TYPES
        .iter()
        .filter(|t| **t != keep)
        .map(|t| format!("type({t})"))
        .collect()
}

/// `¬op(i, j)` against `type(T) ∧ (op(0, i-1) ∨ op(j+1, inf))` without the
/// illegal halves.
fn cardinality(op: &str, ty: &str, p: &RowParams) -> (String, String) {
    let (i, j) = interval(p);
    let mut parts = Vec::new();
    if i > 0 {
        parts.push(format!("{op}(0, {})", i - 1));
    }
    if let Some(j) = j {
        parts.push(format!("{op}({}, inf)", j + 1));
    }
    (
        format!("¬{op}({i}, {})", fmt_upper(j)),
        format!("(type({ty}) ∧ {})", disj(parts)),
    )
}

fn numeric(op: &str, dual: &str, p: &RowParams) -> (String, String) {
    let m = BOUNDS[p.a as usize % BOUNDS.len()];
    let n = BOUNDS[(p.a as usize + p.b as usize % 4) % BOUNDS.len()];
    let mut parts = Vec::new();
    if m != "-inf" {
        parts.push(format!("{dual}(-inf, {m})"));
    }
    if n != "inf" {
        parts.push(format!("{dual}({n}, inf)"));
    }
    (format!("¬{op}({m}, {n})"), format!("(type(Num) ∧ {})", disj(parts)))
}

fn position(p: &RowParams) -> u64 {
    p.a % 4
}

pub const ROWS: &[Row] = &[
    Row {
        name: "true",
        build: |_| ("¬t".into(), "f".into()),
    },
    Row {
        name: "false",
        build: |_| ("¬f".into(), "t".into()),
    },
    Row {
        name: "and",
        build: |p| {
            (
                format!("¬({} ∧ {})", s1(p), s2(p)),
                format!("(¬{} ∨ ¬{})", s1(p), s2(p)),
            )
        },
    },
    Row {
        name: "or",
        build: |p| {
            (
                format!("¬({} ∨ {})", s1(p), s2(p)),
                format!("(¬{} ∧ ¬{})", s1(p), s2(p)),
            )
        },
    },
    Row {
        name: "not",
        build: |p| (format!("¬¬{}", s1(p)), s1(p).to_string()),
    },
    Row {
        name: "type",
        build: |p| {
            let t = TYPES[p.ty % TYPES.len()];
            (format!("¬type({t})"), disj(other_types(t)))
        },
    },
    Row {
        name: "const_true",
        build: |_| {
            let mut parts = other_types("Bool");
            parts.push("const(false)".into());
            ("¬const(true)".into(), disj(parts))
        },
    },
    Row {
        name: "const_false",
        build: |_| {
            let mut parts = other_types("Bool");
            parts.push("const(true)".into());
            ("¬const(false)".into(), disj(parts))
        },
    },
    Row {
        name: "len",
        build: |p| cardinality("len", "Str", p),
    },
    Row {
        name: "pattern",
        build: |p| {
            (
                format!("¬pattern({})", pat(p)),
                format!("(type(Str) ∧ pattern(Not•({})))", pat(p)),
            )
        },
    },
    Row {
        name: "betw",
        build: |p| numeric("betw", "xBetw", p),
    },
    Row {
        name: "xBetw",
        build: |p| numeric("xBetw", "betw", p),
    },
    Row {
        name: "mulOf",
        build: |p| (format!("¬mulOf({})", q(p)), format!("(type(Num) ∧ notMulOf({}))", q(p))),
    },
    Row {
        name: "notMulOf",
        build: |p| (format!("¬notMulOf({})", q(p)), format!("(type(Num) ∧ mulOf({}))", q(p))),
    },
    Row {
        name: "ite",
        build: |p| cardinality("ite", "Arr", p),
    },
    Row {
        name: "uniqueItems",
        build: |_| ("¬uniqueItems".into(), "(type(Arr) ∧ repeatedItems)".into()),
    },
    Row {
        name: "repeatedItems",
        build: |_| ("¬repeatedItems".into(), "(type(Arr) ∧ uniqueItems)".into()),
    },
    Row {
        name: "itemAt",
        build: |p| {
            let i = position(p) + 1;
            (
                format!("¬itemAt({i}, {})", s1(p)),
                format!("(type(Arr) ∧ itemAt({i}, ¬{}) ∧ ite({i}, inf))", s1(p)),
            )
        },
    },
    Row {
        name: "itemsAfter",
        build: |p| {
            let n = position(p);
            (
                format!("¬itemsAfter({n}, {})", s1(p)),
                format!("(type(Arr) ∧ contAfter({n}, ¬{}))", s1(p)),
            )
        },
    },
    Row {
        name: "contAfter",
        build: |p| {
            let n = position(p);
            (
                format!("¬contAfter({n}, {})", s1(p)),
                format!("(type(Arr) ∧ itemsAfter({n}, ¬{}))", s1(p)),
            )
        },
    },
    Row {
        name: "pro",
        build: |p| cardinality("pro", "Obj", p),
    },
    Row {
        name: "props",
        build: |p| {
            (
                format!("¬props({}: {}; t)", pat(p), s1(p)),
                format!("(type(Obj) ∧ pattReq({}: ¬{}))", pat(p), s1(p)),
            )
        },
    },
    Row {
        name: "pattReq",
        build: |p| {
            (
                format!("¬pattReq({}: {})", pat(p), s1(p)),
                format!("(type(Obj) ∧ props({}: ¬{}; t))", pat(p), s1(p)),
            )
        },
    },
    Row {
        name: "ref",
        build: |p| {
            let body = format!("({} ∨ props({}: x; t))", s1(p), pat(p));
            let defs = format!("defs(x: {body}, not_x: ¬{body})");
            (format!("¬x {defs}"), format!("not_x {defs}"))
        },
    },
];

pub fn build(row: &Row, p: &RowParams) -> (Document, Document) {
    let (l, r) = (row.build)(p);
    let parse = |s: &str| parse_document(s).unwrap_or_else(|e| panic!("row {}: {s}: {e}", row.name));
    (parse(&l), parse(&r))
}
