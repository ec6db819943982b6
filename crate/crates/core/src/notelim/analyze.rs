//! Which negated operators of a document have a negation-free expression
//! within the original dialect (no `pattReq`, `contAfter`, `notMulOf`,
//! `repeatedItems`).

use std::collections::HashSet;
use std::fmt;

use super::encodings::ItemsCase;
use crate::algebra::{check_guarded, AlgebraError, Document, Schema, Upper};
use crate::json::JsonValue;
use crate::patterns::{patt_of_schema, CompiledDfa, Regex};
use crate::semantics::{InstanceGenerator, Validator};

/// The result the classification rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegativeRule {
    /// Two infinite name classes, one admitting a value and one rejecting one.
    PropsTheorem,
    /// `¬props(; S)` with a non-trivial `S`.
    PropsAdditional,
    /// `¬pNames(S)` where both the allowed and the forbidden names are infinite.
    PNames,
    /// A head schema admits a value the tail schema rejects.
    ItemsTheorem,
    MulOf,
    UniqueItems,
    /// `¬cnt` with a finite upper bound or a lower bound above one.
    CountBounds,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Classification {
    /// `props` over key patterns with additional `t`.
    KeysTop,
    /// `props` over key patterns with additional `f`, or a `pNames` with a
    /// finite name language.
    KeysClosed,
    ItemsCommon(ItemsCase),
    InherentlyNegative(NegativeRule),
    /// Neither a syntactic case nor a witness for the theorem was found.
    Unknown(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    /// `root` or the name of the definition holding the node.
    pub location: String,
    pub node: String,
    pub classification: Classification,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExpressibilityReport {
    pub findings: Vec<Finding>,
}

impl ExpressibilityReport {
    pub fn inherently_negative(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| matches!(f.classification, Classification::InherentlyNegative(_)))
    }

    pub fn unknown(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| matches!(f.classification, Classification::Unknown(_)))
    }

    /// True when every negated operator has a known negation-free form.
    pub fn fully_expressible(&self) -> bool {
        self.inherently_negative().next().is_none() && self.unknown().next().is_none()
    }
}

impl fmt::Display for ExpressibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.findings {
            writeln!(f, "{}\t{:?}\t{}", x.location, x.classification, x.node)?;
        }
        Ok(())
    }
}

const SAMPLES: usize = 300;
const MAX_REGION_PATTERNS: usize = 10;

/// Walks the document tracking polarity and classifies every typed operator
/// reached under an odd number of negations. Witnesses for the theorems are
/// searched with a generator seeded by `seed`.
pub fn analyze_expressibility(d: &Document, seed: u64) -> Result<ExpressibilityReport, AlgebraError> {
    check_guarded(d)?;
    let validator = Validator::new(d)?;
    let mut a = Analyzer {
        doc: d,
        validator,
        seed,
        visited: HashSet::new(),
        reported: HashSet::new(),
        report: ExpressibilityReport::default(),
        pool: None,
    };
    a.walk(&d.root, false, "root");
    Ok(a.report)
}

struct Analyzer<'d> {
    doc: &'d Document,
    validator: Validator<'d>,
    seed: u64,
    visited: HashSet<(String, bool)>,
    reported: HashSet<(String, String)>,
    report: ExpressibilityReport,
    pool: Option<Vec<JsonValue>>,
}

fn short(s: &Schema) -> String {
    let text = s.to_string();
    match text.char_indices().nth(80) {
        Some((i, _)) => format!("{}…", &text[..i]),
        None => text,
    }
}

impl Analyzer<'_> {
    fn walk(&mut self, s: &Schema, neg: bool, loc: &str) {
        match s {
            Schema::Not(t) => self.walk(t, !neg, loc),
            Schema::Implies(a, c) => {
                self.walk(a, !neg, loc);
                self.walk(c, neg, loc);
            }
            Schema::IfThenElse(a, c, e) => {
                self.walk(a, neg, loc);
                self.walk(a, !neg, loc);
                self.walk(c, neg, loc);
                self.walk(e, neg, loc);
            }
            Schema::OneOf(v) => {
                for t in v {
                    self.walk(t, neg, loc);
                    self.walk(t, !neg, loc);
                }
            }
            Schema::Ref(x) => {
                if self.visited.insert((x.clone(), neg)) {
                    if let Some(body) = self.doc.env.get(x) {
                        self.walk(body, neg, x);
                    }
                }
            }
            Schema::Cnt(_, _, t) => {
                if neg {
                    self.classify(s, loc);
                }
                self.walk(t, neg, loc);
                self.walk(t, !neg, loc);
            }
            Schema::PNames(_) => {
                if neg {
                    self.classify(s, loc);
                }
            }
            s => {
                if neg {
                    self.classify(s, loc);
                }
                for c in s.children() {
                    self.walk(c, neg, loc);
                }
            }
        }
    }

    fn push(&mut self, loc: &str, s: &Schema, c: Classification) {
        let node = short(s);
        if self.reported.insert((loc.to_string(), node.clone())) {
            self.report.findings.push(Finding {
                location: loc.to_string(),
                node,
                classification: c,
            });
        }
    }

    fn classify(&mut self, s: &Schema, loc: &str) {
        let c = match s {
            Schema::MulOf(_) => Classification::InherentlyNegative(NegativeRule::MulOf),
            Schema::UniqueItems => Classification::InherentlyNegative(NegativeRule::UniqueItems),
            Schema::Cnt(l, j, _) if *l > 1 || *j != Upper::Inf => {
                Classification::InherentlyNegative(NegativeRule::CountBounds)
            }
            Schema::Props(pairs, add) => self.props(pairs, add),
            Schema::PNames(t) => self.pnames(t),
            Schema::Items(head, tail) => self.items(head, tail),
            _ => return,
        };
        self.push(loc, s, c);
    }

    fn samples(&mut self) -> &[JsonValue] {
        if self.pool.is_none() {
            let mut gen = InstanceGenerator::for_documents(&[self.doc], self.seed);
            let mut pool = gen.seeds();
            pool.extend((0..SAMPLES).map(|_| gen.next_value()));
            self.pool = Some(pool);
        }
        self.pool.as_deref().unwrap()
    }

    fn accepts_some(&mut self, s: &Schema) -> bool {
        match s {
            Schema::True => true,
            Schema::False => false,
            s => {
                self.samples();
                let pool = self.pool.as_deref().unwrap();
                pool.iter().any(|j| self.validator.is_valid_schema(s, j))
            }
        }
    }

    fn rejects_some(&mut self, s: &Schema) -> bool {
        match s {
            Schema::True => false,
            Schema::False => true,
            s => {
                self.samples();
                let pool = self.pool.as_deref().unwrap();
                pool.iter().any(|j| !self.validator.is_valid_schema(s, j))
            }
        }
    }

    fn props(&mut self, pairs: &[(Regex, Schema)], add: &Schema) -> Classification {
        let keys = pairs.iter().all(|(r, _)| r.as_keykey().is_some());
        if keys && *add == Schema::True {
            return Classification::KeysTop;
        }
        if keys && *add == Schema::False {
            return Classification::KeysClosed;
        }
        if pairs.len() > MAX_REGION_PATTERNS {
            return Classification::Unknown(format!("more than {MAX_REGION_PATTERNS} patterns"));
        }
        let regions = infinite_regions(pairs, add);
        let positive = regions.iter().any(|r| self.accepts_some(r));
        let negative = regions.iter().any(|r| self.rejects_some(r));
        if positive && negative {
            let rule = if pairs.is_empty() {
                NegativeRule::PropsAdditional
            } else {
                NegativeRule::PropsTheorem
            };
            Classification::InherentlyNegative(rule)
        } else {
            Classification::Unknown("no witness pair in the infinite name classes".into())
        }
    }

    fn pnames(&mut self, t: &Schema) -> Classification {
        let allowed = match patt_of_schema(t, &self.doc.env).map(Regex::new) {
            Ok(Ok(r)) => r,
            _ => return Classification::Unknown("name language not computable".into()),
        };
        if allowed.dfa().is_finite() {
            Classification::KeysClosed
        } else if allowed.dfa().complement().is_finite() {
            Classification::KeysTop
        } else {
            Classification::InherentlyNegative(NegativeRule::PNames)
        }
    }

    fn items(&mut self, head: &[Schema], tail: &Schema) -> Classification {
        if let Some(case) = ItemsCase::detect(head, tail) {
            return Classification::ItemsCommon(case);
        }
        let all_nonempty = head.iter().chain(std::iter::once(tail)).all(|s| self.accepts_some(s));
        let split = head.iter().any(|s| {
            let both = Schema::conj(vec![s.clone(), Schema::not(tail.clone())]);
            self.accepts_some(&both)
        });
        if all_nonempty && split {
            Classification::InherentlyNegative(NegativeRule::ItemsTheorem)
        } else {
            Classification::Unknown("no witness for a head value outside the tail".into())
        }
    }
}

/// The schemas attached to the infinite classes of names that match the
/// same subset of patterns.
fn infinite_regions(pairs: &[(Regex, Schema)], add: &Schema) -> Vec<Schema> {
    let mut out = Vec::new();
    let mut stack: Vec<(usize, CompiledDfa, Vec<Schema>)> = vec![(0, CompiledDfa::universal(), Vec::new())];
    while let Some((i, dfa, matched)) = stack.pop() {
        if dfa.is_empty() || dfa.is_finite() {
            continue;
        }
        if i == pairs.len() {
            out.push(if matched.is_empty() {
                add.clone()
            } else {
                Schema::conj(matched)
            });
            continue;
        }
        let (r, s) = &pairs[i];
        let mut with = matched.clone();
        with.push(s.clone());
        stack.push((i + 1, dfa.intersect(r.dfa()), with));
        stack.push((i + 1, dfa.intersect(&r.dfa().complement()), matched));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_document;

    fn classes(src: &str) -> Vec<Classification> {
        let d = parse_document(src).unwrap();
        analyze_expressibility(&d, 1)
            .unwrap()
            .findings
            .into_iter()
            .map(|f| f.classification)
            .collect()
    }

    #[test]
    fn props_cases() {
        assert_eq!(classes("¬props(\"^a$\": type(Num); t)"), vec![Classification::KeysTop]);
        assert_eq!(
            classes("¬props(\"^a$\": type(Num); f)"),
            vec![Classification::KeysClosed]
        );
        assert_eq!(
            classes("¬props(\"^x\": type(Num); t)"),
            vec![Classification::InherentlyNegative(NegativeRule::PropsTheorem)]
        );
        assert_eq!(
            classes("¬props(; type(Num))"),
            vec![Classification::InherentlyNegative(NegativeRule::PropsAdditional)]
        );
        assert!(classes("props(\"^x\": type(Num); t)").is_empty());
    }

    #[test]
    fn other_operators() {
        assert_eq!(
            classes("¬mulOf(2)"),
            vec![Classification::InherentlyNegative(NegativeRule::MulOf)]
        );
        assert_eq!(classes("¬pNames(len(0, 3))"), vec![Classification::KeysClosed]);
        assert_eq!(
            classes("¬pNames(pattern(\"^x\"))"),
            vec![Classification::InherentlyNegative(NegativeRule::PNames)]
        );
        assert_eq!(
            classes("¬items(type(Num); f)"),
            vec![Classification::ItemsCommon(ItemsCase::ClosedTail)]
        );
        assert_eq!(
            classes("¬items(type(Num); type(Str))"),
            vec![Classification::InherentlyNegative(NegativeRule::ItemsTheorem)]
        );
        assert_eq!(
            classes("x defs(x: ¬props(\"^a$\": y; t), y: uniqueItems)"),
            vec![
                Classification::KeysTop,
                Classification::InherentlyNegative(NegativeRule::UniqueItems)
            ]
        );
        assert_eq!(
            classes("x defs(x: props(\"^a$\": ¬y; t), y: uniqueItems)"),
            vec![Classification::InherentlyNegative(NegativeRule::UniqueItems)]
        );
    }
}
