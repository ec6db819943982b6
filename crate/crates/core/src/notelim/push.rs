//! Not-completion, not-pushing and pruning.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::simplify::{const_elim, other_types, residual_names};
use super::NotElimError;
use crate::algebra::{free_vars, Document, Env, ExtBound, Schema, Upper};
use crate::json::{JsonType, JsonValue};
use crate::patterns::Regex;

/// Maps every variable `x` to its dual `not_x` and back.
pub type DualMap = BTreeMap<String, String>;

/// Adds `not_x: ¬S` for every `x: S`. Names clashing with existing
/// variables get a numeric suffix.
pub fn not_complete(d: &Document) -> (Document, DualMap) {
    let mut env = d.env.clone();
    let mut duals = DualMap::new();
    for (x, body) in &d.env {
        let mut name = format!("not_{x}");
        let mut k = 1;
        while env.contains_key(&name) {
            k += 1;
            name = format!("not_{x}_{k}");
        }
        env.insert(name.clone(), Schema::not(body.clone()));
        duals.insert(x.clone(), name.clone());
        duals.insert(name, x.clone());
    }
    (Document::new(d.root.clone(), env), duals)
}

/// Rewrites every negation away, replacing `¬x` by the dual of `x`.
/// The input should be simplified and not-completed.
pub fn push_not(d: &Document, duals: &DualMap) -> Result<Document, NotElimError> {
    let p = Pusher { duals, env: &d.env };
    let root = p.pos(&d.root)?;
    let mut env = Env::new();
    for (x, body) in &d.env {
        env.insert(x.clone(), p.pos(body)?);
    }
    Ok(Document::new(root, env))
}

struct Pusher<'a> {
    duals: &'a DualMap,
    env: &'a Env,
}

/// Folds operators whose argument makes them trivially `t` or `f`.
fn fold(s: Schema) -> Schema {
    match &s {
        Schema::Contains(t) | Schema::ContAfter(_, t) if **t == Schema::False => Schema::False,
        Schema::Cnt(l, _, t) if *l > 0 && **t == Schema::False => Schema::False,
        Schema::ItemAt(_, t) | Schema::ItemsAfter(_, t) if **t == Schema::True => Schema::True,
        Schema::Props(pairs, add) if **add == Schema::True && pairs.iter().all(|(_, t)| *t == Schema::True) => {
            Schema::True
        }
        Schema::PattReq(pairs) if pairs.iter().any(|(r, t)| *t == Schema::False || r.dfa().is_empty()) => Schema::False,
        Schema::And(v) => Schema::conj(v.iter().cloned().map(fold).collect()),
        _ => s,
    }
}

fn guard(t: JsonType, rest: Vec<Schema>) -> Schema {
    let alt = Schema::disj(rest.into_iter().map(fold).collect());
    if alt == Schema::False {
        Schema::False
    } else {
        Schema::conj(vec![Schema::ty(t), alt])
    }
}

fn before(l: u64) -> Option<Upper> {
    l.checked_sub(1).map(Upper::Fin)
}

/// The complement of `[l, j]` within the naturals, as at most two intervals.
fn count_complement(l: u64, j: Upper) -> Vec<(u64, Upper)> {
    let mut out = Vec::new();
    if let Some(u) = before(l) {
        out.push((0, u));
    }
    if let Upper::Fin(j) = j {
        out.push((j + 1, Upper::Inf));
    }
    out
}

impl Pusher<'_> {
    fn all_pos(&self, v: &[Schema]) -> Result<Vec<Schema>, NotElimError> {
        v.iter().map(|s| self.pos(s)).collect()
    }

    fn all_neg(&self, v: &[Schema]) -> Result<Vec<Schema>, NotElimError> {
        v.iter().map(|s| self.neg(s)).collect()
    }

    /// `s` with negations pushed down.
    fn pos(&self, s: &Schema) -> Result<Schema, NotElimError> {
        Ok(match s {
            Schema::Not(t) => self.neg(t)?,
            Schema::And(v) | Schema::Group(v) => Schema::conj(self.all_pos(v)?),
            Schema::Or(v) => Schema::disj(self.all_pos(v)?),
            Schema::Implies(a, c) => Schema::disj(vec![self.neg(a)?, self.pos(c)?]),
            Schema::IfThenElse(a, c, e) => Schema::disj(vec![
                Schema::conj(vec![self.pos(a)?, self.pos(c)?]),
                Schema::conj(vec![self.neg(a)?, self.pos(e)?]),
            ]),
            Schema::OneOf(v) => self.pos(&crate::algebra::one_of_naive(v.clone()))?,
            Schema::Props(pairs, add) => {
                let mut out = Vec::new();
                for (r, t) in pairs {
                    out.push((r.clone(), self.pos(t)?));
                }
                Schema::Props(out, Box::new(self.pos(add)?))
            }
            Schema::PattReq(pairs) => {
                let mut out = Vec::new();
                for (r, t) in pairs {
                    out.push((r.clone(), self.pos(t)?));
                }
                Schema::PattReq(out)
            }
            Schema::PNames(t) => Schema::PNames(Box::new(self.pos(t)?)),
            Schema::Items(h, t) => Schema::Items(self.all_pos(h)?, Box::new(self.pos(t)?)),
            Schema::ItemAt(i, t) => Schema::ItemAt(*i, Box::new(self.pos(t)?)),
            Schema::ItemsAfter(i, t) => Schema::ItemsAfter(*i, Box::new(self.pos(t)?)),
            Schema::Contains(t) => Schema::Contains(Box::new(self.pos(t)?)),
            Schema::ContAfter(i, t) => Schema::ContAfter(*i, Box::new(self.pos(t)?)),
            Schema::Cnt(l, j, t) => Schema::Cnt(*l, *j, Box::new(self.pos(t)?)),
            other => other.clone(),
        })
    }

    /// A negation-free schema equivalent to `¬s`.
    fn neg(&self, s: &Schema) -> Result<Schema, NotElimError> {
        let b = Box::new;
        Ok(match s {
            Schema::True => Schema::False,
            Schema::False => Schema::True,
            Schema::Not(t) => self.pos(t)?,
            Schema::And(v) | Schema::Group(v) => Schema::disj(self.all_neg(v)?),
            Schema::Or(v) => Schema::conj(self.all_neg(v)?),
            Schema::Implies(a, c) => Schema::conj(vec![self.pos(a)?, self.neg(c)?]),
            Schema::IfThenElse(a, c, e) => Schema::disj(vec![
                Schema::conj(vec![self.pos(a)?, self.neg(c)?]),
                Schema::conj(vec![self.neg(a)?, self.neg(e)?]),
            ]),
            Schema::OneOf(v) => self.neg(&crate::algebra::one_of_naive(v.clone()))?,
            Schema::Ref(x) => match self.duals.get(x) {
                Some(y) => Schema::Ref(y.clone()),
                None => return Err(crate::algebra::AlgebraError::NotClosing(x.clone()).into()),
            },
            Schema::Type(ts) => Schema::disj(
                JsonType::ALL
                    .iter()
                    .filter(|t| !ts.contains(t))
                    .map(|&t| Schema::ty(t))
                    .collect(),
            ),
            Schema::Const(JsonValue::Bool(v)) => {
                Schema::disj(vec![other_types(JsonType::Bool), Schema::Const(JsonValue::Bool(!v))])
            }
            Schema::Const(v) => self.neg(&const_elim(v))?,
            Schema::Enum(vs) => Schema::conj(
                vs.iter()
                    .map(|v| self.neg(&Schema::Const(v.clone())))
                    .collect::<Result<_, _>>()?,
            ),
            Schema::Len(l, j) => guard(
                JsonType::Str,
                count_complement(*l, *j)
                    .into_iter()
                    .map(|(l, j)| Schema::Len(l, j))
                    .collect(),
            ),
            Schema::Pro(l, j) => guard(
                JsonType::Obj,
                count_complement(*l, *j)
                    .into_iter()
                    .map(|(l, j)| Schema::Pro(l, j))
                    .collect(),
            ),
            Schema::Ite(l, j) => guard(
                JsonType::Arr,
                count_complement(*l, *j)
                    .into_iter()
                    .map(|(l, j)| Schema::Ite(l, j))
                    .collect(),
            ),
            Schema::Cnt(l, j, t) => {
                let t = self.pos(t)?;
                guard(
                    JsonType::Arr,
                    count_complement(*l, *j)
                        .into_iter()
                        .map(|(l, j)| Schema::Cnt(l, j, b(t.clone())))
                        .collect(),
                )
            }
            Schema::Pattern(r) => Schema::conj(vec![Schema::ty(JsonType::Str), Schema::Pattern(r.complement())]),
            Schema::Betw(m, n) => {
                let mut alt = Vec::new();
                if *m != ExtBound::NegInf {
                    alt.push(Schema::XBetw(ExtBound::NegInf, m.clone()));
                }
                if *n != ExtBound::PosInf {
                    alt.push(Schema::XBetw(n.clone(), ExtBound::PosInf));
                }
                guard(JsonType::Num, alt)
            }
            Schema::XBetw(m, n) => {
                let mut alt = Vec::new();
                if *m != ExtBound::NegInf {
                    alt.push(Schema::Betw(ExtBound::NegInf, m.clone()));
                }
                if *n != ExtBound::PosInf {
                    alt.push(Schema::Betw(n.clone(), ExtBound::PosInf));
                }
                guard(JsonType::Num, alt)
            }
            Schema::MulOf(q) => guard(JsonType::Num, vec![Schema::NotMulOf(q.clone())]),
            Schema::NotMulOf(q) => guard(JsonType::Num, vec![Schema::MulOf(q.clone())]),
            Schema::UniqueItems => guard(JsonType::Arr, vec![Schema::RepeatedItems]),
            Schema::RepeatedItems => guard(JsonType::Arr, vec![Schema::UniqueItems]),
            Schema::ItemAt(i, t) => guard(
                JsonType::Arr,
                vec![Schema::conj(vec![
                    Schema::ItemAt(*i, b(self.neg(t)?)),
                    Schema::Ite(*i, Upper::Inf),
                ])],
            ),
            Schema::ItemsAfter(0, t) => guard(JsonType::Arr, vec![Schema::Contains(b(self.neg(t)?))]),
            Schema::ItemsAfter(n, t) => guard(JsonType::Arr, vec![Schema::ContAfter(*n, b(self.neg(t)?))]),
            Schema::Contains(t) => guard(JsonType::Arr, vec![Schema::ItemsAfter(0, b(self.neg(t)?))]),
            Schema::ContAfter(n, t) => guard(JsonType::Arr, vec![Schema::ItemsAfter(*n, b(self.neg(t)?))]),
            Schema::Items(head, tail) => {
                let mut parts = Vec::new();
                for (i, t) in head.iter().enumerate() {
                    parts.push(Schema::ItemAt(i as u64 + 1, b(t.clone())));
                }
                parts.push(Schema::ItemsAfter(head.len() as u64, tail.clone()));
                self.neg(&Schema::And(parts))?
            }
            Schema::Req(ks) => guard(
                JsonType::Obj,
                ks.iter()
                    .map(|k| Schema::Props(vec![(Regex::keykey(k), Schema::False)], b(Schema::True)))
                    .collect(),
            ),
            Schema::PattReq(pairs) => guard(
                JsonType::Obj,
                pairs
                    .iter()
                    .map(|(r, t)| Ok(Schema::Props(vec![(r.clone(), self.neg(t)?)], b(Schema::True))))
                    .collect::<Result<_, NotElimError>>()?,
            ),
            Schema::Props(pairs, add) if pairs.len() == 1 && **add == Schema::True => {
                let (r, t) = &pairs[0];
                let nt = self.neg(t)?;
                match r.as_keykey() {
                    _ if nt == Schema::False => Schema::False,
                    Some(k) => {
                        let mut parts = vec![Schema::ty(JsonType::Obj), Schema::Req(vec![k])];
                        if nt != Schema::True {
                            parts.push(Schema::Props(vec![(r.clone(), nt)], b(Schema::True)));
                        }
                        Schema::conj(parts)
                    }
                    None => Schema::conj(vec![Schema::ty(JsonType::Obj), Schema::PattReq(vec![(r.clone(), nt)])]),
                }
            }
            Schema::Props(pairs, add) => {
                let mut parts: Vec<Schema> = pairs
                    .iter()
                    .map(|(r, t)| Schema::Props(vec![(r.clone(), t.clone())], b(Schema::True)))
                    .collect();
                if **add != Schema::True {
                    let rest = residual_names(&pairs.iter().map(|(r, _)| r).collect::<Vec<_>>())?;
                    parts.push(Schema::Props(vec![(rest, (**add).clone())], b(Schema::True)));
                }
                self.neg(&Schema::conj(parts))?
            }
            Schema::PNames(t) => {
                let r = crate::patterns::regex_of_schema(&Schema::not((**t).clone()), self.env)?;
                guard(JsonType::Obj, vec![Schema::PattReq(vec![(r, Schema::True)])])
            }
        })
    }
}

/// Drops definitions unreachable from the root, then inlines every
/// variable that is used exactly once and does not mention itself.
pub fn prune(d: &Document) -> Document {
    let mut doc = reachable(d);
    loop {
        let mut uses: HashMap<String, usize> = HashMap::new();
        let mut count = |s: &Schema| {
            s.walk(&mut |n| {
                if let Schema::Ref(x) = n {
                    *uses.entry(x.clone()).or_default() += 1;
                }
            })
        };
        count(&doc.root);
        for body in doc.env.values() {
            count(body);
        }
        let target = doc
            .env
            .iter()
            .find_map(|(x, body)| (uses.get(x) == Some(&1) && !free_vars(body).contains(x)).then(|| x.clone()));
        let Some(x) = target else { return doc };
        let body = doc.env.shift_remove(&x).unwrap();
        let root = substitute(&doc.root, &x, &body);
        let env = doc
            .env
            .iter()
            .map(|(y, s)| (y.clone(), substitute(s, &x, &body)))
            .collect();
        doc = Document::new(root, env);
    }
}

fn reachable(d: &Document) -> Document {
    let mut seen: HashSet<String> = HashSet::new();
    let mut todo: Vec<String> = free_vars(&d.root).into_iter().collect();
    while let Some(x) = todo.pop() {
        if !seen.insert(x.clone()) {
            continue;
        }
        if let Some(body) = d.env.get(&x) {
            todo.extend(free_vars(body));
        }
    }
    let env = d
        .env
        .iter()
        .filter(|(x, _)| seen.contains(*x))
        .map(|(x, s)| (x.clone(), s.clone()))
        .collect();
    Document::new(d.root.clone(), env)
}

fn substitute(s: &Schema, x: &str, body: &Schema) -> Schema {
    match s {
        Schema::Ref(y) if y == x => body.clone(),
        // rebuild through the smart constructors so inlined t/f fold away
        Schema::And(v) => Schema::conj(v.iter().map(|t| substitute(t, x, body)).collect()),
        Schema::Or(v) => Schema::disj(v.iter().map(|t| substitute(t, x, body)).collect()),
        s => s.map_children(&mut |t| substitute(t, x, body)),
    }
}
