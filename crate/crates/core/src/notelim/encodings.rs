//! Negation-free encodings for the negations of `props`, `items` and
//! `contAfter` that do not need `pattReq` or `contAfter`.

use std::fmt;

use crate::algebra::{Env, Schema, Upper};
use crate::json::JsonType;
use crate::patterns::Regex;

fn negate(s: &Schema) -> Schema {
    match s {
        Schema::True => Schema::False,
        Schema::False => Schema::True,
        Schema::Not(t) => (**t).clone(),
        s => Schema::not(s.clone()),
    }
}

fn fresh(env: &Env, base: &str) -> String {
    crate::algebra::fresh_name(env, base)
}

/// Builds the "at most `u` of the first `n` leaves hold" variables over a
/// binary halving of `1..=n`, adding them to `env`. `leaf(p)` is level 0;
/// an index `u` at or above the number of leaves in an interval reads as `t`.
/// Returns `(U_{L,1,0}, …, U_{L,1,n})`.
fn at_most_tree(n: usize, env: &mut Env, prefix: &str, leaf: &dyn Fn(usize) -> Schema) -> Vec<Schema> {
    let mut levels = 0;
    while (1usize << levels) < n {
        levels += 1;
    }
    // cur[p][u] for the intervals of the current level
    let mut cur: Vec<Vec<Schema>> = (0..1usize << levels)
        .map(|p| if p < n { vec![leaf(p + 1)] } else { Vec::new() })
        .collect();
    let read = |row: &Vec<Schema>, u: usize| row.get(u).cloned().unwrap_or(Schema::True);
    for l in 1..=levels {
        let mut next = Vec::new();
        for p in 0..cur.len() / 2 {
            let (left, right) = (&cur[2 * p], &cur[2 * p + 1]);
            let c = left.len() + right.len();
            let mut row = Vec::new();
            for u in 0..c {
                let body = Schema::disj(
                    (0..=u)
                        .map(|i| Schema::conj(vec![read(left, i), read(right, u - i)]))
                        .collect(),
                );
                row.push(match body {
                    Schema::True | Schema::False | Schema::Ref(_) => body,
                    body => {
                        let x = fresh(env, &format!("{prefix}_{l}_{}_{u}", p + 1));
                        env.insert(x.clone(), body);
                        Schema::Ref(x)
                    }
                });
            }
            next.push(row);
        }
        cur = next;
    }
    let top = cur.pop().unwrap_or_default();
    (0..=n).map(|u| read(&top, u)).collect()
}

/// `¬props(kk(k1): t, …, kk(kn): t; f)`: an object with a key outside
/// `keys`, by counting how many of `keys` are present. Definitions are added
/// to `env`; the result is the root schema.
pub fn counting_env_for_keys(keys: &[String], env: &mut Env) -> Schema {
    let absent = |p: usize| {
        Schema::Props(
            vec![(Regex::keykey(&keys[p - 1]), Schema::False)],
            Box::new(Schema::True),
        )
    };
    let tops = at_most_tree(keys.len(), env, "keys", &absent);
    let alt = tops
        .into_iter()
        .enumerate()
        .map(|(i, u)| Schema::conj(vec![u, Schema::Pro(i as u64 + 1, Upper::Inf)]))
        .collect();
    Schema::conj(vec![Schema::ty(JsonType::Obj), Schema::disj(alt)])
}

/// `contAfter(n, S)` with `cnt` and `itemAt` only: some of the first `n`
/// items fail `S` while at least one more item satisfies it.
pub fn lower_cont_after(n: u64, s: &Schema, env: &mut Env) -> Schema {
    if n == 0 {
        return Schema::Cnt(1, Upper::Inf, Box::new(s.clone()));
    }
    let s = match s {
        Schema::Ref(_) | Schema::True | Schema::False => s.clone(),
        s => {
            let x = fresh(env, "elem");
            env.insert(x.clone(), s.clone());
            Schema::Ref(x)
        }
    };
    let ns = negate(&s);
    let miss = |p: usize| Schema::ItemAt(p as u64, Box::new(ns.clone()));
    let tops = at_most_tree(n as usize, env, "after", &miss);
    Schema::disj(
        tops.into_iter()
            .enumerate()
            .map(|(i, u)| Schema::conj(vec![u, Schema::Cnt(i as u64 + 1, Upper::Inf, Box::new(s.clone()))]))
            .collect(),
    )
}

/// `¬props(kk(k1): S1, …; t)`: one of the keys is present with a value
/// failing its schema. The empty list gives `f`.
pub fn neg_props_keys(pairs: &[(String, Schema)]) -> Schema {
    let alt = pairs
        .iter()
        .map(|(k, s)| {
            let ns = negate(s);
            let mut parts = vec![Schema::Req(vec![k.clone()])];
            if ns != Schema::True {
                parts.push(Schema::Props(vec![(Regex::keykey(k), ns)], Box::new(Schema::True)));
            }
            Schema::conj(parts)
        })
        .collect();
    let alt = Schema::disj(alt);
    if alt == Schema::False {
        return alt;
    }
    Schema::conj(vec![Schema::ty(JsonType::Obj), alt])
}

/// The three shapes of `items` whose negation needs no `contAfter`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemsCase {
    /// No head schemas.
    NoHead,
    /// Every head schema is syntactically contained in the tail schema.
    HeadInTail,
    /// The tail schema is `f`.
    ClosedTail,
}

impl ItemsCase {
    pub fn detect(head: &[Schema], tail: &Schema) -> Option<ItemsCase> {
        if head.is_empty() {
            Some(ItemsCase::NoHead)
        } else if *tail == Schema::True || head.iter().all(|s| s == tail || *s == Schema::False) {
            Some(ItemsCase::HeadInTail)
        } else if *tail == Schema::False {
            Some(ItemsCase::ClosedTail)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseNotApplicable(pub ItemsCase);

impl fmt::Display for CaseNotApplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "items negation case {:?} does not apply", self.0)
    }
}

impl std::error::Error for CaseNotApplicable {}

fn prefix_items(i: usize, s: Schema, tail: Schema) -> Schema {
    let mut head = vec![Schema::True; i - 1];
    head.push(s);
    Schema::Items(head, Box::new(tail))
}

/// `¬items(head; tail)` under one of the [`ItemsCase`] shapes, with `¬` left
/// on the operands.
pub fn neg_items_common(head: &[Schema], tail: &Schema, case: ItemsCase) -> Result<Schema, CaseNotApplicable> {
    let applies = match case {
        ItemsCase::NoHead => head.is_empty(),
        ItemsCase::HeadInTail => *tail == Schema::True || head.iter().all(|s| s == tail || *s == Schema::False),
        ItemsCase::ClosedTail => *tail == Schema::False,
    };
    if !applies {
        return Err(CaseNotApplicable(case));
    }
    let arr = Schema::ty(JsonType::Arr);
    let at = |i: usize| Schema::Ite(i as u64, Upper::Inf);
    let body = match case {
        ItemsCase::NoHead => Schema::Contains(Box::new(negate(tail))),
        ItemsCase::HeadInTail => {
            let mut alt: Vec<Schema> = head
                .iter()
                .enumerate()
                .map(|(i, s)| Schema::conj(vec![prefix_items(i + 1, negate(s), tail.clone()), at(i + 1)]))
                .collect();
            if *tail != Schema::True {
                alt.push(Schema::Contains(Box::new(negate(tail))));
            }
            Schema::disj(alt)
        }
        ItemsCase::ClosedTail => {
            let mut alt: Vec<Schema> = head
                .iter()
                .enumerate()
                .map(|(i, s)| Schema::conj(vec![prefix_items(i + 1, negate(s), Schema::True), at(i + 1)]))
                .collect();
            alt.push(at(head.len() + 1));
            Schema::disj(alt)
        }
    };
    Ok(if body == Schema::False {
        body
    } else {
        Schema::conj(vec![arr, body])
    })
}

/// `¬req(k…)` as absent-key `props`, `¬contains(S)` as `items(; ¬S)`.
/// Other operators give `None`.
pub fn neg_req_contains(s: &Schema) -> Option<Schema> {
    match s {
        Schema::Req(ks) => {
            let alt = Schema::disj(
                ks.iter()
                    .map(|k| Schema::Props(vec![(Regex::keykey(k), Schema::False)], Box::new(Schema::True)))
                    .collect(),
            );
            Some(if alt == Schema::False {
                alt
            } else {
                Schema::conj(vec![Schema::ty(JsonType::Obj), alt])
            })
        }
        Schema::Contains(t) => Some(Schema::conj(vec![
            Schema::ty(JsonType::Arr),
            Schema::Items(Vec::new(), Box::new(negate(t))),
        ])),
        _ => None,
    }
}
