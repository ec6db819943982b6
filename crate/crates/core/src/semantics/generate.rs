//! Seeded instance generation for sample-based equivalence checks.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Validator;
use crate::algebra::{AlgebraError, Document, ExtBound, Schema, Upper};
use crate::json::JsonValue;
use crate::patterns::Regex;

const MAX_DEPTH: usize = 5;

#[derive(Default)]
struct Pool {
    values: Vec<JsonValue>,
    strings: BTreeSet<String>,
    keys: BTreeSet<String>,
    numbers: BTreeSet<BigRational>,
    lengths: BTreeSet<u64>,
    regexes: Vec<Regex>,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Pool {
    fn add_value(&mut self, v: &JsonValue) {
        match v {
            JsonValue::Num(q) => {
                self.numbers.insert(q.clone());
            }
            JsonValue::Str(s) => {
                self.strings.insert(s.clone());
            }
            JsonValue::Arr(a) => {
                self.lengths.insert(a.len() as u64);
                a.iter().for_each(|x| self.add_value(x));
            }
            JsonValue::Obj(m) => {
                for (k, x) in m {
                    self.keys.insert(k.clone());
                    self.add_value(x);
                }
            }
            _ => {}
        }
        if self.values.len() < 200 && !self.values.contains(v) {
            self.values.push(v.clone());
        }
    }

    fn add_bound(&mut self, b: &ExtBound) {
        if let ExtBound::Fin(q) = b {
            for d in [rat(0, 1), rat(1, 1), rat(-1, 1), rat(1, 2), rat(-1, 2)] {
                self.numbers.insert(q + d);
            }
        }
    }

    fn add_count(&mut self, l: u64, u: Upper) {
        for x in [l.saturating_sub(1), l, l + 1] {
            self.lengths.insert(x);
        }
        if let Upper::Fin(j) = u {
            self.lengths.insert(j);
            self.lengths.insert(j + 1);
        }
    }

    fn add_regex(&mut self, r: &Regex, as_key: bool) {
        let mut ws = r.dfa().witnesses(3);
        ws.extend(r.dfa().complement().witnesses(2));
        for w in ws {
            if as_key {
                self.keys.insert(w.clone());
            }
            self.strings.insert(w);
        }
        if self.regexes.len() < 64 && !self.regexes.contains(r) {
            self.regexes.push(r.clone());
        }
    }

    fn add_schema(&mut self, s: &Schema) {
        s.walk(&mut |n| match n {
            Schema::Const(v) => self.add_value(v),
            Schema::Enum(vs) => vs.iter().for_each(|v| self.add_value(v)),
            Schema::Len(l, u) | Schema::Pro(l, u) | Schema::Ite(l, u) | Schema::Cnt(l, u, _) => self.add_count(*l, *u),
            Schema::Pattern(r) => self.add_regex(r, false),
            Schema::Betw(m, n) | Schema::XBetw(m, n) => {
                self.add_bound(m);
                self.add_bound(n);
            }
            Schema::MulOf(q) | Schema::NotMulOf(q) => {
                for k in [rat(1, 1), rat(2, 1), rat(1, 2), rat(3, 2), rat(-1, 1)] {
                    self.numbers.insert(q * k);
                }
            }
            Schema::Props(pairs, _) | Schema::PattReq(pairs) => {
                for (r, _) in pairs {
                    match r.as_keykey() {
                        Some(k) => {
                            self.keys.insert(k);
                        }
                        None => self.add_regex(r, true),
                    }
                }
            }
            Schema::Req(ks) => self.keys.extend(ks.iter().cloned()),
            Schema::ItemAt(i, _) | Schema::ItemsAfter(i, _) | Schema::ContAfter(i, _) => self.add_count(*i, Upper::Inf),
            Schema::Items(head, _) => self.add_count(head.len() as u64, Upper::Inf),
            _ => {}
        });
    }
}

/// Random JSON values biased toward the constants, names, pattern witnesses
/// and bounds occurring in a set of documents.
pub struct InstanceGenerator {
    rng: ChaCha8Rng,
    values: Vec<JsonValue>,
    strings: Vec<String>,
    keys: Vec<String>,
    numbers: Vec<BigRational>,
    lengths: Vec<u64>,
    regexes: Vec<Regex>,
}

impl InstanceGenerator {
    pub fn new(seed: u64) -> InstanceGenerator {
        InstanceGenerator::for_documents(&[], seed)
    }

    pub fn for_documents(docs: &[&Document], seed: u64) -> InstanceGenerator {
        let mut pool = Pool::default();
        for d in docs {
            pool.add_schema(&d.root);
            d.env.values().for_each(|s| pool.add_schema(s));
        }
        for s in ["", "a", "b", "ab", "foo", "0"] {
            pool.strings.insert(s.to_string());
        }
        for k in ["a", "b", "c"] {
            pool.keys.insert(k.to_string());
        }
        for q in [rat(0, 1), rat(1, 1), rat(-1, 1), rat(2, 1), rat(1, 2), rat(7, 3)] {
            pool.numbers.insert(q);
        }
        for l in 0..4 {
            pool.lengths.insert(l);
        }
        InstanceGenerator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            values: pool.values,
            strings: pool.strings.into_iter().collect(),
            keys: pool.keys.into_iter().collect(),
            numbers: pool.numbers.into_iter().collect(),
            lengths: pool.lengths.into_iter().filter(|&l| l <= 8).collect(),
            regexes: pool.regexes,
        }
    }

    /// A few fixed values of every type, then the pooled constants.
    pub fn seeds(&self) -> Vec<JsonValue> {
        let mut out = vec![
            JsonValue::Null,
            JsonValue::Bool(true),
            JsonValue::Bool(false),
            JsonValue::int(0),
            JsonValue::int(1),
            JsonValue::str(""),
            JsonValue::str("a"),
            JsonValue::Arr(vec![]),
            JsonValue::Obj(BTreeMap::new()),
        ];
        out.extend(self.values.iter().cloned());
        out
    }

    pub fn next_value(&mut self) -> JsonValue {
        if !self.values.is_empty() && self.rng.gen_bool(0.15) {
            let v = self.values.choose(&mut self.rng).unwrap().clone();
            return if self.rng.gen_bool(0.5) { self.mutate(v, 0) } else { v };
        }
        self.gen(0)
    }

    fn gen(&mut self, depth: usize) -> JsonValue {
        let max = if depth >= MAX_DEPTH { 4 } else { 6 };
        match self.rng.gen_range(0..max) {
            0 => JsonValue::Null,
            1 => JsonValue::Bool(self.rng.gen()),
            2 => JsonValue::Num(self.number()),
            3 => JsonValue::Str(self.string()),
            4 => {
                let n = self.length();
                let mut a: Vec<JsonValue> = (0..n).map(|_| self.gen(depth + 1)).collect();
                if n >= 2 && self.rng.gen_bool(0.2) {
                    let i = self.rng.gen_range(0..n);
                    let k = self.rng.gen_range(0..n);
                    a[k] = a[i].clone();
                }
                JsonValue::Arr(a)
            }
            _ => {
                let n = self.length();
                let mut m = BTreeMap::new();
                for _ in 0..n {
                    let k = if self.rng.gen_bool(0.75) {
                        self.keys.choose(&mut self.rng).unwrap().clone()
                    } else {
                        self.string()
                    };
                    let v = self.gen(depth + 1);
                    m.insert(k, v);
                }
                JsonValue::Obj(m)
            }
        }
    }

    fn length(&mut self) -> usize {
        if self.rng.gen_bool(0.6) {
            *self.lengths.choose(&mut self.rng).unwrap() as usize
        } else {
            self.rng.gen_range(0..5)
        }
    }

    fn number(&mut self) -> BigRational {
        if self.rng.gen_bool(0.7) {
            self.numbers.choose(&mut self.rng).unwrap().clone()
        } else {
            let n: i64 = self.rng.gen_range(-20..=20);
            let d: i64 = *[1, 1, 1, 2, 4, 10].choose(&mut self.rng).unwrap();
            rat(n, d)
        }
    }

    fn string(&mut self) -> String {
        let roll = self.rng.gen_range(0..10);
        if roll < 5 {
            return self.strings.choose(&mut self.rng).unwrap().clone();
        }
        if roll < 7 && !self.regexes.is_empty() {
            let r = self.regexes.choose(&mut self.rng).unwrap().clone();
            let dfa = if self.rng.gen_bool(0.7) {
                r.dfa().clone()
            } else {
                r.dfa().complement()
            };
            if let Some(s) = dfa.sample(&mut self.rng, 8) {
                return s;
            }
        }
        if roll < 8 {
            return self.keys.choose(&mut self.rng).unwrap().clone();
        }
        let n = self.rng.gen_range(0..5);
        (0..n)
            .map(|_| {
                *['a', 'b', 'z', '0', ' ', '_', 'é', '\u{1F600}']
                    .choose(&mut self.rng)
                    .unwrap()
            })
            .collect()
    }

    /// A small structural edit of a pooled value.
    fn mutate(&mut self, v: JsonValue, depth: usize) -> JsonValue {
        match v {
            JsonValue::Arr(mut a) if !a.is_empty() => {
                let i = self.rng.gen_range(0..a.len());
                match self.rng.gen_range(0..3) {
                    0 => {
                        a.remove(i);
                    }
                    1 => a.push(self.gen(depth + 1)),
                    _ => a[i] = self.mutate(a[i].clone(), depth + 1),
                }
                JsonValue::Arr(a)
            }
            JsonValue::Obj(mut m) if !m.is_empty() => {
                let k = m.keys().nth(self.rng.gen_range(0..m.len())).unwrap().clone();
                match self.rng.gen_range(0..3) {
                    0 => {
                        m.remove(&k);
                    }
                    1 => {
                        let nk = self.keys.choose(&mut self.rng).unwrap().clone();
                        let nv = self.gen(depth + 1);
                        m.insert(nk, nv);
                    }
                    _ => {
                        let nv = self.mutate(m[&k].clone(), depth + 1);
                        m.insert(k, nv);
                    }
                }
                JsonValue::Obj(m)
            }
            _ => self.gen(depth),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivVerdict {
    Indistinguishable {
        tested: usize,
    },
    Counterexample {
        instance: JsonValue,
        left: bool,
        right: bool,
    },
}

impl EquivVerdict {
    pub fn is_indistinguishable(&self) -> bool {
        matches!(self, EquivVerdict::Indistinguishable { .. })
    }
}

/// Validates the fixed seed values and then `n` generated instances against
/// both documents, returning the first disagreement.
pub fn equiv_sample(
    d1: &Document,
    d2: &Document,
    gen: &mut InstanceGenerator,
    n: usize,
) -> Result<EquivVerdict, AlgebraError> {
    let v1 = Validator::new(d1)?;
    let v2 = Validator::new(d2)?;
    let mut tested = 0;
    let seeds = gen.seeds();
    for j in seeds
        .into_iter()
        .chain(std::iter::from_fn(|| Some(gen.next_value())).take(n))
    {
        let (left, right) = (v1.is_valid(&j), v2.is_valid(&j));
        tested += 1;
        if left != right {
            return Ok(EquivVerdict::Counterexample {
                instance: j,
                left,
                right,
            });
        }
    }
    Ok(EquivVerdict::Indistinguishable { tested })
}
