//! Reference validator for the algebra.
//!
//! Recursive variables are evaluated by unfolding. Each unfolding pushes the
//! variable on a guard stack which is cleared whenever evaluation descends
//! into a member or element through a typed operator, so a variable met
//! twice on the same stack is unguarded recursion.

mod generate;

use std::collections::HashMap;

use num_traits::Zero;

use crate::algebra::{check_guarded, AlgebraError, Document, Schema};
use crate::json::{JsonType, JsonValue};

pub use generate::{equiv_sample, EquivVerdict, InstanceGenerator};

/// Result of [`validate`]. `trace` lists (instance path, operator) pairs that
/// failed; it is empty exactly when `valid` holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationOutcome {
    pub valid: bool,
    pub trace: Vec<(String, String)>,
}

pub fn validate(j: &JsonValue, d: &Document) -> Result<ValidationOutcome, AlgebraError> {
    Ok(Validator::new(d)?.validate(j))
}

/// A checked document ready for repeated validation.
pub struct Validator<'d> {
    doc: &'d Document,
}

impl<'d> Validator<'d> {
    pub fn new(doc: &'d Document) -> Result<Validator<'d>, AlgebraError> {
        check_guarded(doc)?;
        Ok(Validator { doc })
    }

    pub fn is_valid(&self, j: &JsonValue) -> bool {
        self.eval_root(&self.doc.root, j)
    }

    /// Evaluates a schema other than the root against the same definitions.
    pub fn is_valid_schema(&self, s: &Schema, j: &JsonValue) -> bool {
        self.eval_root(s, j)
    }

    pub fn validate(&self, j: &JsonValue) -> ValidationOutcome {
        if self.is_valid(j) {
            return ValidationOutcome {
                valid: true,
                trace: Vec::new(),
            };
        }
        let mut ev = Eval::new(self.doc);
        let mut trace = Vec::new();
        ev.explain(&self.doc.root, j, String::new(), &mut trace);
        if trace.is_empty() {
            trace.push((String::new(), self.doc.root.operator_name().to_string()));
        }
        ValidationOutcome { valid: false, trace }
    }

    fn eval_root(&self, s: &Schema, j: &JsonValue) -> bool {
        let mut ev = Eval::new(self.doc);
        ev.eval(s, j).expect("document was checked for guardedness")
    }
}

struct Eval<'d> {
    doc: &'d Document,
    guard: Vec<usize>,
    memo: HashMap<(usize, usize), bool>,
    /// Non-zero while evaluating values that are not part of the instance
    /// tree (property names), whose addresses must not be memoized.
    transient: u32,
}

fn pointer_token(s: &str) -> String {
    s.replace('~', "~0").replace('/', "~1")
}

impl<'d> Eval<'d> {
    fn new(doc: &'d Document) -> Eval<'d> {
        Eval {
            doc,
            guard: Vec::new(),
            memo: HashMap::new(),
            transient: 0,
        }
    }

    fn descend<T>(&mut self, f: impl FnOnce(&mut Self) -> T) -> T {
        let saved = std::mem::take(&mut self.guard);
        let r = f(self);
        self.guard = saved;
        r
    }

    fn eval(&mut self, s: &Schema, j: &JsonValue) -> Result<bool, AlgebraError> {
        let ty = j.json_type();
        Ok(match s {
            Schema::Type(ts) => ts.contains(&ty),
            Schema::Const(v) => j == v,
            Schema::Enum(vs) => vs.iter().any(|v| v == j),
            Schema::Len(l, u) => match j {
                JsonValue::Str(s) => {
                    let n = s.chars().count() as u64;
                    *l <= n && u.admits(n)
                }
                _ => true,
            },
            Schema::Pattern(r) => match j {
                JsonValue::Str(s) => r.is_match(s),
                _ => true,
            },
            Schema::Betw(m, n) => match j {
                JsonValue::Num(q) => m.cmp_num(q).is_le() && n.cmp_num(q).is_ge(),
                _ => true,
            },
            Schema::XBetw(m, n) => match j {
                JsonValue::Num(q) => m.cmp_num(q).is_lt() && n.cmp_num(q).is_gt(),
                _ => true,
            },
            Schema::MulOf(q) => match j {
                JsonValue::Num(x) => is_multiple(x, q),
                _ => true,
            },
            Schema::NotMulOf(q) => match j {
                JsonValue::Num(x) => !is_multiple(x, q),
                _ => true,
            },
            Schema::Props(pairs, add) => match j {
                JsonValue::Obj(m) => self.descend(|ev| {
                    for (k, v) in m {
                        let mut matched = false;
                        for (r, t) in pairs {
                            if r.is_match(k) {
                                matched = true;
                                if !ev.eval(t, v)? {
                                    return Ok(false);
                                }
                            }
                        }
                        if !matched && !ev.eval(add, v)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })?,
                _ => true,
            },
            Schema::Pro(l, u) => match j {
                JsonValue::Obj(m) => *l <= m.len() as u64 && u.admits(m.len() as u64),
                _ => true,
            },
            Schema::Req(ks) => match j {
                JsonValue::Obj(m) => ks.iter().all(|k| m.contains_key(k)),
                _ => true,
            },
            Schema::PNames(t) => match j {
                JsonValue::Obj(m) => self.descend(|ev| {
                    ev.transient += 1;
                    let mut ok = true;
                    for k in m.keys() {
                        if !ev.eval(t, &JsonValue::Str(k.clone()))? {
                            ok = false;
                            break;
                        }
                    }
                    ev.transient -= 1;
                    Ok::<bool, AlgebraError>(ok)
                })?,
                _ => true,
            },
            Schema::PattReq(pairs) => match j {
                JsonValue::Obj(m) => self.descend(|ev| {
                    for (r, t) in pairs {
                        let mut found = false;
                        for (k, v) in m {
                            if r.is_match(k) && ev.eval(t, v)? {
                                found = true;
                                break;
                            }
                        }
                        if !found {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })?,
                _ => true,
            },
            Schema::Items(head, tail) => match j {
                JsonValue::Arr(a) => self.descend(|ev| {
                    for (i, v) in a.iter().enumerate() {
                        let t = head.get(i).unwrap_or(tail);
                        if !ev.eval(t, v)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })?,
                _ => true,
            },
            Schema::ItemAt(i, t) => match j {
                JsonValue::Arr(a) => match a.get((*i as usize).wrapping_sub(1)) {
                    Some(v) if *i >= 1 => self.descend(|ev| ev.eval(t, v))?,
                    _ => true,
                },
                _ => true,
            },
            Schema::ItemsAfter(n, t) => match j {
                JsonValue::Arr(a) => self.descend(|ev| {
                    for v in a.iter().skip(*n as usize) {
                        if !ev.eval(t, v)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                })?,
                _ => true,
            },
            Schema::Ite(l, u) => match j {
                JsonValue::Arr(a) => *l <= a.len() as u64 && u.admits(a.len() as u64),
                _ => true,
            },
            Schema::Contains(t) => match j {
                JsonValue::Arr(a) => self.count(t, a, 0, 1)? >= 1,
                _ => true,
            },
            Schema::ContAfter(n, t) => match j {
                JsonValue::Arr(a) => self.count(t, a, *n as usize, 1)? >= 1,
                _ => true,
            },
            Schema::Cnt(l, u, t) => match j {
                JsonValue::Arr(a) => {
                    // counting stops once the upper bound is exceeded
                    let cap = match u {
                        crate::algebra::Upper::Fin(x) => (*x).max(*l).saturating_add(1),
                        crate::algebra::Upper::Inf => *l,
                    };
                    let c = self.count(t, a, 0, cap)?;
                    *l <= c && u.admits(c)
                }
                _ => true,
            },
            Schema::UniqueItems => match j {
                JsonValue::Arr(a) => all_distinct(a),
                _ => true,
            },
            Schema::RepeatedItems => match j {
                JsonValue::Arr(a) => !all_distinct(a),
                _ => true,
            },
            Schema::Ref(x) => return self.eval_ref(x, j),
            Schema::True => true,
            Schema::False => false,
            Schema::Not(t) => !self.eval(t, j)?,
            Schema::Or(v) => {
                for t in v {
                    if self.eval(t, j)? {
                        return Ok(true);
                    }
                }
                false
            }
            Schema::And(v) | Schema::Group(v) => {
                for t in v {
                    if !self.eval(t, j)? {
                        return Ok(false);
                    }
                }
                true
            }
            Schema::Implies(a, b) => !self.eval(a, j)? || self.eval(b, j)?,
            Schema::IfThenElse(a, b, c) => {
                if self.eval(a, j)? {
                    self.eval(b, j)?
                } else {
                    self.eval(c, j)?
                }
            }
            Schema::OneOf(v) => {
                let mut n = 0;
                for t in v {
                    if self.eval(t, j)? {
                        n += 1;
                        if n > 1 {
                            return Ok(false);
                        }
                    }
                }
                n == 1
            }
        })
    }

    /// Number of elements from `skip` on that satisfy `t`, stopping at `cap`.
    fn count(&mut self, t: &Schema, a: &[JsonValue], skip: usize, cap: u64) -> Result<u64, AlgebraError> {
        self.descend(|ev| {
            let mut c = 0u64;
            for v in a.iter().skip(skip) {
                if ev.eval(t, v)? {
                    c += 1;
                    if c >= cap {
                        break;
                    }
                }
            }
            Ok(c)
        })
    }

    fn eval_ref(&mut self, x: &str, j: &JsonValue) -> Result<bool, AlgebraError> {
        let Some((idx, _, body)) = self.doc.env.get_full(x) else {
            return Err(AlgebraError::NotClosing(x.to_string()));
        };
        let key = (idx, j as *const JsonValue as usize);
        if self.transient == 0 {
            if let Some(&r) = self.memo.get(&key) {
                return Ok(r);
            }
        }
        if let Some(pos) = self.guard.iter().position(|&g| g == idx) {
            let mut cycle: Vec<String> = self.guard[pos..]
                .iter()
                .map(|&g| self.doc.env.get_index(g).unwrap().0.clone())
                .collect();
            cycle.push(x.to_string());
            return Err(AlgebraError::Unguarded(cycle));
        }
        self.guard.push(idx);
        let r = self.eval(body, j);
        self.guard.pop();
        let r = r?;
        if self.transient == 0 {
            self.memo.insert(key, r);
        }
        Ok(r)
    }

    /// Collects failing operators below a schema that rejects `j`.
    fn explain(&mut self, s: &Schema, j: &JsonValue, path: String, out: &mut Vec<(String, String)>) {
        if out.len() >= 32 || self.eval(s, j).unwrap_or(false) {
            return;
        }
        let child = |p: &str, k: &str| format!("{p}/{}", pointer_token(k));
        match (s, j) {
            (Schema::And(v) | Schema::Group(v), _) => {
                for t in v {
                    self.explain(t, j, path.clone(), out);
                }
            }
            (Schema::Ref(x), _) => {
                if let Some(body) = self.doc.env.get(x) {
                    if self.guard.len() < 64 {
                        self.guard.push(usize::MAX);
                        self.explain(body, j, path, out);
                        self.guard.pop();
                    }
                }
            }
            (Schema::Props(pairs, add), JsonValue::Obj(m)) => {
                for (k, v) in m {
                    let mut matched = false;
                    for (r, t) in pairs {
                        if r.is_match(k) {
                            matched = true;
                            self.explain(t, v, child(&path, k), out);
                        }
                    }
                    if !matched {
                        self.explain(add, v, child(&path, k), out);
                    }
                }
            }
            (Schema::Items(head, tail), JsonValue::Arr(a)) => {
                for (i, v) in a.iter().enumerate() {
                    self.explain(head.get(i).unwrap_or(tail), v, child(&path, &i.to_string()), out);
                }
            }
            (Schema::ItemAt(i, t), JsonValue::Arr(a)) => {
                if let Some(v) = a.get(*i as usize - 1) {
                    self.explain(t, v, child(&path, &(*i - 1).to_string()), out);
                }
            }
            (Schema::ItemsAfter(n, t), JsonValue::Arr(a)) => {
                for (i, v) in a.iter().enumerate().skip(*n as usize) {
                    self.explain(t, v, child(&path, &i.to_string()), out);
                }
            }
            _ => out.push((path, s.operator_name().to_string())),
        }
    }
}

fn is_multiple(x: &num_rational::BigRational, q: &num_rational::BigRational) -> bool {
    if q.is_zero() {
        return x.is_zero();
    }
    (x / q).is_integer()
}

fn all_distinct(a: &[JsonValue]) -> bool {
    for i in 0..a.len() {
        for k in i + 1..a.len() {
            if a[i] == a[k] {
                return false;
            }
        }
    }
    true
}

/// The type an operator is conditional on, if it is a typed assertion.
pub fn conditional_type(s: &Schema) -> Option<JsonType> {
    Some(match s {
        Schema::Len(..) | Schema::Pattern(_) => JsonType::Str,
        Schema::Betw(..) | Schema::XBetw(..) | Schema::MulOf(_) | Schema::NotMulOf(_) => JsonType::Num,
        Schema::Props(..) | Schema::Pro(..) | Schema::Req(_) | Schema::PNames(_) | Schema::PattReq(_) => JsonType::Obj,
        Schema::Items(..)
        | Schema::ItemAt(..)
        | Schema::ItemsAfter(..)
        | Schema::Ite(..)
        | Schema::Contains(_)
        | Schema::ContAfter(..)
        | Schema::Cnt(..)
        | Schema::UniqueItems
        | Schema::RepeatedItems => JsonType::Arr,
        _ => return None,
    })
}
