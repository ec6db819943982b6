//! The simplification phase: items/props splitting, singleton types,
//! const elimination, pNames elimination and not-explicitation.

use super::{NotElimError, OneOfMode};
use crate::algebra::{Document, Env, ExtBound, Schema, Upper};
use crate::json::{JsonType, JsonValue};
use crate::patterns::{patt_of_schema, Pattern, Regex};

pub fn simplify(d: &Document, mode: OneOfMode) -> Result<Document, NotElimError> {
    let mut s = Simplifier {
        orig: &d.env,
        added: Env::new(),
        mode,
        counter: 0,
    };
    let root = s.schema(&d.root)?;
    let mut env = Env::new();
    for (x, body) in &d.env {
        env.insert(x.clone(), s.schema(body)?);
    }
    for (x, body) in std::mem::take(&mut s.added) {
        env.insert(x, body);
    }
    Ok(Document::new(root, env))
}

/// `type(T) ⇒ f`: every type but `t`, as a disjunction of singletons.
pub fn other_types(t: JsonType) -> Schema {
    Schema::disj(
        JsonType::ALL
            .iter()
            .filter(|&&u| u != t)
            .map(|&u| Schema::ty(u))
            .collect(),
    )
}

fn ub_lt(j: Upper, l: u64) -> bool {
    matches!(j, Upper::Fin(j) if j < l)
}

/// Normal form of a `[l, j]` cardinality bound: `t` when trivial, the
/// negated type guard when empty.
pub fn count_bound(l: u64, j: Upper, t: JsonType, make: impl FnOnce(u64, Upper) -> Schema) -> Schema {
    if ub_lt(j, l) {
        other_types(t)
    } else if l == 0 && j == Upper::Inf {
        Schema::True
    } else {
        make(l, j)
    }
}

/// Normal form of a numeric interval; `strict` selects `xBetw`.
pub fn num_bound(m: &ExtBound, n: &ExtBound, strict: bool) -> Schema {
    if *m == ExtBound::NegInf && *n == ExtBound::PosInf {
        return Schema::True;
    }
    let empty = match (m, n) {
        (ExtBound::PosInf, _) | (_, ExtBound::NegInf) => true,
        (ExtBound::Fin(a), ExtBound::Fin(b)) => {
            if strict {
                a >= b
            } else {
                a > b
            }
        }
        _ => false,
    };
    if empty {
        other_types(JsonType::Num)
    } else if strict {
        Schema::XBetw(m.clone(), n.clone())
    } else {
        Schema::Betw(m.clone(), n.clone())
    }
}

/// The const-elimination rules, applied recursively.
pub fn const_elim(v: &JsonValue) -> Schema {
    match v {
        JsonValue::Bool(_) => Schema::Const(v.clone()),
        JsonValue::Null => Schema::ty(JsonType::Null),
        JsonValue::Num(q) => Schema::conj(vec![
            Schema::ty(JsonType::Num),
            Schema::Betw(ExtBound::Fin(q.clone()), ExtBound::Fin(q.clone())),
        ]),
        JsonValue::Str(s) => Schema::conj(vec![Schema::ty(JsonType::Str), Schema::Pattern(Regex::keykey(s))]),
        JsonValue::Arr(a) => {
            let n = a.len() as u64;
            let mut parts = vec![Schema::ty(JsonType::Arr), Schema::Ite(n, Upper::Fin(n))];
            for (i, x) in a.iter().enumerate() {
                parts.push(Schema::ItemAt(i as u64 + 1, Box::new(const_elim(x))));
            }
            Schema::conj(parts)
        }
        JsonValue::Obj(m) => {
            let mut parts = vec![Schema::ty(JsonType::Obj)];
            if !m.is_empty() {
                parts.push(Schema::Req(m.keys().cloned().collect()));
            }
            parts.push(Schema::Pro(0, Upper::Fin(m.len() as u64)));
            for (k, x) in m {
                parts.push(Schema::Props(
                    vec![(Regex::keykey(k), const_elim(x))],
                    Box::new(Schema::True),
                ));
            }
            Schema::conj(parts)
        }
    }
}

/// `Not•(r1|…|rn)`, the names left to the additional-properties schema.
pub fn residual_names(rs: &[&Regex]) -> Result<Regex, NotElimError> {
    if rs.is_empty() {
        return Ok(Regex::top());
    }
    let union = Pattern::union(rs.iter().map(|r| r.pattern().clone()).collect());
    Ok(Regex::new(Pattern::not(union))?)
}

struct Simplifier<'a> {
    orig: &'a Env,
    added: Env,
    mode: OneOfMode,
    counter: usize,
}

impl Simplifier<'_> {
    fn taken(&self, name: &str) -> bool {
        self.orig.contains_key(name) || self.added.contains_key(name)
    }

    fn fresh(&mut self, base: &str) -> String {
        loop {
            self.counter += 1;
            let name = format!("{base}_{}", self.counter);
            if !self.taken(&name) {
                return name;
            }
        }
    }

    /// Replaces a schema that is about to be copied by a fresh variable.
    fn bind(&mut self, s: Schema, base: &str) -> Schema {
        match s {
            Schema::Ref(_) | Schema::True | Schema::False => s,
            s => {
                let name = self.fresh(base);
                self.added.insert(name.clone(), s);
                Schema::Ref(name)
            }
        }
    }

    fn schema(&mut self, s: &Schema) -> Result<Schema, NotElimError> {
        let b = Box::new;
        Ok(match s {
            Schema::Type(ts) => Schema::disj(ts.iter().map(|&t| Schema::ty(t)).collect()),
            Schema::Const(v) => const_elim(v),
            Schema::Enum(vs) => Schema::disj(vs.iter().map(const_elim).collect()),
            Schema::Len(l, j) => count_bound(*l, *j, JsonType::Str, Schema::Len),
            Schema::Pro(l, j) => count_bound(*l, *j, JsonType::Obj, Schema::Pro),
            Schema::Ite(l, j) => count_bound(*l, *j, JsonType::Arr, Schema::Ite),
            Schema::Betw(m, n) => num_bound(m, n, false),
            Schema::XBetw(m, n) => num_bound(m, n, true),
            Schema::Cnt(l, j, t) => {
                let t = self.schema(t)?;
                count_bound(*l, *j, JsonType::Arr, |l, j| Schema::Cnt(l, j, b(t)))
            }
            Schema::Req(ks) if ks.is_empty() => Schema::True,
            Schema::Props(pairs, add) => {
                let mut parts = Vec::new();
                for (r, t) in pairs {
                    let t = self.schema(t)?;
                    if t != Schema::True {
                        parts.push(Schema::Props(vec![(r.clone(), t)], b(Schema::True)));
                    }
                }
                let add = self.schema(add)?;
                if add != Schema::True {
                    let rest = residual_names(&pairs.iter().map(|(r, _)| r).collect::<Vec<_>>())?;
                    if !rest.dfa().is_empty() {
                        parts.push(Schema::Props(vec![(rest, add)], b(Schema::True)));
                    }
                }
                Schema::conj(parts)
            }
            Schema::PattReq(pairs) => {
                let mut parts = Vec::new();
                for (r, t) in pairs {
                    parts.push(Schema::PattReq(vec![(r.clone(), self.schema(t)?)]));
                }
                Schema::conj(parts)
            }
            Schema::PNames(t) => {
                let r = Regex::new(patt_of_schema(&Schema::not((**t).clone()), self.orig)?)?;
                if r.dfa().is_empty() {
                    Schema::True
                } else {
                    Schema::Props(vec![(r, Schema::False)], b(Schema::True))
                }
            }
            Schema::Items(head, tail) => {
                let mut parts = Vec::new();
                for (i, t) in head.iter().enumerate() {
                    let t = self.schema(t)?;
                    if t != Schema::True {
                        parts.push(Schema::ItemAt(i as u64 + 1, b(t)));
                    }
                }
                let tail = self.schema(tail)?;
                if tail != Schema::True {
                    parts.push(Schema::ItemsAfter(head.len() as u64, b(tail)));
                }
                Schema::conj(parts)
            }
            Schema::ItemAt(i, t) => Schema::ItemAt(*i, b(self.schema(t)?)),
            Schema::ItemsAfter(i, t) => Schema::ItemsAfter(*i, b(self.schema(t)?)),
            Schema::Contains(t) => Schema::Contains(b(self.schema(t)?)),
            Schema::ContAfter(i, t) => Schema::ContAfter(*i, b(self.schema(t)?)),
            Schema::Not(t) => match self.schema(t)? {
                Schema::True => Schema::False,
                Schema::False => Schema::True,
                t => Schema::not(t),
            },
            Schema::And(v) | Schema::Group(v) => Schema::conj(self.all(v)?),
            Schema::Or(v) => Schema::disj(self.all(v)?),
            Schema::Implies(a, c) => Schema::disj(vec![negate(self.schema(a)?), self.schema(c)?]),
            Schema::IfThenElse(a, c, e) => {
                let a = self.schema(a)?;
                let a = self.bind(a, "if");
                let (c, e) = (self.schema(c)?, self.schema(e)?);
                Schema::disj(vec![Schema::conj(vec![a.clone(), c]), Schema::conj(vec![negate(a), e])])
            }
            Schema::OneOf(v) => {
                let args = self.all(v)?;
                if args.len() <= 1 {
                    return Ok(Schema::disj(args));
                }
                let args: Vec<Schema> = args.into_iter().map(|a| self.bind(a, "one")).collect();
                match self.mode {
                    OneOfMode::Naive => expand_one_of(args),
                    OneOfMode::Linear => self.one_of_linear(args),
                }
            }
            other => other.clone(),
        })
    }

    fn all(&mut self, v: &[Schema]) -> Result<Vec<Schema>, NotElimError> {
        v.iter().map(|t| self.schema(t)).collect()
    }

    /// `O_{q,1}` of the halving construction over `args` padded with `f`.
    fn one_of_linear(&mut self, args: Vec<Schema>) -> Schema {
        let (root, defs) = one_of_linear_env(args, &mut |base| self.fresh(base));
        self.added.extend(defs);
        root
    }
}

fn negate(s: Schema) -> Schema {
    match s {
        Schema::True => Schema::False,
        Schema::False => Schema::True,
        Schema::Not(t) => *t,
        s => Schema::not(s),
    }
}

fn expand_one_of(args: Vec<Schema>) -> Schema {
    let n = args.len();
    Schema::disj(
        (0..n)
            .map(|l| {
                Schema::conj(
                    (0..n)
                        .map(|m| {
                            if m == l {
                                args[m].clone()
                            } else {
                                negate(args[m].clone())
                            }
                        })
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Linear encoding of `⊕(args)`: `N_{l,p}` holds when no argument in the
/// halving interval `I(l,p)` holds, `O_{l,p}` when exactly one does. Level 0
/// is written inline; padding arguments are `f`.
pub fn one_of_linear_env(args: Vec<Schema>, fresh: &mut dyn FnMut(&str) -> String) -> (Schema, Env) {
    let mut env = Env::new();
    let mut q = 0;
    while (1usize << q) < args.len() {
        q += 1;
    }
    let width = 1usize << q;
    let mut n: Vec<Schema> = (0..width)
        .map(|p| args.get(p).cloned().map(negate).unwrap_or(Schema::True))
        .collect();
    let mut o: Vec<Schema> = (0..width)
        .map(|p| args.get(p).cloned().unwrap_or(Schema::False))
        .collect();
    let name = |body: Schema, base: &str, env: &mut Env, fresh: &mut dyn FnMut(&str) -> String| match body {
        Schema::True | Schema::False | Schema::Ref(_) => body,
        body => {
            let x = fresh(base);
            env.insert(x.clone(), body);
            Schema::Ref(x)
        }
    };
    for _ in 1..=q {
        let mut n2 = Vec::new();
        let mut o2 = Vec::new();
        for p in 0..n.len() / 2 {
            let (nl, nr, ol, or) = (&n[2 * p], &n[2 * p + 1], &o[2 * p], &o[2 * p + 1]);
            let nb = Schema::conj(vec![nl.clone(), nr.clone()]);
            let ob = Schema::disj(vec![
                Schema::conj(vec![ol.clone(), nr.clone()]),
                Schema::conj(vec![nl.clone(), or.clone()]),
            ]);
            n2.push(name(nb, "none", &mut env, fresh));
            o2.push(name(ob, "one", &mut env, fresh));
        }
        n = n2;
        o = o2;
    }
    (o.pop().unwrap(), env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_schema;

    fn simp(src: &str) -> Schema {
        simplify(&Document::from_schema(parse_schema(src).unwrap()), OneOfMode::Naive)
            .unwrap()
            .root
    }

    #[test]
    fn const_rules() {
        assert_eq!(simp("const(null)"), Schema::ty(JsonType::Null));
        assert_eq!(simp("const(\"s\")").to_string(), "(type(Str) ∧ pattern(\"^s$\"))");
        assert_eq!(simp("const(true)").to_string(), "const(true)");
        assert_eq!(
            simp("const({\"a\":[1]})").to_string(),
            "(type(Obj) ∧ req(\"a\") ∧ pro(0, 1) ∧ props(\"^a$\": (type(Arr) ∧ ite(1, 1) ∧ itemAt(1, (type(Num) ∧ betw(1, 1)))); t))"
        );
    }

    #[test]
    fn items_and_props_split() {
        assert_eq!(
            simp("items(type(Num), type(Str); type(Null))").to_string(),
            "(itemAt(1, type(Num)) ∧ itemAt(2, type(Str)) ∧ itemsAfter(2, type(Null)))"
        );
        assert_eq!(
            simp("props(\"^a$\": type(Num); f)").to_string(),
            "(props(\"^a$\": type(Num); t) ∧ props(Not•(\"^a$\"): f; t))"
        );
    }

    #[test]
    fn illegal_bounds_become_type_guards() {
        assert_eq!(simp("len(0, inf)"), Schema::True);
        assert_eq!(simp("len(3, 2)"), other_types(JsonType::Str));
        assert_eq!(simp("xBetw(1, 1)"), other_types(JsonType::Num));
    }

    #[test]
    fn ite_condition_is_bound_once() {
        let d = simplify(
            &Document::from_schema(parse_schema("ifThenElse(type(Num), betw(0, 1), f)").unwrap()),
            OneOfMode::Naive,
        )
        .unwrap();
        assert_eq!(d.env.len(), 1);
        assert_eq!(d.root.to_string(), "(if_1 ∧ betw(0, 1))");
    }
}
