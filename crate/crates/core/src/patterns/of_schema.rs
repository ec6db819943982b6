//! The language of strings accepted by a schema, as a pattern.

use thiserror::Error;

use super::{keykey, CharClass, Pattern, PatternError, Regex};
use crate::algebra::{expand_derived, AlgebraError, Env, Schema, Upper};
use crate::json::{JsonType, JsonValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PattOfSchemaError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// A pattern whose language is exactly the set of strings satisfying `s`
/// under `env`. Typed operators on other types accept every string and are
/// not looked into, so each variable is expanded at most once per chain.
pub fn patt_of_schema(s: &Schema, env: &Env) -> Result<Pattern, PattOfSchemaError> {
    let mut stack = Vec::new();
    go(&expand_derived(s), env, &mut stack)
}

/// [`patt_of_schema`] compiled into a [`Regex`].
pub fn regex_of_schema(s: &Schema, env: &Env) -> Result<Regex, PattOfSchemaError> {
    Ok(Regex::new(patt_of_schema(s, env)?)?)
}

fn and(p: Pattern, q: Pattern) -> Pattern {
    let top = Pattern::top();
    if p == top {
        q
    } else if q == top {
        p
    } else if p == Pattern::Empty || q == Pattern::Empty {
        Pattern::Empty
    } else {
        Pattern::and(p, q)
    }
}

fn or(items: Vec<Pattern>) -> Pattern {
    let top = Pattern::top();
    if items.contains(&top) {
        return top;
    }
    let mut out: Vec<Pattern> = Vec::new();
    for p in items {
        if p != Pattern::Empty && !out.contains(&p) {
            out.push(p);
        }
    }
    Pattern::union(out)
}

fn not(p: Pattern) -> Pattern {
    if p == Pattern::top() {
        Pattern::Empty
    } else if p == Pattern::Empty {
        Pattern::top()
    } else {
        Pattern::not(p)
    }
}

fn length_pattern(l: u64, u: Upper) -> Result<Pattern, PattOfSchemaError> {
    let limit = 1000u64;
    let hi = match u {
        Upper::Fin(j) if j < l => return Ok(Pattern::Empty),
        Upper::Fin(j) => Some(j),
        Upper::Inf => None,
    };
    if l > limit || hi.is_some_and(|h| h > limit) {
        return Err(PatternError::LimitExceeded(format!("length bound above {limit}")).into());
    }
    if l == 0 && hi.is_none() {
        return Ok(Pattern::top());
    }
    Ok(Pattern::concat(vec![
        Pattern::AnchorStart,
        Pattern::Repeat(
            Box::new(Pattern::Class(CharClass::any())),
            l as u32,
            hi.map(|h| h as u32),
        ),
        Pattern::AnchorEnd,
    ]))
}

fn go(s: &Schema, env: &Env, stack: &mut Vec<String>) -> Result<Pattern, PattOfSchemaError> {
    Ok(match s {
        Schema::Type(ts) => {
            if ts.contains(&JsonType::Str) {
                Pattern::top()
            } else {
                Pattern::Empty
            }
        }
        Schema::Const(JsonValue::Str(k)) => keykey(k),
        Schema::Const(_) => Pattern::Empty,
        Schema::Pattern(r) => r.pattern().clone(),
        Schema::Len(l, u) => length_pattern(*l, *u)?,
        Schema::True => Pattern::top(),
        Schema::False => Pattern::Empty,
        Schema::Not(t) => not(go(t, env, stack)?),
        Schema::And(v) => {
            let mut acc = Pattern::top();
            for t in v {
                acc = and(acc, go(t, env, stack)?);
            }
            acc
        }
        Schema::Or(v) => or(v.iter().map(|t| go(t, env, stack)).collect::<Result<_, _>>()?),
        Schema::Ref(x) => {
            let body = env.get(x).ok_or_else(|| AlgebraError::NotClosing(x.clone()))?;
            if let Some(pos) = stack.iter().position(|y| y == x) {
                let mut cycle = stack[pos..].to_vec();
                cycle.push(x.clone());
                return Err(AlgebraError::Unguarded(cycle).into());
            }
            stack.push(x.clone());
            let r = go(&expand_derived(body), env, stack);
            stack.pop();
            r?
        }
        // every remaining operator is conditional on a type other than Str
        _ => Pattern::top(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_document, parse_schema};

    fn lang(src: &str) -> Regex {
        regex_of_schema(&parse_schema(src).unwrap(), &Env::new()).unwrap()
    }

    #[test]
    fn appendix_rules() {
        assert_eq!(
            patt_of_schema(&parse_schema("mulOf(3)").unwrap(), &Env::new()).unwrap(),
            Pattern::top()
        );
        assert_eq!(
            patt_of_schema(&parse_schema("type(Num)").unwrap(), &Env::new()).unwrap(),
            Pattern::Empty
        );
        let r = lang("(pattern(\"^x\") ∨ const(\"zz\"))");
        for (s, want) in [("x", true), ("xyz", true), ("zz", true), ("zzz", false), ("ax", false)] {
            assert_eq!(r.is_match(s), want, "{s}");
        }
    }

    #[test]
    fn length_and_negation() {
        let r = lang("¬len(2, 3)");
        assert!(r.is_match("a") && r.is_match("abcd") && !r.is_match("ab") && !r.is_match("a\nb"));
        let r = lang("(type(Str) ∧ ¬enum(\"a\", 1))");
        assert!(!r.is_match("a") && r.is_match("b"));
    }

    #[test]
    fn variables_are_expanded_once() {
        let d = parse_document("x defs(x: (y ∨ pattern(\"^b\")), y: const(\"a\"))").unwrap();
        let r = regex_of_schema(&d.root, &d.env).unwrap();
        assert!(r.is_match("a") && r.is_match("bc") && !r.is_match("c"));
        let d = parse_document("x defs(x: ¬x)").unwrap();
        assert!(matches!(
            patt_of_schema(&d.root, &d.env),
            Err(PattOfSchemaError::Algebra(AlgebraError::Unguarded(_)))
        ));
    }
}
