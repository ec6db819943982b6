//! Not-elimination: rewriting a document into an equivalent one without
//! `¬`, `⇒`, `ifThenElse` or `⊕`.

mod analyze;
mod encodings;
mod push;
mod simplify;
mod stats;

use thiserror::Error;

use crate::algebra::{check_guarded, AlgebraError, Document, Schema};
use crate::patterns::{PattOfSchemaError, PatternError};

pub use analyze::{analyze_expressibility, Classification, ExpressibilityReport, Finding, NegativeRule};
pub use encodings::{
    counting_env_for_keys, lower_cont_after, neg_items_common, neg_props_keys, neg_req_contains, CaseNotApplicable,
    ItemsCase,
};
pub use push::{not_complete, prune, push_not, DualMap};
pub use simplify::{const_elim, one_of_linear_env, simplify};
pub use stats::{stats, CorpusSummary, SizeRatioRecord};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotElimError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

impl From<PattOfSchemaError> for NotElimError {
    fn from(e: PattOfSchemaError) -> Self {
        match e {
            PattOfSchemaError::Algebra(e) => NotElimError::Algebra(e),
            PattOfSchemaError::Pattern(e) => NotElimError::Pattern(e),
        }
    }
}

/// How `⊕` is expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OneOfMode {
    /// One disjunct per argument; quadratic.
    Naive,
    /// Halving construction over fresh variables; linear.
    #[default]
    Linear,
}

/// The full pipeline: simplify, not-complete, push negation, prune.
pub fn not_eliminate(d: &Document, mode: OneOfMode) -> Result<Document, NotElimError> {
    check_guarded(d)?;
    let simple = simplify(d, mode)?;
    let (complete, duals) = not_complete(&simple);
    let pushed = push_not(&complete, &duals)?;
    Ok(prune(&pushed))
}

/// True when no node is `¬`, `⇒`, `ifThenElse` or `⊕`.
pub fn is_negation_free(d: &Document) -> bool {
    let mut ok = true;
    let mut visit = |s: &Schema| {
        if matches!(
            s,
            Schema::Not(_) | Schema::Implies(..) | Schema::IfThenElse(..) | Schema::OneOf(_)
        ) {
            ok = false;
        }
    };
    d.root.walk(&mut visit);
    for body in d.env.values() {
        body.walk(&mut visit);
    }
    ok
}

/// Checks the shape produced by [`simplify`]: no `items`, multi-pair
/// `props`, multi-type `type`, non-boolean `const`, `enum`, `pNames` or
/// derived operators. Returns the first offending operator.
pub fn check_simplified(d: &Document) -> Result<(), String> {
    let mut bad = None;
    let mut visit = |s: &Schema| {
        let wrong = match s {
            Schema::Items(..) | Schema::Enum(_) | Schema::PNames(_) => true,
            Schema::Implies(..) | Schema::IfThenElse(..) | Schema::OneOf(_) | Schema::Group(_) => true,
            Schema::Type(ts) => ts.len() != 1,
            Schema::Const(v) => v.as_bool().is_none(),
            Schema::Props(pairs, add) => pairs.len() != 1 || **add != Schema::True,
            Schema::PattReq(pairs) => pairs.len() != 1,
            _ => false,
        };
        if wrong && bad.is_none() {
            bad = Some(s.operator_name().to_string());
        }
    };
    d.root.walk(&mut visit);
    for body in d.env.values() {
        body.walk(&mut visit);
    }
    bad.map_or(Ok(()), Err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_document;
    use crate::semantics::{equiv_sample, InstanceGenerator};

    #[test]
    fn recursive_example() {
        let d = parse_document("x defs(x: props(\"^a$\": ¬x; t))").unwrap();
        let out = not_eliminate(&d, OneOfMode::Linear).unwrap();
        assert_eq!(
            out.to_string(),
            "x\ndefs(\n  x: props(\"^a$\": (type(Obj) ∧ req(\"a\") ∧ props(\"^a$\": x; t)); t)\n)"
        );
    }

    #[test]
    fn equivalent_on_samples() {
        for src in [
            "¬(type(Num) ∧ betw(0, 10) ∧ mulOf(2))",
            "⊕(type(Num), betw(0, 1), const(\"a\"), len(0, 3))",
            "¬items(type(Num), type(Str); f)",
            "¬props(\"^a$\": type(Num), \"b\": type(Str); f)",
            "¬pNames(len(0, 2))",
            "ifThenElse(type(Arr), cnt(1, 2, type(Num)), ¬enum(1, \"x\", [null]))",
        ] {
            let d = parse_document(src).unwrap();
            for mode in [OneOfMode::Naive, OneOfMode::Linear] {
                let out = not_eliminate(&d, mode).unwrap();
                assert!(is_negation_free(&out), "{src}: {out}");
                let mut gen = InstanceGenerator::for_documents(&[&d, &out], 7);
                let v = equiv_sample(&d, &out, &mut gen, 400).unwrap();
                assert!(v.is_indistinguishable(), "{src} => {out}: {v:?}");
            }
        }
    }

    #[test]
    fn simplified_shape() {
        let d = parse_document("props(\"^a$\": enum(1, 2), \"^b\": items(type(Num); t); type(Null, Str))").unwrap();
        let s = simplify(&d, OneOfMode::Naive).unwrap();
        assert_eq!(check_simplified(&d), Err("props".into()));
        assert_eq!(check_simplified(&s), Ok(()));
    }
}
