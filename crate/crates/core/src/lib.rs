pub mod algebra;
pub mod json;
pub mod notelim;
pub mod patterns;
pub mod semantics;
pub mod translate;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    struct Overview;
    #[doc = include_str!("../../../book/src/algebra.md")]
    struct Algebra;
    #[doc = include_str!("../../../book/src/translation.md")]
    struct Translation;
    #[doc = include_str!("../../../book/src/negation.md")]
    struct Negation;
    #[doc = include_str!("../../../book/src/patterns.md")]
    struct Patterns;
    #[doc = include_str!("../../../book/src/equivalence.md")]
    struct Equivalence;
}
