pub mod algebraic;
pub mod cli;
pub mod diophantine;
pub mod hartogs;
pub mod numeric;
pub mod parse;
pub mod theta;

/// Guide chapters, compiled so their snippets run as doc-tests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/numerics.md")]
    mod numerics {}
    #[doc = include_str!("../../../book/src/factoradic.md")]
    mod factoradic {}
    #[doc = include_str!("../../../book/src/theta.md")]
    mod theta {}
    #[doc = include_str!("../../../book/src/counterexample.md")]
    mod counterexample {}
    #[doc = include_str!("../../../book/src/algebraic.md")]
    mod algebraic {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
