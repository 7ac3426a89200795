//! Exact Lagrangian dual bounds for integer programs whose lattice sets are
//! cut out by irrational (quadratic-surd) hyperplanes.

pub mod arith;
pub mod dual;
pub mod error;
pub mod hull;
pub mod lp;
pub mod oracle;
pub mod relax;
pub mod conditions;
pub mod model;

pub use arith::{Quad, Rational};
pub use error::{Error, Result};
pub use model::{builtin, ExtReal, Problem};

/// Book chapters, compiled as doctests so the snippets stay in sync.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/quadratic-surds.md")]
    pub mod quadratic_surds {}
    #[doc = include_str!("../../../book/src/problems.md")]
    pub mod problems {}
    #[doc = include_str!("../../../book/src/dual.md")]
    pub mod dual {}
    #[doc = include_str!("../../../book/src/hulls.md")]
    pub mod hulls {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    pub mod certificates {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
