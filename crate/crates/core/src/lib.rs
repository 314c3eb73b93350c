//! Margenau-Hill work quasiprobabilities for a driven spin-1 system,
//! reconstructed from weak two-point measurements and checked against a
//! direct Kirkwood-Dirac evaluation.
//!
//! The guide in `book/` walks through each module; its code blocks run as
//! doc-tests of this crate.

pub mod analysis;
pub mod appshell;
pub mod explore;
pub mod model;
pub mod propagate;
pub mod qmath;
pub mod schemes;
pub mod tol;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/quasiprobabilities.md")]
    mod quasiprobabilities {}
    #[doc = include_str!("../../../book/src/measurement-schemes.md")]
    mod measurement_schemes {}
    #[doc = include_str!("../../../book/src/driven-qutrit.md")]
    mod driven_qutrit {}
    #[doc = include_str!("../../../book/src/work.md")]
    mod work {}
    #[doc = include_str!("../../../book/src/sweep.md")]
    mod sweep {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
