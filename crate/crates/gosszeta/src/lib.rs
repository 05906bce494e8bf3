//! Goss zeta functions in characteristic `p`: exact Newton polygons by
//! monic sums, Fredholm determinants and minimal permutations, plus the
//! v-adic and elliptic curve variants. The guide lives in `book/`.

pub mod curve;
pub mod dwork;
pub mod ff;
pub mod minperm;
pub mod padic;
pub mod series;
pub mod vadic;
pub mod zeta;

// The book chapters run as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/digits.md")]
    mod digits {}
    #[doc = include_str!("../../../book/src/series.md")]
    mod series {}
    #[doc = include_str!("../../../book/src/fredholm.md")]
    mod fredholm {}
    #[doc = include_str!("../../../book/src/minperm.md")]
    mod minperm {}
    #[doc = include_str!("../../../book/src/direct.md")]
    mod direct {}
    #[doc = include_str!("../../../book/src/vadic.md")]
    mod vadic {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
