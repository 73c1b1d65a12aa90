//! Numerical laboratory for decay laws of convex gradient flows.

pub mod curves;
mod hermite;
pub mod quad;
pub mod construct;
pub mod flows;
pub mod io;
pub mod spectral;
pub mod verify;
pub mod majorize;
pub mod sqrtcompare;
pub mod suite;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/overview.md")]
    mod overview {}
    #[doc = include_str!("../../../book/src/curves.md")]
    mod curves {}
    #[doc = include_str!("../../../book/src/construct.md")]
    mod construct {}
    #[doc = include_str!("../../../book/src/flows.md")]
    mod flows {}
    #[doc = include_str!("../../../book/src/verify.md")]
    mod verify {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/majorize.md")]
    mod majorize {}
    #[doc = include_str!("../../../book/src/sqrtcompare.md")]
    mod sqrtcompare {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
