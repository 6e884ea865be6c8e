//! The chapters of the book, so that `cargo test` runs their listings.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/exact.md")]
pub mod exact {}
#[doc = include_str!("../../../book/src/psi.md")]
pub mod psi {}
#[doc = include_str!("../../../book/src/plane.md")]
pub mod plane {}
#[doc = include_str!("../../../book/src/simultaneous.md")]
pub mod simultaneous {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
