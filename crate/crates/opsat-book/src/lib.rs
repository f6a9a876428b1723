//! Runs every code block of the book as a doc-test.
//!
//! mdBook renders the chapters; it does not compile them. Including each
//! chapter as module documentation makes `cargo test --doc` build and run
//! the snippets against the current `opsat` API, so the book cannot drift
//! from the library. A failing doc-test names the chapter via its module.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/instances.md")]
pub mod instances {}

#[doc = include_str!("../../../book/src/representation.md")]
pub mod representation {}

#[doc = include_str!("../../../book/src/operators.md")]
pub mod operators {}

#[doc = include_str!("../../../book/src/magic_square.md")]
pub mod magic_square {}

#[doc = include_str!("../../../book/src/classification.md")]
pub mod classification {}

#[doc = include_str!("../../../book/src/solvers.md")]
pub mod solvers {}

#[doc = include_str!("../../../book/src/gadgets.md")]
pub mod gadgets {}

#[doc = include_str!("../../../book/src/closure.md")]
pub mod closure {}

#[doc = include_str!("../../../book/src/contextuality.md")]
pub mod contextuality {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
