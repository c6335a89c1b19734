//! The guide in `book/` compiled as rustdoc, so `cargo test` runs every snippet.
//!
//! mdbook cannot test snippets that depend on workspace crates. Each chapter gets its own
//! module here, which also tells you which chapter a failing doc-test came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/energies.md")]
pub mod energies {}
#[doc = include_str!("../../../book/src/potentials.md")]
pub mod potentials {}
#[doc = include_str!("../../../book/src/reduced.md")]
pub mod reduced {}
#[doc = include_str!("../../../book/src/eigenvalues.md")]
pub mod eigenvalues {}
#[doc = include_str!("../../../book/src/bounds.md")]
pub mod bounds {}
#[doc = include_str!("../../../book/src/sobolev.md")]
pub mod sobolev {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
