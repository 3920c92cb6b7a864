//! Runs the guide's code blocks as doc-tests.
//!
//! mdbook cannot test snippets against a workspace crate, so each chapter is
//! included as the docs of an empty module and `cargo test --doc` runs them.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/hamiltonians.md")]
pub mod hamiltonians {}
#[doc = include_str!("../../../book/src/ground-state.md")]
pub mod ground_state {}
#[doc = include_str!("../../../book/src/measurements.md")]
pub mod measurements {}
#[doc = include_str!("../../../book/src/thermal.md")]
pub mod thermal {}
#[doc = include_str!("../../../book/src/dynamics.md")]
pub mod dynamics {}
#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}
#[doc = include_str!("../../../book/src/estimation.md")]
pub mod estimation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
