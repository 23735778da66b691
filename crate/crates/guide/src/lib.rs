//! Book chapters, included so their snippets are doc-tested.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/families.md")]
pub mod families {}
#[doc = include_str!("../../../book/src/riccati.md")]
pub mod riccati {}
#[doc = include_str!("../../../book/src/quotient.md")]
pub mod quotient {}
#[doc = include_str!("../../../book/src/sweeps.md")]
pub mod sweeps {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../book/src/outputs.md")]
pub mod outputs {}
