//! The guide under `book/`, compiled as doc-tests.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}

#[doc = include_str!("../../../book/src/presentations.md")]
pub mod presentations {}

#[doc = include_str!("../../../book/src/hopf.md")]
pub mod hopf {}

#[doc = include_str!("../../../book/src/drinfeld.md")]
pub mod drinfeld {}

#[doc = include_str!("../../../book/src/classical.md")]
pub mod classical {}

#[doc = include_str!("../../../book/src/pairing.md")]
pub mod pairing {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
