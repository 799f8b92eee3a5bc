//! The guide in `book/` and the README, compiled as doc-tests so their
//! examples stay in step with the library.

#[doc = include_str!("../../../README.md")]
pub mod readme {}

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/screens.md")]
pub mod screens {}

#[doc = include_str!("../../../book/src/jacobi.md")]
pub mod jacobi {}

#[doc = include_str!("../../../book/src/models.md")]
pub mod models {}

#[doc = include_str!("../../../book/src/spectral.md")]
pub mod spectral {}

#[doc = include_str!("../../../book/src/discrete.md")]
pub mod discrete {}

#[doc = include_str!("../../../book/src/asymptotics.md")]
pub mod asymptotics {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
