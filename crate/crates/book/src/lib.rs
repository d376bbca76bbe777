//! The guide's chapters, compiled so every listing runs as a doctest.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/bits.md")]
pub mod bits {}
#[doc = include_str!("../../../book/src/key-schedule.md")]
pub mod key_schedule {}
#[doc = include_str!("../../../book/src/block-network.md")]
pub mod block_network {}
#[doc = include_str!("../../../book/src/messages.md")]
pub mod messages {}
#[doc = include_str!("../../../book/src/graphical.md")]
pub mod graphical {}
#[doc = include_str!("../../../book/src/voice.md")]
pub mod voice {}
#[doc = include_str!("../../../book/src/service.md")]
pub mod service {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
