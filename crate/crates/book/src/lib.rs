//! Compiles and runs the Rust listings of the guide in `book/`.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/dataset.md")]
pub mod dataset {}
#[doc = include_str!("../../../book/src/relevance.md")]
pub mod relevance {}
#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}
#[doc = include_str!("../../../book/src/synthetic.md")]
pub mod synthetic {}
#[doc = include_str!("../../../book/src/protocol.md")]
pub mod protocol {}
#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
