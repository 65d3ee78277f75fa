//! Neuroevolution of recurrent networks whose topology grows and shrinks.
//!
//! - [`netgraph`]: the network genome, its forward pass, mutations and encodings.
//! - [`envs`]: classic-control environments and episode evaluation.
//! - [`evolution`]: the population loop, checkpoints and elite testing.
//! - [`harness`]: the command-line front end.

pub mod codec;
pub mod envs;
pub mod error;
pub mod evolution;
pub mod harness;
pub mod netgraph;
pub mod rng;

pub use error::{Error, Result};
