//! Rate-equivocation regions of discrete memoryless wiretap channels.
//!
//! A wiretap channel pairs Bob's channel `p(y|x)` with Eve's `p(z|x)`. The
//! crate classifies pairs (more capable, less noisy, dominantly symmetric),
//! computes capacities and the secrecy capacity, and traces the boundary of
//! the rate-equivocation region as supporting points
//! `max mu I(V;Y) + I(V;Y|U) - I(V;Z|U)` over chains `U -> V -> X`.
//!
//! All information quantities are in bits.

pub mod binary;
pub mod chain;
pub mod channel;
pub mod classify;
pub mod cli;
pub mod error;
pub mod io;
pub mod oracle;
pub mod probability;
pub mod region;
pub mod search;
pub mod settings;
pub mod symmetry;

pub use error::{Error, Result};
