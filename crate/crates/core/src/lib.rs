//! Value-bias audits for reward models and language models.
//!
//! The crate works on per-token score tables: one file per (model, prompt)
//! holding either reward-model scores or next-token log-probabilities for
//! single-token responses. From those it computes
//!
//! - construct-level rank statistics over psycholinguistic lexicons
//!   ([`corpus`], [`stats`], [`analysis`]),
//! - implicit-reward measures between two language models, including the
//!   mixture-weighted log-ratio ([`measures`]),
//! - permutation, Welch and rank-correlation tests with multiple-comparison
//!   adjustment ([`stats`]),
//! - a synthetic boost-recovery check for the measures ([`analysis`]).
//!
//! The `valuebias` binary exposes the same pipelines on the command line
//! (see [`cli`]); the `examples/` directory has one runnable program per
//! capability.

pub mod analysis;
pub mod cli;
pub mod corpus;
pub mod error;
pub mod measures;
pub mod prompts;
pub mod scoretable;
pub mod stats;
pub mod vocab;

pub use error::{Error, Result};
