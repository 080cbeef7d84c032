//! Capacity evaluation, rate-region projection and cooperative bin-forward
//! simulation for state-dependent channels whose relay (or cribbing) link is a
//! deterministic function of the inputs and the state.
//!
//! The crate is organised bottom-up:
//!
//! * [`prob`]: labeled joint PMFs and information measures in bits.
//! * [`channel`]: channel and decision definitions, joint assembly.
//! * [`objectives`]: capacity expressions and rate bounds for a fixed decision.
//! * [`optimize`]: multi-start projected subgradient ascent and grid search.
//! * [`fme`]: exact rational Fourier–Motzkin projection of rate systems.
//! * [`sim`]: seeded covering and block-Markov coding experiments.
//! * [`spec_file`]: JSON loaders for channels and decisions.

pub mod channel;
pub mod error;
pub mod fme;
pub mod objectives;
pub mod optimize;
pub mod prob;
pub mod sim;
pub mod spec_file;

pub use error::{Error, Result};
