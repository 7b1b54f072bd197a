//! Harris Hawks optimization for joint transmit/reflect beamforming in an
//! IRS-aided MISO downlink.
//!
//! - [`hho`]: problem-agnostic Harris Hawks Optimizer (maximization).
//! - [`channel`]: geometry, path loss, Rayleigh and line-of-sight channels.
//! - [`problem`]: real encoding of `(w, θ)` and the penalized fitness.
//! - [`baselines`]: no-IRS MRT, alternating optimization and exact oracles.
//! - [`experiments`]: sweeps, convergence, timing and oracle harnesses that
//!   write CSV.
//!
//! Batch work (hawk updates, experiment cells) runs on rayon when the
//! `parallel` feature is on; results do not depend on the schedule.

pub mod baselines;
pub mod channel;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod hho;
pub mod problem;
pub mod rng;

pub use error::{Error, Result};
pub use exec::Execution;
