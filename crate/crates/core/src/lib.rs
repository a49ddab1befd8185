//! Coverage and rate analysis for two-hop self-backhauled millimeter wave
//! cellular networks under static/dynamic TDD with synchronized or
//! unsynchronized access-backhaul scheduling.
//!
//! The crate has two halves that check each other:
//!
//! * an analytical engine built on stochastic geometry — Poisson network
//!   model, load distributions, TDD frame arithmetic, Laplace transforms of
//!   interference, SINR coverage curves and mean user rates
//!   ([`netmodel`], [`loadmodel`], [`frame`], [`interference`], [`coverage`],
//!   [`rate`]);
//! * an independent spatial Monte Carlo simulator that realizes networks on a
//!   torus, schedules TDD frames per base station and measures empirical SINR
//!   and rates ([`mcsim`]).
//!
//! All internal computation is in SI units (meters, hertz, watts, points per
//! square meter); dB, dBm, degrees and per-km² values appear only at the
//! configuration boundary.

pub mod coverage;
pub mod error;
pub mod frame;
pub mod interference;
pub mod loadmodel;
pub mod mcsim;
pub mod netmodel;
pub mod quad;
pub mod rate;

pub use error::Error;
pub use netmodel::{NetworkParams, NetworkParamsConfig};

/// Crate version string stamped into CSV output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
