//! Age-of-information (AoI) evaluation for TDMA uplinks with and without a
//! cognitive-radio NOMA add-on.
//!
//! Two independent engines are provided:
//!
//! - [`analytic`]: closed-form average AoI for the four schemes
//!   (TDMA-NRT, TDMA-RT, NOMA-NRT, NOMA-RT), exposing every intermediate so
//!   the results can be cross-checked against the Markov-chain machinery in
//!   [`markov`].
//! - [`sim`]: a seedable, slot-accurate Monte Carlo simulator with exact
//!   sawtooth integration of the instantaneous age.
//!
//! [`harness`] combines both into comparison rows, sweeps and CSV/JSON output.
//! All powers in the library are linear and noise-normalized; decibels only
//! appear at the [`harness`] boundary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod harness;
pub mod markov;
pub mod model;
pub mod sim;

pub use error::{Error, Result};
pub use model::{LinkStats, RateThreshold, SchemeKind, SystemConfig};
