//! Desk-scale laboratory for finite-length probabilistic constellation
//! shaping over the nonlinear fiber channel.
//!
//! The crate is organized along the signal path:
//!
//! * [`shaping`] — amplitude distributions, composition quantization, and an
//!   exact constant-composition distribution matcher with rate-loss
//!   accounting.
//! * [`pas`] — probabilistic amplitude shaping: frame assembly onto a
//!   Gray-labelled square QAM constellation, symbol interleavers, and the
//!   temporal-structure statistics of compound CCDM sequences.
//! * [`fiber`] — scalar split-step propagation over a multi-span amplified
//!   WDM link, plus the receiver DSP needed to measure effective SNR.
//! * [`metrics`] — GMI under bit-metric decoding, finite-length achievable
//!   rates, and the fourth-moment statistic of shaped constellations.
//!
//! All operations are pure and seed-deterministic: identical inputs (and
//! seeds) produce bit-identical outputs regardless of scheduling.

pub mod error;
pub mod fiber;
pub mod metrics;
pub mod pas;
pub mod rng;
pub mod shaping;

#[cfg(feature = "oracles")]
pub mod oracles;

pub use error::{Error, Result};
pub use num_complex::Complex64;
