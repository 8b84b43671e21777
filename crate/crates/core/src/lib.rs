//! Link-level simulation and achievable-rate analysis for BICM OFDM
//! receivers that only hold a noisy, pilot-based channel estimate.
//!
//! The crate covers the full baseband chain in the frequency domain:
//!
//! - [`fec`]: rate-1/2 convolutional coding, frame-wide pseudo-random
//!   interleaving, and soft-input trellis decoding;
//! - [`modem`]: Gray-mapped 16-QAM and soft demapping under three
//!   channel-knowledge models (perfect, mismatched, posterior-averaged);
//! - [`channel`]: Rayleigh block fading, pilot transmission, ML channel
//!   estimation and the posterior statistics of the true channel given
//!   its estimate;
//! - [`capacity`]: per-realization achievable rates for each decoding
//!   metric and Monte Carlo outage-rate aggregation.
//!
//! All randomness is derived from a single 64-bit run seed through the
//! splitting rule in [`rng`], so results are reproducible bit-for-bit
//! regardless of how many worker threads are used.

pub mod capacity;
pub mod channel;
pub mod error;
pub mod fec;
pub mod modem;
pub mod rng;

pub use error::{Error, Result};
