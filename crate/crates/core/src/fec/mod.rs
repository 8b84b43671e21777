//! Convolutional coding, frame-wide interleaving and soft trellis
//! decoding for the BICM chain.
//!
//! The LLR sign convention used throughout the crate is fixed here:
//! **positive means bit 0**. The demapper produces LLRs under this
//! convention and the trellis decoder consumes them under it.

mod conv;
mod interleaver;
mod trellis;

pub use conv::{conv_encode, ConvCode};
pub use interleaver::{frame_interleaver_seed, Interleaver};
pub use trellis::{trellis_decode, trellis_decode_soft, LlrFrame, LLR_CLAMP};
