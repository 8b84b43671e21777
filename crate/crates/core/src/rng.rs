//! Deterministic, splittable random number streams.
//!
//! Every random quantity in a run is drawn from a ChaCha8 stream that is
//! fully determined by `(run_seed, domain, index)`. The run seed selects
//! the ChaCha key; the 64-bit stream number carries a domain tag in its
//! top 8 bits and the consumer index (frame number, outer draw number,
//! ...) in the low 56 bits. Workers can therefore process trials in any
//! order, on any number of threads, and produce bit-identical results.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Independent consumers of randomness within one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamDomain {
    /// Per-frame draws on the BER path: fade vector, pilot noise,
    /// payload bits and data noise, in that order.
    Frame = 1,
    /// Per-frame interleaver permutation.
    Interleaver = 2,
    /// Per-outer-draw streams on the outage path: channel estimate
    /// followed by the inner posterior samples.
    Outage = 3,
    /// One-off tool streams (channel export, ad-hoc sampling).
    Scratch = 4,
}

/// Factory for per-`(domain, index)` streams derived from one run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngFactory {
    run_seed: u64,
}

impl RngFactory {
    pub fn new(run_seed: u64) -> Self {
        Self { run_seed }
    }

    pub fn run_seed(&self) -> u64 {
        self.run_seed
    }

    /// Stream for the `index`-th consumer in `domain`.
    pub fn stream(&self, domain: StreamDomain, index: u64) -> ChaCha8Rng {
        assert!(index < 1 << 56, "stream index exceeds 56 bits");
        let mut rng = ChaCha8Rng::seed_from_u64(self.run_seed);
        rng.set_stream(((domain as u64) << 56) | index);
        rng
    }
}

/// One sample of a circularly symmetric complex Gaussian CN(0, `var`).
///
/// Real and imaginary parts are independent N(0, `var`/2).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let sigma = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(sigma * re, sigma * im)
}
