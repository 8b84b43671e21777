//! Feedforward convolutional encoding.

use crate::error::{Error, Result};

/// A rate-1/(number of generators) feedforward convolutional code given
/// by its generator polynomials.
///
/// Generators are written in the usual octal convention: the most
/// significant bit taps the current input bit, lower bits tap older
/// inputs. The default code is the (5, 7) constraint-length-3 code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConvCode {
    constraint_length: usize,
    generators: [u32; 2],
}

impl ConvCode {
    pub fn new(constraint_length: usize, generators: [u32; 2]) -> Result<Self> {
        if !(2..=16).contains(&constraint_length) {
            return Err(Error::Config(format!(
                "constraint length {constraint_length} out of range 2..=16"
            )));
        }
        for &g in &generators {
            if g == 0 {
                return Err(Error::Config("generator polynomial is zero".into()));
            }
            if g >> constraint_length != 0 {
                return Err(Error::Config(format!(
                    "generator {g:#o} has degree >= constraint length {constraint_length}"
                )));
            }
        }
        Ok(Self {
            constraint_length,
            generators,
        })
    }

    /// The (5, 7) rate-1/2 code with constraint length 3.
    pub fn rate_half_k3() -> Self {
        Self {
            constraint_length: 3,
            generators: [0o5, 0o7],
        }
    }

    pub fn constraint_length(&self) -> usize {
        self.constraint_length
    }

    pub fn generators(&self) -> [u32; 2] {
        self.generators
    }

    /// Number of delay elements (constraint length minus one).
    pub fn memory(&self) -> usize {
        self.constraint_length - 1
    }

    pub fn num_states(&self) -> usize {
        1 << self.memory()
    }

    /// Zero bits appended to drive the encoder back to state 0.
    pub fn tail_bits(&self) -> usize {
        self.memory()
    }

    /// Code rate as a fraction of one over the generator count.
    pub fn rate(&self) -> f64 {
        1.0 / self.generators.len() as f64
    }

    /// One encoder step: output pair and next state for `bit` applied in
    /// `state`. State keeps the most recent input in its high bit.
    pub(crate) fn step(&self, state: usize, bit: u8) -> (usize, [u8; 2]) {
        let v = ((bit as usize) << self.memory()) | state;
        let out = [
            ((v & self.generators[0] as usize).count_ones() & 1) as u8,
            ((v & self.generators[1] as usize).count_ones() & 1) as u8,
        ];
        (v >> 1, out)
    }
}

/// Encodes `info_bits` with zero-tail termination.
///
/// The encoder starts in the all-zero state; `code.tail_bits()` zeros are
/// appended so the trellis also ends in state 0. Output bits are ordered
/// first-generator then second-generator for every input bit, so the
/// output length is `2 * (info_bits.len() + tail)`.
pub fn conv_encode(info_bits: &[u8], code: &ConvCode) -> Vec<u8> {
    let mut out = Vec::with_capacity(2 * (info_bits.len() + code.tail_bits()));
    let mut state = 0usize;
    let tail = std::iter::repeat(&0u8).take(code.tail_bits());
    for &b in info_bits.iter().chain(tail) {
        debug_assert!(b <= 1, "bits must be 0 or 1");
        let (next, pair) = code.step(state, b & 1);
        out.extend_from_slice(&pair);
        state = next;
    }
    out
}
