//! 16-QAM with a fixed Gray labeling.
//!
//! A symbol's four bits `(b0, b1, b2, b3)` split into two pairs:
//! `(b0, b1)` selects the in-phase level and `(b2, b3)` the quadrature
//! level, each through the per-axis Gray table
//!
//! ```text
//! 00 -> -3    01 -> -1    11 -> +1    10 -> +3
//! ```
//!
//! Levels are scaled by `sqrt(Es / 10)` so the mean symbol energy over
//! the 16 equiprobable points is exactly `Es`.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Gray-labeled 16-QAM constellation with configurable mean energy.
#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    points: [Complex64; 16],
    symbol_energy: f64,
}

fn gray_level(hi: u8, lo: u8) -> f64 {
    match (hi, lo) {
        (0, 0) => -3.0,
        (0, 1) => -1.0,
        (1, 1) => 1.0,
        (1, 0) => 3.0,
        _ => unreachable!("bits are 0/1"),
    }
}

impl QamConstellation {
    pub const ORDER: usize = 16;
    pub const BITS_PER_SYMBOL: usize = 4;

    /// Builds the constellation for a mean symbol energy `symbol_energy`.
    pub fn qam16(symbol_energy: f64) -> Result<Self> {
        if !(symbol_energy.is_finite() && symbol_energy > 0.0) {
            return Err(Error::Config(format!(
                "symbol energy must be positive, got {symbol_energy}"
            )));
        }
        let scale = (symbol_energy / 10.0).sqrt();
        let mut points = [Complex64::new(0.0, 0.0); 16];
        for (label, p) in points.iter_mut().enumerate() {
            let b = Self::label_bits(label);
            *p = Complex64::new(gray_level(b[0], b[1]), gray_level(b[2], b[3])) * scale;
        }
        let c = Self {
            points,
            symbol_energy,
        };
        c.check_invariants()?;
        Ok(c)
    }

    fn check_invariants(&self) -> Result<()> {
        let mean: f64 =
            self.points.iter().map(|p| p.norm_sqr()).sum::<f64>() / Self::ORDER as f64;
        if (mean - self.symbol_energy).abs() > 1e-12 * self.symbol_energy {
            return Err(Error::Config(format!(
                "mean constellation energy {mean} deviates from {}",
                self.symbol_energy
            )));
        }
        // Grid neighbors must differ in exactly one bit.
        let spacing = 2.0 * (self.symbol_energy / 10.0).sqrt();
        let tol = 1e-9 * spacing;
        for i in 0..Self::ORDER {
            for j in (i + 1)..Self::ORDER {
                let d = self.points[i] - self.points[j];
                let horizontal = (d.re.abs() - spacing).abs() < tol && d.im.abs() < tol;
                let vertical = (d.im.abs() - spacing).abs() < tol && d.re.abs() < tol;
                if (horizontal || vertical)
                    && ((i ^ j) as u32).count_ones() != 1
                {
                    return Err(Error::Config(format!(
                        "labels {i:04b} and {j:04b} are grid neighbors but not Gray-adjacent"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn symbol_energy(&self) -> f64 {
        self.symbol_energy
    }

    pub fn points(&self) -> &[Complex64; 16] {
        &self.points
    }

    /// Point for a 4-bit label (`b0` in the most significant position).
    pub fn point(&self, label: usize) -> Complex64 {
        self.points[label]
    }

    /// Bits of a label, most significant first.
    pub fn label_bits(label: usize) -> [u8; 4] {
        [
            ((label >> 3) & 1) as u8,
            ((label >> 2) & 1) as u8,
            ((label >> 1) & 1) as u8,
            (label & 1) as u8,
        ]
    }

    /// Label of a 4-bit group.
    pub fn bits_to_label(bits: &[u8]) -> usize {
        debug_assert_eq!(bits.len(), 4);
        ((bits[0] as usize) << 3)
            | ((bits[1] as usize) << 2)
            | ((bits[2] as usize) << 1)
            | bits[3] as usize
    }
}

/// Maps a bit sequence to symbols, four bits per symbol.
pub fn qam_map(bits: &[u8], c: &QamConstellation) -> Result<Vec<Complex64>> {
    if bits.len() % QamConstellation::BITS_PER_SYMBOL != 0 {
        return Err(Error::Input(format!(
            "bit count {} is not a multiple of {}",
            bits.len(),
            QamConstellation::BITS_PER_SYMBOL
        )));
    }
    Ok(bits
        .chunks_exact(QamConstellation::BITS_PER_SYMBOL)
        .map(|g| c.point(QamConstellation::bits_to_label(g)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn all_zero_label_is_lower_left_corner() {
        let c = QamConstellation::qam16(1.0).unwrap();
        let s = qam_map(&[0, 0, 0, 0], &c).unwrap()[0];
        let expect = Complex64::new(-3.0, -3.0) / 10f64.sqrt();
        assert_relative_eq!(s.re, expect.re, max_relative = 1e-15);
        assert_relative_eq!(s.im, expect.im, max_relative = 1e-15);
    }

    #[test]
    fn labeling_is_a_bijection() {
        let c = QamConstellation::qam16(1.0).unwrap();
        for i in 0..16 {
            for j in (i + 1)..16 {
                assert_ne!(c.point(i), c.point(j));
            }
        }
    }

    #[test]
    fn mean_energy_is_exact() {
        for es in [1.0, 0.5, 7.25] {
            let c = QamConstellation::qam16(es).unwrap();
            let mean: f64 = c.points().iter().map(|p| p.norm_sqr()).sum::<f64>() / 16.0;
            assert_relative_eq!(mean, es, max_relative = 1e-13);
        }
    }

    #[test]
    fn map_rejects_ragged_input() {
        let c = QamConstellation::qam16(1.0).unwrap();
        assert!(qam_map(&[0, 1, 0], &c).is_err());
    }

    #[test]
    fn rejects_non_positive_energy() {
        assert!(QamConstellation::qam16(0.0).is_err());
        assert!(QamConstellation::qam16(-1.0).is_err());
    }
}
