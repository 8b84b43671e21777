//! Rayleigh block fading in the post-FFT frequency domain.
//!
//! One [`FadeVector`] holds the per-subcarrier complex fade coefficients
//! of a single frame; the channel is constant over the frame and
//! independent across frames. Subcarriers are i.i.d.; imported vectors
//! may carry correlation.

use crate::error::{Error, Result};
use crate::rng::complex_gaussian;
use num_complex::Complex64;
use rand::Rng;

/// Per-subcarrier fade coefficients together with the ensemble variance
/// they were (or are assumed to have been) drawn with.
#[derive(Debug, Clone, PartialEq)]
pub struct FadeVector {
    h: Vec<Complex64>,
    var: f64,
}

impl FadeVector {
    pub fn new(h: Vec<Complex64>, var: f64) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::Config("fade vector must not be empty".into()));
        }
        if !(var.is_finite() && var > 0.0) {
            return Err(Error::Config(format!(
                "fade variance must be positive, got {var}"
            )));
        }
        if let Some(i) = h.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Input(format!("non-finite fade coefficient at {i}")));
        }
        Ok(Self { h, var })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.h
    }

    pub fn var(&self) -> f64 {
        self.var
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }
}

/// Draws `m` i.i.d. CN(0, `var`) fade coefficients.
pub fn draw_rayleigh<R: Rng + ?Sized>(m: usize, var: f64, rng: &mut R) -> Result<FadeVector> {
    if m == 0 {
        return Err(Error::Config("subcarrier count must be >= 1".into()));
    }
    if !(var.is_finite() && var > 0.0) {
        return Err(Error::Config(format!(
            "fade variance must be positive, got {var}"
        )));
    }
    let h = (0..m).map(|_| complex_gaussian(rng, var)).collect();
    Ok(FadeVector { h, var })
}

/// `y[k] = h[k] * s[k] + z[k]` with `z[k] ~ CN(0, noise_var)`.
pub fn apply_channel<R: Rng + ?Sized>(
    s: &[Complex64],
    fv: &FadeVector,
    noise_var: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    if s.len() != fv.len() {
        return Err(Error::Input(format!(
            "symbol block length {} does not match {} subcarriers",
            s.len(),
            fv.len()
        )));
    }
    Ok(s.iter()
        .zip(fv.coefficients())
        .map(|(&sk, &hk)| hk * sk + complex_gaussian(rng, noise_var))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{RngFactory, StreamDomain};

    fn scratch(i: u64) -> impl Rng {
        RngFactory::new(0xFEED).stream(StreamDomain::Scratch, i)
    }

    #[test]
    fn empirical_power_matches_variance() {
        let mut rng = scratch(0);
        let n = 100_000;
        let fv = draw_rayleigh(n, 1.0, &mut rng).unwrap();
        let mean: f64 = fv.coefficients().iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((0.99..=1.01).contains(&mean), "mean |H|^2 = {mean}");
    }

    #[test]
    fn components_carry_half_the_variance() {
        let mut rng = scratch(1);
        let fv = draw_rayleigh(200_000, 2.0, &mut rng).unwrap();
        let n = fv.len() as f64;
        let re: f64 = fv.coefficients().iter().map(|z| z.re * z.re).sum::<f64>() / n;
        let im: f64 = fv.coefficients().iter().map(|z| z.im * z.im).sum::<f64>() / n;
        assert!((re - 1.0).abs() < 0.02, "re var = {re}");
        assert!((im - 1.0).abs() < 0.02, "im var = {im}");
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let a = draw_rayleigh(64, 1.0, &mut scratch(2)).unwrap();
        let b = draw_rayleigh(64, 1.0, &mut scratch(2)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn noiseless_limit_passes_signal_through() {
        let mut rng = scratch(3);
        let fv = draw_rayleigh(16, 1.0, &mut rng).unwrap();
        let s: Vec<Complex64> = (0..16)
            .map(|i| Complex64::new(i as f64 * 0.1, -(i as f64) * 0.05))
            .collect();
        let y = apply_channel(&s, &fv, 1e-30, &mut rng).unwrap();
        for ((yk, sk), hk) in y.iter().zip(&s).zip(fv.coefficients()) {
            assert!((yk - hk * sk).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_signal_yields_pure_noise() {
        let mut rng = scratch(4);
        let m = 50_000;
        let fv = draw_rayleigh(m, 1.0, &mut rng).unwrap();
        let s = vec![Complex64::new(0.0, 0.0); m];
        let y = apply_channel(&s, &fv, 0.25, &mut rng).unwrap();
        let p: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / m as f64;
        assert!((p - 0.25).abs() < 0.01, "noise power = {p}");
    }

    #[test]
    fn output_power_obeys_the_moment_identity() {
        // E|y|^2 = var_h * Es + noise_var for symbols of energy Es.
        use crate::modem::{qam_map, QamConstellation};
        let cst = QamConstellation::qam16(1.0).unwrap();
        let mut rng = scratch(5);
        let m = 40_000;
        let fv = draw_rayleigh(m, 1.0, &mut rng).unwrap();
        let bits: Vec<u8> = (0..4 * m).map(|_| rng.gen_range(0..=1) as u8).collect();
        let s = qam_map(&bits, &cst).unwrap();
        let y = apply_channel(&s, &fv, 0.5, &mut rng).unwrap();
        let p: f64 = y.iter().map(|z| z.norm_sqr()).sum::<f64>() / m as f64;
        assert!((p - 1.5).abs() < 0.05, "output power = {p}");
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let mut rng = scratch(6);
        let fv = draw_rayleigh(4, 1.0, &mut rng).unwrap();
        let s = vec![Complex64::new(1.0, 0.0); 5];
        assert!(apply_channel(&s, &fv, 0.1, &mut rng).is_err());
    }

    #[test]
    fn invalid_parameters_are_config_errors() {
        let mut rng = scratch(7);
        assert!(draw_rayleigh(0, 1.0, &mut rng).is_err());
        assert!(draw_rayleigh(4, 0.0, &mut rng).is_err());
        assert!(draw_rayleigh(4, -1.0, &mut rng).is_err());
    }
}
