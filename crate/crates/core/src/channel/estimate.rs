//! Pilot-based ML channel estimation.
//!
//! `n_pilots` full OFDM pilot symbols are sent at the start of a frame,
//! carrying the same constant-modulus value `sqrt(pilot_energy)` on every
//! subcarrier. Correlating the received pilots against the known sequence
//! gives the ML estimate `hhat[k] = h[k] + e[k]` with
//! `e[k] ~ CN(0, noise_var / (n_pilots * pilot_energy))`.

use super::FadeVector;
use crate::error::{Error, Result};
use crate::modem::PosteriorParams;
use crate::rng::complex_gaussian;
use num_complex::Complex64;
use rand::Rng;

/// A channel estimate together with its error statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    h_hat: Vec<Complex64>,
    pp: PosteriorParams,
    n_pilots: usize,
    pilot_energy: f64,
}

impl ChannelEstimate {
    /// Wraps an externally produced estimate. `n_pilots` and
    /// `pilot_energy` are synthesized so that the error-variance relation
    /// `err_var = noise_var / (n_pilots * pilot_energy)` still holds
    /// (one pilot of the implied energy; infinite energy when the error
    /// variance is zero).
    pub fn from_parts(h_hat: Vec<Complex64>, pp: PosteriorParams) -> Result<Self> {
        if h_hat.is_empty() {
            return Err(Error::Config("estimate must not be empty".into()));
        }
        let pilot_energy = if pp.err_var() > 0.0 {
            pp.noise_var() / pp.err_var()
        } else {
            f64::INFINITY
        };
        Ok(Self {
            h_hat,
            pp,
            n_pilots: 1,
            pilot_energy,
        })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.h_hat
    }

    pub fn posterior(&self) -> &PosteriorParams {
        &self.pp
    }

    pub fn n_pilots(&self) -> usize {
        self.n_pilots
    }

    pub fn pilot_energy(&self) -> f64 {
        self.pilot_energy
    }

    pub fn len(&self) -> usize {
        self.h_hat.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_hat.is_empty()
    }
}

/// Simulates pilot transmission over `fv` and returns the ML estimate.
///
/// Noise draws are consumed subcarrier-major: for each subcarrier, the
/// `n_pilots` pilot noise samples in order.
pub fn estimate_channel<R: Rng + ?Sized>(
    fv: &FadeVector,
    n_pilots: usize,
    pilot_energy: f64,
    noise_var: f64,
    rng: &mut R,
) -> Result<ChannelEstimate> {
    if n_pilots < 1 {
        return Err(Error::Config(format!(
            "pilot count must be >= 1, got {n_pilots}"
        )));
    }
    if !(pilot_energy.is_finite() && pilot_energy > 0.0) {
        return Err(Error::Config(format!(
            "pilot energy must be positive, got {pilot_energy}"
        )));
    }
    if !(noise_var.is_finite() && noise_var > 0.0) {
        return Err(Error::Config(format!(
            "noise variance must be positive, got {noise_var}"
        )));
    }

    let pilot = Complex64::new(pilot_energy.sqrt(), 0.0);
    let scale = 1.0 / (n_pilots as f64 * pilot_energy);
    let h_hat = fv
        .coefficients()
        .iter()
        .map(|&hk| {
            let mut acc = Complex64::new(0.0, 0.0);
            for _ in 0..n_pilots {
                let received = hk * pilot + complex_gaussian(rng, noise_var);
                acc += pilot.conj() * received;
            }
            acc * scale
        })
        .collect();

    let err_var = noise_var / (n_pilots as f64 * pilot_energy);
    let pp = PosteriorParams::new(fv.var(), err_var, noise_var)?;
    Ok(ChannelEstimate {
        h_hat,
        pp,
        n_pilots,
        pilot_energy,
    })
}

/// Mean and variance of the true fade coefficient on subcarrier `k`
/// conditioned on the estimate.
pub fn posterior_of_true_channel(est: &ChannelEstimate, k: usize) -> (Complex64, f64) {
    let rho = est.pp.rho();
    (est.h_hat[k] * rho, est.pp.posterior_var())
}

/// Scalar link parameters shared by a BER operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    noise_var: f64,
    symbol_energy: f64,
    pilot_energy: f64,
    ebn0_db: f64,
}

impl LinkBudget {
    /// Derives the noise variance from Eb/N0 for a code of rate
    /// `code_rate` and `bits_per_symbol`-bit mapping:
    /// `noise_var = symbol_energy / (rate * bits * ebn0_linear)`.
    /// Pilot and cyclic-prefix overheads are excluded by convention.
    pub fn from_ebn0_db(
        ebn0_db: f64,
        code_rate: f64,
        bits_per_symbol: usize,
        symbol_energy: f64,
        pilot_energy: f64,
    ) -> Result<Self> {
        if !(symbol_energy.is_finite() && symbol_energy > 0.0) {
            return Err(Error::Config(format!(
                "symbol energy must be positive, got {symbol_energy}"
            )));
        }
        if !(pilot_energy.is_finite() && pilot_energy > 0.0) {
            return Err(Error::Config(format!(
                "pilot energy must be positive, got {pilot_energy}"
            )));
        }
        if !(code_rate > 0.0 && code_rate <= 1.0) {
            return Err(Error::Config(format!("invalid code rate {code_rate}")));
        }
        if bits_per_symbol == 0 {
            return Err(Error::Config("bits per symbol must be >= 1".into()));
        }
        if !ebn0_db.is_finite() {
            return Err(Error::Config(format!("invalid Eb/N0 {ebn0_db} dB")));
        }
        let ebn0 = 10f64.powf(ebn0_db / 10.0);
        let noise_var = symbol_energy / (code_rate * bits_per_symbol as f64 * ebn0);
        Ok(Self {
            noise_var,
            symbol_energy,
            pilot_energy,
            ebn0_db,
        })
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn symbol_energy(&self) -> f64 {
        self.symbol_energy
    }

    pub fn pilot_energy(&self) -> f64 {
        self.pilot_energy
    }

    pub fn ebn0_db(&self) -> f64 {
        self.ebn0_db
    }
}
