//! Per-realization achievable rates for the three decoding metrics,
//! assuming Gaussian i.i.d. inputs of power `P` per subcarrier.
//!
//! For the posterior-averaged metric the worst-case auxiliary channel is
//! Gaussian with per-subcarrier mean factor `mu_k`; the binding
//! constraint is the exterior of a disk centered at `a * hhat_k`, and the
//! minimum-norm boundary point `mu_opt = eta * hhat_k` determines the
//! rate. The scalar `a` depends only on `(P, rho, noise_var)` through
//! `lambda = exp(x) E1(x)` with `x = noise_var / (P (1 - rho))`; these
//! formulas take the fade variance as normalized to one, which is how
//! the outage sweeps configure it.
//!
//! For the plain Euclidean metric with an estimate substituted for the
//! channel, the same construction reduces to a half-plane constraint
//! `Re(conj(mu) hhat) >= Re(conj(h) hhat)`, whose minimum-norm point is
//! the projection `max(0, Re(conj(h) hhat)) * hhat / |hhat|^2`. Tests
//! verify this reduction against a direct numerical minimizer.

use super::expint::e1_scaled;
use crate::channel::{ChannelEstimate, FadeVector};
use crate::error::{Error, Result};
use crate::modem::PosteriorParams;
use num_complex::Complex64;

/// Estimates with `1 - rho` below this are treated as perfect CSI: the
/// `lambda`/`a` construction is numerically indeterminate there and the
/// rate limit is the perfect-knowledge formula.
pub const RHO_PERFECT_GUARD: f64 = 1e-9;

/// Inputs shared by all rate computations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateParams {
    /// Gaussian input power per subcarrier.
    pub power: f64,
    /// Data-path noise variance.
    pub noise_var: f64,
    /// Estimation statistics (also used to draw channels in outage runs).
    pub pp: PosteriorParams,
    /// Subcarriers per OFDM symbol.
    pub m: usize,
}

impl RateParams {
    pub fn new(power: f64, noise_var: f64, pp: PosteriorParams, m: usize) -> Result<Self> {
        if !(power.is_finite() && power > 0.0) {
            return Err(Error::Config(format!(
                "input power must be positive, got {power}"
            )));
        }
        if !(noise_var.is_finite() && noise_var > 0.0) {
            return Err(Error::Config(format!(
                "noise variance must be positive, got {noise_var}"
            )));
        }
        if m == 0 {
            return Err(Error::Config("subcarrier count must be >= 1".into()));
        }
        Ok(Self {
            power,
            noise_var,
            pp,
            m,
        })
    }
}

/// Rates of the three decoders for one `(channel, estimate)` realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub c_modified: f64,
    pub c_mismatched: f64,
    pub c_perfect: f64,
}

/// `lambda = exp(x) E1(x)` with `x = noise_var / (P (1 - rho))`.
///
/// Bounded by `1/(x+1) < lambda < 1/x`; in particular `lambda` is in
/// `(0, 1)` whenever `x >= 1`, which holds for every pilot-derived
/// configuration with unit fade variance (`x = N Pt / P + noise/P`).
pub fn lambda_k(power: f64, rho: f64, noise_var: f64) -> Result<f64> {
    check_rate_scalars(power, rho, noise_var)?;
    let x = noise_var / (power * (1.0 - rho));
    e1_scaled(x)
}

/// The disk-center scalar of the constraint set:
/// `a = rho (lambda nv - P(1-rho)) / (lambda nv - P(1-rho)(1-lambda))`.
pub fn a_k(power: f64, rho: f64, noise_var: f64) -> Result<f64> {
    let lambda = lambda_k(power, rho, noise_var)?;
    let spread = power * (1.0 - rho);
    let numerator = rho * (lambda * noise_var - spread);
    let denominator = lambda * noise_var - spread * (1.0 - lambda);
    if denominator.abs() <= 1e-12 * power {
        return Err(Error::Degenerate(format!(
            "a_k denominator {denominator:e} underflows for P={power}, rho={rho}, \
             noise_var={noise_var}, lambda={lambda}"
        )));
    }
    Ok(numerator / denominator)
}

fn check_rate_scalars(power: f64, rho: f64, noise_var: f64) -> Result<()> {
    if !(power.is_finite() && power > 0.0) || !(noise_var.is_finite() && noise_var > 0.0) {
        return Err(Error::Config(format!(
            "invalid rate parameters P={power}, noise_var={noise_var}"
        )));
    }
    if !(rho > 0.0) {
        return Err(Error::Config(format!("rho must be in (0, 1), got {rho}")));
    }
    if rho >= 1.0 - RHO_PERFECT_GUARD {
        return Err(Error::PerfectCsiLimit(rho));
    }
    Ok(())
}

/// Scaling of the minimum-norm boundary point: `mu_opt = eta * hhat`.
///
/// `eta = a -/+ |h - a hhat| / |hhat|` with the sign chosen toward the
/// origin (`-` for `a >= 0`, `+` for `a < 0`).
pub fn eta_modified(h: Complex64, h_hat: Complex64, a: f64) -> Result<f64> {
    let mag = h_hat.norm();
    if mag == 0.0 {
        return Err(Error::Degenerate(
            "estimate coefficient is exactly zero".into(),
        ));
    }
    let radius = (h - h_hat * a).norm() / mag;
    Ok(if a >= 0.0 { a - radius } else { a + radius })
}

/// Achievable rate (bits per OFDM symbol, summed over subcarriers) of
/// the posterior-averaged metric for one realization.
///
/// Inside the perfect-CSI guard band this returns [`rate_perfect`].
pub fn rate_modified(h: &FadeVector, est: &ChannelEstimate, rp: &RateParams) -> Result<f64> {
    let rho = est.posterior().rho();
    if rho >= 1.0 - RHO_PERFECT_GUARD {
        return Ok(rate_perfect(h, rp));
    }
    let a = a_k(rp.power, rho, rp.noise_var)?;
    rate_modified_with_a(h, est, rp, a)
}

/// Same as [`rate_modified`] with `a` precomputed; the Monte Carlo loops
/// reuse one `a` across all realizations of a parameter point.
pub fn rate_modified_with_a(
    h: &FadeVector,
    est: &ChannelEstimate,
    rp: &RateParams,
    a: f64,
) -> Result<f64> {
    check_same_len(h, est)?;
    let mut sum = 0.0;
    for (&hk, &hhk) in h.coefficients().iter().zip(est.coefficients()) {
        let eta = eta_modified(hk, hhk, a)?;
        let signal = rp.power * eta * eta * hhk.norm_sqr();
        let denominator = rp.noise_var + rp.power * hk.norm_sqr() - signal;
        if denominator <= 0.0 {
            return Err(Error::Denominator(format!(
                "noise_var + P(|h|^2 - eta^2 |hhat|^2) = {denominator:e} \
                 for h={hk}, hhat={hhk}, a={a}"
            )));
        }
        sum += (1.0 + signal / denominator).log2();
    }
    Ok(sum)
}

/// Perfect-CSI rate: `sum_k log2(1 + P |h_k|^2 / noise_var)`.
pub fn rate_perfect(h: &FadeVector, rp: &RateParams) -> f64 {
    h.coefficients()
        .iter()
        .map(|hk| (1.0 + rp.power * hk.norm_sqr() / rp.noise_var).log2())
        .sum()
}

/// Achievable rate of the Euclidean metric with the estimate substituted
/// for the channel.
///
/// Per subcarrier the worst-case mean factor is the projection
/// `mu = max(0, Re(conj(h) hhat)) hhat / |hhat|^2`; a zero estimate
/// coefficient contributes zero rate.
pub fn rate_mismatched(h: &FadeVector, est: &ChannelEstimate, rp: &RateParams) -> Result<f64> {
    check_same_len(h, est)?;
    let mut sum = 0.0;
    for (&hk, &hhk) in h.coefficients().iter().zip(est.coefficients()) {
        let mag_sqr = hhk.norm_sqr();
        if mag_sqr == 0.0 {
            continue;
        }
        let aligned = (hk.conj() * hhk).re.max(0.0);
        let mu_sqr = aligned * aligned / mag_sqr;
        let denominator = rp.noise_var + rp.power * (hk.norm_sqr() - mu_sqr);
        debug_assert!(denominator > 0.0, "Cauchy-Schwarz keeps |mu| <= |h|");
        sum += (1.0 + rp.power * mu_sqr / denominator).log2();
    }
    Ok(sum)
}

/// All three decoder rates on shared inputs.
pub fn sample_rates(h: &FadeVector, est: &ChannelEstimate, rp: &RateParams) -> Result<RateSample> {
    Ok(RateSample {
        c_modified: rate_modified(h, est, rp)?,
        c_mismatched: rate_mismatched(h, est, rp)?,
        c_perfect: rate_perfect(h, rp),
    })
}

fn check_same_len(h: &FadeVector, est: &ChannelEstimate) -> Result<()> {
    if h.len() != est.len() {
        return Err(Error::Input(format!(
            "channel has {} subcarriers, estimate has {}",
            h.len(),
            est.len()
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modem::PosteriorParams;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn params(power: f64, noise_var: f64, err_var: f64, m: usize) -> RateParams {
        let pp = PosteriorParams::new(1.0, err_var, noise_var).unwrap();
        RateParams::new(power, noise_var, pp, m).unwrap()
    }

    #[test]
    fn lambda_golden_at_x_one() {
        // P(1-rho) = noise_var makes x = 1: lambda = e * E1(1).
        let lambda = lambda_k(2.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(lambda, 0.596_347_362_323_194_1, max_relative = 1e-12);
    }

    #[test]
    fn lambda_continued_fraction_bounds() {
        // 1/(x+1) < e^x E1(x) < 1/x for all x > 0.
        for i in 0..=120 {
            let x = 10f64.powf(-6.0 + i as f64 * 0.075);
            let lambda = e1_scaled(x).unwrap();
            assert!(lambda > 1.0 / (x + 1.0), "lower bound fails at x={x}");
            assert!(lambda < 1.0 / x, "upper bound fails at x={x}");
        }
    }

    #[test]
    fn lambda_in_unit_interval_for_pilot_configurations() {
        // With unit fade variance and pilot energy equal to data power,
        // x = N + noise_var/P >= 1, hence lambda in (0, 1).
        let mut rng = crate::rng::RngFactory::new(20).stream(crate::rng::StreamDomain::Scratch, 0);
        for _ in 0..10_000 {
            let snr_db = rng.gen_range(-10.0..30.0);
            let power = 10f64.powf(snr_db / 10.0);
            let n_pilots = rng.gen_range(1..=16) as f64;
            let err_var = 1.0 / (n_pilots * power);
            let rho = 1.0 / (1.0 + err_var);
            let lambda = lambda_k(power, rho, 1.0).unwrap();
            assert!(
                lambda > 0.0 && lambda < 1.0,
                "lambda={lambda} at snr={snr_db} N={n_pilots}"
            );
        }
    }

    #[test]
    fn lambda_vanishes_as_rho_approaches_one() {
        // x large: lambda ~ 1/x.
        let rho = 1.0 - 1e-6;
        let lambda = lambda_k(1.0, rho, 1.0).unwrap();
        assert_relative_eq!(lambda, 1e-6, max_relative = 1e-2);
    }

    #[test]
    fn perfect_limit_is_signaled() {
        assert!(matches!(
            lambda_k(1.0, 1.0 - 1e-12, 1.0),
            Err(Error::PerfectCsiLimit(_))
        ));
        assert!(matches!(
            a_k(1.0, 1.0, 1.0),
            Err(Error::PerfectCsiLimit(_))
        ));
    }

    #[test]
    fn a_golden_value() {
        // P = noise_var = 1, rho = 0.5 -> x = 2, lambda = e^2 E1(2);
        // frozen after agreement between this implementation and the
        // quadrature oracle in the integration tests.
        let a = a_k(1.0, 0.5, 1.0).unwrap();
        assert_relative_eq!(a, -1.651_127_922_314_603_3, max_relative = 1e-10);
    }

    #[test]
    fn a_sign_matches_numerator_when_denominator_positive() {
        let mut rng = crate::rng::RngFactory::new(21).stream(crate::rng::StreamDomain::Scratch, 0);
        for _ in 0..5_000 {
            let power = 10f64.powf(rng.gen_range(-1.0..3.0));
            let rho = rng.gen_range(0.05..0.999);
            let noise_var = 10f64.powf(rng.gen_range(-2.0..1.0));
            let lambda = lambda_k(power, rho, noise_var).unwrap();
            let spread = power * (1.0 - rho);
            let denominator = lambda * noise_var - spread * (1.0 - lambda);
            let a = a_k(power, rho, noise_var).unwrap();
            if denominator > 0.0 {
                let numerator = rho * (lambda * noise_var - spread);
                assert_eq!(a > 0.0, numerator > 0.0);
            }
        }
    }

    #[test]
    fn eta_zero_radius_case() {
        // h = a * hhat: the disk radius vanishes and eta = a.
        let hhat = c(0.4, -1.1);
        for a in [-1.5, -0.2] {
            let eta = eta_modified(hhat * a, hhat, a).unwrap();
            assert_relative_eq!(eta, a, max_relative = 1e-12);
        }
    }

    #[test]
    fn eta_boundary_through_origin() {
        // a = 1, hhat = 1, h = 0: radius 1, eta = 0.
        let eta = eta_modified(c(0.0, 0.0), c(1.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(eta, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn eta_negative_a_hand_value() {
        // a = -0.5, hhat = 1, h = 1: eta = -0.5 + 1.5 = 1.
        let eta = eta_modified(c(1.0, 0.0), c(1.0, 0.0), -0.5).unwrap();
        assert_relative_eq!(eta, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn eta_rejects_zero_estimate() {
        assert!(matches!(
            eta_modified(c(1.0, 0.0), c(0.0, 0.0), -1.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn perfect_rate_trivials() {
        let rp = params(1.0, 1.0, 1.0, 2);
        let h = FadeVector::new(vec![c(1.0, 0.0), c(0.0, -1.0)], 1.0).unwrap();
        // P|H|^2/noise = 1 on both subcarriers -> 2 bits.
        assert_relative_eq!(rate_perfect(&h, &rp), 2.0, max_relative = 1e-12);

        let h0 = FadeVector::new(vec![c(1e-200, 0.0); 4], 1.0).unwrap();
        assert!(rate_perfect(&h0, &params(1.0, 1.0, 1.0, 4)) < 1e-10);

        // Common scaling of P and noise leaves the ratio unchanged.
        assert_relative_eq!(
            rate_perfect(&h, &params(2.0, 2.0, 1.0, 2)),
            rate_perfect(&h, &rp),
            max_relative = 1e-12
        );
    }

    #[test]
    fn modified_rate_collapses_to_perfect_when_error_free() {
        let rp = params(1.0, 0.5, 0.0, 3);
        let h = FadeVector::new(vec![c(0.3, 0.4), c(-1.0, 0.2), c(0.9, 0.9)], 1.0).unwrap();
        let est =
            ChannelEstimate::from_parts(h.coefficients().to_vec(), rp.pp).unwrap();
        let modified = rate_modified(&h, &est, &rp).unwrap();
        assert_relative_eq!(modified, rate_perfect(&h, &rp), max_relative = 1e-12);
    }

    #[test]
    fn modified_rate_single_subcarrier_aligned_case() {
        // h = hhat = 1 collapses eta to exactly 1 for any a < 0, giving
        // log2(1 + P/noise_var) = 1 bit at P = noise_var = 1.
        let rp = params(1.0, 1.0, 1.0, 1);
        let h = FadeVector::new(vec![c(1.0, 0.0)], 1.0).unwrap();
        let est = ChannelEstimate::from_parts(vec![c(1.0, 0.0)], rp.pp).unwrap();
        let rate = rate_modified(&h, &est, &rp).unwrap();
        assert_relative_eq!(rate, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn modified_rate_single_subcarrier_golden() {
        // Frozen from this implementation after cross-checking eta and a
        // against the quadrature-oracle route in the integration tests.
        let rp = params(1.0, 1.0, 1.0, 1);
        let h = FadeVector::new(vec![c(0.8, 0.3)], 1.0).unwrap();
        let est = ChannelEstimate::from_parts(vec![c(1.2, -0.5)], rp.pp).unwrap();
        let rate = rate_modified(&h, &est, &rp).unwrap();
        assert_relative_eq!(rate, 0.455_062_747_936_891_1, max_relative = 1e-9);
    }

    #[test]
    fn modified_rate_is_phase_invariant() {
        let rp = params(2.0, 0.7, 0.4, 2);
        let h = vec![c(0.8, 0.3), c(-0.2, 1.1)];
        let hh = vec![c(1.0, -0.1), c(0.4, 0.9)];
        let base = rate_modified(
            &FadeVector::new(h.clone(), 1.0).unwrap(),
            &ChannelEstimate::from_parts(hh.clone(), rp.pp).unwrap(),
            &rp,
        )
        .unwrap();
        let phase = Complex64::from_polar(1.0, 1.234);
        let rotated = rate_modified(
            &FadeVector::new(h.iter().map(|z| z * phase).collect(), 1.0).unwrap(),
            &ChannelEstimate::from_parts(hh.iter().map(|z| z * phase).collect(), rp.pp).unwrap(),
            &rp,
        )
        .unwrap();
        assert_relative_eq!(base, rotated, max_relative = 1e-12);
    }

    #[test]
    fn mismatched_rate_consistent_estimate_is_perfect() {
        let rp = params(1.5, 0.8, 0.3, 2);
        let h = FadeVector::new(vec![c(0.5, -0.6), c(1.2, 0.1)], 1.0).unwrap();
        let est = ChannelEstimate::from_parts(h.coefficients().to_vec(), rp.pp).unwrap();
        assert_relative_eq!(
            rate_mismatched(&h, &est, &rp).unwrap(),
            rate_perfect(&h, &rp),
            max_relative = 1e-12
        );
    }

    #[test]
    fn mismatched_rate_vanishes_when_antialigned() {
        let rp = params(1.0, 1.0, 0.5, 1);
        let h = FadeVector::new(vec![c(-1.0, 0.0)], 1.0).unwrap();
        let est = ChannelEstimate::from_parts(vec![c(1.0, 0.0)], rp.pp).unwrap();
        assert_eq!(rate_mismatched(&h, &est, &rp).unwrap(), 0.0);
    }

    #[test]
    fn rate_ordering_holds_pointwise() {
        // mismatched <= modified <= perfect for every realization.
        let mut rng = crate::rng::RngFactory::new(22).stream(crate::rng::StreamDomain::Scratch, 0);
        let rp = params(2.0, 1.0, 0.5, 1);
        for _ in 0..2_000 {
            let h = FadeVector::new(
                vec![c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))],
                1.0,
            )
            .unwrap();
            let est = ChannelEstimate::from_parts(
                vec![c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))],
                rp.pp,
            )
            .unwrap();
            if est.coefficients()[0].norm() == 0.0 {
                continue;
            }
            let s = sample_rates(&h, &est, &rp).unwrap();
            assert!(s.c_mismatched <= s.c_modified + 1e-9);
            assert!(s.c_modified <= s.c_perfect + 1e-9);
        }
    }
}
