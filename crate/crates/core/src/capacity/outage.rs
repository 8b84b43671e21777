//! Monte Carlo outage-rate estimation.
//!
//! Two nested loops: the outer loop draws channel estimates from their
//! marginal CN(0, prior_var + err_var) law; the inner loop draws true
//! channels from the posterior given each estimate and evaluates the
//! per-realization rate of every requested decoder on shared draws.
//! The empirical gamma-quantile of the inner sample is the outage rate
//! for that estimate; outage rates are then averaged over estimates.
//!
//! Quantile convention: with the inner sample sorted ascending, the
//! outage rate is the order statistic at 1-based index
//! `ceil(gamma * n_inner)` (the lower value on ties). Any consistent
//! empirical convention converges to the same limit; this one is
//! deterministic and easy to reason about.

use super::rates::{
    a_k, rate_mismatched, rate_modified_with_a, rate_perfect, RateParams, RHO_PERFECT_GUARD,
};
use crate::channel::{ChannelEstimate, FadeVector};
use crate::error::{Error, Result};
use crate::modem::MetricMode;
use crate::rng::{complex_gaussian, RngFactory, StreamDomain};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

/// Mean outage rate and its standard error for one decoder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderOutage {
    pub mode: MetricMode,
    pub mean_rate_bits: f64,
    pub std_err: f64,
}

/// Aggregated result of [`expected_outage_rate`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutageResult {
    pub gamma: f64,
    pub n_outer: usize,
    pub n_inner: usize,
    pub decoders: Vec<DecoderOutage>,
    /// Degenerate draws that were rejected and redrawn.
    pub rejects: u64,
    /// Rate summands whose variance term failed the positivity check.
    pub denominator_violations: u64,
    /// Total draws attempted (outer estimates plus inner channels).
    pub total_draws: u64,
}

impl OutageResult {
    pub fn decoder(&self, mode: MetricMode) -> Option<&DecoderOutage> {
        self.decoders.iter().find(|d| d.mode == mode)
    }

    /// Rejected fraction over all attempted draws.
    pub fn reject_rate(&self) -> f64 {
        if self.total_draws == 0 {
            0.0
        } else {
            self.rejects as f64 / self.total_draws as f64
        }
    }
}

/// Largest rate `r` in the empirical sample such that the fraction of
/// draws below `r` does not exceed `gamma`; see the module docs for the
/// exact order-statistic convention.
fn empirical_quantile(sorted: &[f64], gamma: f64) -> f64 {
    let n = sorted.len();
    let idx = (gamma * n as f64).ceil().max(1.0) as usize;
    sorted[idx.min(n) - 1]
}

/// Outage rate for one fixed estimate: draws `n_inner` true channels
/// from the posterior given `est`, evaluates `rate_fn` on each, and
/// returns the empirical `gamma`-quantile.
pub fn outage_rate<F, R>(
    mut rate_fn: F,
    est: &ChannelEstimate,
    gamma: f64,
    n_inner: usize,
    rng: &mut R,
) -> Result<f64>
where
    F: FnMut(&FadeVector) -> Result<f64>,
    R: Rng + ?Sized,
{
    check_gamma(gamma)?;
    if n_inner < 100 {
        return Err(Error::Config(format!(
            "n_inner must be >= 100, got {n_inner}"
        )));
    }
    let mut rates = Vec::with_capacity(n_inner);
    for _ in 0..n_inner {
        let fv = draw_posterior_channel(est, rng)?;
        rates.push(rate_fn(&fv)?);
    }
    rates.sort_by(|a, b| a.partial_cmp(b).expect("rates are finite"));
    Ok(empirical_quantile(&rates, gamma))
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma.is_finite() && gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Config(format!(
            "outage probability must be in (0, 1), got {gamma}"
        )));
    }
    Ok(())
}

/// One posterior draw: `h_k ~ CN(rho * hhat_k, rho * err_var)`.
pub fn draw_posterior_channel<R: Rng + ?Sized>(
    est: &ChannelEstimate,
    rng: &mut R,
) -> Result<FadeVector> {
    let pp = est.posterior();
    let var = pp.posterior_var();
    let h = est
        .coefficients()
        .iter()
        .map(|&hh| {
            let mean = hh * pp.rho();
            if var > 0.0 {
                mean + complex_gaussian(rng, var)
            } else {
                mean
            }
        })
        .collect();
    FadeVector::new(h, pp.prior_var())
}

struct OuterDraw {
    rates: Vec<f64>, // one outage rate per requested decoder
    rejects: u64,
    violations: u64,
    draws: u64,
}

/// Mean outage rates over `n_outer` estimate draws, with all requested
/// decoders evaluated on shared randomness for variance reduction.
///
/// Bit-reproducible for a fixed `run_seed` regardless of thread count:
/// outer draw `i` consumes only the `(Outage, i)` stream.
pub fn expected_outage_rate(
    decoders: &[MetricMode],
    rp: &RateParams,
    gamma: f64,
    n_outer: usize,
    n_inner: usize,
    run_seed: u64,
) -> Result<OutageResult> {
    check_gamma(gamma)?;
    if n_outer < 1 {
        return Err(Error::Config("n_outer must be >= 1".into()));
    }
    if n_inner < 100 {
        return Err(Error::Config(format!(
            "n_inner must be >= 100, got {n_inner}"
        )));
    }
    if decoders.is_empty() {
        return Err(Error::Config("decoder set must not be empty".into()));
    }

    let pp = rp.pp;
    let marginal_var = pp.prior_var() + pp.err_var();
    // `a` depends only on the parameter point; compute it once. Inside
    // the perfect-CSI guard band the modified rate falls back to the
    // perfect formula and `a` is unused.
    let wants_modified = decoders.contains(&MetricMode::Modified);
    let rho = pp.rho();
    let a = if wants_modified && rho < 1.0 - RHO_PERFECT_GUARD {
        Some(a_k(rp.power, rho, rp.noise_var)?)
    } else {
        None
    };

    let factory = RngFactory::new(run_seed);
    let outer: Vec<OuterDraw> = (0..n_outer)
        .into_par_iter()
        .map(|i| -> Result<OuterDraw> {
            let mut rng = factory.stream(StreamDomain::Outage, i as u64);
            let mut rejects = 0u64;
            let mut violations = 0u64;
            let mut draws = 0u64;

            // Estimate draw; an exactly-zero coefficient is rejected.
            let est = loop {
                draws += 1;
                let h_hat: Vec<Complex64> = (0..rp.m)
                    .map(|_| complex_gaussian(&mut rng, marginal_var))
                    .collect();
                if h_hat.iter().any(|z| z.norm() == 0.0) {
                    rejects += 1;
                    if rejects > 1000 {
                        return Err(Error::Degenerate(
                            "estimate draw rejected 1000 times".into(),
                        ));
                    }
                    continue;
                }
                break ChannelEstimate::from_parts(h_hat, pp)?;
            };

            let mut samples: Vec<Vec<f64>> =
                decoders.iter().map(|_| Vec::with_capacity(n_inner)).collect();
            let mut attempts = 0u32;
            while samples[0].len() < n_inner {
                draws += 1;
                let fv = draw_posterior_channel(&est, &mut rng)?;
                let mut row = Vec::with_capacity(decoders.len());
                let mut ok = true;
                for mode in decoders {
                    let r = match mode {
                        MetricMode::Perfect => Ok(rate_perfect(&fv, rp)),
                        MetricMode::Mismatched => rate_mismatched(&fv, &est, rp),
                        MetricMode::Modified => match a {
                            Some(a) => rate_modified_with_a(&fv, &est, rp, a),
                            None => Ok(rate_perfect(&fv, rp)),
                        },
                    };
                    match r {
                        Ok(v) => row.push(v),
                        Err(Error::Denominator(_)) => {
                            violations += 1;
                            ok = false;
                            break;
                        }
                        Err(Error::Degenerate(_)) => {
                            rejects += 1;
                            ok = false;
                            break;
                        }
                        Err(e) => return Err(e),
                    }
                }
                if ok {
                    attempts = 0;
                    for (bucket, v) in samples.iter_mut().zip(row) {
                        bucket.push(v);
                    }
                } else {
                    attempts += 1;
                    if attempts > 1000 {
                        return Err(Error::Degenerate(
                            "inner draw rejected 1000 times in a row".into(),
                        ));
                    }
                }
            }

            let rates = samples
                .into_iter()
                .map(|mut s| {
                    s.sort_by(|a, b| a.partial_cmp(b).expect("rates are finite"));
                    empirical_quantile(&s, gamma)
                })
                .collect();
            Ok(OuterDraw {
                rates,
                rejects,
                violations,
                draws,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rejects = 0;
    let mut violations = 0;
    let mut total_draws = 0;
    let mut per_decoder = vec![Vec::with_capacity(n_outer); decoders.len()];
    for draw in &outer {
        rejects += draw.rejects;
        violations += draw.violations;
        total_draws += draw.draws;
        for (bucket, &r) in per_decoder.iter_mut().zip(&draw.rates) {
            bucket.push(r);
        }
    }

    let results = decoders
        .iter()
        .zip(per_decoder)
        .map(|(&mode, values)| {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = if values.len() > 1 {
                values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            DecoderOutage {
                mode,
                mean_rate_bits: mean,
                std_err: (var / n).sqrt(),
            }
        })
        .collect();

    Ok(OutageResult {
        gamma,
        n_outer,
        n_inner,
        decoders: results,
        rejects,
        denominator_violations: violations,
        total_draws,
    })
}
