//! Symbol decision metrics and per-bit soft metrics.
//!
//! Three channel-knowledge models are supported:
//!
//! - `Perfect`: the receiver knows the true fade coefficient and scores
//!   symbols by squared Euclidean distance.
//! - `Mismatched`: the Euclidean metric with the noisy estimate simply
//!   substituted for the true coefficient.
//! - `Modified`: the negative log of the observation likelihood averaged
//!   over the posterior of the true channel given its estimate. For an
//!   estimate quality `rho` the observation given `(estimate, symbol)` is
//!   complex Gaussian with mean `rho * hhat * s` and variance
//!   `noise_var + prior_var * (1 - rho) * |s|^2`, so the metric keeps a
//!   symbol-dependent log-variance term that Euclidean metrics do not
//!   have.

use super::QamConstellation;
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

/// Which decoding metric a demapper applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MetricMode {
    /// True channel known at the receiver.
    Perfect,
    /// Estimate used as if it were the true channel.
    Mismatched,
    /// Posterior-averaged likelihood metric.
    Modified,
}

impl MetricMode {
    pub const ALL: [MetricMode; 3] = [
        MetricMode::Perfect,
        MetricMode::Mismatched,
        MetricMode::Modified,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            MetricMode::Perfect => "perfect",
            MetricMode::Mismatched => "mismatched",
            MetricMode::Modified => "modified",
        }
    }
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "perfect" => Ok(MetricMode::Perfect),
            "mismatched" => Ok(MetricMode::Mismatched),
            "modified" => Ok(MetricMode::Modified),
            other => Err(Error::Config(format!(
                "unknown decoder '{other}' (expected perfect, mismatched or modified)"
            ))),
        }
    }
}

/// Statistics of the true channel conditioned on its estimate.
///
/// `rho = prior_var / (prior_var + err_var)` is fixed at construction,
/// so the algebraic identity `rho * err_var == (1 - rho) * prior_var`
/// (two equivalent forms of the posterior variance) holds by design.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PosteriorParams {
    rho: f64,
    err_var: f64,
    prior_var: f64,
    noise_var: f64,
}

impl PosteriorParams {
    /// `prior_var` is the fade variance, `err_var` the estimation error
    /// variance, `noise_var` the data-path noise variance.
    pub fn new(prior_var: f64, err_var: f64, noise_var: f64) -> Result<Self> {
        if !(prior_var.is_finite() && prior_var > 0.0) {
            return Err(Error::Config(format!(
                "prior variance must be positive, got {prior_var}"
            )));
        }
        if !(err_var.is_finite() && err_var >= 0.0) {
            return Err(Error::Config(format!(
                "estimation error variance must be >= 0, got {err_var}"
            )));
        }
        if !(noise_var.is_finite() && noise_var > 0.0) {
            return Err(Error::Config(format!(
                "noise variance must be positive, got {noise_var}"
            )));
        }
        Ok(Self {
            rho: prior_var / (prior_var + err_var),
            err_var,
            prior_var,
            noise_var,
        })
    }

    /// Zero estimation error (`rho = 1`).
    pub fn perfect(prior_var: f64, noise_var: f64) -> Result<Self> {
        Self::new(prior_var, 0.0, noise_var)
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn err_var(&self) -> f64 {
        self.err_var
    }

    pub fn prior_var(&self) -> f64 {
        self.prior_var
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    /// Posterior variance of the true channel given the estimate.
    pub fn posterior_var(&self) -> f64 {
        self.rho * self.err_var
    }

    /// Variance of the observation given `(estimate, symbol)` for a
    /// symbol of energy `s_norm_sqr`.
    pub fn predictive_var(&self, s_norm_sqr: f64) -> f64 {
        self.noise_var + self.prior_var * (1.0 - self.rho) * s_norm_sqr
    }
}

/// Decision metric for one (symbol, observation) pair; smaller is better.
///
/// `Perfect` and `Mismatched` return `|y - h s|^2` with `h_or_hhat`
/// interpreted as the true channel or its estimate respectively.
/// `Modified` returns `ln v(s) + |y - rho hhat s|^2 / v(s)` with
/// `v(s)` the predictive variance above.
pub fn symbol_metric(
    y: Complex64,
    s: Complex64,
    h_or_hhat: Complex64,
    mode: MetricMode,
    pp: &PosteriorParams,
) -> f64 {
    match mode {
        MetricMode::Perfect | MetricMode::Mismatched => (y - h_or_hhat * s).norm_sqr(),
        MetricMode::Modified => {
            let v = pp.predictive_var(s.norm_sqr());
            assert!(v > 0.0, "predictive variance must be positive");
            v.ln() + (y - pp.rho * h_or_hhat * s).norm_sqr() / v
        }
    }
}

/// Reusable soft demapper for one (constellation, mode, posterior) set.
///
/// Precomputes the per-symbol variance terms so per-observation work is
/// one complex multiply and one squared distance per constellation point
/// plus the log-sum-exp reduction.
#[derive(Debug, Clone)]
pub struct Demapper<'a> {
    constellation: &'a QamConstellation,
    mode: MetricMode,
    pp: PosteriorParams,
    max_log: bool,
    /// Channel scaling inside the metric mean: `rho` for Modified, 1 else.
    mean_scale: f64,
    inv_var: [f64; 16],
    ln_var: [f64; 16],
}

impl<'a> Demapper<'a> {
    pub fn new(
        constellation: &'a QamConstellation,
        mode: MetricMode,
        pp: PosteriorParams,
    ) -> Self {
        Self::with_options(constellation, mode, pp, false)
    }

    /// `max_log` replaces the exact log-sum-exp with a max, trading soft
    /// metric fidelity for speed.
    pub fn with_options(
        constellation: &'a QamConstellation,
        mode: MetricMode,
        pp: PosteriorParams,
        max_log: bool,
    ) -> Self {
        let mut inv_var = [1.0 / pp.noise_var(); 16];
        let mut ln_var = [0.0; 16];
        let mean_scale = match mode {
            MetricMode::Perfect | MetricMode::Mismatched => 1.0,
            MetricMode::Modified => {
                for (label, point) in constellation.points().iter().enumerate() {
                    let v = pp.predictive_var(point.norm_sqr());
                    inv_var[label] = 1.0 / v;
                    ln_var[label] = v.ln();
                }
                pp.rho()
            }
        };
        Self {
            constellation,
            mode,
            pp,
            max_log,
            mean_scale,
            inv_var,
            ln_var,
        }
    }

    pub fn mode(&self) -> MetricMode {
        self.mode
    }

    pub fn posterior(&self) -> &PosteriorParams {
        &self.pp
    }

    /// Per-bit LLRs (positive favors bit 0) for one received sample.
    ///
    /// `h_or_hhat` is the true channel in `Perfect` mode, the estimate
    /// otherwise. `apriori`, when given, holds per-bit a-priori LLRs that
    /// weight the symbol hypotheses; the returned values then include
    /// that prior (full posterior).
    pub fn bit_llrs(
        &self,
        y: Complex64,
        h_or_hhat: Complex64,
        apriori: Option<&[f64; 4]>,
    ) -> Result<[f64; 4]> {
        if !(y.re.is_finite() && y.im.is_finite()) {
            return Err(Error::Input(format!("non-finite observation {y}")));
        }
        if !(h_or_hhat.re.is_finite() && h_or_hhat.im.is_finite()) {
            return Err(Error::Input(format!("non-finite channel value {h_or_hhat}")));
        }

        let h = h_or_hhat * self.mean_scale;
        // Score per symbol: log prior weight minus negative log-likelihood
        // (constant terms common to all symbols dropped).
        let mut score = [0.0f64; 16];
        for (label, point) in self.constellation.points().iter().enumerate() {
            let d = (y - h * point).norm_sqr() * self.inv_var[label];
            let mut sc = -self.ln_var[label] - d;
            if let Some(ap) = apriori {
                let bits = QamConstellation::label_bits(label);
                for (b, l) in bits.iter().zip(ap) {
                    sc += if *b == 0 { *l } else { -*l } * 0.5;
                }
            }
            score[label] = sc;
        }

        let mut llrs = [0.0f64; 4];
        for (pos, llr) in llrs.iter_mut().enumerate() {
            let reduce = |want: usize| -> f64 {
                let subset = &BIT_SUBSETS[pos][want];
                if self.max_log {
                    subset
                        .iter()
                        .map(|&l| score[l as usize])
                        .fold(f64::NEG_INFINITY, f64::max)
                } else {
                    log_sum_exp(subset.iter().map(|&l| score[l as usize]))
                }
            };
            *llr = reduce(0) - reduce(1);
        }
        Ok(llrs)
    }
}

/// Labels partitioned by the value of each bit position:
/// `BIT_SUBSETS[pos][v]` lists the labels whose bit `pos` (MSB first)
/// equals `v`.
const BIT_SUBSETS: [[[u8; 8]; 2]; 4] = build_bit_subsets();

const fn build_bit_subsets() -> [[[u8; 8]; 2]; 4] {
    let mut table = [[[0u8; 8]; 2]; 4];
    let mut pos = 0;
    while pos < 4 {
        let mut fill = [0usize; 2];
        let mut label = 0;
        while label < 16 {
            let v = (label >> (3 - pos)) & 1;
            table[pos][v][fill[v]] = label as u8;
            fill[v] += 1;
            label += 1;
        }
        pos += 1;
    }
    table
}

/// `ln(sum(exp(x)))` with the usual max shift; terms more than 37 nats
/// below the maximum are dropped (below f64 resolution of the sum).
fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    let mut sum = 0.0;
    for x in xs {
        let d = x - m;
        if d > -37.0 {
            sum += d.exp();
        }
    }
    m + sum.ln()
}

/// One-shot convenience wrapper around [`Demapper::bit_llrs`].
pub fn bit_metrics(
    y: Complex64,
    h_or_hhat: Complex64,
    constellation: &QamConstellation,
    mode: MetricMode,
    pp: &PosteriorParams,
    apriori: Option<&[f64; 4]>,
) -> Result<[f64; 4]> {
    Demapper::new(constellation, mode, *pp).bit_llrs(y, h_or_hhat, apriori)
}
