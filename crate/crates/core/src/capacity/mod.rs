//! Achievable rates and outage-rate aggregation for the three decoding
//! metrics.

mod expint;
mod outage;
mod rates;

pub use expint::{e1_scaled, exp_integral_e1};
pub use outage::{expected_outage_rate, outage_rate, DecoderOutage, OutageResult};
pub use rates::{
    a_k, eta_modified, lambda_k, rate_mismatched, rate_modified, rate_perfect, sample_rates,
    RateParams, RateSample, RHO_PERFECT_GUARD,
};
