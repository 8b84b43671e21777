//! Outage-rate sweeps over SNR.
//!
//! Per SNR point: input power `P = 10^(snr/10)` against unit noise
//! variance, pilot energy equal to the data power, estimation error
//! variance `1 / (N * P)`, and a shared-seed Monte Carlo run of all
//! requested decoders. Using the same run seed for every SNR point makes
//! the curves positively correlated across SNR, which sharpens crossing
//! and gap readings.

use crate::config::RunConfig;
use crate::manifest::RunManifest;
use ceelink_core::capacity::{expected_outage_rate, RateParams};
use ceelink_core::error::Result;
use ceelink_core::modem::{MetricMode, PosteriorParams};
use std::io::Write;

/// One decoder at one SNR point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutagePoint {
    pub snr_db: f64,
    pub decoder: MetricMode,
    pub mean_rate_bits: f64,
    pub std_err: f64,
    pub n_outer: usize,
    pub n_inner: usize,
    pub rejects: u64,
    pub denominator_violations: u64,
}

/// Sweeps `run.snr_db`, streaming CSV rows to `writer`.
pub fn run_outage_sweep(
    run: &RunConfig,
    manifest: &RunManifest,
    writer: &mut dyn Write,
) -> Result<Vec<OutagePoint>> {
    write!(writer, "{}", manifest.header())?;
    writeln!(
        writer,
        "snr_db,decoder,mean_rate_bits,std_err,n_outer,n_inner,rejects"
    )?;

    let n_pilots = run.frame.n_pilots;
    let mut points = Vec::new();
    for &snr_db in &run.snr_db {
        let noise_var = 1.0;
        let power = 10f64.powf(snr_db / 10.0) * noise_var;
        let pilot_energy = power; // pilots carry the data power
        let err_var = noise_var / (n_pilots as f64 * pilot_energy);
        let pp = PosteriorParams::new(run.frame.prior_var, err_var, noise_var)?;
        let rp = RateParams::new(power, noise_var, pp, run.frame.m)?;
        let result = expected_outage_rate(
            &run.decoders,
            &rp,
            run.gamma,
            run.n_outer,
            run.n_inner,
            run.seed,
        )?;
        for decoder in &result.decoders {
            let point = OutagePoint {
                snr_db,
                decoder: decoder.mode,
                mean_rate_bits: decoder.mean_rate_bits,
                std_err: decoder.std_err,
                n_outer: result.n_outer,
                n_inner: result.n_inner,
                rejects: result.rejects,
                denominator_violations: result.denominator_violations,
            };
            writeln!(
                writer,
                "{},{},{},{},{},{},{}",
                point.snr_db,
                point.decoder,
                point.mean_rate_bits,
                point.std_err,
                point.n_outer,
                point.n_inner,
                point.rejects
            )?;
            points.push(point);
        }
    }
    Ok(points)
}

/// JSON mirror of a finished sweep.
pub fn outage_points_json(manifest: &RunManifest, points: &[OutagePoint]) -> serde_json::Value {
    serde_json::json!({
        "manifest": manifest.to_json(),
        "points": points.iter().map(|p| serde_json::json!({
            "snr_db": p.snr_db,
            "decoder": p.decoder.name(),
            "mean_rate_bits": p.mean_rate_bits,
            "std_err": p.std_err,
            "n_outer": p.n_outer,
            "n_inner": p.n_inner,
            "rejects": p.rejects,
            "denominator_violations": p.denominator_violations,
        })).collect::<Vec<_>>(),
    })
}
