//! Frame-level BER simulation of the full coded chain.
//!
//! One frame: draw (or import) a fade vector, simulate pilots and
//! estimate the channel, encode and interleave a random payload, map to
//! 16-QAM, push every OFDM symbol through the channel, demap with the
//! selected metric, deinterleave, clamp and decode, then count
//! information-bit errors (tail bits excluded). Frame `i` of a point
//! consumes only the `(Frame, i)` and `(Interleaver, i)` RNG streams, so
//! points are reproducible under any parallel schedule, and two runs
//! that differ only in the decoding metric see identical channels,
//! payloads and noise.

use crate::config::{FrameConfig, RunConfig, StopRule};
use crate::manifest::RunManifest;
use ceelink_core::channel::{
    apply_channel, draw_rayleigh, estimate_channel, FadeVector, LinkBudget,
};
use ceelink_core::error::{Error, Result};
use ceelink_core::fec::{
    conv_encode, frame_interleaver_seed, trellis_decode, trellis_decode_soft, Interleaver,
    LlrFrame,
};
use ceelink_core::modem::{qam_map, Demapper, MetricMode, QamConstellation};
use ceelink_core::rng::{RngFactory, StreamDomain};
use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use std::io::Write;

/// One measured operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub ebn0_db: f64,
    pub n_pilots: usize,
    pub decoder: MetricMode,
    pub n_bits: u64,
    pub n_errors: u64,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        self.n_errors as f64 / self.n_bits as f64
    }
}

struct FrameOutcome {
    bits: u64,
    errors: u64,
}

fn simulate_frame(
    cfg: &FrameConfig,
    lb: &LinkBudget,
    mode: MetricMode,
    factory: &RngFactory,
    frame_index: u64,
    imported: Option<&FadeVector>,
    constellation: &QamConstellation,
) -> Result<FrameOutcome> {
    let mut rng = factory.stream(StreamDomain::Frame, frame_index);

    let fade = match imported {
        Some(fv) => fv.clone(),
        None => draw_rayleigh(cfg.m, cfg.prior_var, &mut rng)?,
    };
    if fade.len() != cfg.m {
        return Err(Error::Config(format!(
            "channel realization has {} subcarriers, configuration expects {}",
            fade.len(),
            cfg.m
        )));
    }
    let est = estimate_channel(
        &fade,
        cfg.n_pilots,
        lb.pilot_energy(),
        lb.noise_var(),
        &mut rng,
    )?;

    let info_len = cfg.info_bits_per_frame()?;
    let info: Vec<u8> = (0..info_len).map(|_| u8::from(rng.gen::<bool>())).collect();
    let coded = conv_encode(&info, &cfg.code);
    debug_assert_eq!(coded.len(), cfg.coded_bits_per_frame());

    let interleaver = Interleaver::from_seed(
        frame_interleaver_seed(factory.run_seed(), frame_index),
        coded.len(),
    );
    let tx_bits = interleaver.interleave(&coded)?;
    let symbols = qam_map(&tx_bits, constellation)?;

    let mut received = Vec::with_capacity(symbols.len());
    for block in symbols.chunks_exact(cfg.m) {
        received.extend(apply_channel(block, &fade, lb.noise_var(), &mut rng)?);
    }

    let demapper = Demapper::with_options(constellation, mode, *est.posterior(), cfg.max_log);
    let h_eff: &[Complex64] = match mode {
        MetricMode::Perfect => fade.coefficients(),
        MetricMode::Mismatched | MetricMode::Modified => est.coefficients(),
    };

    let n_coded = tx_bits.len();
    let mut apriori = vec![0.0f64; n_coded];
    let mut llrs = vec![0.0f64; n_coded];
    let mut decoded = Vec::new();
    for pass in 0..cfg.demap_iterations {
        for (j, &y) in received.iter().enumerate() {
            let k = j % cfg.m;
            let prior: [f64; 4] = apriori[4 * j..4 * j + 4].try_into().expect("chunk of 4");
            let vals = demapper.bit_llrs(y, h_eff[k], (pass > 0).then_some(&prior))?;
            llrs[4 * j..4 * j + 4].copy_from_slice(&vals);
        }
        if pass > 0 {
            // Demapper extrinsic: posterior minus the fed-back prior.
            for (l, a) in llrs.iter_mut().zip(&apriori) {
                *l -= a;
            }
        }
        let decoder_in = LlrFrame::new(interleaver.deinterleave(&llrs)?)?.clamped();
        if pass + 1 == cfg.demap_iterations {
            decoded = trellis_decode(&decoder_in, &cfg.code, None)?;
        } else {
            let (bits, extrinsic) = trellis_decode_soft(&decoder_in, &cfg.code, None)?;
            decoded = bits;
            apriori = interleaver.interleave(extrinsic.values())?;
        }
    }

    let errors = info
        .iter()
        .zip(&decoded)
        .filter(|(tx, rx)| tx != rx)
        .count() as u64;
    Ok(FrameOutcome {
        bits: info_len as u64,
        errors,
    })
}

/// Frames are dispatched in fixed blocks so the set of simulated frames
/// (and therefore the result) does not depend on thread scheduling.
const FRAME_BLOCK: u64 = 8;

/// Accumulates frames until the stop rule fires.
pub fn run_ber_point(
    cfg: &FrameConfig,
    lb: &LinkBudget,
    mode: MetricMode,
    stop: &StopRule,
    run_seed: u64,
    channels: Option<&[FadeVector]>,
) -> Result<BerPoint> {
    cfg.validate()?;
    let constellation = QamConstellation::qam16(lb.symbol_energy())?;
    let factory = RngFactory::new(run_seed);

    let mut n_bits = 0u64;
    let mut n_errors = 0u64;
    let mut next_frame = 0u64;
    loop {
        let block: Result<Vec<FrameOutcome>> = (next_frame..next_frame + FRAME_BLOCK)
            .into_par_iter()
            .map(|i| {
                let imported = match channels {
                    Some(list) => Some(list.get(i as usize).ok_or_else(|| {
                        Error::Input(format!(
                            "imported channel realizations exhausted at frame {i} \
                             ({} available)",
                            list.len()
                        ))
                    })?),
                    None => None,
                };
                simulate_frame(cfg, lb, mode, &factory, i, imported, &constellation)
            })
            .collect();
        for outcome in block? {
            n_bits += outcome.bits;
            n_errors += outcome.errors;
        }
        next_frame += FRAME_BLOCK;
        if n_errors >= stop.target_errors || n_bits >= stop.min_bits {
            break;
        }
    }

    Ok(BerPoint {
        ebn0_db: lb.ebn0_db(),
        n_pilots: cfg.n_pilots,
        decoder: mode,
        n_bits,
        n_errors,
    })
}

/// One point per `(Eb/N0, N, decoder)` triple, streamed to `writer` as
/// CSV with the manifest as a `#` header.
pub fn run_ber_sweep(
    run: &RunConfig,
    channels: Option<&[FadeVector]>,
    manifest: &RunManifest,
    writer: &mut dyn Write,
) -> Result<Vec<BerPoint>> {
    write!(writer, "{}", manifest.header())?;
    writeln!(writer, "ebn0_db,N,decoder,n_bits,n_errors,ber")?;

    let mut points = Vec::new();
    for &ebn0_db in &run.ebn0_db {
        let lb = LinkBudget::from_ebn0_db(
            ebn0_db,
            run.frame.code.rate(),
            run.frame.bits_per_symbol,
            run.symbol_energy,
            run.pilot_energy_or_default(),
        )?;
        for &n_pilots in &run.pilots {
            let mut cfg = run.frame.clone();
            cfg.n_pilots = n_pilots;
            for &mode in &run.decoders {
                let point = run_ber_point(&cfg, &lb, mode, &run.stop, run.seed, channels)?;
                writeln!(
                    writer,
                    "{},{},{},{},{},{:e}",
                    point.ebn0_db,
                    point.n_pilots,
                    point.decoder,
                    point.n_bits,
                    point.n_errors,
                    point.ber()
                )?;
                points.push(point);
            }
        }
    }
    Ok(points)
}

/// JSON mirror of a finished sweep.
pub fn ber_points_json(manifest: &RunManifest, points: &[BerPoint]) -> serde_json::Value {
    serde_json::json!({
        "manifest": manifest.to_json(),
        "points": points.iter().map(|p| serde_json::json!({
            "ebn0_db": p.ebn0_db,
            "N": p.n_pilots,
            "decoder": p.decoder.name(),
            "n_bits": p.n_bits,
            "n_errors": p.n_errors,
            "ber": p.ber(),
        })).collect::<Vec<_>>(),
    })
}
