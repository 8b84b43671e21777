//! Soft-input trellis decoding (max-log a-posteriori).
//!
//! The decoder processes one zero-tail terminated frame at a time: the
//! trellis starts and ends in state 0. A single forward/backward pass
//! yields both hard information-bit decisions and, when requested,
//! extrinsic values per coded bit for iterative demapping. Hard decisions
//! come from per-bit max-log posteriors, so for any frame whose optimum
//! is unique they equal the maximum-metric path; exact ties resolve to
//! bit 0 (posterior >= 0 decodes 0).

use super::ConvCode;
use crate::error::{Error, Result};

/// Symmetric clamp applied to LLR magnitudes entering and leaving the
/// decoder; keeps degenerate noise draws from propagating infinities.
pub const LLR_CLAMP: f64 = 50.0;

/// Soft values for the coded (interleaved) bits of one frame.
///
/// Sign convention: positive favors bit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrFrame {
    values: Vec<f64>,
}

impl LlrFrame {
    /// Wraps raw values, rejecting non-finite entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Input(format!("non-finite llr at index {i}")));
        }
        Ok(Self { values })
    }

    /// All-zero frame (no information about any bit).
    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![0.0; len],
        }
    }

    /// Clamps every value to `[-LLR_CLAMP, LLR_CLAMP]`.
    pub fn clamped(mut self) -> Self {
        for v in &mut self.values {
            *v = v.clamp(-LLR_CLAMP, LLR_CLAMP);
        }
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Hard-decision decode of one terminated frame.
///
/// `apriori`, when given, holds additional per-coded-bit LLRs (same
/// convention and length as `llrs`) that are added to the intrinsic
/// values before decoding.
pub fn trellis_decode(
    llrs: &LlrFrame,
    code: &ConvCode,
    apriori: Option<&LlrFrame>,
) -> Result<Vec<u8>> {
    decode_impl(llrs, code, apriori, false).map(|(bits, _)| bits)
}

/// Like [`trellis_decode`] but also returns extrinsic values per coded
/// bit: posterior minus intrinsic minus a-priori, clamped to
/// `LLR_CLAMP`. Used to close the iterative demapping loop.
pub fn trellis_decode_soft(
    llrs: &LlrFrame,
    code: &ConvCode,
    apriori: Option<&LlrFrame>,
) -> Result<(Vec<u8>, LlrFrame)> {
    decode_impl(llrs, code, apriori, true).map(|(bits, ext)| (bits, ext.expect("requested")))
}

fn decode_impl(
    llrs: &LlrFrame,
    code: &ConvCode,
    apriori: Option<&LlrFrame>,
    want_extrinsic: bool,
) -> Result<(Vec<u8>, Option<LlrFrame>)> {
    const NEG: f64 = f64::NEG_INFINITY;

    if llrs.len() % 2 != 0 {
        return Err(Error::Input(format!(
            "llr frame length {} is not a whole number of rate-1/2 stages",
            llrs.len()
        )));
    }
    let n_stages = llrs.len() / 2;
    if n_stages < code.memory() {
        return Err(Error::Input(format!(
            "frame of {n_stages} stages cannot hold a terminated {}-tail trellis",
            code.memory()
        )));
    }
    let info_len = n_stages - code.memory();

    let mut eff: Vec<f64> = llrs.values().to_vec();
    if let Some(ap) = apriori {
        if ap.len() != llrs.len() {
            return Err(Error::Input(format!(
                "apriori length {} does not match llr length {}",
                ap.len(),
                llrs.len()
            )));
        }
        for (e, &a) in eff.iter_mut().zip(ap.values()) {
            *e += a;
        }
    }

    let n_states = code.num_states();
    // Transition tables: next[s][b], out[s][b].
    let mut next = vec![[0usize; 2]; n_states];
    let mut out = vec![[[0u8; 2]; 2]; n_states];
    for s in 0..n_states {
        for b in 0..2usize {
            let (ns, pair) = code.step(s, b as u8);
            next[s][b] = ns;
            out[s][b] = pair;
        }
    }

    // Half-LLR branch metric: bit value 0 contributes +L/2, bit 1 -L/2.
    let gamma = |t: usize, s: usize, b: usize| -> f64 {
        let pair = out[s][b];
        let mut g = 0.0;
        for j in 0..2 {
            let l = eff[2 * t + j] * 0.5;
            g += if pair[j] == 0 { l } else { -l };
        }
        g
    };

    // Forward pass, storing all alphas. Tail stages only admit input 0.
    let mut alpha = vec![NEG; (n_stages + 1) * n_states];
    alpha[0] = 0.0;
    for t in 0..n_stages {
        let max_b = if t < info_len { 2 } else { 1 };
        for s in 0..n_states {
            let a = alpha[t * n_states + s];
            if a == NEG {
                continue;
            }
            for b in 0..max_b {
                let cand = a + gamma(t, s, b);
                let slot = &mut alpha[(t + 1) * n_states + next[s][b]];
                if cand > *slot {
                    *slot = cand;
                }
            }
        }
    }

    // Backward pass; posteriors extracted along the way.
    let mut info_bits = vec![0u8; info_len];
    let mut extrinsic = want_extrinsic.then(|| vec![0.0f64; llrs.len()]);
    let mut beta = vec![NEG; n_states];
    let mut beta_prev = vec![NEG; n_states];
    beta[0] = 0.0;
    for t in (0..n_stages).rev() {
        let max_b = if t < info_len { 2 } else { 1 };
        let mut best_in = [NEG; 2]; // by input bit
        let mut best_out = [[NEG; 2]; 2]; // [coded position][bit value]
        beta_prev.iter_mut().for_each(|v| *v = NEG);
        for s in 0..n_states {
            let a = alpha[t * n_states + s];
            for b in 0..max_b {
                let g = gamma(t, s, b);
                let bnext = beta[next[s][b]];
                // Update beta regardless of alpha reachability.
                let back = g + bnext;
                if back > beta_prev[s] {
                    beta_prev[s] = back;
                }
                if a == NEG || bnext == NEG {
                    continue;
                }
                let full = a + g + bnext;
                if full > best_in[b] {
                    best_in[b] = full;
                }
                let pair = out[s][b];
                for j in 0..2 {
                    let slot = &mut best_out[j][pair[j] as usize];
                    if full > *slot {
                        *slot = full;
                    }
                }
            }
        }
        if t < info_len {
            // Posterior >= 0 decodes 0 (ties prefer bit 0).
            info_bits[t] = u8::from(best_in[0] - best_in[1] < 0.0);
        }
        if let Some(ext) = extrinsic.as_mut() {
            for j in 0..2 {
                let post = best_out[j][0] - best_out[j][1];
                ext[2 * t + j] = (post - eff[2 * t + j]).clamp(-LLR_CLAMP, LLR_CLAMP);
            }
        }
        std::mem::swap(&mut beta, &mut beta_prev);
    }

    let extrinsic = extrinsic.map(|v| LlrFrame { values: v });
    Ok((info_bits, extrinsic))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fec::conv_encode;

    fn noiseless_llrs(coded: &[u8], magnitude: f64) -> LlrFrame {
        LlrFrame::new(
            coded
                .iter()
                .map(|&b| if b == 0 { magnitude } else { -magnitude })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn noiseless_round_trip() {
        let code = ConvCode::rate_half_k3();
        let info = [1u8, 0, 1, 1];
        let llrs = noiseless_llrs(&conv_encode(&info, &code), 20.0);
        assert_eq!(trellis_decode(&llrs, &code, None).unwrap(), info.to_vec());
    }

    #[test]
    fn all_zero_llrs_decode_to_zero() {
        let code = ConvCode::rate_half_k3();
        let llrs = LlrFrame::zeros(2 * (10 + 2));
        assert_eq!(trellis_decode(&llrs, &code, None).unwrap(), vec![0u8; 10]);
    }

    #[test]
    fn single_flipped_llr_is_corrected() {
        let code = ConvCode::rate_half_k3();
        let info: Vec<u8> = (0..64).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let coded = conv_encode(&info, &code);
        for flip in [0usize, 17, 63, coded.len() - 1] {
            let mut vals: Vec<f64> = coded
                .iter()
                .map(|&b| if b == 0 { 4.0 } else { -4.0 })
                .collect();
            vals[flip] = -vals[flip];
            let llrs = LlrFrame::new(vals).unwrap();
            assert_eq!(trellis_decode(&llrs, &code, None).unwrap(), info);
        }
    }

    #[test]
    fn rejects_non_finite_llrs() {
        assert!(LlrFrame::new(vec![1.0, f64::NAN]).is_err());
        assert!(LlrFrame::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn rejects_odd_length() {
        let code = ConvCode::rate_half_k3();
        let llrs = LlrFrame::zeros(7);
        assert!(trellis_decode(&llrs, &code, None).is_err());
    }

    #[test]
    fn empty_payload_frame_decodes_to_empty() {
        let code = ConvCode::rate_half_k3();
        let llrs = noiseless_llrs(&conv_encode(&[], &code), 10.0);
        assert_eq!(trellis_decode(&llrs, &code, None).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn apriori_shifts_a_tied_decision() {
        let code = ConvCode::rate_half_k3();
        let info = [1u8, 1, 0, 1, 0, 0, 1];
        let coded = conv_encode(&info, &code);
        let llrs = LlrFrame::zeros(coded.len());
        let ap = noiseless_llrs(&coded, 3.0);
        assert_eq!(
            trellis_decode(&llrs, &code, Some(&ap)).unwrap(),
            info.to_vec()
        );
    }

    #[test]
    fn extrinsic_excludes_intrinsic_information() {
        let code = ConvCode::rate_half_k3();
        let info = [0u8, 1, 1, 0, 1];
        let coded = conv_encode(&info, &code);
        let llrs = noiseless_llrs(&coded, 2.0);
        let (bits, ext) = trellis_decode_soft(&llrs, &code, None).unwrap();
        assert_eq!(bits, info.to_vec());
        assert_eq!(ext.len(), llrs.len());
        // Parity structure means every coded bit gains support from its
        // neighbors: extrinsic signs must agree with the transmitted bits.
        for (e, &c) in ext.values().iter().zip(&coded) {
            assert!(if c == 0 { *e > 0.0 } else { *e < 0.0 });
        }
    }

    #[test]
    fn clamp_bounds_values() {
        let f = LlrFrame::new(vec![1e9, -1e9, 3.0]).unwrap().clamped();
        assert_eq!(f.values(), &[LLR_CLAMP, -LLR_CLAMP, 3.0]);
    }
}
