//! Run configuration: typed parameters, a `key=value` file format and
//! the sweep grammars shared with the command line flags.

use ceelink_core::error::{Error, Result};
use ceelink_core::fec::ConvCode;
use ceelink_core::modem::MetricMode;
use std::path::Path;

/// Per-frame simulation parameters.
///
/// The interleaver permutation is regenerated for every frame from
/// `frame_interleaver_seed(run_seed, frame_index)`; it is not a
/// configurable field.
#[derive(Debug, Clone)]
pub struct FrameConfig {
    /// Data subcarriers per OFDM symbol.
    pub m: usize,
    /// OFDM symbols per frame.
    pub tau: usize,
    /// Pilot OFDM symbols per frame.
    pub n_pilots: usize,
    /// Bits per QAM symbol (16-QAM: 4).
    pub bits_per_symbol: usize,
    pub code: ConvCode,
    /// Demapping passes; 1 is the non-iterative receiver.
    pub demap_iterations: usize,
    /// Fade coefficient variance.
    pub prior_var: f64,
    /// Use max-log instead of exact log-sum-exp bit metrics.
    pub max_log: bool,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self {
            m: 100,
            tau: 100,
            n_pilots: 2,
            bits_per_symbol: 4,
            code: ConvCode::rate_half_k3(),
            demap_iterations: 1,
            prior_var: 1.0,
            max_log: false,
        }
    }
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return Err(Error::Config("M must be >= 1".into()));
        }
        if self.tau < 1 {
            return Err(Error::Config("tau must be >= 1".into()));
        }
        if self.n_pilots < 1 {
            return Err(Error::Config("N must be >= 1".into()));
        }
        if self.bits_per_symbol != 4 {
            return Err(Error::Config(
                "only 4 bits per symbol (16-QAM) is supported".into(),
            ));
        }
        if self.demap_iterations < 1 {
            return Err(Error::Config("iters must be >= 1".into()));
        }
        if !(self.prior_var.is_finite() && self.prior_var > 0.0) {
            return Err(Error::Config(format!(
                "h_var must be positive, got {}",
                self.prior_var
            )));
        }
        self.info_bits_per_frame().map(|_| ())
    }

    /// Coded bits mapped per frame: exactly `tau * M * B`.
    pub fn coded_bits_per_frame(&self) -> usize {
        self.tau * self.m * self.bits_per_symbol
    }

    /// Information payload per frame: the coded capacity at rate 1/2
    /// minus the termination tail.
    pub fn info_bits_per_frame(&self) -> Result<usize> {
        let coded = self.coded_bits_per_frame();
        if coded % 2 != 0 {
            return Err(Error::Config(format!(
                "tau*M*B = {coded} is not divisible by 2"
            )));
        }
        let stages = coded / 2;
        let tail = self.code.tail_bits();
        if stages <= tail {
            return Err(Error::Config(format!(
                "frame of {stages} stages cannot carry a terminated payload"
            )));
        }
        Ok(stages - tail)
    }
}

/// When to stop accumulating frames at one operating point: at
/// `min_bits` information bits or `target_errors` bit errors, whichever
/// comes first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_bits: u64,
    pub target_errors: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            min_bits: 2_000_000,
            target_errors: 200,
        }
    }
}

/// Full sweep configuration resolved from defaults, an optional config
/// file and command line flags (in that order of precedence).
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub frame: FrameConfig,
    pub stop: StopRule,
    pub seed: u64,
    /// Mean QAM symbol energy on the BER path.
    pub symbol_energy: f64,
    /// Pilot symbol energy; defaults to the data energy.
    pub pilot_energy: Option<f64>,
    pub ebn0_db: Vec<f64>,
    pub snr_db: Vec<f64>,
    pub pilots: Vec<usize>,
    pub decoders: Vec<MetricMode>,
    pub gamma: f64,
    pub n_outer: usize,
    pub n_inner: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            frame: FrameConfig::default(),
            stop: StopRule::default(),
            seed: 1,
            symbol_energy: 1.0,
            pilot_energy: None,
            ebn0_db: Vec::new(),
            snr_db: Vec::new(),
            pilots: vec![2],
            decoders: MetricMode::ALL.to_vec(),
            gamma: 0.01,
            n_outer: 200,
            n_inner: 2000,
        }
    }
}

impl RunConfig {
    /// Applies one `key=value` assignment. The error string carries no
    /// location; callers add file/line or flag context.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
            value
                .trim()
                .parse()
                .map_err(|_| format!("{key}: cannot parse '{value}'"))
        }
        match key {
            "M" => {
                self.frame.m = num(key, value)?;
                if self.frame.m < 1 {
                    return Err("M must be >= 1".into());
                }
            }
            "tau" => {
                self.frame.tau = num(key, value)?;
                if self.frame.tau < 1 {
                    return Err("tau must be >= 1".into());
                }
            }
            "N" | "pilots" => {
                let list = parse_usize_list(value).map_err(|e| format!("{key}: {e}"))?;
                if list.is_empty() || list.iter().any(|&n| n < 1) {
                    return Err(format!("{key}: N must be >= 1"));
                }
                self.frame.n_pilots = list[0];
                self.pilots = list;
            }
            "seed" => self.seed = num(key, value)?,
            "ebn0" => self.ebn0_db = parse_f64_list(value).map_err(|e| format!("ebn0: {e}"))?,
            "snr" => self.snr_db = parse_f64_list(value).map_err(|e| format!("snr: {e}"))?,
            "gamma" => {
                self.gamma = num(key, value)?;
                if !(self.gamma > 0.0 && self.gamma < 1.0) {
                    return Err("gamma must be in (0, 1)".into());
                }
            }
            "n_outer" => {
                self.n_outer = num(key, value)?;
                if self.n_outer < 1 {
                    return Err("n_outer must be >= 1".into());
                }
            }
            "n_inner" => {
                self.n_inner = num(key, value)?;
                if self.n_inner < 100 {
                    return Err("n_inner must be >= 100".into());
                }
            }
            "decoders" => {
                let mut out = Vec::new();
                for tok in value.split(',').filter(|t| !t.trim().is_empty()) {
                    out.push(tok.parse::<MetricMode>().map_err(|e| e.to_string())?);
                }
                self.decoders = out;
            }
            "min_bits" => self.stop.min_bits = num(key, value)?,
            "target_errors" => self.stop.target_errors = num(key, value)?,
            "iters" => {
                self.frame.demap_iterations = num(key, value)?;
                if self.frame.demap_iterations < 1 {
                    return Err("iters must be >= 1".into());
                }
            }
            "symbol_energy" => {
                self.symbol_energy = num(key, value)?;
                if !(self.symbol_energy > 0.0) {
                    return Err("symbol_energy must be positive".into());
                }
            }
            "pilot_energy" => {
                let e: f64 = num(key, value)?;
                if !(e > 0.0) {
                    return Err("pilot_energy must be positive".into());
                }
                self.pilot_energy = Some(e);
            }
            "h_var" => {
                self.frame.prior_var = num(key, value)?;
                if !(self.frame.prior_var > 0.0) {
                    return Err("h_var must be positive".into());
                }
            }
            "max_log" => {
                self.frame.max_log = match value.trim() {
                    "true" | "1" => true,
                    "false" | "0" => false,
                    other => return Err(format!("max_log: cannot parse '{other}' as bool")),
                }
            }
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    /// Pilot energy resolved against the data symbol energy.
    pub fn pilot_energy_or_default(&self) -> f64 {
        self.pilot_energy.unwrap_or(self.symbol_energy)
    }

    /// Manifest entries describing this configuration.
    pub fn manifest_entries(&self) -> Vec<(String, String)> {
        let join_f = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = vec![
            ("M".to_string(), self.frame.m.to_string()),
            ("tau".to_string(), self.frame.tau.to_string()),
            (
                "pilots".to_string(),
                self.pilots
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            (
                "decoders".to_string(),
                self.decoders
                    .iter()
                    .map(|d| d.name().to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("symbol_energy".to_string(), self.symbol_energy.to_string()),
            (
                "pilot_energy".to_string(),
                self.pilot_energy_or_default().to_string(),
            ),
            ("h_var".to_string(), self.frame.prior_var.to_string()),
            ("iters".to_string(), self.frame.demap_iterations.to_string()),
            ("max_log".to_string(), self.frame.max_log.to_string()),
        ];
        if !self.ebn0_db.is_empty() {
            out.push(("ebn0".to_string(), join_f(&self.ebn0_db)));
            out.push(("min_bits".to_string(), self.stop.min_bits.to_string()));
            out.push(("target_errors".to_string(), self.stop.target_errors.to_string()));
        }
        if !self.snr_db.is_empty() {
            out.push(("snr".to_string(), join_f(&self.snr_db)));
            out.push(("gamma".to_string(), self.gamma.to_string()));
            out.push(("n_outer".to_string(), self.n_outer.to_string()));
            out.push(("n_inner".to_string(), self.n_inner.to_string()));
        }
        out
    }
}

/// Loads `key=value` lines from `path` into `cfg`. `#` starts a comment;
/// blank lines are ignored. Unknown keys, type mismatches and constraint
/// violations are reported with the file name and line number.
pub fn parse_config_file(path: &Path, cfg: &mut RunConfig) -> Result<()> {
    let text = std::fs::read_to_string(path)?;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: idx + 1,
                msg: format!("expected key=value, got '{line}'"),
            });
        };
        cfg.apply_kv(key.trim(), value.trim()).map_err(|msg| Error::Parse {
            path: path.display().to_string(),
            line: idx + 1,
            msg,
        })?;
    }
    Ok(())
}

/// List grammar: `START:STEP:STOP` (inclusive), a comma list, or a
/// single number.
pub fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let fields: Vec<&str> = s.split(':').collect();
    if fields.len() == 3 {
        let parse = |t: &str| -> std::result::Result<f64, String> {
            t.trim()
                .parse()
                .map_err(|_| format!("cannot parse '{t}' as a number"))
        };
        let (start, step, stop) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
        if !(step > 0.0) {
            return Err(format!("range step must be positive, got {step}"));
        }
        if stop < start {
            return Err(format!("range stop {stop} below start {start}"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        return Ok((0..count).map(|i| start + i as f64 * step).collect());
    }
    if fields.len() != 1 {
        return Err(format!("expected START:STEP:STOP, got '{s}'"));
    }
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| format!("cannot parse '{t}' as a number"))
        })
        .collect()
}

/// Comma list of non-negative integers.
pub fn parse_usize_list(s: &str) -> std::result::Result<Vec<usize>, String> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| format!("cannot parse '{t}' as an integer"))
        })
        .collect()
}

/// Renders a float list compactly for manifests.
pub fn write_range(v: &[f64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn defaults_and_minimal_file() {
        let mut cfg = RunConfig::default();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "M=100\ntau=100\nN=2").unwrap();
        parse_config_file(f.path(), &mut cfg).unwrap();
        assert_eq!(cfg.frame.m, 100);
        assert_eq!(cfg.frame.tau, 100);
        assert_eq!(cfg.pilots, vec![2]);
        assert_eq!(cfg.gamma, 0.01); // untouched default
        cfg.frame.validate().unwrap();
    }

    #[test]
    fn zero_pilots_rejected_with_location() {
        let mut cfg = RunConfig::default();
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "tau=10\nN=0").unwrap();
        let err = parse_config_file(f.path(), &mut cfg).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains(":2"), "{msg}");
        assert!(msg.contains("N must be >= 1"), "{msg}");
    }

    #[test]
    fn unknown_key_rejected_with_name() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_kv("bogus", "1").unwrap_err();
        assert!(err.contains("unknown key 'bogus'"), "{err}");
    }

    #[test]
    fn type_mismatch_names_the_key() {
        let mut cfg = RunConfig::default();
        let err = cfg.apply_kv("tau", "ten").unwrap_err();
        assert!(err.contains("tau"), "{err}");
    }

    #[test]
    fn range_grammar() {
        assert_eq!(
            parse_f64_list("0:2:16").unwrap(),
            vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0]
        );
        assert_eq!(parse_f64_list("1.5").unwrap(), vec![1.5]);
        assert_eq!(parse_f64_list("1,2,3.5").unwrap(), vec![1.0, 2.0, 3.5]);
        assert_eq!(
            parse_f64_list("-12:1:-10").unwrap(),
            vec![-12.0, -11.0, -10.0]
        );
        assert!(parse_f64_list("0:-1:5").is_err());
        assert!(parse_f64_list("5:1:0").is_err());
        assert!(parse_f64_list("a:1:2").is_err());
    }

    #[test]
    fn range_endpoint_is_robust_to_rounding() {
        let v = parse_f64_list("6:0.5:16").unwrap();
        assert_eq!(v.len(), 21);
        assert!((v.last().unwrap() - 16.0).abs() < 1e-9);
    }

    #[test]
    fn decoder_list_parses() {
        let mut cfg = RunConfig::default();
        cfg.apply_kv("decoders", "modified,mismatched").unwrap();
        assert_eq!(
            cfg.decoders,
            vec![MetricMode::Modified, MetricMode::Mismatched]
        );
        assert!(cfg.apply_kv("decoders", "modified,bogus").is_err());
    }

    #[test]
    fn payload_accounting() {
        let cfg = FrameConfig::default();
        assert_eq!(cfg.coded_bits_per_frame(), 40_000);
        assert_eq!(cfg.info_bits_per_frame().unwrap(), 19_998);
    }
}
