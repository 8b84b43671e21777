//! Run manifests embedded in every output file.
//!
//! Only deterministic fields go into the file header so that two runs
//! with the same seed and configuration emit byte-identical output; the
//! wall-clock start time is kept on the struct for logging.

use std::time::SystemTime;

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub run_seed: u64,
    pub version: &'static str,
    pub subcommand: String,
    pub entries: Vec<(String, String)>,
    pub started: SystemTime,
}

impl RunManifest {
    pub fn new(subcommand: &str, run_seed: u64) -> Self {
        Self {
            run_seed,
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            entries: Vec::new(),
            started: SystemTime::now(),
        }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn extend(&mut self, entries: Vec<(String, String)>) {
        self.entries.extend(entries);
    }

    /// `#`-prefixed header lines, deterministic fields only.
    pub fn header(&self) -> String {
        let mut out = format!(
            "# ceelink {} {}\n# seed={}\n",
            self.version, self.subcommand, self.run_seed
        );
        for (k, v) in &self.entries {
            out.push_str(&format!("# {k}={v}\n"));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        let config: serde_json::Map<String, serde_json::Value> = self
            .entries
            .iter()
            .map(|(k, v)| (k.clone(), serde_json::Value::String(v.clone())))
            .collect();
        serde_json::json!({
            "tool": "ceelink",
            "version": self.version,
            "subcommand": self.subcommand,
            "seed": self.run_seed,
            "config": config,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_deterministic_and_commented() {
        let mut a = RunManifest::new("ber", 7);
        a.push("M", 100);
        let mut b = RunManifest::new("ber", 7);
        b.push("M", 100);
        assert_eq!(a.header(), b.header());
        assert!(a.header().lines().all(|l| l.starts_with('#')));
        assert!(a.header().contains("seed=7"));
    }
}
