//! End-to-end experiment orchestration: BER sweeps over the full coded
//! chain, outage-rate sweeps, configuration handling and CSV/JSON
//! emission.
//!
//! Every run is fully determined by `(run_seed, configuration)`: frames
//! and Monte Carlo draws consume dedicated RNG streams indexed by their
//! position in the run, so outputs are byte-identical regardless of the
//! number of worker threads.

pub mod ber;
pub mod config;
pub mod manifest;
pub mod outage;

pub use ber::{run_ber_point, run_ber_sweep, BerPoint};
pub use config::{parse_config_file, write_range, FrameConfig, RunConfig, StopRule};
pub use manifest::RunManifest;
pub use outage::{run_outage_sweep, OutagePoint};
