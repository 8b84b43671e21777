//! Block-fading channel generation, pilot-based estimation and the
//! posterior statistics of the true channel given its estimate.

mod estimate;
mod fading;
mod io;

pub use estimate::{estimate_channel, posterior_of_true_channel, ChannelEstimate, LinkBudget};
pub use fading::{apply_channel, draw_rayleigh, FadeVector};
pub use io::{export_fade_vectors, import_fade_vectors, read_fade_vectors, write_fade_vectors};
