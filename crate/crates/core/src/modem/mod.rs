//! Gray-mapped 16-QAM and soft demapping under three channel-knowledge
//! models.

mod constellation;
mod metric;

pub use constellation::{qam_map, QamConstellation};
pub use metric::{bit_metrics, symbol_metric, Demapper, MetricMode, PosteriorParams};
