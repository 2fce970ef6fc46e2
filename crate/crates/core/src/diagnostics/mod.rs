//! Convergence diagnostics, clustering agreement and forecast metrics.

mod assignment;
mod clustering;
mod metrics;
mod psrf;

pub use assignment::max_weight_assignment;
pub use clustering::{
    cluster_count_histogram, hamming_error, representative_assignment, ClusterCountHistogram,
    Representative,
};
pub use metrics::{forecast_metrics, EvalReport, LastValueRow};
pub use psrf::{psrf, psrf_report, PsrfReport};
