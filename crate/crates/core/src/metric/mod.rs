//! Finite metric spaces and coarse-geometry statistics.

mod json;
pub(crate) mod space;
mod stats;
mod validate;

pub use json::{read_space_json, write_space_json};
pub use space::{farthest_point_order, FiniteMetricSpace, PointedWindow};
pub use stats::{geometry_stats, GeometryStats, Perfectness};
pub use validate::{validate_metric, Axiom, ValidationReport, Violation};

/// Absolute tolerance for all metric axiom checks.
pub const METRIC_TOL: f64 = 1e-9;

#[derive(Debug, thiserror::Error)]
pub enum MetricError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("invalid JSON at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("not a metric: {0}")]
    NotAMetric(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("index {index} out of range for a space of {len} points")]
    Index { index: usize, len: usize },
}

/// Rescales every distance by `1/lambda`.
pub fn rescale(m: &FiniteMetricSpace, lambda: f64) -> Result<FiniteMetricSpace, MetricError> {
    m.rescale(lambda)
}

/// Closed ball of radius `radius` around `p`, as a window of scale 1.
pub fn restrict_ball(
    m: &FiniteMetricSpace,
    p: usize,
    radius: f64,
) -> Result<PointedWindow, MetricError> {
    m.ball(p, radius)
}
