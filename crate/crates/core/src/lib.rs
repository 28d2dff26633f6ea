//! Finite-approximation metric geometry.
//!
//! The crate builds explicit finite metric spaces (slit and pillow carpets,
//! snowflake curves, product rugs, flat cone models, free-group boundaries),
//! bounds and computes Gromov-Hausdorff distances between them, extracts
//! rescaled pointed windows to study blow-ups, and measures quasisymmetric
//! distortion of sampled maps.
//!
//! Everything is a pure function over immutable values. Randomized pieces
//! (local search restarts, triple sampling) take explicit seeds.
//!
//! | Module | Contents |
//! |--------|----------|
//! | [`metric`] | [`FiniteMetricSpace`], validation, balls, doubling/perfectness stats, JSON |
//! | [`gh`] | correspondences, exact branch-and-bound, lower/upper bounds, pointed variants |
//! | [`fractal`] | generators: carpets, snowflakes, Wu's line, rugs, model tangents, the square map |
//! | [`boundary`] | reduced words, boundary points, visual metric, cylinders, expansion probes |
//! | [`tangent`] | window extraction and blow-up scans against model tangents |
//! | [`qs`] | distortion envelopes, envelope algebra, diameter-ratio and QC probes |

pub mod boundary;
pub mod format;
pub mod fractal;
pub mod gh;
pub mod metric;
pub mod parse;
pub mod qs;
pub mod tangent;

pub use metric::{FiniteMetricSpace, PointedWindow};

/// Any error raised by the library, tagged with the module it came from.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("metric: {0}")]
    Metric(#[from] metric::MetricError),
    #[error("gh: {0}")]
    Gh(#[from] gh::GhError),
    #[error("fractal: {0}")]
    Fractal(#[from] fractal::FractalError),
    #[error("boundary: {0}")]
    Boundary(#[from] boundary::BoundaryError),
    #[error("tangent: {0}")]
    Tangent(#[from] tangent::TangentError),
    #[error("qs: {0}")]
    Qs(#[from] qs::QsError),
    #[error("parse: {0}")]
    Parse(#[from] parse::ParseError),
}
