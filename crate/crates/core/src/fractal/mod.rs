//! Finite approximations of the explicit spaces: slit and pillow carpets,
//! snowflake curves, Wu's line, product rugs and the model tangents.

mod carpet;
mod generator;
mod model;
mod rug;
mod snowflake;
mod wu;

pub use carpet::{pillow_carpet_space, slit_carpet_space, CarpetGraph, Side, SlitSchedule, DENSE_MAX};
pub use generator::{
    generator_from_spec, Center, Model, Plane, Rug, Scaled, SlitCarpet, Snowflake, SpaceGenerator,
    Square, WuLine,
};
pub use model::{
    cone_distance, model_tangent_space, square_map_phi, t_points_space, ModelKind, TPoint,
};
pub use rug::{product_rug_space, LineMetric};
pub use snowflake::{
    arc_length, arc_positions, snowflake_polyline, snowflake_vertices, CurveMetric, Flatness,
    MAX_STAGE,
};
pub use wu::{wu_l, wu_line_metric, wu_phi, WuSchedule};

use crate::metric::MetricError;
use crate::parse::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum FractalError {
    #[error("schedule error: {0}")]
    Schedule(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("space spec: {0}")]
    Spec(String),
    #[error("{points} points exceed the limit of {max}")]
    TooLarge { points: usize, max: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}
