//! Gromov-Hausdorff distance between finite metric spaces.
//!
//! Everything goes through correspondences: `d_GH(X, Y) = ½ · min dis(R)`
//! over full relations `R ⊆ X × Y`. Pointed variants only admit relations
//! containing the base pair.

mod correspondence;
mod exact;
mod heuristic;
mod lower;

use serde::Serialize;

use crate::metric::{FiniteMetricSpace, PointedWindow};

pub use correspondence::{distortion_of_correspondence, map_distortion, Correspondence};
pub use exact::{gh_exact_small, pointed_gh_exact};
pub use heuristic::HeuristicConfig;
pub use lower::{lower_bound, pointed_lower_bound};

/// Node budget used when a bound routine opportunistically runs the exact search.
pub const DEFAULT_BUDGET: u64 = 2_000_000;

/// Spaces at most this large get an exact answer from [`pointed_gh_bounds`].
const POINTED_EXACT_MAX: usize = 8;

#[derive(Debug, thiserror::Error)]
pub enum GhError {
    #[error("space {0} is empty")]
    Empty(&'static str),
    #[error("correspondence does not cover {side} index {index}")]
    NotFull { side: &'static str, index: usize },
    #[error("index {index} out of range for {side} of size {len}")]
    Index { side: &'static str, index: usize, len: usize },
    #[error("map has {got} entries for a domain of {expected} points")]
    MapLength { got: usize, expected: usize },
}

/// Lower and upper bounds on a GH distance, plus the exact value when the
/// search closed the gap and a correspondence attaining `upper`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GhResult {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
    pub witness: Option<Correspondence>,
}

impl GhResult {
    /// Width of the bracket; zero when exact.
    pub fn gap(&self) -> f64 {
        self.upper - self.lower
    }

    /// The same result with the roles of the two spaces exchanged.
    pub fn transposed(self) -> Self {
        Self { witness: self.witness.map(|w| w.transposed()), ..self }
    }
}

fn nonempty(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<(), GhError> {
    if x.is_empty() {
        return Err(GhError::Empty("X"));
    }
    if y.is_empty() {
        return Err(GhError::Empty("Y"));
    }
    Ok(())
}

/// Bounds without exact search: the best of several lower bounds and the
/// distortion of the best correspondence found by seeded local search.
pub fn gh_bounds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<GhResult, GhError> {
    gh_bounds_with(x, y, &HeuristicConfig::default())
}

pub fn gh_bounds_with(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    cfg: &HeuristicConfig,
) -> Result<GhResult, GhError> {
    nonempty(x, y)?;
    let lower = lower_bound(x, y);
    let (dis, witness) = heuristic::best_correspondence(x, y, None, cfg);
    Ok(GhResult { lower: lower.min(dis / 2.0), upper: dis / 2.0, exact: None, witness: Some(witness) })
}

/// Pointed bounds: only correspondences containing `(w1.base, w2.base)`.
///
/// Windows cut at different radii are compared anyway, with a warning. Tiny
/// windows are solved exactly.
pub fn pointed_gh_bounds(w1: &PointedWindow, w2: &PointedWindow) -> Result<GhResult, GhError> {
    pointed_gh_bounds_with(w1, w2, &HeuristicConfig::default())
}

pub fn pointed_gh_bounds_with(
    w1: &PointedWindow,
    w2: &PointedWindow,
    cfg: &HeuristicConfig,
) -> Result<GhResult, GhError> {
    nonempty(&w1.space, &w2.space)?;
    let scale = w1.radius.abs().max(w2.radius.abs()).max(1e-300);
    if (w1.radius - w2.radius).abs() > 1e-9 * scale {
        log::warn!(
            "comparing pointed windows of different radii {} and {}",
            w1.radius,
            w2.radius
        );
    }
    if w1.len() <= POINTED_EXACT_MAX && w2.len() <= POINTED_EXACT_MAX {
        return pointed_gh_exact(w1, w2, DEFAULT_BUDGET);
    }
    let base = (w1.base, w2.base);
    let lower = pointed_lower_bound(&w1.space, &w2.space, base);
    let (dis, witness) = heuristic::best_correspondence(&w1.space, &w2.space, Some(base), cfg);
    Ok(GhResult { lower: lower.min(dis / 2.0), upper: dis / 2.0, exact: None, witness: Some(witness) })
}
