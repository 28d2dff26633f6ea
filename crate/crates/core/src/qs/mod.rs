//! Quasisymmetric and quasiconformal distortion of sampled maps.
//!
//! A [`SampledMap`] is an injective index map between two finite metric
//! spaces. Its [`DistortionEnvelope`] is the smallest nondecreasing step
//! function `η̂` with `d(fx,fy)/d(fx,fz) ≤ η̂(d(x,y)/d(x,z))` on the sampled
//! triples.

mod algebra;
mod envelope;
mod probe;

use serde::Deserialize;

use crate::metric::FiniteMetricSpace;

pub use algebra::{compose_envelopes, invert_envelope, AlgebraResult};
pub use envelope::{
    check_eta, check_eta_with, distortion_envelope, write_envelope_csv, DistortionEnvelope,
    EtaCheck, TripleBudget, DEFAULT_TRIPLE_BUDGET,
};
pub use probe::{diam_ratio_check, qc_constant_probe, DiamRatioRow, QcReport, QcRow};

#[derive(Debug, thiserror::Error)]
pub enum QsError {
    #[error("{0}")]
    Domain(String),
    #[error("degenerate: {0}")]
    Degenerate(String),
    #[error("invalid JSON at line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
}

/// A map between finite metric spaces, given by the image index of every
/// domain point.
#[derive(Clone, Debug)]
pub struct SampledMap {
    domain: FiniteMetricSpace,
    codomain: FiniteMetricSpace,
    assignment: Vec<usize>,
}

impl SampledMap {
    /// Rejects partial, out-of-range and non-injective assignments, and
    /// images that coincide in the codomain metric.
    pub fn new(
        domain: FiniteMetricSpace,
        codomain: FiniteMetricSpace,
        assignment: Vec<usize>,
    ) -> Result<Self, QsError> {
        if assignment.len() != domain.len() {
            return Err(QsError::Domain(format!(
                "assignment has {} entries for a domain of {} points",
                assignment.len(),
                domain.len()
            )));
        }
        let mut seen = vec![usize::MAX; codomain.len()];
        for (i, &j) in assignment.iter().enumerate() {
            if j >= codomain.len() {
                return Err(QsError::Domain(format!(
                    "point {i} maps to {j}, but the codomain has {} points",
                    codomain.len()
                )));
            }
            if seen[j] != usize::MAX {
                return Err(QsError::Domain(format!(
                    "not injective: points {} and {i} both map to {j}",
                    seen[j]
                )));
            }
            seen[j] = i;
        }
        for (i, &a) in assignment.iter().enumerate() {
            for (k, &b) in assignment.iter().enumerate().skip(i + 1) {
                if codomain.dist(a, b) <= 0.0 {
                    return Err(QsError::Domain(format!(
                        "images of points {i} and {k} are at distance zero"
                    )));
                }
            }
        }
        Ok(Self { domain, codomain, assignment })
    }

    /// The identity onto a copy of `domain` with a different metric on the
    /// same labels.
    pub fn identity(domain: FiniteMetricSpace, codomain: FiniteMetricSpace) -> Result<Self, QsError> {
        let n = domain.len();
        Self::new(domain, codomain, (0..n).collect())
    }

    pub fn domain(&self) -> &FiniteMetricSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteMetricSpace {
        &self.codomain
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    /// `d_Y(f(i), f(j))`.
    pub fn image_dist(&self, i: usize, j: usize) -> f64 {
        self.codomain.dist(self.assignment[i], self.assignment[j])
    }

    /// `g ∘ self`, where `g` starts at this map's codomain.
    pub fn then(&self, g: &SampledMap) -> Result<SampledMap, QsError> {
        if g.domain.len() != self.codomain.len() {
            return Err(QsError::Domain(format!(
                "cannot compose: codomain has {} points, next domain has {}",
                self.codomain.len(),
                g.domain.len()
            )));
        }
        let assignment = self.assignment.iter().map(|&j| g.assignment[j]).collect();
        SampledMap::new(self.domain.clone(), g.codomain.clone(), assignment)
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MapJson {
    Bare(Vec<usize>),
    Object {
        assignment: Vec<usize>,
    },
}

/// Parses a map file: either a bare JSON array of codomain indices or
/// `{"assignment": [...]}`.
pub fn read_map_json(text: &str) -> Result<Vec<usize>, QsError> {
    let raw: MapJson = serde_json::from_str(text).map_err(|e| QsError::Json {
        line: e.line(),
        column: e.column(),
        msg: crate::format::json_message(&e),
    })?;
    Ok(match raw {
        MapJson::Bare(v) => v,
        MapJson::Object { assignment } => assignment,
    })
}
