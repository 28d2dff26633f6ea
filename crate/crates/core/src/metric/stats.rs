use serde::Serialize;

use super::{farthest_point_order, FiniteMetricSpace, MetricError};

/// Above this many points, balls are only probed around a farthest-point sample.
const MAX_PROBE_CENTERS: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Perfectness {
    /// Every probed annulus `B(x,r) \ B̄(x,r/C)` with nonempty exterior was nonempty.
    Constant { c: f64 },
    /// Some probed ball had points outside it but nothing at distance in `(0, r)`.
    NotUniformlyPerfect { center: usize, radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometryStats {
    pub diameter: f64,
    pub doubling_estimate: usize,
    pub perfectness: Perfectness,
}

/// Diameter, a greedy doubling estimate and a uniform-perfectness constant
/// probed at the given scales.
///
/// The doubling estimate is the largest number of balls of radius `r/2`
/// that farthest-point insertion needs to cover some `B̄(x, r)`.
pub fn geometry_stats(m: &FiniteMetricSpace, scales: &[f64]) -> Result<GeometryStats, MetricError> {
    if m.is_empty() {
        return Err(MetricError::Domain("geometry stats of an empty space".into()));
    }
    if let Some(bad) = scales.iter().find(|s| !(**s > 0.0) || !s.is_finite()) {
        return Err(MetricError::Domain(format!("scale {bad} is not positive")));
    }
    if scales.windows(2).any(|w| w[1] > w[0]) {
        return Err(MetricError::Domain("scales must be descending".into()));
    }
    let n = m.len();
    let centers: Vec<usize> = if n <= MAX_PROBE_CENTERS {
        (0..n).collect()
    } else {
        farthest_point_order(m, 0, MAX_PROBE_CENTERS).0
    };

    let mut doubling = 1;
    let mut worst_ratio = 1.0f64;
    let mut imperfect = None;
    for &x in &centers {
        let row = m.row(x);
        for &r in scales {
            doubling = doubling.max(greedy_cover(m, &row, r));
            if imperfect.is_none() && row.iter().any(|&d| d >= r) {
                let inner = row.iter().filter(|&&d| d > 0.0 && d < r).fold(0.0f64, |a, &d| a.max(d));
                if inner > 0.0 {
                    worst_ratio = worst_ratio.max(r / inner);
                } else {
                    imperfect = Some(Perfectness::NotUniformlyPerfect { center: x, radius: r });
                }
            }
        }
    }
    Ok(GeometryStats {
        diameter: m.diameter(),
        doubling_estimate: doubling,
        perfectness: imperfect.unwrap_or(Perfectness::Constant { c: worst_ratio }),
    })
}

fn greedy_cover(m: &FiniteMetricSpace, row: &[f64], r: f64) -> usize {
    let ball: Vec<usize> = (0..row.len()).filter(|&q| row[q] <= r).collect();
    let half = r / 2.0;
    let mut gap: Vec<f64> = ball.iter().map(|&q| row[q]).collect();
    let mut count = 1;
    loop {
        let (far, &fd) = gap
            .iter()
            .enumerate()
            .fold((0, &0.0), |acc, (i, d)| if *d > *acc.1 { (i, d) } else { acc });
        if fd <= half {
            return count;
        }
        count += 1;
        let c = ball[far];
        for (slot, &q) in gap.iter_mut().zip(&ball) {
            let d = m.dist(c, q);
            if d < *slot {
                *slot = d;
            }
        }
    }
}
