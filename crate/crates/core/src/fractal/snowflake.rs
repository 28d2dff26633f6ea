//! Snowflake polylines: the Koch construction with isosceles bumps whose
//! legs are `½·l_k` times the base at stage `k`.

use std::collections::HashMap;

use super::FractalError;
use crate::metric::FiniteMetricSpace;

/// Largest stage generated (4^11 segments).
pub const MAX_STAGE: usize = 11;

/// Leg factors `l_k` per stage `k = 1, 2, ...`.
#[derive(Clone, Debug, PartialEq)]
pub enum Flatness {
    /// `l_k = 2` (equilateral bumps, the Koch curve).
    Standard,
    /// `l_k = 1 + 2^-k`.
    Dyadic,
    /// Explicit `l_1, l_2, ...`; must cover every stage used.
    List(Vec<f64>),
}

impl Flatness {
    pub fn leg_factor(&self, k: usize) -> Result<f64, FractalError> {
        match self {
            Flatness::Standard => Ok(2.0),
            Flatness::Dyadic => Ok(1.0 + 0.5f64.powi(k as i32)),
            Flatness::List(v) => v.get(k - 1).copied().ok_or_else(|| {
                FractalError::Schedule(format!(
                    "flatness list has {} entries but stage {k} was requested",
                    v.len()
                ))
            }),
        }
    }
}

/// How distances along the curve are measured.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurveMetric {
    /// Euclidean distance in the plane.
    Chordal,
    /// Length along the polyline.
    ArcLength,
}

/// Vertices of the stage-`stage` polyline over `[a, b] × {0}`; bumps point to
/// the left of the direction of travel.
pub fn snowflake_vertices(
    stage: usize,
    flatness: &Flatness,
    a: f64,
    b: f64,
) -> Result<Vec<[f64; 2]>, FractalError> {
    if !(b > a) {
        return Err(FractalError::Domain(format!("window [{a}, {b}] is empty")));
    }
    if stage > MAX_STAGE {
        return Err(FractalError::TooLarge { points: 1 << (2 * stage), max: 1 << (2 * MAX_STAGE) });
    }
    let mut pts = vec![[a, 0.0], [b, 0.0]];
    for k in 1..=stage {
        let l = flatness.leg_factor(k)?;
        if !(l >= 1.0) || !l.is_finite() {
            return Err(FractalError::Construction(format!(
                "stage {k}: leg factor {l} makes legs shorter than half the base"
            )));
        }
        let lift = 0.5 * (l * l - 1.0).sqrt();
        let mut next = Vec::with_capacity(4 * (pts.len() - 1) + 1);
        for w in pts.windows(2) {
            let [p, q] = [w[0], w[1]];
            let d = [q[0] - p[0], q[1] - p[1]];
            let p1 = [p[0] + d[0] / 3.0, p[1] + d[1] / 3.0];
            let p2 = [p[0] + 2.0 * d[0] / 3.0, p[1] + 2.0 * d[1] / 3.0];
            // height = (base/2)·sqrt(l² - 1) with base = |d|/3; left normal of d.
            let s = lift / 3.0;
            let apex = [(p[0] + q[0]) / 2.0 - d[1] * s, (p[1] + q[1]) / 2.0 + d[0] * s];
            next.extend_from_slice(&[p, p1, apex, p2]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    if let Some((i, j)) = self_intersection(&pts) {
        return Err(FractalError::Construction(format!(
            "stage {stage} polyline crosses itself (segments {i} and {j})"
        )));
    }
    Ok(pts)
}

/// Total length of a polyline.
pub fn arc_length(pts: &[[f64; 2]]) -> f64 {
    pts.windows(2).map(|w| (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1])).sum()
}

/// Cumulative arc length at each vertex.
pub fn arc_positions(pts: &[[f64; 2]]) -> Vec<f64> {
    let mut out = Vec::with_capacity(pts.len());
    let mut s = 0.0;
    out.push(0.0);
    for w in pts.windows(2) {
        s += (w[1][0] - w[0][0]).hypot(w[1][1] - w[0][1]);
        out.push(s);
    }
    out
}

/// The stage-`stage` polyline as a metric space on its vertices.
pub fn snowflake_polyline(
    stage: usize,
    flatness: &Flatness,
    window: [f64; 2],
    metric: CurveMetric,
) -> Result<FiniteMetricSpace, FractalError> {
    let pts = snowflake_vertices(stage, flatness, window[0], window[1])?;
    Ok(polyline_space(&pts, metric))
}

pub(crate) fn polyline_space(pts: &[[f64; 2]], metric: CurveMetric) -> FiniteMetricSpace {
    let labels: Vec<String> = (0..pts.len()).map(|i| format!("v{i}")).collect();
    match metric {
        CurveMetric::Chordal => FiniteMetricSpace::from_planar_points(labels, pts.to_vec()),
        CurveMetric::ArcLength => FiniteMetricSpace::from_line_points(labels, arc_positions(pts)),
    }
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_meet(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let scale = (p2[0] - p1[0]).abs() + (p2[1] - p1[1]).abs() + (q2[0] - q1[0]).abs() + (q2[1] - q1[1]).abs();
    let eps = 1e-12 * scale * scale;
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    let on = |a: [f64; 2], b: [f64; 2], c: [f64; 2], d: f64| {
        d.abs() <= eps
            && c[0] >= a[0].min(b[0]) - 1e-15
            && c[0] <= a[0].max(b[0]) + 1e-15
            && c[1] >= a[1].min(b[1]) - 1e-15
            && c[1] <= a[1].max(b[1]) + 1e-15
    };
    on(q1, q2, p1, d1) || on(q1, q2, p2, d2) || on(p1, p2, q1, d3) || on(p1, p2, q2, d4)
}

/// First pair of non-adjacent segments that touch, found with a uniform grid.
fn self_intersection(pts: &[[f64; 2]]) -> Option<(usize, usize)> {
    let nseg = pts.len().saturating_sub(1);
    if nseg < 3 {
        return None;
    }
    let cell = pts
        .windows(2)
        .map(|w| (w[1][0] - w[0][0]).abs().max((w[1][1] - w[0][1]).abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let key = |v: f64| (v / cell).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for s in 0..nseg {
        let (p, q) = (pts[s], pts[s + 1]);
        for cx in key(p[0].min(q[0]))..=key(p[0].max(q[0])) {
            for cy in key(p[1].min(q[1]))..=key(p[1].max(q[1])) {
                grid.entry((cx, cy)).or_default().push(s);
            }
        }
    }
    let mut found: Option<(usize, usize)> = None;
    for bucket in grid.values() {
        for (n, &s) in bucket.iter().enumerate() {
            for &t in &bucket[n + 1..] {
                let (s, t) = (s.min(t), s.max(t));
                if t == s + 1 {
                    continue;
                }
                if segments_meet(pts[s], pts[s + 1], pts[t], pts[t + 1]) {
                    found = Some(found.map_or((s, t), |f| f.min((s, t))));
                }
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stage_zero_is_the_segment() {
        let m = snowflake_polyline(0, &Flatness::Standard, [0.0, 2.0], CurveMetric::ArcLength).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.dist(0, 1), 2.0);
    }

    #[test]
    fn koch_arc_length() {
        for n in 0..6 {
            let pts = snowflake_vertices(n, &Flatness::Standard, 0.0, 1.0).unwrap();
            assert_eq!(pts.len(), 4usize.pow(n as u32) + 1);
            let want = (4.0f64 / 3.0).powi(n as i32);
            assert!((arc_length(&pts) - want).abs() < 1e-12, "stage {n}");
        }
    }

    #[test]
    fn nearly_flat_bumps_barely_lengthen() {
        let f = Flatness::List(vec![1.0 + 1e-6; 6]);
        let pts = snowflake_vertices(6, &f, 0.0, 1.0).unwrap();
        assert!((arc_length(&pts) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn unit_factor_flattens_the_stage() {
        let pts = snowflake_vertices(2, &Flatness::List(vec![1.0, 1.0]), 0.0, 1.0).unwrap();
        assert!(pts.iter().all(|p| p[1] == 0.0));
    }

    #[test]
    fn construction_errors() {
        assert!(snowflake_vertices(1, &Flatness::List(vec![0.9]), 0.0, 1.0).is_err());
        assert!(snowflake_vertices(3, &Flatness::List(vec![1.5]), 0.0, 1.0).is_err());
        assert!(snowflake_vertices(1, &Flatness::Standard, 1.0, 0.0).is_err());
        // Tall second-stage bumps fold back over their neighbours.
        assert!(snowflake_vertices(2, &Flatness::List(vec![2.0, 8.0]), 0.0, 1.0).is_err());
    }

    #[test]
    fn bumps_point_left() {
        let pts = snowflake_vertices(1, &Flatness::Standard, 0.0, 1.0).unwrap();
        assert!(pts[2][1] > 0.0);
        assert!((pts[2][1] - 3f64.sqrt() / 6.0).abs() < 1e-15);
    }

    #[test]
    fn dyadic_is_a_metric_curve() {
        let m = snowflake_polyline(4, &Flatness::Dyadic, [0.0, 1.0], CurveMetric::Chordal).unwrap();
        assert!(m.validate().is_metric());
        let m = snowflake_polyline(4, &Flatness::Dyadic, [0.0, 1.0], CurveMetric::ArcLength).unwrap();
        assert!(m.validate().is_metric());
    }
}
