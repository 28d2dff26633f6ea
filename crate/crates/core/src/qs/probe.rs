use serde::Serialize;

use super::{DistortionEnvelope, QsError, SampledMap};
use crate::tangent::{trend_of, Trend, TREND_BAND};

const MARGIN_TOL: f64 = 1e-12;

/// One `A ⊂ B` pair checked against
/// `1/(2η(diam B/diam A)) ≤ diam f(A)/diam f(B) ≤ η(2 diam A/diam B)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiamRatioRow {
    pub ratio: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `ratio − lower_bound`.
    pub lower_margin: f64,
    /// `upper_bound − ratio`.
    pub upper_margin: f64,
    pub holds: bool,
}

fn diam(f: &SampledMap, set: &[usize], image: bool) -> f64 {
    let mut best = 0.0f64;
    for (k, &i) in set.iter().enumerate() {
        for &j in &set[k + 1..] {
            let d = if image { f.image_dist(i, j) } else { f.domain().dist(i, j) };
            best = best.max(d);
        }
    }
    best
}

/// Checks both diameter inequalities for every pair, with `eta` (usually
/// the measured envelope of `f`) in step form.
pub fn diam_ratio_check(
    f: &SampledMap,
    eta: &DistortionEnvelope,
    pairs: &[(Vec<usize>, Vec<usize>)],
) -> Result<Vec<DiamRatioRow>, QsError> {
    let n = f.len();
    pairs
        .iter()
        .enumerate()
        .map(|(k, (a, b))| {
            if let Some(&i) = a.iter().chain(b).find(|&&i| i >= n) {
                return Err(QsError::Domain(format!("pair {k}: index {i} is out of range")));
            }
            if let Some(&i) = a.iter().find(|i| !b.contains(i)) {
                return Err(QsError::Domain(format!("pair {k}: point {i} of A is not in B")));
            }
            let da = diam(f, a, false);
            if da <= 0.0 {
                return Err(QsError::Degenerate(format!("pair {k}: A has zero diameter")));
            }
            let db = diam(f, b, false);
            let ratio = diam(f, a, true) / diam(f, b, true);
            let at = |t: f64| {
                eta.eval(t).ok_or_else(|| QsError::Domain(format!("pair {k}: η is undefined at {t}")))
            };
            let lower_bound = 1.0 / (2.0 * at(db / da)?);
            let upper_bound = at(2.0 * da / db)?;
            let lower_margin = ratio - lower_bound;
            let upper_margin = upper_bound - ratio;
            Ok(DiamRatioRow {
                ratio,
                lower_bound,
                upper_bound,
                lower_margin,
                upper_margin,
                holds: lower_margin >= -MARGIN_TOL && upper_margin >= -MARGIN_TOL,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QcRow {
    pub radius: f64,
    /// Largest `H(x, r)` over the evaluated points.
    pub h_max: f64,
    pub worst_point: Option<usize>,
    pub evaluated: usize,
    /// Points with nothing else within `r`, or nothing at distance `≥ r`.
    pub skipped: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QcReport {
    pub rows: Vec<QcRow>,
    /// Direction of `h_max` as the radius decreases.
    pub trend: Trend,
}

/// `H(x, r) = max{d(fx,fy) : 0 < d(x,y) ≤ r} / min{d(fx,fy) : d(x,y) ≥ r}`
/// at each radius, maximized over points.
pub fn qc_constant_probe(f: &SampledMap, radii: &[f64]) -> Result<QcReport, QsError> {
    if radii.is_empty() {
        return Err(QsError::Domain("no radii given".into()));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(QsError::Domain(format!("radius {r} is not positive")));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(QsError::Domain("radii must be strictly descending".into()));
    }
    let n = f.len();
    let rows_d: Vec<Vec<f64>> = (0..n).map(|x| f.domain().row(x)).collect();
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut row = QcRow { radius: r, h_max: 0.0, worst_point: None, evaluated: 0, skipped: 0 };
        for x in 0..n {
            let mut big = 0.0f64;
            let mut small = f64::INFINITY;
            let mut inside = false;
            for y in (0..n).filter(|&y| y != x) {
                let d = rows_d[x][y];
                let fd = f.image_dist(x, y);
                if d <= r {
                    inside = true;
                    big = big.max(fd);
                }
                if d >= r {
                    small = small.min(fd);
                }
            }
            if !inside || !small.is_finite() {
                row.skipped += 1;
                continue;
            }
            row.evaluated += 1;
            let h = big / small;
            if row.worst_point.is_none() || h > row.h_max {
                row.h_max = h;
                row.worst_point = Some(x);
            }
        }
        rows.push(row);
    }
    let hs: Vec<f64> = rows.iter().filter(|r| r.evaluated > 0).map(|r| r.h_max).collect();
    let trend = trend_of(&hs, TREND_BAND);
    Ok(QcReport { rows, trend })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qs::{distortion_envelope, TripleBudget};
    use crate::FiniteMetricSpace;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_line_points(FiniteMetricSpace::index_labels(xs.len()), xs.to_vec())
    }

    #[test]
    fn identity_pairs_hold() {
        let xs: Vec<f64> = (0..12).map(|i| i as f64 * 0.1).collect();
        let x = line(&xs);
        let f = SampledMap::identity(x.clone(), x).unwrap();
        let env = distortion_envelope(&f, TripleBudget::All).unwrap();
        let all: Vec<usize> = (0..12).collect();
        let pairs = vec![(all.clone(), all.clone()), (vec![2, 3, 4], all.clone()), (vec![0, 1], vec![0, 1, 2])];
        let rows = diam_ratio_check(&f, &env, &pairs).unwrap();
        assert!(rows.iter().all(|r| r.holds), "{rows:?}");
        assert_eq!(rows[0].ratio, 1.0);
        assert!((rows[0].upper_bound - 2.0).abs() < 1e-12);
        assert!(diam_ratio_check(&f, &env, &[(vec![3], all.clone())]).is_err());
        assert!(diam_ratio_check(&f, &env, &[(vec![3, 20], all.clone())]).is_err());
        assert!(diam_ratio_check(&f, &env, &[(vec![0, 5], vec![0, 1])]).is_err());
    }

    #[test]
    fn isometry_has_constant_at_most_one() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 / 39.0).collect();
        let x = line(&xs);
        let f = SampledMap::identity(x.clone(), x).unwrap();
        // Radii on the grid: the sup and the inf are both attained at r.
        let rep = qc_constant_probe(&f, &[16.0 / 39.0, 8.0 / 39.0, 4.0 / 39.0, 2.0 / 39.0]).unwrap();
        for r in &rep.rows {
            assert!((r.h_max - 1.0).abs() < 1e-9, "{r:?}");
            assert_eq!(r.skipped, 0);
        }
        assert_eq!(rep.trend, Trend::Flat);
        // Off the grid, sup ≤ r ≤ inf with both within one spacing of r.
        let s = 1.0 / 39.0;
        let rep = qc_constant_probe(&f, &[0.4, 0.2, 0.1, 0.05]).unwrap();
        for r in &rep.rows {
            assert!(r.h_max <= 1.0 + 1e-12 && r.h_max >= (r.radius - s) / (r.radius + s), "{r:?}");
        }
        assert!(qc_constant_probe(&f, &[0.1, 0.2]).is_err());
        assert!(qc_constant_probe(&f, &[0.0]).is_err());
    }

    #[test]
    fn isolated_points_are_counted() {
        let x = line(&[0.0, 0.01, 1.0, 1.01, 5.0]);
        let f = SampledMap::identity(x.clone(), x).unwrap();
        let rep = qc_constant_probe(&f, &[0.5]).unwrap();
        assert_eq!(rep.rows[0].skipped, 1);
        assert_eq!(rep.rows[0].evaluated, 4);
    }
}
