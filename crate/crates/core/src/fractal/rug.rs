//! Product "rugs" `(ℝ, δ) × ℝ` with metric `sqrt(δ(x,x')² + |y - y'|²)`.

use super::carpet::DENSE_MAX;
use super::wu::{delta, wu_sample, WuSchedule};
use super::FractalError;
use crate::format::fmt_num;
use crate::metric::FiniteMetricSpace;

/// The metric placed on the first factor.
#[derive(Clone, Debug, PartialEq)]
pub enum LineMetric {
    /// Wu's line, with intervals up to `truncation`.
    Wu { sched: WuSchedule, truncation: usize },
    /// `|x - x'|^eps` with `eps ∈ (0, 1)` (Rickman's rug).
    Snowflake { eps: f64 },
}

impl LineMetric {
    pub fn distance(&self, x: f64, y: f64) -> f64 {
        match self {
            LineMetric::Wu { sched, truncation } => delta(x, y, sched, *truncation),
            LineMetric::Snowflake { eps } => (x - y).abs().powf(*eps),
        }
    }

    fn check(&self) -> Result<(), FractalError> {
        match self {
            LineMetric::Snowflake { eps } if !(*eps > 0.0 && *eps < 1.0) => Err(FractalError::Domain(
                format!("snowflake exponent must lie in (0,1), got {eps}"),
            )),
            LineMetric::Wu { sched, truncation } if *truncation > sched.len() => {
                Err(FractalError::Schedule(format!(
                    "truncation {truncation} exceeds the {} schedule entries",
                    sched.len()
                )))
            }
            _ => Ok(()),
        }
    }
}

/// `x`-coordinates sampled on `[lo, hi]` at step `h`.
pub(crate) fn line_sample(line: &LineMetric, lo: f64, hi: f64, h: f64) -> Vec<f64> {
    match line {
        LineMetric::Wu { sched, truncation } => wu_sample(sched, *truncation, lo, hi, h),
        LineMetric::Snowflake { .. } => {
            let k = ((hi - lo) / h).round() as usize;
            (0..=k).map(|i| (lo + i as f64 * h).min(hi)).collect()
        }
    }
}

/// Grid sample of `[x0, x1] × [y0, y1]` at step `h` with the product metric.
///
/// Only `dim = 2` is supported. The metric is the closed formula, so no
/// shortest-path pass is involved.
pub fn product_rug_space(
    line: &LineMetric,
    dim: usize,
    extent: [[f64; 2]; 2],
    h: f64,
) -> Result<FiniteMetricSpace, FractalError> {
    line.check()?;
    if dim != 2 {
        return Err(FractalError::Domain(format!("rugs are built in dimension 2 only, got {dim}")));
    }
    if !(h > 0.0) || !h.is_finite() {
        return Err(FractalError::Domain(format!("resolution must be positive, got {h}")));
    }
    let [[x0, x1], [y0, y1]] = extent;
    if !(x1 >= x0) || !(y1 >= y0) || !x0.is_finite() || !x1.is_finite() || !y0.is_finite() || !y1.is_finite() {
        return Err(FractalError::Domain("rug extent must be finite, nonempty intervals".into()));
    }
    let xs = line_sample(line, x0, x1, h);
    let ky = ((y1 - y0) / h).round() as usize;
    let ys: Vec<f64> = (0..=ky).map(|j| (y0 + j as f64 * h).min(y1)).collect();
    let pts: Vec<[f64; 2]> = ys.iter().flat_map(|&y| xs.iter().map(move |&x| [x, y])).collect();
    rug_on(line, &pts)
}

pub(crate) fn rug_on(line: &LineMetric, pts: &[[f64; 2]]) -> Result<FiniteMetricSpace, FractalError> {
    let n = pts.len();
    if n > DENSE_MAX {
        return Err(FractalError::TooLarge { points: n, max: DENSE_MAX });
    }
    let mut flat = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = line.distance(pts[i][0], pts[j][0]).hypot(pts[i][1] - pts[j][1]);
            flat[i * n + j] = d;
            flat[j * n + i] = d;
        }
    }
    let labels = pts.iter().map(|p| format!("{},{}", fmt_num(p[0]), fmt_num(p[1]))).collect();
    Ok(FiniteMetricSpace::from_dense(labels, flat))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearly_euclidean_exponent() {
        let line = LineMetric::Snowflake { eps: 0.999 };
        let m = product_rug_space(&line, 2, [[0.0, 1.0], [0.0, 1.0]], 0.25).unwrap();
        let pts: Vec<[f64; 2]> = m
            .labels()
            .iter()
            .map(|l| {
                let v: Vec<f64> = l.split(',').map(|s| s.parse().unwrap()).collect();
                [v[0], v[1]]
            })
            .collect();
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                let e = (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
                assert!((m.dist(i, j) - e).abs() <= 0.01 * e);
            }
        }
    }

    #[test]
    fn vertical_gaps_are_euclidean() {
        let line = LineMetric::Snowflake { eps: 0.5 };
        let m = product_rug_space(&line, 2, [[0.0, 0.0], [0.0, 1.0]], 0.125).unwrap();
        assert_eq!(m.len(), 9);
        assert_eq!(m.dist(0, 8), 1.0);
    }

    #[test]
    fn twenty_by_twenty_is_a_metric() {
        let line = LineMetric::Snowflake { eps: 0.5 };
        let m = product_rug_space(&line, 2, [[0.0, 1.0], [0.0, 1.0]], 1.0 / 19.0).unwrap();
        assert_eq!(m.len(), 400);
        assert!(m.validate().is_metric());
        let wu = LineMetric::Wu { sched: WuSchedule::preset(3).unwrap(), truncation: 3 };
        let m = product_rug_space(&wu, 2, [[0.25, 1.0], [0.0, 0.5]], 1.0 / 8.0).unwrap();
        assert!(m.validate().is_metric());
    }

    #[test]
    fn rejects_bad_parameters() {
        for eps in [0.0, 1.0, 1.5] {
            let line = LineMetric::Snowflake { eps };
            assert!(matches!(
                product_rug_space(&line, 2, [[0.0, 1.0], [0.0, 1.0]], 0.5),
                Err(FractalError::Domain(_))
            ));
        }
        let line = LineMetric::Snowflake { eps: 0.5 };
        assert!(product_rug_space(&line, 3, [[0.0, 1.0], [0.0, 1.0]], 0.5).is_err());
    }
}
