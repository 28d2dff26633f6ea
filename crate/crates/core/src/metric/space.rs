use std::f64::consts::PI;

use super::{MetricError, METRIC_TOL};

/// How distances are stored. Analytic metrics are evaluated on demand so
/// windows of ten thousand points do not need a dense matrix.
#[derive(Clone, Debug)]
pub(crate) enum Storage {
    /// Row-major `n x n` matrix.
    Dense(Vec<f64>),
    /// Points of the real line.
    Line(Vec<f64>),
    /// Points of the Euclidean plane.
    Planar(Vec<[f64; 2]>),
    /// Points of a flat cone or sector with its intrinsic metric.
    Cone(ConeSample),
}

/// Polar samples of a flat cone of total angle `total_angle`. When `closed`
/// is false the two boundary rays (angles 0 and `total_angle`) are not glued.
#[derive(Clone, Debug)]
pub(crate) struct ConeSample {
    pub r: Vec<f64>,
    pub theta: Vec<f64>,
    pub xy: Vec<[f64; 2]>,
    pub total_angle: f64,
    pub closed: bool,
}

impl ConeSample {
    pub fn new(r: Vec<f64>, theta: Vec<f64>, total_angle: f64, closed: bool) -> Self {
        let xy = r
            .iter()
            .zip(&theta)
            .map(|(&r, &t)| [r * t.cos(), r * t.sin()])
            .collect();
        Self { r, theta, xy, total_angle, closed }
    }

    #[inline]
    fn dist(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let mut delta = (self.theta[i] - self.theta[j]).abs();
        let mut wrapped = false;
        if self.closed {
            delta %= self.total_angle;
            if self.total_angle - delta < delta {
                delta = self.total_angle - delta;
                wrapped = true;
            }
        }
        let (ri, rj) = (self.r[i], self.r[j]);
        if delta >= PI {
            ri + rj
        } else if wrapped && (self.total_angle - 2.0 * PI).abs() > 1e-12 {
            (ri * ri + rj * rj - 2.0 * ri * rj * delta.cos()).max(0.0).sqrt()
        } else {
            let [xi, yi] = self.xy[i];
            let [xj, yj] = self.xy[j];
            (xi - xj).hypot(yi - yj)
        }
    }

    fn scaled(&self, c: f64) -> Self {
        Self {
            r: self.r.iter().map(|r| r * c).collect(),
            theta: self.theta.clone(),
            xy: self.xy.iter().map(|[x, y]| [x * c, y * c]).collect(),
            total_angle: self.total_angle,
            closed: self.closed,
        }
    }

    fn subset(&self, idx: &[usize]) -> Self {
        Self {
            r: idx.iter().map(|&i| self.r[i]).collect(),
            theta: idx.iter().map(|&i| self.theta[i]).collect(),
            xy: idx.iter().map(|&i| self.xy[i]).collect(),
            total_angle: self.total_angle,
            closed: self.closed,
        }
    }
}

/// A finite metric space: labelled points and their pairwise distances.
///
/// Values are immutable; every transformation returns a new space.
#[derive(Clone, Debug)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    storage: Storage,
}

impl FiniteMetricSpace {
    /// Builds a space from a full distance matrix, rejecting anything that is
    /// not a metric within [`METRIC_TOL`].
    pub fn from_matrix(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self, MetricError> {
        let report = super::validate_metric(&rows)?;
        if !report.is_metric() {
            return Err(MetricError::NotAMetric(report.to_string()));
        }
        Self::from_matrix_unchecked(labels, rows)
    }

    /// Builds a space from a square finite matrix without checking the
    /// triangle inequality. Shape and label count are still checked.
    pub fn from_matrix_unchecked(
        labels: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self, MetricError> {
        let n = rows.len();
        if labels.len() != n {
            return Err(MetricError::Malformed(format!(
                "{} labels for {} rows",
                labels.len(),
                n
            )));
        }
        let mut flat = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(MetricError::Malformed(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            flat.extend(row);
        }
        Ok(Self { labels, storage: Storage::Dense(flat) })
    }

    /// Dense space from a row-major buffer; caller guarantees the shape.
    pub(crate) fn from_dense(labels: Vec<String>, flat: Vec<f64>) -> Self {
        debug_assert_eq!(flat.len(), labels.len() * labels.len());
        Self { labels, storage: Storage::Dense(flat) }
    }

    /// Points on the real line with `|x - y|`.
    pub fn from_line_points(labels: Vec<String>, xs: Vec<f64>) -> Self {
        assert_eq!(labels.len(), xs.len());
        Self { labels, storage: Storage::Line(xs) }
    }

    /// Points of the Euclidean plane.
    pub fn from_planar_points(labels: Vec<String>, pts: Vec<[f64; 2]>) -> Self {
        assert_eq!(labels.len(), pts.len());
        Self { labels, storage: Storage::Planar(pts) }
    }

    pub(crate) fn from_cone(labels: Vec<String>, cone: ConeSample) -> Self {
        assert_eq!(labels.len(), cone.r.len());
        Self { labels, storage: Storage::Cone(cone) }
    }

    /// Default labels `"0"`, `"1"`, ...
    pub fn index_labels(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Planar coordinates when the space is stored as plane points.
    pub fn planar_points(&self) -> Option<&[[f64; 2]]> {
        match &self.storage {
            Storage::Planar(p) => Some(p),
            _ => None,
        }
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        match &self.storage {
            Storage::Dense(d) => d[i * self.labels.len() + j],
            Storage::Line(x) => (x[i] - x[j]).abs(),
            Storage::Planar(p) => {
                let [xi, yi] = p[i];
                let [xj, yj] = p[j];
                (xi - xj).hypot(yi - yj)
            }
            Storage::Cone(c) => c.dist(i, j),
        }
    }

    /// Distances from `i` to every point.
    pub fn row(&self, i: usize) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(d) => {
                let n = self.len();
                d[i * n..(i + 1) * n].to_vec()
            }
            _ => (0..self.len()).map(|j| self.dist(i, j)).collect(),
        }
    }

    /// The full distance matrix.
    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i)).collect()
    }

    /// Row-major copy of the distance matrix.
    pub fn to_dense(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(d) => d.clone(),
            _ => {
                let n = self.len();
                let mut out = vec![0.0; n * n];
                for i in 0..n {
                    for j in i + 1..n {
                        let d = self.dist(i, j);
                        out[i * n + j] = d;
                        out[j * n + i] = d;
                    }
                }
                out
            }
        }
    }

    pub fn eccentricity(&self, i: usize) -> f64 {
        (0..self.len()).map(|j| self.dist(i, j)).fold(0.0, f64::max)
    }

    /// Maximum pairwise distance; 0 for spaces with fewer than two points.
    pub fn diameter(&self) -> f64 {
        let n = self.len();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(self.dist(i, j));
            }
        }
        best
    }

    pub fn validate(&self) -> super::ValidationReport {
        super::validate::validate_space(self)
    }

    /// The subspace on `idx`, in the given order.
    pub fn subspace(&self, idx: &[usize]) -> Self {
        let labels = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let storage = match &self.storage {
            Storage::Dense(d) => {
                let n = self.len();
                let mut out = Vec::with_capacity(idx.len() * idx.len());
                for &i in idx {
                    let row = &d[i * n..(i + 1) * n];
                    out.extend(idx.iter().map(|&j| row[j]));
                }
                Storage::Dense(out)
            }
            Storage::Line(x) => Storage::Line(idx.iter().map(|&i| x[i]).collect()),
            Storage::Planar(p) => Storage::Planar(idx.iter().map(|&i| p[i]).collect()),
            Storage::Cone(c) => Storage::Cone(c.subset(idx)),
        };
        Self { labels, storage }
    }

    /// Every distance multiplied by `c > 0`.
    pub fn scale_by(&self, c: f64) -> Self {
        let storage = match &self.storage {
            Storage::Dense(d) => Storage::Dense(d.iter().map(|v| v * c).collect()),
            Storage::Line(x) => Storage::Line(x.iter().map(|v| v * c).collect()),
            Storage::Planar(p) => Storage::Planar(p.iter().map(|[x, y]| [x * c, y * c]).collect()),
            Storage::Cone(cs) => Storage::Cone(cs.scaled(c)),
        };
        Self { labels: self.labels.clone(), storage }
    }

    /// Every distance divided by `lambda > 0`.
    pub fn rescale(&self, lambda: f64) -> Result<Self, MetricError> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(MetricError::Domain(format!(
                "rescale factor must be positive and finite, got {lambda}"
            )));
        }
        let storage = match &self.storage {
            Storage::Dense(d) => Storage::Dense(d.iter().map(|v| v / lambda).collect()),
            Storage::Line(x) => Storage::Line(x.iter().map(|v| v / lambda).collect()),
            Storage::Planar(p) => {
                Storage::Planar(p.iter().map(|[x, y]| [x / lambda, y / lambda]).collect())
            }
            Storage::Cone(cs) => Storage::Cone(cs.scaled(1.0 / lambda)),
        };
        Ok(Self { labels: self.labels.clone(), storage })
    }

    /// Closed ball `{q : d(p, q) <= radius}` as a window of scale 1.
    pub fn ball(&self, p: usize, radius: f64) -> Result<PointedWindow, MetricError> {
        if p >= self.len() {
            return Err(MetricError::Index { index: p, len: self.len() });
        }
        if !(radius > 0.0) {
            return Err(MetricError::Domain(format!("ball radius must be positive, got {radius}")));
        }
        let idx: Vec<usize> = (0..self.len())
            .filter(|&q| self.dist(p, q) <= radius + radius * 1e-12)
            .collect();
        let base = idx.iter().position(|&q| q == p).expect("center lies in its own ball");
        Ok(PointedWindow { space: self.subspace(&idx), base, scale: 1.0, radius })
    }

    /// Largest entrywise difference against `other`, which must have the
    /// same number of points.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.len(), other.len());
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((self.dist(i, j) - other.dist(i, j)).abs());
            }
        }
        worst
    }
}

/// A finite metric space with a distinguished base point, remembering the
/// scale it was rescaled by and the (rescaled) radius it was cut at.
#[derive(Clone, Debug)]
pub struct PointedWindow {
    pub space: FiniteMetricSpace,
    pub base: usize,
    pub scale: f64,
    pub radius: f64,
}

impl PointedWindow {
    /// Builds a window, checking that every point lies within `radius` of the base.
    pub fn new(
        space: FiniteMetricSpace,
        base: usize,
        scale: f64,
        radius: f64,
    ) -> Result<Self, MetricError> {
        if base >= space.len() {
            return Err(MetricError::Index { index: base, len: space.len() });
        }
        if !(scale > 0.0) {
            return Err(MetricError::Domain(format!("window scale must be positive, got {scale}")));
        }
        let slack = METRIC_TOL.max(radius * 1e-12);
        if let Some(q) = (0..space.len()).find(|&q| space.dist(base, q) > radius + slack) {
            return Err(MetricError::Domain(format!(
                "point {q} lies at distance {} from the base, beyond radius {radius}",
                space.dist(base, q)
            )));
        }
        Ok(Self { space, base, scale, radius })
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    /// Divides the metric by `lambda`; scale multiplies, radius divides.
    pub fn rescale(&self, lambda: f64) -> Result<Self, MetricError> {
        Ok(Self {
            space: self.space.rescale(lambda)?,
            base: self.base,
            scale: self.scale * lambda,
            radius: self.radius / lambda,
        })
    }

    /// Sub-window of smaller radius around the same base.
    pub fn shrink(&self, radius: f64) -> Result<Self, MetricError> {
        let mut w = self.space.ball(self.base, radius)?;
        w.scale = self.scale;
        Ok(w)
    }
}

/// Farthest-point ordering starting at `start`: returns up to `k` indices and,
/// for each prefix, the covering radius reached after adding that point.
pub fn farthest_point_order(
    space: &FiniteMetricSpace,
    start: usize,
    k: usize,
) -> (Vec<usize>, Vec<f64>) {
    let n = space.len();
    let k = k.min(n);
    let mut order = Vec::with_capacity(k);
    let mut radii = Vec::with_capacity(k);
    if k == 0 {
        return (order, radii);
    }
    let mut near: Vec<f64> = (0..n).map(|j| space.dist(start, j)).collect();
    order.push(start);
    while order.len() < k {
        let (far, &fd) = near
            .iter()
            .enumerate()
            .fold((0, &-1.0), |acc, (j, d)| if *d > *acc.1 { (j, d) } else { acc });
        if fd <= 0.0 {
            break;
        }
        radii.push(fd);
        order.push(far);
        for (j, slot) in near.iter_mut().enumerate() {
            let d = space.dist(far, j);
            if d < *slot {
                *slot = d;
            }
        }
    }
    let last = near.iter().cloned().fold(0.0, f64::max);
    radii.push(last);
    (order, radii)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_line_points(FiniteMetricSpace::index_labels(xs.len()), xs.to_vec())
    }

    #[test]
    fn rescale_identity_and_halving() {
        let m = FiniteMetricSpace::from_matrix(
            vec!["a".into(), "b".into()],
            vec![vec![0.0, 2.0], vec![2.0, 0.0]],
        )
        .unwrap();
        assert_eq!(m.rescale(1.0).unwrap().to_matrix(), m.to_matrix());
        assert_eq!(m.rescale(2.0).unwrap().to_matrix(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert_eq!(m.rescale(2.0).unwrap().labels(), m.labels());
        assert!(m.rescale(0.0).is_err());
        assert!(m.rescale(-1.0).is_err());
    }

    #[test]
    fn rescale_composes() {
        let m = line(&[0.0, 0.3, 1.7, 4.0]);
        let twice = m.rescale(2.0).unwrap().rescale(5.0).unwrap();
        let once = m.rescale(10.0).unwrap();
        assert!(twice.max_abs_diff(&once) < 1e-15);
    }

    #[test]
    fn ball_on_a_line() {
        let m = line(&[0.0, 1.0, 2.0, 3.0]);
        let w = m.ball(0, 1.5).unwrap();
        assert_eq!(w.space.labels(), &["0", "1"]);
        assert_eq!(w.base, 0);
        assert_eq!(w.scale, 1.0);
        assert_eq!(m.ball(2, 10.0).unwrap().len(), 4);
        assert_eq!(m.ball(2, 0.5).unwrap().len(), 1);
        assert!(m.ball(9, 1.0).is_err());
    }

    #[test]
    fn ball_is_closed() {
        let m = line(&[0.0, 1.0, 2.0]);
        assert_eq!(m.ball(0, 1.0).unwrap().len(), 2);
    }

    #[test]
    fn cone_closed_half_angle_uses_law_of_cosines() {
        // Cone of angle pi: points at angle 0 and 3pi/4 are pi/4 apart through the seam.
        let c = ConeSample::new(vec![1.0, 1.0], vec![0.0, 0.75 * PI], PI, true);
        let d = c.dist(0, 1);
        let expect = (2.0 - 2.0 * (0.25 * PI).cos()).sqrt();
        assert!((d - expect).abs() < 1e-14);
    }

    #[test]
    fn slit_plane_goes_around_the_tip() {
        let h: f64 = 0.01;
        let t1 = h.atan2(1.0);
        let t2 = 2.0 * PI - t1;
        let r = (1.0 + h * h).sqrt();
        let c = ConeSample::new(vec![r, r], vec![t1, t2], 2.0 * PI, false);
        assert!((c.dist(0, 1) - 2.0 * r).abs() < 1e-14);
    }

    #[test]
    fn farthest_points_on_a_line() {
        let m = line(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let (order, radii) = farthest_point_order(&m, 2, 3);
        assert_eq!(order, vec![2, 0, 4]);
        assert_eq!(radii, vec![2.0, 2.0, 1.0]);
    }

    #[test]
    fn window_rejects_far_points() {
        let m = line(&[0.0, 5.0]);
        assert!(PointedWindow::new(m.clone(), 0, 1.0, 1.0).is_err());
        assert!(PointedWindow::new(m, 0, 1.0, 5.0).is_ok());
    }
}
