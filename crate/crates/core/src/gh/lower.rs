use crate::metric::FiniteMetricSpace;

/// The distance-value bound needs all pairwise values; skip it beyond this.
const VALUE_SET_MAX: usize = 1024;
/// Budget (in elementary steps) for the per-point profile bound.
const PROFILE_WORK_MAX: usize = 60_000_000;

/// Hausdorff distance between two sorted, nonempty value lists.
fn sorted_hausdorff(a: &[f64], b: &[f64]) -> f64 {
    fn one_sided(a: &[f64], b: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        let mut k = 0;
        for &v in a {
            while k + 1 < b.len() && b[k + 1] <= v {
                k += 1;
            }
            let mut best = (b[k] - v).abs();
            if k + 1 < b.len() {
                best = best.min((b[k + 1] - v).abs());
            }
            worst = worst.max(best);
        }
        worst
    }
    one_sided(a, b).max(one_sided(b, a))
}

fn sorted_row(m: &FiniteMetricSpace, i: usize) -> Vec<f64> {
    let mut r = m.row(i);
    r.sort_unstable_by(f64::total_cmp);
    r
}

fn value_set(m: &FiniteMetricSpace) -> Vec<f64> {
    let n = m.len();
    let mut v = Vec::with_capacity(n * (n - 1) / 2 + 1);
    v.push(0.0);
    for i in 0..n {
        for j in i + 1..n {
            v.push(m.dist(i, j));
        }
    }
    v.sort_unstable_by(f64::total_cmp);
    v.dedup();
    v
}

/// `max_x min_y` of a pair cost, symmetrized over both sides.
fn bottleneck(nx: usize, ny: usize, cost: impl Fn(usize, usize) -> f64) -> f64 {
    let mut c = vec![0.0; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            c[i * ny + j] = cost(i, j);
        }
    }
    let rows = (0..nx)
        .map(|i| c[i * ny..(i + 1) * ny].iter().cloned().fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let cols = (0..ny)
        .map(|j| (0..nx).map(|i| c[i * ny + j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    rows.max(cols)
}

/// Lower bound on `d_GH(X, Y)`, symmetric in its arguments.
///
/// Combines half the diameter difference; half the Hausdorff distance
/// between the sets of distance values (every value of one space is within
/// `dis R` of a value of the other); and, when affordable, half the
/// bottleneck over points of the Hausdorff distance between distance
/// profiles (a related pair `(x, y)` has rows within `dis R` of each other).
pub fn lower_bound(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    if x.is_empty() || y.is_empty() {
        return 0.0;
    }
    let mut best = (x.diameter() - y.diameter()).abs();
    if x.len().max(y.len()) <= VALUE_SET_MAX {
        best = best.max(sorted_hausdorff(&value_set(x), &value_set(y)));
    }
    let (nx, ny) = (x.len(), y.len());
    if nx * ny * (nx + ny) <= PROFILE_WORK_MAX {
        let px: Vec<Vec<f64>> = (0..nx).map(|i| sorted_row(x, i)).collect();
        let py: Vec<Vec<f64>> = (0..ny).map(|j| sorted_row(y, j)).collect();
        best = best.max(bottleneck(nx, ny, |i, j| sorted_hausdorff(&px[i], &py[j])));
    }
    best / 2.0
}

/// Lower bound over correspondences containing `base`.
///
/// Adds the base profiles' Hausdorff distance and, in the bottleneck, the
/// constraint `|dX(bx, x) - dY(by, y)| ≤ dis R` for every related pair.
pub fn pointed_lower_bound(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    base: (usize, usize),
) -> f64 {
    if x.is_empty() || y.is_empty() {
        return 0.0;
    }
    let (bx, by) = base;
    let rx = x.row(bx);
    let ry = y.row(by);
    let mut best = sorted_hausdorff(&sorted_row(x, bx), &sorted_row(y, by));
    best = best.max(2.0 * lower_bound_unprofiled(x, y));
    let (nx, ny) = (x.len(), y.len());
    if nx * ny * (nx + ny) <= PROFILE_WORK_MAX {
        let px: Vec<Vec<f64>> = (0..nx).map(|i| sorted_row(x, i)).collect();
        let py: Vec<Vec<f64>> = (0..ny).map(|j| sorted_row(y, j)).collect();
        best = best.max(bottleneck(nx, ny, |i, j| {
            sorted_hausdorff(&px[i], &py[j]).max((rx[i] - ry[j]).abs())
        }));
    } else {
        best = best.max(bottleneck(nx, ny, |i, j| (rx[i] - ry[j]).abs()));
    }
    best / 2.0
}

fn lower_bound_unprofiled(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut best = (x.diameter() - y.diameter()).abs();
    if x.len().max(y.len()) <= VALUE_SET_MAX {
        best = best.max(sorted_hausdorff(&value_set(x), &value_set(y)));
    }
    best / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_line_points(FiniteMetricSpace::index_labels(xs.len()), xs.to_vec())
    }

    #[test]
    fn hausdorff_of_sorted_lists() {
        assert_eq!(sorted_hausdorff(&[0.0, 1.0], &[0.0, 1.0]), 0.0);
        assert_eq!(sorted_hausdorff(&[0.0, 1.0], &[0.0, 3.0]), 2.0);
        assert_eq!(sorted_hausdorff(&[0.0], &[0.0, 0.4, 5.0]), 5.0);
        assert_eq!(sorted_hausdorff(&[0.0, 2.0, 4.0], &[1.0]), 3.0);
    }

    #[test]
    fn segments_of_different_length() {
        let a = line(&[0.0, 0.25, 0.5, 0.75, 1.0]);
        let b = line(&[0.0, 0.75, 1.5, 2.25, 3.0]);
        assert!(lower_bound(&a, &b) >= 1.0);
        assert_eq!(lower_bound(&a, &a), 0.0);
    }

    #[test]
    fn symmetric() {
        let a = line(&[0.0, 0.3, 1.9]);
        let b = line(&[0.0, 1.0, 1.1, 4.0]);
        assert_eq!(lower_bound(&a, &b), lower_bound(&b, &a));
    }

    #[test]
    fn pointed_dominates_unpointed() {
        let a = line(&[0.0, 0.3, 1.9]);
        let b = line(&[0.0, 1.0, 1.1, 4.0]);
        for bx in 0..3 {
            for by in 0..4 {
                assert!(pointed_lower_bound(&a, &b, (bx, by)) >= lower_bound(&a, &b) - 1e-15);
            }
        }
    }
}
