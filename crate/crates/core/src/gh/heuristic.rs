//! Upper bounds: anchored greedy correspondences refined by local search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::correspondence::{raw_distortion, Correspondence};
use crate::metric::{farthest_point_order, FiniteMetricSpace};

/// Knobs for the upper-bound search. `restarts: None` picks a count by size.
#[derive(Clone, Debug)]
pub struct HeuristicConfig {
    pub seed: u64,
    pub restarts: Option<usize>,
    pub anchors: usize,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        Self { seed: 0, restarts: None, anchors: 24 }
    }
}

const SMALL: usize = 64;
const MEDIUM: usize = 512;
/// Second-anchor candidates completed and compared per restart.
const LOOKAHEAD: usize = 64;

/// Best correspondence found and its distortion (not halved).
///
/// Deterministic and symmetric under swapping `x` and `y`: the pair is put
/// in a canonical orientation first, and both orientations are tried when
/// the canonical key ties.
pub(crate) fn best_correspondence(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    base: Option<(usize, usize)>,
    cfg: &HeuristicConfig,
) -> (f64, Correspondence) {
    let kx = orientation_key(x);
    let ky = orientation_key(y);
    let swapped = || {
        let (d, r) = search(y, x, base.map(|(a, b)| (b, a)), cfg);
        (d, r.transposed())
    };
    match kx.cmp(&ky) {
        std::cmp::Ordering::Less => search(x, y, base, cfg),
        std::cmp::Ordering::Greater => swapped(),
        std::cmp::Ordering::Equal => {
            let a = search(x, y, base, cfg);
            let b = swapped();
            if b.0 < a.0 {
                b
            } else {
                a
            }
        }
    }
}

fn orientation_key(m: &FiniteMetricSpace) -> (usize, u64, u64) {
    let n = m.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            total += m.dist(i, j);
        }
    }
    (n, m.diameter().to_bits(), f64::to_bits(total))
}

struct Prepared<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    base: Option<(usize, usize)>,
    anchors: Vec<usize>,
    /// `dx_a[i * k + t] = dX(i, anchors[t])`
    dx_a: Vec<f64>,
    ecc_y: Vec<f64>,
    ecc_a0: f64,
}

fn search(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    base: Option<(usize, usize)>,
    cfg: &HeuristicConfig,
) -> (f64, Correspondence) {
    let (nx, ny) = (x.len(), y.len());
    if nx == 1 || ny == 1 {
        // Everything related to everything: the only minimal correspondence.
        let pairs: Vec<_> = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
        return (raw_distortion(x, y, &pairs), Correspondence::new(pairs));
    }
    let n = nx.max(ny);
    let restarts = cfg.restarts.unwrap_or(if n <= SMALL {
        200
    } else if n <= MEDIUM {
        8
    } else {
        3
    });
    let ls_steps = if n <= SMALL {
        500
    } else if n <= MEDIUM {
        25
    } else {
        0
    };
    let start = base.map_or(0, |b| b.0);
    let (anchors, _) = farthest_point_order(x, start, cfg.anchors.max(1));
    let k = anchors.len();
    let mut dx_a = vec![0.0; nx * k];
    for i in 0..nx {
        for (t, &a) in anchors.iter().enumerate() {
            dx_a[i * k + t] = x.dist(i, a);
        }
    }
    let ecc_y = (0..ny).map(|j| y.eccentricity(j)).collect();
    let ecc_a0 = x.eccentricity(anchors[0]);
    let prep = Prepared { x, y, base, anchors, dx_a, ecc_y, ecc_a0 };

    let results: Vec<(f64, Vec<(usize, usize)>)> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ (r as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let pairs = prep.construct(r, &mut rng);
            let mut ls = LocalSearch::new(x, y, base, pairs);
            ls.run(ls_steps);
            (ls.dis, ls.pairs)
        })
        .collect();
    let (dis, pairs) = results
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("at least one restart");
    (dis, Correspondence::new(pairs))
}

impl Prepared<'_> {
    fn construct(&self, restart: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
        let (x, y) = (self.x, self.y);
        let (nx, ny) = (x.len(), y.len());
        let k = self.anchors.len();
        let mut images: Vec<usize> = Vec::with_capacity(k);
        images.push(match self.base {
            Some((_, by)) => by,
            None if restart == 0 => (0..ny)
                .min_by(|&a, &b| {
                    (self.ecc_y[a] - self.ecc_a0)
                        .abs()
                        .total_cmp(&(self.ecc_y[b] - self.ecc_a0).abs())
                })
                .unwrap(),
            None => rng.gen_range(0..ny),
        });
        if k > 1 {
            // The second image fixes the orientation, and many candidates tie
            // on its own cost; rank a spread of near-ties by how well the
            // greedy completion fits all anchors.
            let cost: Vec<f64> = (0..ny).map(|j| self.anchor_cost(1, j, &images)).collect();
            let mut order: Vec<usize> = (0..ny).collect();
            order.sort_by(|&p, &q| cost[p].total_cmp(&cost[q]).then(p.cmp(&q)));
            let slack = 0.05 * x.diameter().max(y.diameter());
            let near = order.partition_point(|&j| cost[j] <= cost[order[0]] + slack).max(1);
            let stride = near.div_ceil(LOOKAHEAD);
            let mut ranked: Vec<(f64, Vec<usize>)> = order[..near]
                .iter()
                .step_by(stride)
                .map(|&j| {
                    let mut im = images.clone();
                    im.push(j);
                    let fit = self.complete(&mut im, cost[j]);
                    (fit, im)
                })
                .collect();
            ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            let pick = if restart == 0 || ranked.len() == 1 {
                0
            } else if restart < ranked.len().min(4) {
                restart
            } else {
                rng.gen_range(0..ranked.len().min(8))
            };
            images = ranked.swap_remove(pick).1;
        }
        let mut dy_b = vec![0.0; ny * k];
        for j in 0..ny {
            for (t, &b) in images.iter().enumerate() {
                dy_b[j * k + t] = y.dist(j, b);
            }
        }
        let f = nearest_profiles(&self.dx_a, nx, &dy_b, ny, k);
        let g = nearest_profiles(&dy_b, ny, &self.dx_a, nx, k);
        let mut pairs: Vec<(usize, usize)> = f.iter().copied().enumerate().collect();
        if let Some((bx, by)) = self.base {
            pairs[bx] = (bx, by);
        }
        let mut covered = vec![false; ny];
        for &(_, j) in &pairs {
            covered[j] = true;
        }
        for j in 0..ny {
            if !covered[j] {
                pairs.push((g[j], j));
            }
        }
        pairs
    }
}

impl Prepared<'_> {
    /// Worst conflict of sending anchor `t` to `j` given the earlier images.
    fn anchor_cost(&self, t: usize, j: usize, images: &[usize]) -> f64 {
        let (x, y) = (self.x, self.y);
        let a = self.anchors[t];
        (0..t)
            .map(|s| (x.dist(a, self.anchors[s]) - y.dist(j, images[s])).abs())
            .fold(0.0, f64::max)
    }

    /// Extends `images` greedily to all anchors; returns the anchor distortion.
    fn complete(&self, images: &mut Vec<usize>, mut fit: f64) -> f64 {
        let ny = self.y.len();
        for t in images.len()..self.anchors.len() {
            let (j, c) = (0..ny)
                .map(|j| (j, self.anchor_cost(t, j, images)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("nonempty target");
            fit = fit.max(c);
            images.push(j);
        }
        fit
    }
}

/// For each row `i` of `a` (profiles of length `k`), the row of `b` minimizing
/// the sup-distance between profiles. Rows of `b` are scanned outward from
/// the first coordinate, which prunes most of them.
fn nearest_profiles(a: &[f64], na: usize, b: &[f64], nb: usize, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..nb).collect();
    order.sort_by(|&p, &q| b[p * k].total_cmp(&b[q * k]).then(p.cmp(&q)));
    let keys: Vec<f64> = order.iter().map(|&p| b[p * k]).collect();
    (0..na)
        .into_par_iter()
        .map(|i| {
            let row = &a[i * k..(i + 1) * k];
            let target = row[0];
            let mid = keys.partition_point(|&v| v < target);
            let mut best = f64::INFINITY;
            let mut arg = usize::MAX;
            let eval = |p: usize, best: f64| -> f64 {
                let other = &b[p * k..(p + 1) * k];
                let mut worst = 0.0f64;
                for t in 0..k {
                    worst = worst.max((row[t] - other[t]).abs());
                    // Strict, so a returned value equal to `best` is exact
                    // and may win the index tie-break.
                    if worst > best {
                        break;
                    }
                }
                worst
            };
            let (mut lo, mut hi) = (mid, mid);
            loop {
                let down = lo > 0 && (target - keys[lo - 1]) < best;
                let up = hi < nb && (keys[hi] - target) < best;
                if !down && !up {
                    break;
                }
                if up {
                    let p = order[hi];
                    let c = eval(p, best);
                    if c < best || (c == best && p < arg) {
                        best = c;
                        arg = p;
                    }
                    hi += 1;
                }
                if down {
                    lo -= 1;
                    let p = order[lo];
                    let c = eval(p, best);
                    if c < best || (c == best && p < arg) {
                        best = c;
                        arg = p;
                    }
                }
            }
            arg
        })
        .collect()
}

/// First-improvement descent on the pairs realizing the distortion.
struct LocalSearch<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    base: Option<(usize, usize)>,
    pairs: Vec<(usize, usize)>,
    member: Vec<bool>,
    cnt_x: Vec<usize>,
    cnt_y: Vec<usize>,
    /// Per pair: largest conflict, the pair causing it, second largest conflict.
    top: Vec<(f64, usize, f64)>,
    dis: f64,
}

impl<'a> LocalSearch<'a> {
    fn new(
        x: &'a FiniteMetricSpace,
        y: &'a FiniteMetricSpace,
        base: Option<(usize, usize)>,
        pairs: Vec<(usize, usize)>,
    ) -> Self {
        let (nx, ny) = (x.len(), y.len());
        let mut member = vec![false; nx * ny];
        let mut cnt_x = vec![0; nx];
        let mut cnt_y = vec![0; ny];
        let mut uniq = Vec::with_capacity(pairs.len());
        for (i, j) in pairs {
            if !member[i * ny + j] {
                member[i * ny + j] = true;
                cnt_x[i] += 1;
                cnt_y[j] += 1;
                uniq.push((i, j));
            }
        }
        let mut s = Self { x, y, base, pairs: uniq, member, cnt_x, cnt_y, top: Vec::new(), dis: 0.0 };
        s.refresh();
        s
    }

    #[inline]
    fn conflict(&self, p: (usize, usize), q: (usize, usize)) -> f64 {
        (self.x.dist(p.0, q.0) - self.y.dist(p.1, q.1)).abs()
    }

    fn refresh(&mut self) {
        let m = self.pairs.len();
        self.top = vec![(0.0, usize::MAX, 0.0); m];
        for a in 0..m {
            for b in a + 1..m {
                let c = self.conflict(self.pairs[a], self.pairs[b]);
                for (p, q) in [(a, b), (b, a)] {
                    let e = &mut self.top[p];
                    if c > e.0 || e.1 == usize::MAX {
                        e.2 = e.0;
                        *e = (c, q, e.2);
                    } else if c > e.2 {
                        e.2 = c;
                    }
                }
            }
        }
        self.dis = self.top.iter().map(|e| e.0).fold(0.0, f64::max);
    }

    fn critical(&self) -> Option<(usize, usize)> {
        let p = (0..self.pairs.len()).find(|&p| self.top[p].0 == self.dis)?;
        Some((p, self.top[p].1))
    }

    fn run(&mut self, max_steps: usize) {
        for _ in 0..max_steps {
            if self.dis == 0.0 {
                return;
            }
            let Some((p, q)) = self.critical() else { return };
            if !(self.try_improve(p) || (q != usize::MAX && self.try_improve(q))) {
                return;
            }
        }
    }

    /// Replaces pair `t` by something strictly better, if a local move exists.
    fn try_improve(&mut self, t: usize) -> bool {
        let (x0, y0) = self.pairs[t];
        if self.base == Some((x0, y0)) {
            return false;
        }
        let m = self.pairs.len();
        let rest = (0..m)
            .filter(|&p| p != t)
            .map(|p| if self.top[p].1 == t { self.top[p].2 } else { self.top[p].0 })
            .fold(0.0, f64::max);
        if rest >= self.dis {
            return false;
        }
        let (nx, ny) = (self.x.len(), self.y.len());
        let others: Vec<(usize, usize)> =
            (0..m).filter(|&p| p != t).map(|p| self.pairs[p]).collect();
        let c1: Vec<f64> = (0..ny)
            .map(|j| others.iter().map(|&q| self.conflict((x0, j), q)).fold(0.0, f64::max))
            .collect();
        let c2: Vec<f64> = (0..nx)
            .map(|i| others.iter().map(|&q| self.conflict((i, y0), q)).fold(0.0, f64::max))
            .collect();

        let mut best = self.dis;
        let mut mv: Option<Vec<(usize, usize)>> = None;
        let mut offer = |v: f64, add: Vec<(usize, usize)>, best: &mut f64| {
            if v < *best {
                *best = v;
                mv = Some(add);
            }
        };
        if self.cnt_x[x0] >= 2 && self.cnt_y[y0] >= 2 {
            offer(rest, Vec::new(), &mut best);
        }
        if self.cnt_y[y0] >= 2 {
            for j in (0..ny).filter(|&j| j != y0) {
                offer(rest.max(c1[j]), vec![(x0, j)], &mut best);
            }
        }
        if self.cnt_x[x0] >= 2 {
            for i in (0..nx).filter(|&i| i != x0) {
                offer(rest.max(c2[i]), vec![(i, y0)], &mut best);
            }
        }
        for j in (0..ny).filter(|&j| j != y0) {
            let a = rest.max(c1[j]);
            if a >= best {
                continue;
            }
            for i in (0..nx).filter(|&i| i != x0) {
                let v = a.max(c2[i]).max((self.x.dist(x0, i) - self.y.dist(j, y0)).abs());
                offer(v, vec![(x0, j), (i, y0)], &mut best);
            }
        }
        let Some(add) = mv else { return false };
        let ny = self.y.len();
        self.pairs.swap_remove(t);
        self.member[x0 * ny + y0] = false;
        self.cnt_x[x0] -= 1;
        self.cnt_y[y0] -= 1;
        for (i, j) in add {
            if !self.member[i * ny + j] {
                self.member[i * ny + j] = true;
                self.cnt_x[i] += 1;
                self.cnt_y[j] += 1;
                self.pairs.push((i, j));
            }
        }
        let before = self.dis;
        self.refresh();
        debug_assert!(self.dis < before);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(xs: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_line_points(FiniteMetricSpace::index_labels(xs.len()), xs.to_vec())
    }

    #[test]
    fn identical_spaces_give_zero() {
        let a = line(&[0.0, 0.7, 1.0, 2.5, 4.0]);
        let (d, r) = best_correspondence(&a, &a, None, &HeuristicConfig::default());
        assert_eq!(d, 0.0);
        r.check_full(5, 5).unwrap();
    }

    #[test]
    fn relabelled_copy_is_found() {
        let a = line(&[0.0, 0.7, 1.0, 2.5, 4.0, 4.2, 6.1]);
        let perm = [3, 0, 6, 1, 5, 2, 4];
        let b = a.subspace(&perm);
        let (d, _) = best_correspondence(&a, &b, None, &HeuristicConfig::default());
        assert!(d < 1e-12, "{d}");
    }

    #[test]
    fn pointed_search_keeps_the_base_pair() {
        let a = line(&[0.0, 1.0, 2.0, 3.0]);
        let b = line(&[0.0, 1.0, 2.0, 3.5]);
        let (_, r) = best_correspondence(&a, &b, Some((1, 3)), &HeuristicConfig::default());
        assert!(r.contains((1, 3)));
        r.check_full(4, 4).unwrap();
    }

    #[test]
    fn nearest_profiles_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let k = 3;
        // Continuous values, then a coarse grid where ties are everywhere.
        for coarse in [false, true] {
            let mut draw = || if coarse { rng.gen_range(0..4) as f64 } else { rng.gen::<f64>() };
            let a: Vec<f64> = (0..20 * k).map(|_| draw()).collect();
            let b: Vec<f64> = (0..30 * k).map(|_| draw()).collect();
            let got = nearest_profiles(&a, 20, &b, 30, k);
            for i in 0..20 {
                let cost = |p: usize| {
                    (0..k).map(|t| (a[i * k + t] - b[p * k + t]).abs()).fold(0.0, f64::max)
                };
                let best = (0..30).map(cost).fold(f64::INFINITY, f64::min);
                assert_eq!(cost(got[i]), best, "row {i}, coarse = {coarse}");
            }
        }
    }
}
