//! Exact GH distance by branch-and-bound over minimal correspondences.
//!
//! Every full correspondence contains one of the form
//! `graph(f) ∪ {(g(y), y) : y ∉ f(X)}`, so it suffices to choose an image for
//! each point of `X` and then a preimage for each point of `Y` left over.

use super::correspondence::Correspondence;
use super::heuristic::{best_correspondence, HeuristicConfig};
use super::lower::{lower_bound, pointed_lower_bound};
use super::{nonempty, GhError, GhResult};
use crate::metric::{FiniteMetricSpace, PointedWindow};

/// Exact `d_GH(X, Y)` when the search finishes within `budget` nodes;
/// otherwise `exact` is `None` and the best bounds found are reported.
pub fn gh_exact_small(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    budget: u64,
) -> Result<GhResult, GhError> {
    nonempty(x, y)?;
    Ok(solve(x, y, None, budget))
}

/// Exact pointed GH distance: only correspondences containing the base pair.
pub fn pointed_gh_exact(
    w1: &PointedWindow,
    w2: &PointedWindow,
    budget: u64,
) -> Result<GhResult, GhError> {
    nonempty(&w1.space, &w2.space)?;
    Ok(solve(&w1.space, &w2.space, Some((w1.base, w2.base)), budget))
}

fn solve(
    x: &FiniteMetricSpace,
    y: &FiniteMetricSpace,
    base: Option<(usize, usize)>,
    budget: u64,
) -> GhResult {
    let (ub, witness) = best_correspondence(x, y, base, &HeuristicConfig::default());
    let lower = match base {
        Some(b) => pointed_lower_bound(x, y, b),
        None => lower_bound(x, y),
    };
    if ub / 2.0 <= lower {
        let v = ub / 2.0;
        return GhResult { lower: v, upper: v, exact: Some(v), witness: Some(witness) };
    }

    let mut order: Vec<usize> = (0..x.len()).collect();
    let ecc: Vec<f64> = (0..x.len()).map(|i| x.eccentricity(i)).collect();
    order.sort_by(|&a, &b| ecc[b].total_cmp(&ecc[a]).then(a.cmp(&b)));
    if let Some((bx, _)) = base {
        order.retain(|&i| i != bx);
        order.insert(0, bx);
    }
    let mut bb = Search {
        x,
        y,
        base,
        order,
        best: ub,
        best_pairs: None,
        pairs: Vec::new(),
        cover_y: vec![0; y.len()],
        nodes: 0,
        budget,
        aborted: false,
    };
    let cost = vec![0.0; x.len() * y.len()];
    bb.descend(0, 0.0, &cost);

    let witness = bb.best_pairs.map(Correspondence::new).unwrap_or(witness);
    let value = bb.best / 2.0;
    if bb.aborted {
        GhResult { lower: lower.min(value), upper: value, exact: None, witness: Some(witness) }
    } else {
        GhResult { lower: value, upper: value, exact: Some(value), witness: Some(witness) }
    }
}

struct Search<'a> {
    x: &'a FiniteMetricSpace,
    y: &'a FiniteMetricSpace,
    base: Option<(usize, usize)>,
    /// Visiting order of `X`.
    order: Vec<usize>,
    best: f64,
    best_pairs: Option<Vec<(usize, usize)>>,
    pairs: Vec<(usize, usize)>,
    cover_y: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Search<'_> {
    /// `cost[i * ny + j]` is the distortion that adding `(i, j)` would
    /// introduce against the pairs chosen so far.
    fn descend(&mut self, depth: usize, cur: f64, cost: &[f64]) {
        if self.aborted {
            return;
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let (nx, ny) = (self.x.len(), self.y.len());
        let (fixed, fixed_is_x) = if depth < nx {
            (self.order[depth], true)
        } else {
            match (0..ny).find(|&j| self.cover_y[j] == 0) {
                Some(j) => (j, false),
                None => {
                    if cur < self.best {
                        self.best = cur;
                        self.best_pairs = Some(self.pairs.clone());
                    }
                    return;
                }
            }
        };

        let mut cands: Vec<(f64, usize)> = if fixed_is_x {
            match self.base {
                Some((bx, by)) if bx == fixed => vec![(cost[fixed * ny + by], by)],
                _ => (0..ny).map(|j| (cost[fixed * ny + j], j)).collect(),
            }
        } else {
            (0..nx).map(|i| (cost[i * ny + fixed], i)).collect()
        };
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

        let mut next = vec![0.0; nx * ny];
        for (c, other) in cands {
            let new_cur = cur.max(c);
            if new_cur >= self.best {
                break;
            }
            let (pi, pj) = if fixed_is_x { (fixed, other) } else { (other, fixed) };
            for i in 0..nx {
                let dxi = self.x.dist(i, pi);
                for j in 0..ny {
                    let k = i * ny + j;
                    next[k] = cost[k].max((dxi - self.y.dist(j, pj)).abs());
                }
            }
            self.pairs.push((pi, pj));
            self.cover_y[pj] += 1;
            if new_cur.max(self.forward_bound(depth + 1, &next)) < self.best {
                self.descend(depth + 1, new_cur, &next);
            }
            self.cover_y[pj] -= 1;
            self.pairs.pop();
            if self.aborted {
                return;
            }
        }
    }

    /// Every unassigned `x` and every uncovered `y` must still enter some pair.
    fn forward_bound(&self, depth: usize, cost: &[f64]) -> f64 {
        let (nx, ny) = (self.x.len(), self.y.len());
        let mut lb = 0.0f64;
        if depth < nx {
            for &i in &self.order[depth..] {
                let m = cost[i * ny..(i + 1) * ny].iter().cloned().fold(f64::INFINITY, f64::min);
                lb = lb.max(m);
            }
        }
        for j in (0..ny).filter(|&j| self.cover_y[j] == 0) {
            let m = (0..nx).map(|i| cost[i * ny + j]).fold(f64::INFINITY, f64::min);
            lb = lb.max(m);
        }
        lb
    }
}
