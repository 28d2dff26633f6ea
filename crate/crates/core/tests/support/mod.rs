//! Independent oracles shared by the integration tests. Nothing here calls
//! the solver under test.
#![allow(dead_code)]

use metric_lab::FiniteMetricSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rows(m: &FiniteMetricSpace) -> Vec<Vec<f64>> {
    (0..m.len()).map(|i| (0..m.len()).map(|j| m.dist(i, j)).collect()).collect()
}

/// Exact `2·d_GH` by thresholds: for a candidate value `eps`, pairs `(i,j)`
/// and `(i',j')` are compatible when `|dX(i,i') - dY(j,j')| <= eps`; a
/// correspondence of distortion `<= eps` is exactly a clique, and a full one
/// exists iff some maximal clique covers both sides.
pub fn clique_dis(x: &[Vec<f64>], y: &[Vec<f64>], base: Option<(usize, usize)>) -> f64 {
    let (nx, ny) = (x.len(), y.len());
    let verts: Vec<(usize, usize)> = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
    let mut cands = vec![0.0];
    for &(i, j) in &verts {
        for &(i2, j2) in &verts {
            cands.push((x[i][i2] - y[j][j2]).abs());
        }
    }
    cands.sort_by(f64::total_cmp);
    cands.dedup();
    let feasible = |eps: f64| -> bool {
        let nv = verts.len();
        let adj: Vec<Vec<bool>> = (0..nv)
            .map(|a| {
                (0..nv)
                    .map(|b| {
                        let (i, j) = verts[a];
                        let (i2, j2) = verts[b];
                        a != b && (x[i][i2] - y[j][j2]).abs() <= eps
                    })
                    .collect()
            })
            .collect();
        let mut start: Vec<usize> = Vec::new();
        let mut p: Vec<usize> = (0..nv).collect();
        if let Some((bx, by)) = base {
            let b = bx * ny + by;
            start.push(b);
            p.retain(|&v| adj[b][v]);
        }
        let mut found = false;
        bron_kerbosch(&adj, &mut start, p, Vec::new(), &mut |clique| {
            let mut cx = vec![false; nx];
            let mut cy = vec![false; ny];
            for &v in clique {
                cx[verts[v].0] = true;
                cy[verts[v].1] = true;
            }
            if cx.iter().all(|&b| b) && cy.iter().all(|&b| b) {
                found = true;
            }
        });
        found
    };
    // Monotone in eps: binary search the sorted candidates.
    let (mut lo, mut hi) = (0usize, cands.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if feasible(cands[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    cands[lo]
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: &mut Vec<usize>,
    p: Vec<usize>,
    x: Vec<usize>,
    report: &mut dyn FnMut(&[usize]),
) {
    if p.is_empty() && x.is_empty() {
        report(r);
        return;
    }
    let pivot = *p.iter().chain(x.iter()).max_by_key(|&&u| p.iter().filter(|&&v| adj[u][v]).count()).unwrap();
    let mut p = p;
    let mut x = x;
    let branch: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in branch {
        r.push(v);
        let np = p.iter().copied().filter(|&w| adj[v][w]).collect();
        let nx = x.iter().copied().filter(|&w| adj[v][w]).collect();
        bron_kerbosch(adj, r, np, nx, report);
        r.pop();
        p.retain(|&w| w != v);
        x.push(v);
    }
}

/// Literal enumeration of every relation in `X × Y` (feasible for `|X||Y| <= 16`).
pub fn subset_dis(x: &[Vec<f64>], y: &[Vec<f64>], base: Option<(usize, usize)>) -> f64 {
    let (nx, ny) = (x.len(), y.len());
    let verts: Vec<(usize, usize)> = (0..nx).flat_map(|i| (0..ny).map(move |j| (i, j))).collect();
    assert!(verts.len() <= 16);
    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << verts.len()) {
        let chosen: Vec<(usize, usize)> =
            (0..verts.len()).filter(|b| mask >> b & 1 == 1).map(|b| verts[b]).collect();
        if let Some(bp) = base {
            if !chosen.contains(&bp) {
                continue;
            }
        }
        let full_x = (0..nx).all(|i| chosen.iter().any(|p| p.0 == i));
        let full_y = (0..ny).all(|j| chosen.iter().any(|p| p.1 == j));
        if !(full_x && full_y) {
            continue;
        }
        let mut d = 0.0f64;
        for &(i, j) in &chosen {
            for &(i2, j2) in &chosen {
                d = d.max((x[i][i2] - y[j][j2]).abs());
            }
        }
        best = best.min(d);
    }
    best
}

/// Random metric: points in the plane, sometimes with a shortest-path
/// perturbation so the spaces are not all Euclidean.
pub fn random_space(rng: &mut ChaCha8Rng, n: usize) -> FiniteMetricSpace {
    let pts: Vec<[f64; 2]> = (0..n).map(|_| [rng.gen::<f64>(), rng.gen::<f64>()]).collect();
    let mut d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1])).collect())
        .collect();
    if rng.gen_bool(0.5) {
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    d[i][j] *= 1.0 + rng.gen::<f64>();
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                let v = d[i][j].min(d[j][i]);
                d[i][j] = v;
                d[j][i] = v;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if d[i][k] + d[k][j] < d[i][j] {
                        d[i][j] = d[i][k] + d[k][j];
                    }
                }
            }
        }
    }
    FiniteMetricSpace::from_matrix(FiniteMetricSpace::index_labels(n), d).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
