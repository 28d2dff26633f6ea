//! Dyadic slit carpets and pillow carpets as grid graphs with their
//! shortest-path metric.
//!
//! The unit square is sampled on a `(M+1) × (M+1)` grid of step `h = 1/M`
//! with 4-neighbour edges. Generation `i` has one vertical slit of length
//! `r_i / 2^i` centred in each of the `4^i` dyadic squares of side `2^-i`.
//! Interior slit nodes are split into a left and a right copy; horizontal
//! edges across the slit line attach to the copy on their own side, so
//! crossing requires walking around an endpoint. A pillow is two `ℓ × ℓ`
//! sheets sharing three sides, with the open side of sheet A glued to the
//! left copies of the slit and sheet B to the right copies.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use super::FractalError;
use crate::format::fmt_num;
use crate::metric::{FiniteMetricSpace, PointedWindow};

/// Largest point count materialized as a dense distance matrix.
pub const DENSE_MAX: usize = 6000;

/// Slit lengths per generation: generation `i` uses `r[i]`, and the number of
/// generations is `r.len()`.
#[derive(Clone, Debug, PartialEq)]
pub struct SlitSchedule {
    r: Vec<f64>,
}

impl SlitSchedule {
    /// Every entry must lie in `(0, 1)`.
    pub fn new(r: Vec<f64>) -> Result<Self, FractalError> {
        if let Some((i, v)) = r.iter().enumerate().find(|(_, v)| !(**v > 0.0 && **v < 1.0)) {
            return Err(FractalError::Schedule(format!("r[{i}] = {v} is not in (0, 1)")));
        }
        Ok(Self { r })
    }

    /// `r_i = 1/sqrt(i + 2)`: tends to zero, not square-summable.
    pub fn harmonic(levels: usize) -> Self {
        Self { r: (0..levels).map(|i| 1.0 / ((i + 2) as f64).sqrt()).collect() }
    }

    pub fn levels(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }
}

/// Which copy of a slit-interior node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Debug)]
pub(crate) struct Slit {
    pub level: usize,
    /// Grid column of the slit line.
    pub col: usize,
    /// Grid rows of the two endpoints.
    pub lo: usize,
    pub hi: usize,
}

/// `M` with `h = 1/M`, or an error if `h` is not the reciprocal of an integer.
pub(crate) fn grid_count(h: f64) -> Result<usize, FractalError> {
    if !(h > 0.0 && h <= 1.0) {
        return Err(FractalError::Resolution(format!("resolution h = {h} must lie in (0, 1]")));
    }
    let m = (1.0 / h).round();
    if (m * h - 1.0).abs() > 1e-9 || m > 1e7 {
        return Err(FractalError::Resolution(format!(
            "resolution h = {h} is not 1/M for an integer M"
        )));
    }
    Ok(m as usize)
}

/// All slits of the schedule on an `M`-grid, checking that each is resolved.
pub(crate) fn layout(sched: &SlitSchedule, m: usize) -> Result<Vec<Slit>, FractalError> {
    let mut out = Vec::new();
    for (i, &r) in sched.r.iter().enumerate() {
        let cells = 1usize << (i + 1);
        if m % cells != 0 {
            return Err(FractalError::Resolution(format!(
                "level {i}: grid 1/{m} does not place slit centres on nodes (needs a multiple of {cells})"
            )));
        }
        let half_side = m / cells;
        let half = (r * half_side as f64).round() as usize;
        if half == 0 {
            return Err(FractalError::Resolution(format!(
                "level {i}: slit of length {} is shorter than the grid step 1/{m}",
                r / (1u64 << i) as f64
            )));
        }
        if half >= half_side {
            return Err(FractalError::Resolution(format!(
                "level {i}: at grid 1/{m} the slit reaches the edge of its dyadic square"
            )));
        }
        let n = 1usize << i;
        for p in 0..n {
            for q in 0..n {
                let col = (2 * p + 1) * half_side;
                let mid = (2 * q + 1) * half_side;
                out.push(Slit { level: i, col, lo: mid - half, hi: mid + half });
            }
        }
    }
    Ok(out)
}

/// A carpet (optionally with pillows) as an unweighted graph; every edge has
/// length `h`.
pub struct CarpetGraph {
    h: f64,
    a0: usize,
    b0: usize,
    aw: usize,
    bw: usize,
    adj: Vec<Vec<u32>>,
    labels: Vec<String>,
    right: HashMap<(usize, usize), u32>,
}

struct Region {
    a: (usize, usize),
    b: (usize, usize),
    /// Keep pillow nodes whose depth plus Euclidean distance from this point
    /// to the mouth does not exceed the limit.
    prune: Option<([f64; 2], f64)>,
}

impl CarpetGraph {
    /// The whole unit square.
    pub fn build(sched: &SlitSchedule, pillows: bool, h: f64) -> Result<Self, FractalError> {
        let m = grid_count(h)?;
        Self::build_region(sched, pillows, h, Region { a: (0, m), b: (0, m), prune: None })
    }

    fn build_region(
        sched: &SlitSchedule,
        pillows: bool,
        h: f64,
        reg: Region,
    ) -> Result<Self, FractalError> {
        let m = grid_count(h)?;
        let slits = layout(sched, m)?;
        let (a0, a1) = reg.a;
        let (b0, b1) = reg.b;
        let (aw, bw) = (a1 - a0 + 1, b1 - b0 + 1);
        let mut g = Self {
            h,
            a0,
            b0,
            aw,
            bw,
            adj: vec![Vec::new(); aw * bw],
            labels: Vec::with_capacity(aw * bw),
            right: HashMap::new(),
        };
        for a in a0..=a1 {
            for b in b0..=b1 {
                g.labels.push(format!("{},{}", fmt_num(a as f64 * h), fmt_num(b as f64 * h)));
            }
        }
        // slit_of[(a, b)] = (slit index, interior?)
        let mut slit_of: HashMap<(usize, usize), (usize, bool)> = HashMap::new();
        let visible: Vec<usize> = (0..slits.len())
            .filter(|&s| {
                let sl = &slits[s];
                sl.col >= a0 && sl.col <= a1 && sl.hi >= b0 && sl.lo <= b1
            })
            .collect();
        for &s in &visible {
            let sl = &slits[s];
            for b in sl.lo.max(b0)..=sl.hi.min(b1) {
                let interior = b > sl.lo && b < sl.hi;
                slit_of.insert((sl.col, b), (s, interior));
                if interior {
                    let id = g.push_node(format!(
                        "{},{}:R",
                        fmt_num(sl.col as f64 * h),
                        fmt_num(b as f64 * h)
                    ));
                    g.right.insert((sl.col, b), id);
                }
            }
        }
        for a in a0..=a1 {
            for b in b0..=b1 {
                if a < a1 {
                    let from = g.right_copy(a, b);
                    let to = g.grid_id(a + 1, b);
                    g.link(from, to);
                }
                if b < b1 {
                    let same = match (slit_of.get(&(a, b)), slit_of.get(&(a, b + 1))) {
                        (Some(s), Some(t)) => s.0 == t.0,
                        _ => false,
                    };
                    g.link(g.grid_id(a, b), g.grid_id(a, b + 1));
                    if same {
                        let (r1, r2) = (g.right_copy(a, b), g.right_copy(a, b + 1));
                        if (r1, r2) != (g.grid_id(a, b), g.grid_id(a, b + 1)) {
                            g.link(r1, r2);
                        }
                    }
                }
            }
        }
        if pillows {
            for &s in &visible {
                g.attach_pillow(&slits[s], s, &reg);
            }
        }
        Ok(g)
    }

    fn push_node(&mut self, label: String) -> u32 {
        self.adj.push(Vec::new());
        self.labels.push(label);
        (self.adj.len() - 1) as u32
    }

    fn link(&mut self, u: u32, v: u32) {
        if u != v && !self.adj[u as usize].contains(&v) {
            self.adj[u as usize].push(v);
            self.adj[v as usize].push(u);
        }
    }

    fn in_box(&self, a: usize, b: usize) -> bool {
        a >= self.a0 && a < self.a0 + self.aw && b >= self.b0 && b < self.b0 + self.bw
    }

    fn grid_id(&self, a: usize, b: usize) -> u32 {
        ((a - self.a0) * self.bw + (b - self.b0)) as u32
    }

    fn right_copy(&self, a: usize, b: usize) -> u32 {
        self.right.get(&(a, b)).copied().unwrap_or_else(|| self.grid_id(a, b))
    }

    fn attach_pillow(&mut self, sl: &Slit, s: usize, reg: &Region) {
        let k = sl.hi - sl.lo;
        let h = self.h;
        let mouth_x = sl.col as f64 * h;
        let keep = |v: usize| -> bool {
            match reg.prune {
                None => true,
                Some((p, limit)) => {
                    let (ylo, yhi) = (sl.lo as f64 * h, sl.hi as f64 * h);
                    let dy = if p[1] < ylo {
                        ylo - p[1]
                    } else if p[1] > yhi {
                        p[1] - yhi
                    } else {
                        0.0
                    };
                    (p[0] - mouth_x).hypot(dy) + v as f64 * h <= limit + 1e-12
                }
            }
        };
        if !keep(1) {
            return;
        }
        // ids[sheet][u * (k+1) + v]
        let mut ids = [vec![u32::MAX; (k + 1) * (k + 1)], vec![u32::MAX; (k + 1) * (k + 1)]];
        for u in 0..=k {
            let b = sl.lo + u;
            if self.in_box(sl.col, b) {
                ids[0][u * (k + 1)] = self.grid_id(sl.col, b);
                ids[1][u * (k + 1)] = self.right_copy(sl.col, b);
            }
        }
        for v in 1..=k {
            if !keep(v) {
                break;
            }
            for u in 0..=k {
                let shared = u == 0 || u == k || v == k;
                let label = |sheet: &str| {
                    format!("P{}.{}:{}:{},{}", sl.level, s, sheet, u, v)
                };
                if shared {
                    let id = self.push_node(label("S"));
                    ids[0][u * (k + 1) + v] = id;
                    ids[1][u * (k + 1) + v] = id;
                } else {
                    ids[0][u * (k + 1) + v] = self.push_node(label("A"));
                    ids[1][u * (k + 1) + v] = self.push_node(label("B"));
                }
            }
        }
        for sheet in &ids {
            for u in 0..=k {
                for v in 0..=k {
                    let here = sheet[u * (k + 1) + v];
                    if here == u32::MAX {
                        continue;
                    }
                    if u < k {
                        let next = sheet[(u + 1) * (k + 1) + v];
                        if next != u32::MAX && v > 0 {
                            self.link(here, next);
                        }
                    }
                    if v < k {
                        let next = sheet[u * (k + 1) + v + 1];
                        if next != u32::MAX {
                            self.link(here, next);
                        }
                    }
                }
            }
        }
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn label(&self, id: usize) -> &str {
        &self.labels[id]
    }

    /// Node at grid position nearest to `(x, y)`; `side` picks the copy of a
    /// slit-interior node and is ignored elsewhere.
    pub fn node_at(&self, x: f64, y: f64, side: Side) -> Option<usize> {
        let a = (x / self.h).round();
        let b = (y / self.h).round();
        if a < 0.0 || b < 0.0 {
            return None;
        }
        let (a, b) = (a as usize, b as usize);
        if !self.in_box(a, b) {
            return None;
        }
        Some(match side {
            Side::Left => self.grid_id(a, b),
            Side::Right => self.right_copy(a, b),
        } as usize)
    }

    /// Hop counts from `src`; `u32::MAX` marks unreachable nodes.
    pub fn bfs(&self, src: usize) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[src] = 0;
        queue.push_back(src as u32);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in &self.adj[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Intrinsic distance between two nodes.
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        let d = self.bfs(u)[v];
        if d == u32::MAX {
            f64::INFINITY
        } else {
            d as f64 * self.h
        }
    }

    /// Dense metric on the listed nodes (all-pairs BFS, one source per task).
    fn metric_on(&self, nodes: &[usize]) -> Result<FiniteMetricSpace, FractalError> {
        if nodes.len() > DENSE_MAX {
            return Err(FractalError::TooLarge { points: nodes.len(), max: DENSE_MAX });
        }
        let h = self.h;
        let rows: Vec<Vec<f64>> = nodes
            .par_iter()
            .map(|&u| {
                let d = self.bfs(u);
                nodes.iter().map(|&v| d[v] as f64 * h).collect()
            })
            .collect();
        if rows.iter().flatten().any(|v| *v >= u32::MAX as f64 * h) {
            return Err(FractalError::Construction("carpet graph is disconnected".into()));
        }
        let labels = nodes.iter().map(|&u| self.labels[u].clone()).collect();
        Ok(FiniteMetricSpace::from_dense(labels, rows.concat()))
    }

    /// The whole graph as a metric space.
    pub fn to_space(&self) -> Result<FiniteMetricSpace, FractalError> {
        let all: Vec<usize> = (0..self.len()).collect();
        self.metric_on(&all)
    }
}

/// Slit carpet sampled at resolution `h = 1/M`.
pub fn slit_carpet_space(sched: &SlitSchedule, h: f64) -> Result<FiniteMetricSpace, FractalError> {
    CarpetGraph::build(sched, false, h)?.to_space()
}

/// Slit carpet with a pillow glued into every slit.
pub fn pillow_carpet_space(sched: &SlitSchedule, h: f64) -> Result<FiniteMetricSpace, FractalError> {
    CarpetGraph::build(sched, true, h)?.to_space()
}

/// Closed intrinsic ball of radius `radius` around the grid node nearest
/// `center`, computed on the sub-grid that can contain geodesics between
/// its points (Euclidean distance at most `2·radius` from the centre).
pub(crate) fn carpet_window(
    sched: &SlitSchedule,
    pillows: bool,
    center: [f64; 2],
    side: Side,
    radius: f64,
    h: f64,
) -> Result<PointedWindow, FractalError> {
    let m = grid_count(h)?;
    if !(0.0..=1.0).contains(&center[0]) || !(0.0..=1.0).contains(&center[1]) {
        return Err(FractalError::Domain(format!(
            "centre ({}, {}) is outside the unit square",
            center[0], center[1]
        )));
    }
    let ac = (center[0] / h).round() as usize;
    let bc = (center[1] / h).round() as usize;
    let reach = (2.0 * radius / h).ceil() as usize + 1;
    let region = Region {
        a: (ac.saturating_sub(reach), (ac + reach).min(m)),
        b: (bc.saturating_sub(reach), (bc + reach).min(m)),
        prune: Some(([ac as f64 * h, bc as f64 * h], 2.0 * radius)),
    };
    let g = CarpetGraph::build_region(sched, pillows, h, region)?;
    let base = g.node_at(ac as f64 * h, bc as f64 * h, side).expect("centre lies in its region");
    let from_base = g.bfs(base);
    let limit = (radius / h + 1e-9).floor() as u32;
    let mut nodes: Vec<usize> = (0..g.len()).filter(|&u| from_base[u] <= limit).collect();
    nodes.sort_by_key(|&u| (from_base[u], u));
    let space = g.metric_on(&nodes)?;
    Ok(PointedWindow::new(space, 0, 1.0, radius)?)
}
