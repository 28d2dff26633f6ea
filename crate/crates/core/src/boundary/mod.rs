//! The boundary at infinity of a free group, modelled by reduced words
//! truncated at a fixed depth `N`.
//!
//! Two depth-`N` points have Gromov product (based at the identity) equal to
//! the length of their common prefix, saturating at `N` when they agree.
//! The visual metric with base `a > 1` is `a^-(x,y)`. Distances are powers
//! of `a` with integer exponents, and the exponents are exposed so that
//! ratios can be compared without rounding.

mod word;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

pub use word::{parse_word, reduce_word, Letter, ReducedWord};

use crate::metric::FiniteMetricSpace;
use word::cancellation;

/// Largest point set materialized as a dense metric.
pub const MAX_POINTS: usize = 6000;

#[derive(Debug, thiserror::Error)]
pub enum BoundaryError {
    #[error("alphabet error: {0}")]
    Alphabet(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient depth: {0}")]
    InsufficientDepth(String),
    #[error("{points} points exceed the limit of {max}")]
    TooLarge { points: usize, max: usize },
}

/// A boundary point known to depth `N = prefix.len() >= 1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BoundaryPoint {
    prefix: ReducedWord,
}

impl BoundaryPoint {
    pub fn new(prefix: ReducedWord) -> Result<Self, BoundaryError> {
        if prefix.is_empty() {
            return Err(BoundaryError::Domain("a boundary point needs depth at least 1".into()));
        }
        Ok(Self { prefix })
    }

    pub fn parse(s: &str, rank: usize) -> Result<Self, BoundaryError> {
        let letters: Vec<Letter> = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| Letter::from_char(c, rank))
            .collect::<Result<_, _>>()?;
        let w = reduce_word(&letters);
        if w.len() != letters.len() {
            return Err(BoundaryError::Domain(format!("{s:?} is not a reduced word")));
        }
        Self::new(w)
    }

    pub fn prefix(&self) -> &ReducedWord {
        &self.prefix
    }

    pub fn depth(&self) -> usize {
        self.prefix.len()
    }
}

impl std::fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.prefix)
    }
}

/// `(x, y)_1` with a flag for prefixes that agree to full depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GromovProduct {
    pub value: usize,
    pub saturated: bool,
}

pub fn gromov_product_prefix(x: &BoundaryPoint, y: &BoundaryPoint) -> Result<GromovProduct, BoundaryError> {
    if x.depth() != y.depth() {
        return Err(BoundaryError::Domain(format!(
            "depth mismatch: {} vs {}",
            x.depth(),
            y.depth()
        )));
    }
    Ok(product_unchecked(x, y))
}

fn product_unchecked(x: &BoundaryPoint, y: &BoundaryPoint) -> GromovProduct {
    let n = x.depth().min(y.depth());
    let value = x.prefix.letters().iter().zip(y.prefix.letters()).take_while(|(a, b)| a == b).count();
    GromovProduct { value, saturated: value == n }
}

fn check_base(a: f64) -> Result<(), BoundaryError> {
    if !(a > 1.0) || !a.is_finite() {
        return Err(BoundaryError::Domain(format!("visual base must exceed 1, got {a}")));
    }
    Ok(())
}

/// `a^-(x,y)`, or 0 for equal prefixes.
pub fn visual_distance(x: &BoundaryPoint, y: &BoundaryPoint, a: f64) -> Result<f64, BoundaryError> {
    check_base(a)?;
    let p = gromov_product_prefix(x, y)?;
    Ok(if p.saturated { 0.0 } else { a.powi(-(p.value as i32)) })
}

/// Every depth-`depth` point of the boundary of `F_rank`, in lexicographic
/// letter order `a < A < b < B < ...`.
pub fn boundary_points(rank: usize, depth: usize) -> Result<Vec<BoundaryPoint>, BoundaryError> {
    cylinder_points(rank, &ReducedWord::identity(), depth)
}

fn count_extensions(rank: usize, prefix_len: usize, depth: usize) -> usize {
    let free = depth - prefix_len;
    if free == 0 {
        return 1;
    }
    let first = if prefix_len == 0 { 2 * rank } else { 2 * rank - 1 };
    (2 * rank - 1).checked_pow(free as u32 - 1).and_then(|v| v.checked_mul(first)).unwrap_or(usize::MAX)
}

/// All depth-`depth` points extending `prefix`.
fn cylinder_points(rank: usize, prefix: &ReducedWord, depth: usize) -> Result<Vec<BoundaryPoint>, BoundaryError> {
    if !(1..=26).contains(&rank) {
        return Err(BoundaryError::Domain(format!("rank must be in 1..=26, got {rank}")));
    }
    if depth == 0 || prefix.len() > depth {
        return Err(BoundaryError::Domain(format!(
            "depth {depth} must be positive and at least the prefix length {}",
            prefix.len()
        )));
    }
    if prefix.min_rank() > rank {
        return Err(BoundaryError::Alphabet(format!("{prefix} uses generators beyond rank {rank}")));
    }
    let total = count_extensions(rank, prefix.len(), depth);
    if total > 1 << 24 {
        return Err(BoundaryError::TooLarge { points: total, max: 1 << 24 });
    }
    let mut out = Vec::with_capacity(total);
    let mut stack = vec![prefix.letters().to_vec()];
    while let Some(w) = stack.pop() {
        if w.len() == depth {
            out.push(BoundaryPoint { prefix: reduce_word(&w) });
            continue;
        }
        // Push in reverse so the output comes out in lexicographic order.
        let all: Vec<Letter> = Letter::all(rank).collect();
        for &l in all.iter().rev() {
            if w.last() != Some(&l.inverse()) {
                let mut next = w.clone();
                next.push(l);
                stack.push(next);
            }
        }
    }
    Ok(out)
}

/// Which cylinder points to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CylinderCount {
    All,
    /// A uniform sample without replacement of this size (all points if
    /// the cylinder is smaller).
    Sample { k: usize, seed: u64 },
}

/// Depth-`depth` points of `U(p, m)` (those sharing `p`'s first `m`
/// letters) and the dense visual metric on them.
pub fn cylinder_ball(
    p: &BoundaryPoint,
    m: usize,
    rank: usize,
    count: CylinderCount,
    a: f64,
) -> Result<(Vec<BoundaryPoint>, FiniteMetricSpace), BoundaryError> {
    check_base(a)?;
    let depth = p.depth();
    if m > depth {
        return Err(BoundaryError::Domain(format!("cylinder level {m} exceeds depth {depth}")));
    }
    let mut pts = cylinder_points(rank, &p.prefix.prefix(m), depth)?;
    if let CylinderCount::Sample { k, seed } = count {
        if k < pts.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut idx = sample(&mut rng, pts.len(), k).into_vec();
            idx.sort_unstable();
            pts = idx.into_iter().map(|i| pts[i].clone()).collect();
        }
    }
    let space = visual_space(&pts, a)?;
    Ok((pts, space))
}

/// Dense visual metric on equal-depth points, labelled by their words.
pub fn visual_space(pts: &[BoundaryPoint], a: f64) -> Result<FiniteMetricSpace, BoundaryError> {
    check_base(a)?;
    let n = pts.len();
    if n > MAX_POINTS {
        return Err(BoundaryError::TooLarge { points: n, max: MAX_POINTS });
    }
    let mut flat = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = visual_distance(&pts[i], &pts[j], a)?;
            flat[i * n + j] = d;
            flat[j * n + i] = d;
        }
    }
    Ok(FiniteMetricSpace::from_dense(pts.iter().map(|p| p.to_string()).collect(), flat))
}

/// Result of translating a truncated point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Translated {
    pub point: BoundaryPoint,
    /// Letters of the result that are determined by the input prefix:
    /// `|g| + N - 2k` where `k` letters cancelled.
    pub usable_depth: usize,
}

/// `g · x`: reduce `g` followed by `x`'s prefix.
pub fn translate_boundary(g: &ReducedWord, x: &BoundaryPoint) -> Result<Translated, BoundaryError> {
    let k = cancellation(g, &x.prefix);
    if k == x.depth() {
        return Err(BoundaryError::InsufficientDepth(format!(
            "translating {x} by {g} cancels the whole known prefix"
        )));
    }
    let point = BoundaryPoint { prefix: g.mul(&x.prefix) };
    let usable_depth = point.depth();
    debug_assert_eq!(usable_depth, g.len() + x.depth() - 2 * k);
    Ok(Translated { point, usable_depth })
}

/// Ratios `d(gx, gy) / d(x, y)` over distinct pairs, with
/// `g = (p's length-m prefix)^-1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionStats {
    pub pairs: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Smallest and largest `(x,y) - (gx,gy)`; the ratio is `a` to this power.
    pub min_exponent: i64,
    pub max_exponent: i64,
}

pub fn expansion_factor_probe(
    p: &BoundaryPoint,
    m: usize,
    rank: usize,
    count: CylinderCount,
    a: f64,
) -> Result<ExpansionStats, BoundaryError> {
    let (pts, _) = cylinder_ball(p, m, rank, count, a)?;
    let g = p.prefix.prefix(m).inverse();
    let moved = pts
        .iter()
        .map(|x| translate_boundary(&g, x).map(|t| t.point))
        .collect::<Result<Vec<_>, _>>()?;
    let mut stats = ExpansionStats {
        pairs: 0,
        min: f64::INFINITY,
        max: 0.0,
        mean: 0.0,
        min_exponent: i64::MAX,
        max_exponent: i64::MIN,
    };
    let mut sum = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let before = product_unchecked(&pts[i], &pts[j]);
            let after = product_unchecked(&moved[i], &moved[j]);
            debug_assert!(!before.saturated && !after.saturated);
            let e = before.value as i64 - after.value as i64;
            let ratio = a.powi(e as i32);
            stats.pairs += 1;
            stats.min = stats.min.min(ratio);
            stats.max = stats.max.max(ratio);
            stats.min_exponent = stats.min_exponent.min(e);
            stats.max_exponent = stats.max_exponent.max(e);
            sum += ratio;
        }
    }
    if stats.pairs == 0 {
        return Err(BoundaryError::Domain(format!(
            "U({p}, {m}) has fewer than two sampled points"
        )));
    }
    stats.mean = sum / stats.pairs as f64;
    Ok(stats)
}

/// One cylinder of an expanding cover: points starting with `prefix`, and
/// the element `g = prefix^-1` that blows it up to the whole boundary.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCylinder {
    pub prefix: ReducedWord,
    pub g: ReducedWord,
}

/// The `2r(2r-1)^(m-1)` cylinders given by all length-`m` reduced prefixes.
pub fn expanding_cover(rank: usize, m: usize, depth: usize) -> Result<Vec<CoverCylinder>, BoundaryError> {
    if m > depth {
        return Err(BoundaryError::Domain(format!("cover level {m} exceeds depth {depth}")));
    }
    if m == 0 {
        return Ok(vec![CoverCylinder { prefix: ReducedWord::identity(), g: ReducedWord::identity() }]);
    }
    Ok(boundary_points(rank, m)?
        .into_iter()
        .map(|p| CoverCylinder { g: p.prefix.inverse(), prefix: p.prefix })
        .collect())
}

impl CoverCylinder {
    pub fn contains(&self, x: &BoundaryPoint) -> bool {
        x.prefix.letters().starts_with(self.prefix.letters())
    }
}

/// Outcome of an exhaustive tree-condition check.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConditionReport {
    pub checked: u64,
    pub violations: u64,
}

/// `d(x,z) <= max(d(x,y), d(y,z))` over all ordered triples, tested on the
/// integer products: `(x,z) >= min((x,y), (y,z))`.
pub fn ultrametric_check(pts: &[BoundaryPoint]) -> Result<ConditionReport, BoundaryError> {
    let prod = product_table(pts)?;
    let n = pts.len();
    let mut r = ConditionReport::default();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                r.checked += 1;
                if prod[x * n + z] < prod[x * n + y].min(prod[y * n + z]) {
                    r.violations += 1;
                }
            }
        }
    }
    Ok(r)
}

/// Gromov's four-point condition with `δ = 0` over all ordered quadruples:
/// `(x,y) + (z,w) >= min((x,z) + (y,w), (x,w) + (y,z))`.
pub fn four_point_check(pts: &[BoundaryPoint]) -> Result<ConditionReport, BoundaryError> {
    use rayon::prelude::*;
    let prod = product_table(pts)?;
    let n = pts.len();
    let p = |i: usize, j: usize| prod[i * n + j] as u32;
    let (checked, violations) = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut bad = 0u64;
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        if p(x, y) + p(z, w) < (p(x, z) + p(y, w)).min(p(x, w) + p(y, z)) {
                            bad += 1;
                        }
                    }
                }
            }
            ((n * n * n) as u64, bad)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(ConditionReport { checked, violations })
}

/// `prod[i*n + j] = (x_i, x_j)`, with equal points at their common depth.
fn product_table(pts: &[BoundaryPoint]) -> Result<Vec<u16>, BoundaryError> {
    let n = pts.len();
    if n > MAX_POINTS {
        return Err(BoundaryError::TooLarge { points: n, max: MAX_POINTS });
    }
    let mut t = vec![0u16; n * n];
    for i in 0..n {
        for j in 0..n {
            t[i * n + j] = gromov_product_prefix(&pts[i], &pts[j])?.value as u16;
        }
    }
    Ok(t)
}
