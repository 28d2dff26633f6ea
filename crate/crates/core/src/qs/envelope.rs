use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{QsError, SampledMap};
use crate::format::fmt_num;

pub const DEFAULT_TRIPLE_BUDGET: usize = 1_000_000;

/// Breakpoints closer than this (relatively) in `t` or in `s` are merged
/// upwards, keeping the earlier `t` and the larger `s`; such pairs only
/// differ by round-off, and keeping both would make inversion ill-posed.
const T_MERGE: f64 = 1e-12;

/// Relative slack allowed when comparing a candidate `η` with the envelope;
/// it absorbs the round-off merge of nearby breakpoints.
const ETA_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleBudget {
    All,
    /// `count` ordered triples drawn uniformly with replacement. When
    /// `count` is at least the number of triples, every triple is used.
    Sample { count: usize, seed: u64 },
}

/// A nondecreasing step function `η̂(t) = max{s : (t', s) breakpoint, t' ≤ t}`.
///
/// Measured envelopes start with the anchor `(0, 0)` contributed by the
/// triples with `y = x`.
#[derive(Clone, Debug, PartialEq)]
pub struct DistortionEnvelope {
    breakpoints: Vec<(f64, f64)>,
}

impl DistortionEnvelope {
    /// Builds an envelope from a table: `t` strictly increasing, `s`
    /// nondecreasing, everything finite and nonnegative.
    pub fn from_breakpoints(breakpoints: Vec<(f64, f64)>) -> Result<Self, QsError> {
        if breakpoints.is_empty() {
            return Err(QsError::Domain("an envelope needs at least one breakpoint".into()));
        }
        for (k, &(t, s)) in breakpoints.iter().enumerate() {
            if !(t >= 0.0 && s >= 0.0) || !t.is_finite() || !s.is_finite() {
                return Err(QsError::Domain(format!("breakpoint {k} = ({t}, {s}) is not a pair of nonnegative reals")));
            }
        }
        for (k, w) in breakpoints.windows(2).enumerate() {
            if w[1].0 <= w[0].0 {
                return Err(QsError::Domain(format!("t is not increasing at breakpoint {}", k + 1)));
            }
            if w[1].1 < w[0].1 {
                return Err(QsError::Domain(format!("s decreases at breakpoint {}", k + 1)));
            }
        }
        Ok(Self { breakpoints })
    }

    pub fn breakpoints(&self) -> &[(f64, f64)] {
        &self.breakpoints
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// Step evaluation; `None` left of the first breakpoint.
    pub fn eval(&self, t: f64) -> Option<f64> {
        let k = self.breakpoints.partition_point(|&(bt, _)| bt <= t);
        (k > 0).then(|| self.breakpoints[k - 1].1)
    }

    /// Piecewise-linear evaluation through the breakpoints. Outside the
    /// sampled range the end segment is extended and the flag is set; a
    /// single breakpoint extends as a constant.
    pub fn eval_linear(&self, t: f64) -> (f64, bool) {
        let b = &self.breakpoints;
        let n = b.len();
        if n == 1 {
            return (b[0].1, t != b[0].0);
        }
        let k = b.partition_point(|&(bt, _)| bt < t);
        if k < n && b[k].0 == t {
            return (b[k].1, false);
        }
        let (seg, outside) = if k == 0 {
            (0, true)
        } else if k == n {
            (n - 2, true)
        } else {
            (k - 1, false)
        };
        let (t0, s0) = b[seg];
        let (t1, s1) = b[seg + 1];
        (s0 + (s1 - s0) * (t - t0) / (t1 - t0), outside)
    }

    pub(crate) fn t_range(&self) -> (f64, f64) {
        (self.breakpoints[0].0, self.breakpoints[self.breakpoints.len() - 1].0)
    }
}

/// Sorts and reduces to the points where the running max of `s` strictly
/// increases.
fn compress(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (t, s) in pts {
        match out.last_mut() {
            None => out.push((t, s)),
            Some(last) if s <= last.1 => {}
            Some(last) if t - last.0 <= T_MERGE * t.abs().max(1e-300) || s - last.1 <= T_MERGE * s => {
                last.1 = s
            }
            Some(_) => out.push((t, s)),
        }
    }
    out
}

/// Envelope of `f` over ordered triples `(x, y, z)` with `x ≠ z`.
pub fn distortion_envelope(f: &SampledMap, budget: TripleBudget) -> Result<DistortionEnvelope, QsError> {
    let n = f.len();
    if n < 3 {
        return Err(QsError::Domain(format!("need at least 3 points, the domain has {n}")));
    }
    let dom = f.domain();
    let per_x = |x: usize| -> Vec<(f64, f64)> {
        let dx = dom.row(x);
        let fx: Vec<f64> = (0..n).map(|y| f.image_dist(x, y)).collect();
        let mut pts = Vec::with_capacity(n * (n - 1));
        for z in (0..n).filter(|&z| z != x) {
            for y in 0..n {
                pts.push((dx[y] / dx[z], fx[y] / fx[z]));
            }
        }
        compress(pts)
    };
    let total = n.saturating_mul(n - 1).saturating_mul(n);
    let pts: Vec<(f64, f64)> = match budget {
        TripleBudget::Sample { count, seed } if count < total => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pts = Vec::with_capacity(count + 1);
            pts.push((0.0, 0.0));
            for _ in 0..count {
                let x = rng.gen_range(0..n);
                let mut z = rng.gen_range(0..n - 1);
                if z >= x {
                    z += 1;
                }
                let y = rng.gen_range(0..n);
                pts.push((dom.dist(x, y) / dom.dist(x, z), f.image_dist(x, y) / f.image_dist(x, z)));
            }
            pts
        }
        _ => (0..n).into_par_iter().map(per_x).flatten().collect(),
    };
    Ok(DistortionEnvelope { breakpoints: compress(pts) })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EtaCheck {
    pub holds: bool,
    /// `(t, η̂(t), η(t))` at the largest excess `η̂ − η`.
    pub worst: Option<(f64, f64, f64)>,
}

/// Compares a candidate given as a breakpoint table, interpolated
/// piecewise-linearly inside its range, with the step envelope at every
/// breakpoint with `t > 0`.
pub fn check_eta(env: &DistortionEnvelope, eta: &[(f64, f64)]) -> Result<EtaCheck, QsError> {
    let table = DistortionEnvelope::from_breakpoints(eta.to_vec())?;
    let (lo, hi) = table.t_range();
    check_eta_with(env, |t| (lo..=hi).contains(&t).then(|| table.eval_linear(t).0))
}

/// As [`check_eta`] for a candidate given as a function; `None` means
/// undefined.
pub fn check_eta_with<F: Fn(f64) -> Option<f64>>(env: &DistortionEnvelope, eta: F) -> Result<EtaCheck, QsError> {
    let mut worst: Option<(f64, f64, f64)> = None;
    let mut prev = f64::NEG_INFINITY;
    for &(t, s) in env.breakpoints().iter().filter(|b| b.0 > 0.0) {
        let e = eta(t).ok_or_else(|| QsError::Domain(format!("η is undefined at t = {t}")))?;
        if e < prev - ETA_TOL * prev.abs().max(1.0) {
            return Err(QsError::Domain(format!("η decreases before t = {t}")));
        }
        prev = e;
        let excess = s - e;
        if excess > ETA_TOL * s.max(1.0) && worst.map_or(true, |w| excess > w.1 - w.2) {
            worst = Some((t, s, e));
        }
    }
    Ok(EtaCheck { holds: worst.is_none(), worst })
}

/// Writes `t,s` rows, 12 significant digits.
pub fn write_envelope_csv<W: Write>(env: &DistortionEnvelope, mut out: W) -> std::io::Result<()> {
    writeln!(out, "t,s")?;
    for &(t, s) in env.breakpoints() {
        writeln!(out, "{},{}", fmt_num(t), fmt_num(s))?;
    }
    Ok(())
}
