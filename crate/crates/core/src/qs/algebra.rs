use super::{DistortionEnvelope, QsError};

/// An envelope produced by the algebra, with one flag per breakpoint
/// telling whether its value needed extrapolation beyond a sampled range.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraResult {
    pub envelope: DistortionEnvelope,
    pub extrapolated: Vec<bool>,
}

/// `η'(t) = 1/η⁻¹(1/t)`, the distortion of the inverse map.
///
/// Breakpoints `(t, s)` with `t > 0` become `(1/s, 1/t)`; between them use
/// [`DistortionEnvelope::eval_linear`]. The anchor at the origin carries
/// over. `η` must be strictly increasing on its positive breakpoints.
pub fn invert_envelope(eta: &DistortionEnvelope) -> Result<AlgebraResult, QsError> {
    let b = eta.breakpoints();
    let first = b.partition_point(|p| p.0 <= 0.0);
    let pos = &b[first..];
    if pos.is_empty() {
        return Err(QsError::Degenerate("no breakpoint with t > 0 to invert".into()));
    }
    if let Some(k) = pos.iter().position(|p| p.1 <= 0.0) {
        return Err(QsError::Degenerate(format!(
            "breakpoint {} has s = 0 at t = {}",
            first + k,
            pos[k].0
        )));
    }
    if let Some(k) = pos.windows(2).position(|w| w[1].1 <= w[0].1) {
        let (a, c) = (pos[k], pos[k + 1]);
        return Err(QsError::Degenerate(format!(
            "flat segment between breakpoints {} and {} (t in [{}, {}], s = {})",
            first + k,
            first + k + 1,
            a.0,
            c.0,
            a.1
        )));
    }
    let mut out = Vec::with_capacity(pos.len() + 1);
    if first > 0 {
        out.push((0.0, 0.0));
    }
    out.extend(pos.iter().rev().map(|&(t, s)| (1.0 / s, 1.0 / t)));
    let n = out.len();
    Ok(AlgebraResult { envelope: DistortionEnvelope::from_breakpoints(out)?, extrapolated: vec![false; n] })
}

/// `θ ∘ η` evaluated at the breakpoints of `η` merged with the preimages
/// under `η` of the breakpoints of `θ`, both read piecewise-linearly.
pub fn compose_envelopes(theta: &DistortionEnvelope, eta: &DistortionEnvelope) -> Result<AlgebraResult, QsError> {
    let b = eta.breakpoints();
    let mut ts: Vec<f64> = b.iter().map(|p| p.0).collect();
    for w in b.windows(2) {
        let ((t0, s0), (t1, s1)) = (w[0], w[1]);
        if s1 <= s0 {
            continue;
        }
        for &(u, _) in theta.breakpoints() {
            if u > s0 && u < s1 {
                ts.push(t0 + (t1 - t0) * (u - s0) / (s1 - s0));
            }
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut out = Vec::with_capacity(ts.len());
    let mut flags = Vec::with_capacity(ts.len());
    for t in ts {
        let (v, _) = eta.eval_linear(t);
        let (w, outside) = theta.eval_linear(v);
        // Linear extrapolation can dip; keep the result monotone.
        let w = out.last().map_or(w, |&(_, p): &(f64, f64)| w.max(p)).max(0.0);
        out.push((t, w));
        flags.push(outside);
    }
    Ok(AlgebraResult { envelope: DistortionEnvelope::from_breakpoints(out)?, extrapolated: flags })
}
