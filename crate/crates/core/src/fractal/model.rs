//! The model tangents as exact flat cones, sampled on a lattice around the
//! distinguished point.
//!
//! Each model is a cone of total angle `Θ` over the origin, either closed
//! (the two boundary rays glued) or open (a sector with boundary):
//!
//! | kind | Θ | glued | picture |
//! |------|---|-------|---------|
//! | `Plane` | 2π | yes | ℝ² |
//! | `Half` | π | no | closed half plane H |
//! | `Quarter` | π/2 | no | closed quarter plane Q |
//! | `T` | 2π | no | the plane cut along the positive x-axis |
//! | `L` | 3π | yes | T with H glued along the two slit sides |
//! | `D` | π | yes | two copies of Q glued along both boundary rays |
//!
//! Intrinsic distance on a cone: with angular separation `Δ` (taken around
//! the shorter way when glued), geodesics go straight when `Δ < π` and
//! through the apex otherwise.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::FractalError;
use crate::format::fmt_num;
use crate::metric::space::ConeSample;
use crate::metric::{FiniteMetricSpace, PointedWindow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Plane,
    Half,
    Quarter,
    T,
    L,
    D,
    /// The real line, the tangent of curves at interior points.
    Line,
    /// A closed half line.
    Ray,
}

impl ModelKind {
    pub const ALL: [ModelKind; 8] = [
        ModelKind::Plane,
        ModelKind::Half,
        ModelKind::Quarter,
        ModelKind::T,
        ModelKind::L,
        ModelKind::D,
        ModelKind::Line,
        ModelKind::Ray,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Plane => "plane",
            ModelKind::Half => "half",
            ModelKind::Quarter => "quarter",
            ModelKind::T => "t",
            ModelKind::L => "l",
            ModelKind::D => "d",
            ModelKind::Line => "line",
            ModelKind::Ray => "ray",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = FractalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "plane" | "r2" => Ok(ModelKind::Plane),
            "half" | "h" => Ok(ModelKind::Half),
            "quarter" | "q" => Ok(ModelKind::Quarter),
            "t" => Ok(ModelKind::T),
            "l" => Ok(ModelKind::L),
            "d" => Ok(ModelKind::D),
            "line" | "segment" | "r" => Ok(ModelKind::Line),
            "ray" => Ok(ModelKind::Ray),
            _ => Err(FractalError::Domain(format!("unknown model tangent {s:?}"))),
        }
    }
}

/// Intrinsic distance between polar points of a flat cone.
pub fn cone_distance(p: (f64, f64), q: (f64, f64), total_angle: f64, closed: bool) -> f64 {
    let (r1, t1) = p;
    let (r2, t2) = q;
    let mut delta = (t1 - t2).abs();
    if closed {
        delta %= total_angle;
        delta = delta.min(total_angle - delta);
    }
    if delta >= PI {
        r1 + r2
    } else {
        (r1 * r1 + r2 * r2 - 2.0 * r1 * r2 * delta.cos()).max(0.0).sqrt()
    }
}

/// Lattice offsets `(i, j)` with `|(i, j)|·step <= radius`, origin first,
/// then by distance and angle-free index order.
fn lattice_disc(radius: f64, step: f64) -> Vec<(i64, i64)> {
    let k = (radius / step + 1e-9).floor() as i64;
    let lim = (radius / step) * (radius / step) * (1.0 + 1e-12) + 1e-9;
    let mut pts = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            if ((i * i + j * j) as f64) <= lim {
                pts.push((i, j));
            }
        }
    }
    pts.sort_by_key(|&(i, j)| (i * i + j * j, i, j));
    pts
}

fn xy_label(x: f64, y: f64) -> String {
    format!("{},{}", fmt_num(x), fmt_num(y))
}

/// Lattice window of radius `radius` and step `h` in the model `kind`,
/// based at the distinguished point (always index 0).
pub fn model_tangent_space(kind: ModelKind, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
    if !(radius > 0.0) || !(h > 0.0) || !radius.is_finite() {
        return Err(FractalError::Domain(format!(
            "model window needs positive radius and step, got R = {radius}, h = {h}"
        )));
    }
    if radius / h > 4096.0 {
        return Err(FractalError::TooLarge { points: (radius / h) as usize, max: 4096 });
    }
    let space = match kind {
        ModelKind::Line | ModelKind::Ray => {
            let k = (radius / h + 1e-9).floor() as i64;
            let mut idx: Vec<i64> = if kind == ModelKind::Line {
                (-k..=k).collect()
            } else {
                (0..=k).collect()
            };
            idx.sort_by_key(|&i| (i.abs(), i));
            let xs: Vec<f64> = idx.iter().map(|&i| i as f64 * h).collect();
            let labels = xs.iter().map(|&x| fmt_num(x)).collect();
            FiniteMetricSpace::from_line_points(labels, xs)
        }
        ModelKind::Plane | ModelKind::Half | ModelKind::Quarter => {
            let keep = |i: i64, j: i64| match kind {
                ModelKind::Half => j >= 0,
                ModelKind::Quarter => i >= 0 && j >= 0,
                _ => true,
            };
            let pts: Vec<[f64; 2]> = lattice_disc(radius, h)
                .into_iter()
                .filter(|&(i, j)| keep(i, j))
                .map(|(i, j)| [i as f64 * h, j as f64 * h])
                .collect();
            let labels = pts.iter().map(|p| xy_label(p[0], p[1])).collect();
            FiniteMetricSpace::from_planar_points(labels, pts)
        }
        ModelKind::T | ModelKind::L | ModelKind::D => cone_window(kind, radius, h),
    };
    Ok(PointedWindow::new(space, 0, 1.0, radius)?)
}

fn cone_window(kind: ModelKind, radius: f64, h: f64) -> FiniteMetricSpace {
    let disc = lattice_disc(radius, h);
    let mut r = Vec::new();
    let mut theta = Vec::new();
    let mut labels = Vec::new();
    let mut push = |rr: f64, tt: f64, label: String| {
        r.push(rr);
        theta.push(tt);
        labels.push(label);
    };
    let polar = |i: i64, j: i64| {
        let (x, y) = (i as f64 * h, j as f64 * h);
        let mut t = y.atan2(x);
        if t < 0.0 {
            t += 2.0 * PI;
        }
        (x.hypot(y), t, x, y)
    };
    let (total, closed) = match kind {
        ModelKind::T => (2.0 * PI, false),
        ModelKind::L => (3.0 * PI, true),
        _ => (PI, true),
    };
    match kind {
        ModelKind::T | ModelKind::L => {
            for &(i, j) in &disc {
                let (rr, t, x, y) = polar(i, j);
                if j == 0 && i > 0 {
                    push(rr, 0.0, format!("{}:lo", xy_label(x, y)));
                    push(rr, 2.0 * PI, format!("{}:hi", xy_label(x, y)));
                } else {
                    push(rr, t, xy_label(x, y));
                }
            }
            if kind == ModelKind::L {
                for &(i, j) in disc.iter().filter(|&&(_, j)| j > 0) {
                    let (rr, t, x, y) = polar(i, j);
                    push(rr, 2.0 * PI + t, format!("H:{}", xy_label(x, y)));
                }
            }
        }
        _ => {
            for &(i, j) in disc.iter().filter(|&&(i, j)| i >= 0 && j >= 0) {
                let (rr, t, x, y) = polar(i, j);
                push(rr, t, xy_label(x, y));
            }
            for &(i, j) in disc.iter().filter(|&&(i, j)| i > 0 && j > 0) {
                let (rr, t, x, y) = polar(i, j);
                push(rr, FRAC_PI_2 + t, format!("Q2:{}", xy_label(x, y)));
            }
        }
    }
    let cone = ConeSample::new(r, theta, total, closed);
    FiniteMetricSpace::from_cone(labels, cone)
}

/// A point of `T` in polar form; `theta ∈ [0, 2π]`, with `0` and `2π`
/// naming the two sides of the cut.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TPoint {
    pub r: f64,
    pub theta: f64,
}

impl TPoint {
    pub fn distance(&self, other: &TPoint) -> f64 {
        cone_distance((self.r, self.theta), (other.r, other.theta), 2.0 * PI, false)
    }
}

/// The square map `H → T`, `r e^{iθ} ↦ r² e^{2iθ}`. The ray `θ = 0` lands on
/// the lower side of the cut and `θ = π` on the upper side.
pub fn square_map_phi(r: f64, theta: f64) -> Result<TPoint, FractalError> {
    if !(0.0..=PI).contains(&theta) {
        return Err(FractalError::Domain(format!("angle {theta} is outside [0, π]")));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(FractalError::Domain(format!("radius {r} is not a nonnegative real")));
    }
    Ok(TPoint { r: r * r, theta: 2.0 * theta })
}

/// A finite subset of `T` as a metric space.
pub fn t_points_space(labels: Vec<String>, pts: &[TPoint]) -> FiniteMetricSpace {
    let cone = ConeSample::new(
        pts.iter().map(|p| p.r).collect(),
        pts.iter().map(|p| p.theta).collect(),
        2.0 * PI,
        false,
    );
    FiniteMetricSpace::from_cone(labels, cone)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn find(w: &PointedWindow, label: &str) -> usize {
        w.space.labels().iter().position(|l| l == label).unwrap_or_else(|| panic!("{label}"))
    }

    #[test]
    fn quarter_axes() {
        let w = model_tangent_space(ModelKind::Quarter, 1.0, 0.125).unwrap();
        let e = find(&w, "1,0");
        assert_eq!(w.space.dist(w.base, e), 1.0);
        assert_eq!(w.space.dist(w.base, find(&w, "0,1")), 1.0);
        assert!(w.space.validate().is_metric());
    }

    #[test]
    fn t_goes_around_the_tip() {
        let h = 0.125;
        let w = model_tangent_space(ModelKind::T, 2.0, h).unwrap();
        let a = find(&w, "1,0.125");
        let b = find(&w, "1,-0.125");
        let d = w.space.dist(a, b);
        assert!((d - 2.0 * (1.0f64 + h * h).sqrt()).abs() < 1e-12);
        let lo = find(&w, "1,0:lo");
        let hi = find(&w, "1,0:hi");
        assert!((w.space.dist(lo, hi) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn every_model_is_a_metric() {
        for kind in ModelKind::ALL {
            let w = model_tangent_space(kind, 1.0, 0.25).unwrap();
            assert!(w.space.validate().is_metric(), "{kind}");
            assert_eq!(w.base, 0);
            assert_eq!(w.space.dist(0, 0), 0.0);
            for j in 0..w.len() {
                assert!(w.space.dist(0, j) <= 1.0 + 1e-12);
            }
        }
    }

    #[test]
    fn l_glues_h_onto_both_slit_sides() {
        let w = model_tangent_space(ModelKind::L, 2.0, 0.25).unwrap();
        let lo = find(&w, "1,0:lo");
        let hi = find(&w, "1,0:hi");
        // H's boundary rays meet the two slit sides, so each side has H
        // points right next to it, and the straight path through H between
        // the sides is as long as the detour around the tip.
        assert!(w.space.dist(hi, find(&w, "H:1,0.25")) < 0.3);
        assert!(w.space.dist(lo, find(&w, "H:-1,0.25")) < 0.3);
        assert!((w.space.dist(lo, hi) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn d_is_a_pi_cone() {
        let w = model_tangent_space(ModelKind::D, 1.0, 0.25).unwrap();
        // (1,0) and Q2's copy of the point at angle π/2 + π/2 = π: antipodal.
        let a = find(&w, "1,0");
        let b = find(&w, "0,1");
        assert!((w.space.dist(a, b) - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(w.space.labels().iter().filter(|l| l.starts_with("Q2:")).count(), 8);
    }

    #[test]
    fn phi_examples() {
        let p = square_map_phi(1.0, PI / 2.0).unwrap();
        assert_eq!(p.r, 1.0);
        assert!((p.theta - PI).abs() < 1e-15);
        let a = square_map_phi(0.5, 0.0).unwrap();
        let b = square_map_phi(0.5, PI).unwrap();
        assert_eq!(a.r, 0.25);
        assert_eq!(b.r, 0.25);
        assert!((a.distance(&b) - 0.5).abs() < 1e-15);
        assert!(square_map_phi(1.0, -0.1).is_err());
        assert!(square_map_phi(1.0, 3.5).is_err());
    }

    #[test]
    fn kinds_parse() {
        assert_eq!("Quarter".parse::<ModelKind>().unwrap(), ModelKind::Quarter);
        assert_eq!("segment".parse::<ModelKind>().unwrap(), ModelKind::Line);
        assert!("hex".parse::<ModelKind>().is_err());
    }
}
