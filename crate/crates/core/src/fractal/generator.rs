//! Multi-resolution generators: each produces finite samples of an ideal
//! space at a requested mesh `h`, and pointed windows around a centre.

use std::fmt;

use super::carpet::{carpet_window, CarpetGraph, Side, SlitSchedule, DENSE_MAX};
use super::model::{model_tangent_space, ModelKind};
use super::rug::{line_sample, product_rug_space, rug_on, LineMetric};
use super::snowflake::{arc_positions, polyline_space, snowflake_vertices, CurveMetric, Flatness, MAX_STAGE};
use super::wu::{delta, wu_sample, WuSchedule};
use super::FractalError;
use crate::format::fmt_num;
use crate::metric::{FiniteMetricSpace, PointedWindow};
use crate::parse::{parse_list, parse_point, parse_positive, parse_real, parse_schedule};

/// Where a window is centred.
#[derive(Clone, Debug, PartialEq)]
pub enum Center {
    /// A point in the generator's own coordinates, snapped to the nearest
    /// sample point. One-dimensional generators read the first coordinate.
    Xy([f64; 2]),
    /// Like `Xy`, choosing a copy where the point lies on a slit.
    OnSide([f64; 2], Side),
    /// Vertex `index` of construction stage `stage` (snowflakes).
    Vertex { stage: usize, index: usize },
}

impl Center {
    /// Parses `x,y`, `x,y@left` / `x,y@right`, or `v<stage>:<index>`.
    pub fn parse(s: &str) -> Result<Center, FractalError> {
        let t = s.trim();
        if let Some(rest) = t.strip_prefix('v') {
            let (stage, index) = rest
                .split_once(':')
                .ok_or_else(|| FractalError::Spec(format!("expected `v<stage>:<index>`, got {s:?}")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| FractalError::Spec(format!("bad vertex centre {s:?}")))
            };
            return Ok(Center::Vertex { stage: num(stage)?, index: num(index)? });
        }
        match t.split_once('@') {
            Some((p, side)) => {
                let side = match side.trim() {
                    "left" => Side::Left,
                    "right" => Side::Right,
                    other => return Err(FractalError::Spec(format!("unknown side {other:?}"))),
                };
                Ok(Center::OnSide(parse_point(p)?, side))
            }
            None => Ok(Center::Xy(parse_point(t)?)),
        }
    }

    fn xy(&self) -> Result<[f64; 2], FractalError> {
        match self {
            Center::Xy(p) | Center::OnSide(p, _) => Ok(*p),
            Center::Vertex { .. } => {
                Err(FractalError::Domain("vertex centres only apply to snowflakes".into()))
            }
        }
    }
}

pub trait SpaceGenerator: Send + Sync {
    /// Short description, e.g. `slit-carpet(levels=2)`.
    fn name(&self) -> String;

    /// Whole sample at mesh `h`.
    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError>;

    /// Closed ball of radius `radius` (in the generator's own metric) around
    /// `center`, sampled at mesh `h`, as a window of scale 1.
    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError>;
}

fn check_mesh(h: f64, radius: f64) -> Result<(), FractalError> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(FractalError::Domain(format!("mesh must be positive, got {h}")));
    }
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(FractalError::Domain(format!("window radius must be positive, got {radius}")));
    }
    Ok(())
}

/// Lattice offsets `(i, j)` with `i² + j² <= (radius/h)²`, nearest first.
fn offsets(radius: f64, h: f64) -> Result<Vec<(i64, i64)>, FractalError> {
    let k = (radius / h + 1e-9).floor() as i64;
    if k > 4096 {
        return Err(FractalError::TooLarge { points: k as usize, max: 4096 });
    }
    let lim = (radius / h) * (radius / h) * (1.0 + 1e-12);
    let mut v = Vec::new();
    for i in -k..=k {
        for j in -k..=k {
            if ((i * i + j * j) as f64) <= lim {
                v.push((i, j));
            }
        }
    }
    v.sort_by_key(|&(i, j)| (i * i + j * j, i, j));
    Ok(v)
}

fn planar_window(
    pts: Vec<[f64; 2]>,
    labels: Vec<String>,
    radius: f64,
) -> Result<PointedWindow, FractalError> {
    Ok(PointedWindow::new(FiniteMetricSpace::from_planar_points(labels, pts), 0, 1.0, radius)?)
}

/// The Euclidean plane on the lattice `hℤ²`.
#[derive(Clone, Debug, Default)]
pub struct Plane;

impl SpaceGenerator for Plane {
    fn name(&self) -> String {
        "plane".into()
    }

    /// The lattice points in the unit disc.
    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError> {
        Ok(self.window(&Center::Xy([0.0, 0.0]), 1.0, h)?.space)
    }

    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
        check_mesh(h, radius)?;
        let c = center.xy()?;
        let (ci, cj) = ((c[0] / h).round() as i64, (c[1] / h).round() as i64);
        let off = offsets(radius, h)?;
        // Coordinates relative to the centre keep the lattice distances exact.
        let pts = off.iter().map(|&(i, j)| [i as f64 * h, j as f64 * h]).collect();
        let labels = off
            .iter()
            .map(|&(i, j)| format!("{},{}", fmt_num((ci + i) as f64 * h), fmt_num((cj + j) as f64 * h)))
            .collect();
        planar_window(pts, labels, radius)
    }
}

/// The unit square `[0,1]²` with the Euclidean metric on the grid of step `h`.
#[derive(Clone, Debug, Default)]
pub struct Square;

fn grid_m(h: f64) -> Result<i64, FractalError> {
    let m = (1.0 / h).round();
    if !(m >= 1.0) || ((1.0 / h) - m).abs() > 1e-9 * m {
        return Err(FractalError::Resolution(format!("mesh {h} is not 1/M for an integer M")));
    }
    Ok(m as i64)
}

impl SpaceGenerator for Square {
    fn name(&self) -> String {
        "square".into()
    }

    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError> {
        let m = grid_m(h)?;
        let n = ((m + 1) * (m + 1)) as usize;
        if n > 1 << 22 {
            return Err(FractalError::TooLarge { points: n, max: 1 << 22 });
        }
        let mut pts = Vec::with_capacity(n);
        for j in 0..=m {
            for i in 0..=m {
                pts.push([i as f64 * h, j as f64 * h]);
            }
        }
        let labels = pts.iter().map(|p| format!("{},{}", fmt_num(p[0]), fmt_num(p[1]))).collect();
        Ok(FiniteMetricSpace::from_planar_points(labels, pts))
    }

    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
        check_mesh(h, radius)?;
        let m = grid_m(h)?;
        let c = center.xy()?;
        if !(0.0..=1.0).contains(&c[0]) || !(0.0..=1.0).contains(&c[1]) {
            return Err(FractalError::Domain(format!("centre ({}, {}) is outside the square", c[0], c[1])));
        }
        let (ci, cj) = ((c[0] * m as f64).round() as i64, (c[1] * m as f64).round() as i64);
        let off: Vec<(i64, i64)> = offsets(radius, h)?
            .into_iter()
            .filter(|&(i, j)| (0..=m).contains(&(ci + i)) && (0..=m).contains(&(cj + j)))
            .collect();
        let pts = off.iter().map(|&(i, j)| [i as f64 * h, j as f64 * h]).collect();
        let labels = off
            .iter()
            .map(|&(i, j)| format!("{},{}", fmt_num((ci + i) as f64 * h), fmt_num((cj + j) as f64 * h)))
            .collect();
        planar_window(pts, labels, radius)
    }
}

/// Slit carpet, or pillow carpet when `pillows` is set.
#[derive(Clone, Debug)]
pub struct SlitCarpet {
    pub sched: SlitSchedule,
    pub pillows: bool,
}

impl SpaceGenerator for SlitCarpet {
    fn name(&self) -> String {
        let kind = if self.pillows { "pillow-carpet" } else { "slit-carpet" };
        let r: Vec<String> = self.sched.r().iter().map(|&v| fmt_num(v)).collect();
        format!("{kind}(r={})", r.join(","))
    }

    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError> {
        CarpetGraph::build(&self.sched, self.pillows, h)?.to_space()
    }

    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
        check_mesh(h, radius)?;
        let side = match center {
            Center::OnSide(_, s) => *s,
            _ => Side::Left,
        };
        carpet_window(&self.sched, self.pillows, center.xy()?, side, radius, h)
    }
}

/// Snowflake curve over `[a, b]`, built to the first stage whose segments
/// are no longer than `h` (up to the largest supported stage). With
/// `periodic` ends, windows see the curve over the whole line, tiled by
/// translates of the `[a, b]` piece; samples always cover `[a, b]` only.
#[derive(Clone, Debug)]
pub struct Snowflake {
    pub flatness: Flatness,
    pub window: [f64; 2],
    pub metric: CurveMetric,
    pub periodic: bool,
}

impl Snowflake {
    pub fn stage_for(&self, h: f64) -> usize {
        let len = self.window[1] - self.window[0];
        (0..=MAX_STAGE).find(|&n| len / 3f64.powi(n as i32) <= h).unwrap_or(MAX_STAGE)
    }

    /// Adds the translates of `pts` whose x-range meets the ball of `radius`
    /// around vertex `base`; both curve metrics dominate the x-distance, so
    /// no other translate can reach the ball.
    fn tile(&self, pts: Vec<[f64; 2]>, base: usize, radius: f64) -> (Vec<[f64; 2]>, usize, usize) {
        let [a, b] = self.window;
        let len = b - a;
        let x = pts[base][0];
        let left = ((a - (x - radius)) / len).ceil().max(0.0) as i64;
        let right = (((x + radius) - b) / len).ceil().max(0.0) as i64;
        let per = pts.len() - 1;
        let mut out = Vec::with_capacity(per * (left + right + 1) as usize + 1);
        for c in -left..=right {
            let shift = c as f64 * len;
            let skip = usize::from(c > -left);
            out.extend(pts[skip..].iter().map(|p| [p[0] + shift, p[1]]));
        }
        (out, base + per * left as usize, per * left as usize)
    }
}

impl SpaceGenerator for Snowflake {
    fn name(&self) -> String {
        let f = match &self.flatness {
            Flatness::Standard => "standard".to_string(),
            Flatness::Dyadic => "dyadic".to_string(),
            Flatness::List(v) => v.iter().map(|&x| fmt_num(x)).collect::<Vec<_>>().join(","),
        };
        format!("snowflake(l={f})")
    }

    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError> {
        check_mesh(h, 1.0)?;
        let pts = snowflake_vertices(self.stage_for(h), &self.flatness, self.window[0], self.window[1])?;
        Ok(polyline_space(&pts, self.metric))
    }

    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
        check_mesh(h, radius)?;
        let n = self.stage_for(h);
        let pts = snowflake_vertices(n, &self.flatness, self.window[0], self.window[1])?;
        let base = match center {
            Center::Vertex { stage, index } => {
                if *stage > n {
                    return Err(FractalError::Resolution(format!(
                        "vertex of stage {stage} requested from a stage-{n} sample"
                    )));
                }
                if *index > 4usize.pow(*stage as u32) {
                    return Err(FractalError::Domain(format!(
                        "stage {stage} has no vertex {index}"
                    )));
                }
                index * 4usize.pow((n - stage) as u32)
            }
            other => {
                let p = other.xy()?;
                (0..pts.len())
                    .min_by(|&i, &j| {
                        let di = (pts[i][0] - p[0]).hypot(pts[i][1] - p[1]);
                        let dj = (pts[j][0] - p[0]).hypot(pts[j][1] - p[1]);
                        di.total_cmp(&dj)
                    })
                    .expect("a polyline has vertices")
            }
        };
        let (pts, base, first) = if self.periodic { self.tile(pts, base, radius) } else { (pts, base, 0) };
        let full = polyline_space(&pts, self.metric);
        let mut idx: Vec<usize> = (0..pts.len())
            .filter(|&q| full.dist(base, q) <= radius * (1.0 + 1e-12))
            .collect();
        idx.sort_by(|&p, &q| full.dist(base, p).total_cmp(&full.dist(base, q)).then(p.cmp(&q)));
        // Vertices of neighbouring translates get indices outside `0..=4^n`.
        let labels: Vec<String> = idx.iter().map(|&q| format!("s{n}v{}", q as i64 - first as i64)).collect();
        // Coordinates relative to the base; distances are unchanged.
        let space = match self.metric {
            CurveMetric::Chordal => {
                let o = pts[base];
                let local = idx.iter().map(|&q| [pts[q][0] - o[0], pts[q][1] - o[1]]).collect();
                FiniteMetricSpace::from_planar_points(labels, local)
            }
            CurveMetric::ArcLength => {
                let s = arc_positions(&pts);
                FiniteMetricSpace::from_line_points(labels, idx.iter().map(|&q| s[q] - s[base]).collect())
            }
        };
        Ok(PointedWindow::new(space, 0, 1.0, radius)?)
    }
}

/// Wu's line restricted to `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct WuLine {
    pub sched: WuSchedule,
    pub truncation: usize,
    pub extent: [f64; 2],
}

impl WuLine {
    fn space_on(&self, xs: &[f64]) -> Result<FiniteMetricSpace, FractalError> {
        let n = xs.len();
        if n > DENSE_MAX {
            return Err(FractalError::TooLarge { points: n, max: DENSE_MAX });
        }
        let mut flat = vec![0.0; n * n];
        for i in 0..n {
            for j in i + 1..n {
                let d = delta(xs[i], xs[j], &self.sched, self.truncation);
                flat[i * n + j] = d;
                flat[j * n + i] = d;
            }
        }
        Ok(FiniteMetricSpace::from_dense(xs.iter().map(|&x| fmt_num(x)).collect(), flat))
    }
}

impl SpaceGenerator for WuLine {
    fn name(&self) -> String {
        format!("wu(levels={})", self.truncation)
    }

    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError> {
        check_mesh(h, 1.0)?;
        self.space_on(&wu_sample(&self.sched, self.truncation, self.extent[0], self.extent[1], h))
    }

    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
        check_mesh(h, radius)?;
        let x = center.xy()?[0];
        // δ dominates |x - y|, so the ball lies in the Euclidean interval.
        let lo = (x - radius).max(self.extent[0]);
        let hi = (x + radius).min(self.extent[1]);
        let mut xs = wu_sample(&self.sched, self.truncation, lo, hi, h);
        if xs.is_empty() {
            return Err(FractalError::Domain(format!("centre {x} is outside the sampled line")));
        }
        let c = nearest(&xs, x);
        let cx = xs[c];
        xs.retain(|&y| delta(cx, y, &self.sched, self.truncation) <= radius * (1.0 + 1e-12));
        xs.sort_by(|&a, &b| {
            let (da, db) = (delta(cx, a, &self.sched, self.truncation), delta(cx, b, &self.sched, self.truncation));
            da.total_cmp(&db).then(a.total_cmp(&b))
        });
        Ok(PointedWindow::new(self.space_on(&xs)?, 0, 1.0, radius)?)
    }
}

fn nearest(xs: &[f64], x: f64) -> usize {
    (0..xs.len()).min_by(|&i, &j| (xs[i] - x).abs().total_cmp(&(xs[j] - x).abs())).unwrap()
}

/// Product rug on the rectangle `x × y`.
#[derive(Clone, Debug)]
pub struct Rug {
    pub line: LineMetric,
    pub extent: [[f64; 2]; 2],
}

impl SpaceGenerator for Rug {
    fn name(&self) -> String {
        match &self.line {
            LineMetric::Wu { truncation, .. } => format!("rug(wu, levels={truncation})"),
            LineMetric::Snowflake { eps } => format!("rug(eps={})", fmt_num(*eps)),
        }
    }

    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError> {
        product_rug_space(&self.line, 2, self.extent, h)
    }

    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
        check_mesh(h, radius)?;
        // Make sure parameters are valid before sampling.
        product_rug_space(&self.line, 2, [[0.0, 0.0], [0.0, 0.0]], 1.0)?;
        let c = center.xy()?;
        let [[x0, x1], [y0, y1]] = self.extent;
        let reach = match &self.line {
            LineMetric::Snowflake { eps } => radius.powf(1.0 / eps),
            LineMetric::Wu { .. } => radius,
        };
        let xs = line_sample(&self.line, x0, x1, h);
        let ky = ((y1 - y0) / h).round() as i64;
        let ys: Vec<f64> = (0..=ky).map(|j| (y0 + j as f64 * h).min(y1)).collect();
        let cx = xs[nearest(&xs, c[0])];
        let cy = ys[nearest(&ys, c[1])];
        let mut pts: Vec<[f64; 2]> = ys
            .iter()
            .filter(|&&y| (y - cy).abs() <= radius)
            .flat_map(|&y| xs.iter().filter(|&&x| (x - cx).abs() <= reach).map(move |&x| [x, y]))
            .filter(|p| self.line.distance(cx, p[0]).hypot(p[1] - cy) <= radius * (1.0 + 1e-12))
            .collect();
        let d = |p: &[f64; 2]| self.line.distance(cx, p[0]).hypot(p[1] - cy);
        pts.sort_by(|p, q| d(p).total_cmp(&d(q)).then(p[0].total_cmp(&q[0])).then(p[1].total_cmp(&q[1])));
        Ok(PointedWindow::new(rug_on(&self.line, &pts)?, 0, 1.0, radius)?)
    }
}

/// A model tangent, always centred at its distinguished point.
#[derive(Clone, Debug)]
pub struct Model {
    pub kind: ModelKind,
}

impl SpaceGenerator for Model {
    fn name(&self) -> String {
        format!("model({})", self.kind)
    }

    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError> {
        Ok(model_tangent_space(self.kind, 1.0, h)?.space)
    }

    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
        match center {
            Center::Xy([x, y]) if *x == 0.0 && *y == 0.0 => model_tangent_space(self.kind, radius, h),
            _ => Err(FractalError::Domain(format!(
                "model {} windows are centred at the origin only",
                self.kind
            ))),
        }
    }
}

/// `inner` with every distance multiplied by `c`.
pub struct Scaled {
    pub inner: Box<dyn SpaceGenerator>,
    pub c: f64,
}

impl Scaled {
    pub fn new(inner: Box<dyn SpaceGenerator>, c: f64) -> Result<Self, FractalError> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(FractalError::Domain(format!("scale factor must be positive, got {c}")));
        }
        Ok(Self { inner, c })
    }
}

impl SpaceGenerator for Scaled {
    fn name(&self) -> String {
        format!("{}*{}", fmt_num(self.c), self.inner.name())
    }

    fn sample(&self, h: f64) -> Result<FiniteMetricSpace, FractalError> {
        Ok(self.inner.sample(h / self.c)?.scale_by(self.c))
    }

    fn window(&self, center: &Center, radius: f64, h: f64) -> Result<PointedWindow, FractalError> {
        let w = self.inner.window(center, radius / self.c, h / self.c)?;
        Ok(PointedWindow::new(w.space.scale_by(self.c), w.base, 1.0, radius)?)
    }
}

impl fmt::Debug for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scaled({})", self.name())
    }
}

/// Deeper construction levels are far below any usable mesh.
const MAX_SPEC_LEVELS: usize = 64;

/// Builds a generator from `kind[:key=value]...`.
///
/// Kinds and keys:
/// - `square`, `plane`
/// - `slit-carpet`, `pillow-carpet`: `r=` list, `harmonic` or `const:<r>`; `levels=`
/// - `snowflake`: `l=standard|dyadic|<list>`, `window=a,b`, `metric=chordal|arc`, `ends=periodic|open`
/// - `wu`: `levels=`, `extent=lo,hi`
/// - `rug`: `line=snowflake|wu`, `eps=`, `levels=`, `x=lo,hi`, `y=lo,hi`
/// - `model`: `kind=plane|half|quarter|t|l|d|line|ray`
///
/// Any kind also takes `scale=c`, multiplying the metric by `c`. `levels`
/// is at most 64.
pub fn generator_from_spec(spec: &str) -> Result<Box<dyn SpaceGenerator>, FractalError> {
    let mut parts = spec.trim().split(':');
    let kind = parts.next().unwrap_or("").trim().to_ascii_lowercase();
    let mut kv: Vec<(String, String)> = Vec::new();
    for p in parts {
        match p.split_once('=') {
            Some((k, v)) => kv.push((k.trim().to_ascii_lowercase(), v.trim().to_string())),
            // `const:<r>` carries its own colon.
            None => match kv.last_mut() {
                Some((_, v)) => {
                    v.push(':');
                    v.push_str(p.trim());
                }
                None => return Err(FractalError::Spec(format!("expected key=value, got {p:?}"))),
            },
        }
    }
    let mut used = vec![false; kv.len()];
    let mut get = |key: &str| -> Option<String> {
        let i = kv.iter().position(|(k, _)| k == key)?;
        used[i] = true;
        Some(kv[i].1.clone())
    };
    let levels = get("levels").map(|v| v.parse::<usize>()).transpose().map_err(|e| {
        FractalError::Spec(format!("levels: {e}"))
    })?;
    if let Some(n) = levels.filter(|&n| n > MAX_SPEC_LEVELS) {
        return Err(FractalError::Spec(format!("levels = {n} exceeds {MAX_SPEC_LEVELS}")));
    }
    let scale = get("scale").map(|v| parse_positive(&v)).transpose()?;
    let pair = |v: Option<String>, default: [f64; 2]| -> Result<[f64; 2], FractalError> {
        match v {
            Some(s) => {
                let p = parse_point(&s)?;
                if !(p[1] >= p[0]) {
                    return Err(FractalError::Spec(format!("interval {s} is empty")));
                }
                Ok(p)
            }
            None => Ok(default),
        }
    };
    let gen: Box<dyn SpaceGenerator> = match kind.as_str() {
        "square" => Box::new(Square),
        "plane" => Box::new(Plane),
        "slit-carpet" | "pillow-carpet" => {
            let r = match get("r") {
                Some(s) => parse_schedule(&s, levels.unwrap_or(0))?,
                None => vec![],
            };
            let r = match levels {
                Some(l) if l <= r.len() => r[..l].to_vec(),
                Some(l) => {
                    return Err(FractalError::Spec(format!("levels={l} but only {} slit lengths", r.len())))
                }
                None => r,
            };
            Box::new(SlitCarpet { sched: SlitSchedule::new(r)?, pillows: kind == "pillow-carpet" })
        }
        "snowflake" => {
            let flatness = match get("l").as_deref() {
                None | Some("standard") => Flatness::Standard,
                Some("dyadic") => Flatness::Dyadic,
                Some(list) => Flatness::List(parse_list(list)?),
            };
            let metric = match get("metric").as_deref() {
                None | Some("chordal") => CurveMetric::Chordal,
                Some("arc") => CurveMetric::ArcLength,
                Some(other) => return Err(FractalError::Spec(format!("unknown curve metric {other:?}"))),
            };
            let periodic = match get("ends").as_deref() {
                None | Some("periodic") => true,
                Some("open") => false,
                Some(other) => return Err(FractalError::Spec(format!("unknown curve ends {other:?}"))),
            };
            Box::new(Snowflake { flatness, window: pair(get("window"), [0.0, 1.0])?, metric, periodic })
        }
        "wu" => {
            let n = levels.unwrap_or(6);
            Box::new(WuLine {
                sched: WuSchedule::preset(n)?,
                truncation: n,
                extent: pair(get("extent"), [0.0, 1.0])?,
            })
        }
        "rug" => {
            let line = match get("line").as_deref() {
                None | Some("snowflake") => {
                    let eps = match get("eps") {
                        Some(e) => parse_real(&e)?,
                        None => 0.5,
                    };
                    LineMetric::Snowflake { eps }
                }
                Some("wu") => {
                    let n = levels.unwrap_or(6);
                    LineMetric::Wu { sched: WuSchedule::preset(n)?, truncation: n }
                }
                Some(other) => return Err(FractalError::Spec(format!("unknown rug line {other:?}"))),
            };
            let extent = [pair(get("x"), [0.0, 1.0])?, pair(get("y"), [0.0, 1.0])?];
            let rug = Rug { line, extent };
            // Surface parameter errors now rather than at the first sample.
            rug.line_check()?;
            Box::new(rug)
        }
        "model" => {
            let k = get("kind").ok_or_else(|| FractalError::Spec("model needs kind=".into()))?;
            let kind: ModelKind = k.parse()?;
            Box::new(Model { kind })
        }
        other => return Err(FractalError::Spec(format!("unknown space kind {other:?}"))),
    };
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(FractalError::Spec(format!("unused key {:?} for {kind}", kv[i].0)));
    }
    match scale {
        Some(c) => Ok(Box::new(Scaled::new(gen, c)?)),
        None => Ok(gen),
    }
}

impl Rug {
    fn line_check(&self) -> Result<(), FractalError> {
        product_rug_space(&self.line, 2, [[0.0, 0.0], [0.0, 0.0]], 1.0).map(|_| ())
    }
}
