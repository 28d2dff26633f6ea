//! Blow-ups: rescaled pointed windows of a generator compared against model
//! tangents, scale by scale.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::format::fmt_num;
use crate::fractal::{model_tangent_space, Center, FractalError, ModelKind, SpaceGenerator};
use crate::gh::{pointed_gh_bounds_with, GhError, HeuristicConfig};
use crate::metric::{MetricError, PointedWindow};

/// Slopes within this band of zero count as flat.
pub const TREND_BAND: f64 = 1e-3;

#[derive(Debug, thiserror::Error)]
pub enum TangentError {
    #[error("{0}")]
    Domain(String),
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("need at least 3 rows to classify, got {0}")]
    InsufficientData(usize),
    #[error(transparent)]
    Fractal(#[from] FractalError),
    #[error(transparent)]
    Gh(#[from] GhError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Decreasing,
    Flat,
    Increasing,
    Inconclusive,
}

impl std::fmt::Display for Trend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Trend::Decreasing => "decreasing",
            Trend::Flat => "flat",
            Trend::Increasing => "increasing",
            Trend::Inconclusive => "inconclusive",
        })
    }
}

/// Sign of the least-squares slope of `ys` against their index. Fewer than
/// two values are flat.
pub fn trend_of(ys: &[f64], band: f64) -> Trend {
    let n = ys.len();
    if n < 2 {
        return Trend::Flat;
    }
    let xm = (n - 1) as f64 / 2.0;
    let ym = ys.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (k, y) in ys.iter().enumerate() {
        let dx = k as f64 - xm;
        sxy += dx * (y - ym);
        sxx += dx * dx;
    }
    let slope = sxy / sxx;
    if slope < -band {
        Trend::Decreasing
    } else if slope > band {
        Trend::Increasing
    } else {
        Trend::Flat
    }
}

/// Window mesh as a function of the scale: `h(λ) = λ / divisor`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ResolutionRule {
    pub divisor: f64,
}

impl Default for ResolutionRule {
    fn default() -> Self {
        Self { divisor: 64.0 }
    }
}

impl ResolutionRule {
    pub fn mesh(&self, lambda: f64) -> f64 {
        lambda / self.divisor
    }
}

pub struct ScanConfig {
    pub generator: Box<dyn SpaceGenerator>,
    pub center: Center,
    /// Strictly decreasing, positive.
    pub scales: Vec<f64>,
    /// Window radius after rescaling.
    pub radius: f64,
    pub models: Vec<ModelKind>,
    pub resolution: ResolutionRule,
    pub heuristic: HeuristicConfig,
    /// Fill the `seconds` column; off by default so reports are byte-stable.
    pub timing: bool,
}

impl ScanConfig {
    pub fn new(generator: Box<dyn SpaceGenerator>, center: Center, scales: Vec<f64>, models: Vec<ModelKind>) -> Self {
        Self {
            generator,
            center,
            scales,
            radius: 1.0,
            models,
            resolution: ResolutionRule::default(),
            heuristic: HeuristicConfig::default(),
            timing: false,
        }
    }

    fn validate(&self) -> Result<(), TangentError> {
        if self.scales.is_empty() {
            return Err(TangentError::Domain("no scales given".into()));
        }
        if let Some(l) = self.scales.iter().find(|l| !(**l > 0.0) || !l.is_finite()) {
            return Err(TangentError::Domain(format!("scale {l} is not positive")));
        }
        if self.scales.windows(2).any(|w| w[1] >= w[0]) {
            return Err(TangentError::Domain("scales must be strictly decreasing".into()));
        }
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(TangentError::Domain(format!("radius {} is not positive", self.radius)));
        }
        if self.models.is_empty() {
            return Err(TangentError::Domain("no models given".into()));
        }
        if !(self.resolution.divisor >= 1.0) || !self.resolution.divisor.is_finite() {
            return Err(TangentError::Resolution(format!(
                "divisor {} must be at least 1",
                self.resolution.divisor
            )));
        }
        // h(λ)/λ must not grow along the schedule.
        let ratios: Vec<f64> = self.scales.iter().map(|&l| self.resolution.mesh(l) / l).collect();
        if ratios.windows(2).any(|w| w[1] > w[0] * (1.0 + 1e-12)) {
            return Err(TangentError::Resolution("h(λ)/λ grows along the scales".into()));
        }
        Ok(())
    }
}

/// The generator's ball of radius `lambda·radius` around `center` at mesh
/// `h`, with the metric divided by `lambda`.
pub fn extract_window(
    generator: &dyn SpaceGenerator,
    center: &Center,
    lambda: f64,
    radius: f64,
    h: f64,
) -> Result<PointedWindow, TangentError> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(TangentError::Domain(format!("scale {lambda} is not positive")));
    }
    if !(h > 0.0) || h >= lambda * radius {
        return Err(TangentError::Resolution(format!(
            "mesh {h} does not resolve a ball of radius {}",
            lambda * radius
        )));
    }
    let w = generator.window(center, lambda * radius, h)?;
    Ok(w.rescale(lambda)?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelRow {
    pub model: ModelKind,
    pub lower: f64,
    pub upper: f64,
    pub witness_size: usize,
    pub model_points: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub lambda: f64,
    pub points: usize,
    pub models: Vec<ModelRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub best: ModelKind,
    pub final_upper: f64,
    pub final_gap: f64,
    pub trend: Trend,
    pub conclusive: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub generator: String,
    pub rows: Vec<ScanRow>,
    /// Absent with fewer than three rows.
    pub verdict: Option<Verdict>,
}

impl ScanReport {
    /// Upper bounds for one model, in scale order.
    pub fn column(&self, model: ModelKind) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.models.iter().find(|m| m.model == model).map(|m| m.upper))
            .collect()
    }

    /// CSV with columns `lambda,model,lower,upper,points,seconds`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "lambda,model,lower,upper,points,seconds")?;
        for r in &self.rows {
            for m in &r.models {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    fmt_num(r.lambda),
                    m.model,
                    fmt_num(m.lower),
                    fmt_num(m.upper),
                    r.points,
                    fmt_num(m.seconds)
                )?;
            }
        }
        Ok(())
    }
}

/// One row per scale; each compares the rescaled window with every model
/// window of the same radius at the same relative mesh.
pub fn tangent_scan(cfg: &ScanConfig) -> Result<ScanReport, TangentError> {
    cfg.validate()?;
    let rows = cfg
        .scales
        .par_iter()
        .map(|&lambda| scan_row(cfg, lambda))
        .collect::<Result<Vec<_>, _>>()?;
    let mut report = ScanReport { generator: cfg.generator.name(), rows, verdict: None };
    if report.rows.len() >= 3 {
        report.verdict = Some(classify_tangent(&report)?);
    }
    Ok(report)
}

fn scan_row(cfg: &ScanConfig, lambda: f64) -> Result<ScanRow, TangentError> {
    let h = cfg.resolution.mesh(lambda);
    let window = extract_window(cfg.generator.as_ref(), &cfg.center, lambda, cfg.radius, h)?;
    let models = cfg
        .models
        .iter()
        .map(|&kind| {
            let start = Instant::now();
            let model = model_tangent_space(kind, cfg.radius, h / lambda)?;
            let gh = pointed_gh_bounds_with(&window, &model, &cfg.heuristic)?;
            let seconds = if cfg.timing { start.elapsed().as_secs_f64() } else { 0.0 };
            Ok(ModelRow {
                model: kind,
                lower: gh.lower,
                upper: gh.upper,
                witness_size: gh.witness.as_ref().map_or(0, |w| w.len()),
                model_points: model.len(),
                seconds,
            })
        })
        .collect::<Result<Vec<_>, TangentError>>()?;
    log::debug!("scale {lambda}: {} window points", window.len());
    Ok(ScanRow { lambda, points: window.len(), models })
}

/// Best model by final upper bound, and the trend of its column.
///
/// Inconclusive when the runner-up's final upper bound is within the sum of
/// the two final gaps of the best one.
pub fn classify_tangent(report: &ScanReport) -> Result<Verdict, TangentError> {
    if report.rows.len() < 3 {
        return Err(TangentError::InsufficientData(report.rows.len()));
    }
    let last = report.rows.last().expect("nonempty");
    let mut finals: Vec<&ModelRow> = last.models.iter().collect();
    if finals.is_empty() {
        return Err(TangentError::Domain("the last row compares no models".into()));
    }
    finals.sort_by(|a, b| a.upper.total_cmp(&b.upper).then(a.model.cmp(&b.model)));
    let best = finals[0];
    let gap = |m: &ModelRow| (m.upper - m.lower).max(0.0);
    let conclusive = finals.get(1).map_or(true, |second| second.upper - best.upper >= gap(best) + gap(second));
    let column = report.column(best.model);
    let trend = if conclusive { trend_of(&column, TREND_BAND) } else { Trend::Inconclusive };
    Ok(Verdict { best: best.model, final_upper: best.upper, final_gap: gap(best), trend, conclusive })
}
