use std::path::{Path, PathBuf};

use clap::Parser;
use serde_json::{json, Value};

use metric_lab::boundary::{
    boundary_points, cylinder_ball, expansion_factor_probe, four_point_check, parse_word, ultrametric_check,
    reduce_word, visual_space, BoundaryPoint, CylinderCount, Letter, ReducedWord,
};
use metric_lab::format::fmt_num;
use metric_lab::fractal::{generator_from_spec, Center, ModelKind};
use metric_lab::gh::{gh_bounds_with, gh_exact_small, pointed_gh_bounds_with, pointed_gh_exact, GhResult, HeuristicConfig};
use metric_lab::metric::{geometry_stats, read_space_json, write_space_json, Perfectness};
use metric_lab::parse::{parse_list, parse_positive, parse_real, parse_scales};
use metric_lab::qs::{
    check_eta_with, distortion_envelope, qc_constant_probe, read_map_json, write_envelope_csv, SampledMap,
    TripleBudget,
};
use metric_lab::tangent::{tangent_scan, ResolutionRule, ScanConfig};
use metric_lab::{FiniteMetricSpace, PointedWindow};

use crate::args::*;
use crate::manifest::{declared_output, read_manifest, read_spec, spec_to_argv};
use crate::output::{json_bytes, num, read_text, sha256_file, write_atomic};
use crate::{CliError, Outcome};

pub fn execute(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Gen(a) => gen(a),
        Command::Validate(a) => validate(a),
        Command::Gh(a) => gh(a),
        Command::Scan(a) => scan(a),
        Command::Qs(a) => qs(a),
        Command::Boundary(a) => boundary(a),
        Command::Reproduce(a) => reproduce(a),
    }
}

fn done(summary: String, out: Option<PathBuf>) -> Outcome {
    Outcome { summary, outputs: out.into_iter().collect(), failed: false }
}

fn load_space(path: &Path) -> Result<FiniteMetricSpace, CliError> {
    read_space_json(&read_text(path)?).map_err(|e| match CliError::from(e) {
        CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn space_bytes(m: &FiniteMetricSpace) -> Vec<u8> {
    let mut buf = Vec::new();
    write_space_json(m, &mut buf).expect("writing to memory");
    buf
}

fn gen_spec(a: &GenArgs) -> Result<String, CliError> {
    if let Some(s) = &a.space {
        return Ok(s.clone());
    }
    let kind = a.kind.as_ref().ok_or_else(|| CliError::Usage("gen needs --kind or --space".into()))?;
    let mut parts = vec![kind.clone()];
    if let Some(r) = &a.r {
        parts.push(format!("r={r}"));
    }
    if let Some(l) = a.levels {
        parts.push(format!("levels={l}"));
    }
    for p in &a.params {
        if !p.contains('=') {
            return Err(CliError::Usage(format!("--param {p:?} is not key=value")));
        }
        parts.push(p.clone());
    }
    Ok(parts.join(":"))
}

fn gen(a: GenArgs) -> Result<Outcome, CliError> {
    let spec = gen_spec(&a)?;
    let g = generator_from_spec(&spec)?;
    let h = parse_positive(&a.h)?;
    let space = match &a.center {
        Some(c) => {
            let radius = parse_positive(a.radius.as_deref().unwrap_or("1"))?;
            g.window(&Center::parse(c)?, radius, h)?.space
        }
        None => g.sample(h)?,
    };
    let mut summary = format!("gen: {} with {} points, diameter {}", g.name(), space.len(), fmt_num(space.diameter()));
    if a.validate {
        let report = space.validate();
        if !report.is_metric() {
            return Err(CliError::domain("metric", format!("generated sample is not a metric: {report}")));
        }
        summary.push_str(", metric axioms hold");
    }
    if let Some(out) = &a.out {
        write_atomic(out, &space_bytes(&space))?;
    }
    Ok(done(summary, a.out))
}

fn validate(a: ValidateArgs) -> Result<Outcome, CliError> {
    let m = load_space(&a.space)?;
    let report = m.validate();
    if !report.is_metric() {
        return Err(CliError::domain("metric", format!("{}: {report}", a.space.display())));
    }
    let mut summary = format!("validate: {} points, {report}", m.len());
    if let Some(s) = &a.scales {
        let stats = geometry_stats(&m, &parse_scales(s)?)?;
        let perfect = match stats.perfectness {
            Perfectness::Constant { c } => format!("uniformly perfect with C = {}", fmt_num(c)),
            Perfectness::NotUniformlyPerfect { center, radius } => {
                format!("not uniformly perfect (empty annulus at point {center}, radius {})", fmt_num(radius))
            }
        };
        summary.push_str(&format!(
            "; diameter {}, doubling estimate {}, {perfect}",
            fmt_num(stats.diameter),
            stats.doubling_estimate
        ));
    }
    Ok(done(summary, None))
}

fn gh_json(r: &GhResult) -> Value {
    json!({
        "lower": num(r.lower),
        "upper": num(r.upper),
        "exact": r.exact.map(num),
        "witness": r.witness.as_ref().map(|w| w.pairs().to_vec()),
    })
}

fn whole_window(m: FiniteMetricSpace, base: usize) -> Result<PointedWindow, CliError> {
    if base >= m.len() {
        return Err(CliError::domain("gh", format!("base {base} out of range for {} points", m.len())));
    }
    let radius = m.eccentricity(base);
    Ok(PointedWindow::new(m, base, 1.0, radius)?)
}

fn gh(a: GhArgs) -> Result<Outcome, CliError> {
    let x = load_space(&a.x)?;
    let y = load_space(&a.y)?;
    let cfg = HeuristicConfig { seed: a.seed, restarts: a.restarts, ..HeuristicConfig::default() };
    let r = match (a.base_x, a.base_y) {
        (Some(bx), Some(by)) => {
            let (w1, w2) = (whole_window(x, bx)?, whole_window(y, by)?);
            if a.exact {
                pointed_gh_exact(&w1, &w2, a.budget)?
            } else {
                pointed_gh_bounds_with(&w1, &w2, &cfg)?
            }
        }
        _ if a.exact => gh_exact_small(&x, &y, a.budget)?,
        _ => gh_bounds_with(&x, &y, &cfg)?,
    };
    let exact = r.exact.map_or("unknown".to_string(), fmt_num);
    let summary = format!("gh: lower {} upper {} exact {exact}", fmt_num(r.lower), fmt_num(r.upper));
    if let Some(out) = &a.out {
        write_atomic(out, &json_bytes(&gh_json(&r)))?;
    }
    Ok(done(summary, a.out))
}

fn scan(a: ScanArgs) -> Result<Outcome, CliError> {
    let generator = generator_from_spec(&a.space)?;
    let models = a
        .models
        .split(',')
        .map(|m| m.parse::<ModelKind>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut cfg = ScanConfig::new(generator, Center::parse(&a.center)?, parse_scales(&a.scales)?, models);
    cfg.radius = parse_positive(&a.radius)?;
    cfg.resolution = ResolutionRule { divisor: parse_positive(&a.divisor)? };
    cfg.heuristic.seed = a.seed;
    cfg.timing = a.timing;
    let report = tangent_scan(&cfg)?;
    let verdict = match &report.verdict {
        Some(v) => format!(
            "best {} final upper {} gap {} trend {}",
            v.best,
            fmt_num(v.final_upper),
            fmt_num(v.final_gap),
            v.trend
        ),
        None => "too few scales for a verdict".into(),
    };
    if let Some(out) = &a.out {
        let mut buf = Vec::new();
        report.write_csv(&mut buf).expect("writing to memory");
        write_atomic(out, &buf)?;
    }
    Ok(done(format!("scan: {} rows; {verdict}", report.rows.len()), a.out))
}

fn qs(a: QsArgs) -> Result<Outcome, CliError> {
    let domain = load_space(&a.domain)?;
    let codomain = load_space(&a.codomain)?;
    let assignment = match &a.map {
        Some(p) => read_map_json(&read_text(p)?)?,
        None => (0..domain.len()).collect(),
    };
    let f = SampledMap::new(domain, codomain, assignment)?;
    let budget = match a.budget.trim() {
        "all" => TripleBudget::All,
        n => TripleBudget::Sample {
            count: n.parse().map_err(|_| CliError::Usage(format!("--budget {n:?} is neither `all` nor a count")))?,
            seed: a.seed,
        },
    };
    let env = distortion_envelope(&f, budget)?;
    let mut summary = format!("qs: {} breakpoints", env.len());
    if let Some(p) = &a.eta_power {
        let p = parse_positive(p)?;
        let check = check_eta_with(&env, |t| Some(t.powf(p)))?;
        match check.worst {
            None => summary.push_str(&format!("; eta = t^{} holds", fmt_num(p))),
            Some((t, hat, eta)) => summary.push_str(&format!(
                "; eta = t^{} fails, worst at t = {}: envelope {} > {}",
                fmt_num(p),
                fmt_num(t),
                fmt_num(hat),
                fmt_num(eta)
            )),
        }
    }
    if let Some(r) = &a.radii {
        let rep = qc_constant_probe(&f, &parse_list(r)?)?;
        let hs: Vec<String> = rep.rows.iter().map(|r| fmt_num(r.h_max)).collect();
        let skipped: usize = rep.rows.iter().map(|r| r.skipped).sum();
        summary.push_str(&format!("; H by radius [{}], trend {}, {skipped} skipped", hs.join(", "), rep.trend));
    }
    if let Some(out) = &a.out {
        let mut buf = Vec::new();
        write_envelope_csv(&env, &mut buf).expect("writing to memory");
        write_atomic(out, &buf)?;
    }
    Ok(done(summary, a.out))
}

fn boundary(a: BoundaryArgs) -> Result<Outcome, CliError> {
    let base = parse_real(&a.base)?;
    let count = match a.sample {
        Some(k) => CylinderCount::Sample { k, seed: a.seed },
        None => CylinderCount::All,
    };
    let mut parts = Vec::new();
    let (pts, space) = match &a.cylinder {
        Some(c) => {
            let (word, m) = c
                .rsplit_once(':')
                .ok_or_else(|| CliError::Usage(format!("--cylinder {c:?} is not word:m")))?;
            let m: usize = m.trim().parse().map_err(|_| CliError::Usage(format!("bad cylinder level in {c:?}")))?;
            let w = parse_word(word, a.rank)?;
            if w.len() > a.depth {
                return Err(CliError::domain("boundary", format!("word {w} is longer than depth {}", a.depth)));
            }
            let p = first_extension(&w, a.rank, a.depth)?;
            let (pts, space) = cylinder_ball(&p, m, a.rank, count, base)?;
            parts.push(format!("U({p}, {m}) has {} points", pts.len()));
            if a.probe_expansion {
                let s = expansion_factor_probe(&p, m, a.rank, count, base)?;
                parts.push(format!(
                    "expansion over {} pairs: min {} max {} (exponents {}..{})",
                    s.pairs,
                    fmt_num(s.min),
                    fmt_num(s.max),
                    s.min_exponent,
                    s.max_exponent
                ));
            }
            (pts, space)
        }
        None => {
            if a.probe_expansion {
                return Err(CliError::Usage("--probe-expansion needs --cylinder".into()));
            }
            let pts = boundary_points(a.rank, a.depth)?;
            let space = visual_space(&pts, base)?;
            parts.push(format!("{} boundary points at depth {}", pts.len(), a.depth));
            (pts, space)
        }
    };
    if a.check {
        let u = ultrametric_check(&pts)?;
        let f = four_point_check(&pts)?;
        parts.push(format!(
            "ultrametric {} violations of {}, four-point {} violations of {}",
            u.violations, u.checked, f.violations, f.checked
        ));
        if u.violations > 0 || f.violations > 0 {
            return Err(CliError::domain("boundary", parts.join("; ")));
        }
    }
    if let Some(out) = &a.out {
        write_atomic(out, &space_bytes(&space))?;
    }
    Ok(done(format!("boundary: {}", parts.join("; ")), a.out))
}

/// First reduced extension of `w` to `depth` letters, in the order `a, A, b, B, ...`.
fn first_extension(w: &ReducedWord, rank: usize, depth: usize) -> Result<BoundaryPoint, CliError> {
    let mut letters = w.letters().to_vec();
    while letters.len() < depth {
        let next = Letter::all(rank)
            .find(|l| letters.last().map_or(true, |p| p.inverse() != *l))
            .ok_or_else(|| CliError::Usage("rank must be at least 1".into()))?;
        letters.push(next);
    }
    Ok(BoundaryPoint::new(reduce_word(&letters))?)
}

fn reproduce(a: ReproduceArgs) -> Result<Outcome, CliError> {
    let manifest = read_manifest(&read_text(&a.manifest)?)?;
    let dir = a.manifest.parent().map(Path::to_path_buf).unwrap_or_default();
    let index_path = a.index.clone().unwrap_or_else(|| dir.join("index.json"));
    let mut entries = Vec::new();
    let mut failures = 0;
    for e in &manifest.experiments {
        let loaded = match (&e.spec, &e.inline) {
            (Some(p), _) => {
                let path = dir.join(p);
                match std::fs::read_to_string(&path) {
                    Ok(text) => read_spec(&text).map(|s| (s, path.parent().map(Path::to_path_buf).unwrap_or_default())),
                    Err(err) => {
                        failures += 1;
                        entries.push(json!({
                            "name": e.name,
                            "status": "missing",
                            "error": format!("{}: {err}", path.display()),
                            "outputs": [],
                        }));
                        continue;
                    }
                }
            }
            (None, Some(spec)) => Ok((spec.clone(), dir.clone())),
            (None, None) => Err(CliError::Usage(format!("entry {:?} has neither spec nor command", e.name))),
        };
        let result = loaded.and_then(|(spec, base)| {
            let argv = spec_to_argv(&spec, &base)?;
            let cli = Cli::try_parse_from(&argv).map_err(|err| CliError::Usage(err.to_string()))?;
            let out = execute(cli.command)?;
            Ok((out, declared_output(&spec, &base)))
        });
        match result {
            Ok((out, declared)) => {
                let mut outputs = Vec::new();
                for p in out.outputs.iter().chain(declared.iter().filter(|d| !out.outputs.contains(d))) {
                    let shown = p.strip_prefix(&dir).unwrap_or(p);
                    outputs.push(json!({ "path": shown.display().to_string(), "sha256": sha256_file(p)? }));
                }
                entries.push(json!({ "name": e.name, "status": "ok", "summary": out.summary, "outputs": outputs }));
            }
            Err(err) => {
                failures += 1;
                entries.push(json!({ "name": e.name, "status": "failed", "error": err.to_string(), "outputs": [] }));
            }
        }
    }
    let status = if failures == 0 { "ok" } else { "failed" };
    let index = json!({ "status": status, "experiments": entries });
    write_atomic(&index_path, &json_bytes(&index))?;
    Ok(Outcome {
        summary: format!(
            "reproduce: {} experiments, {failures} failed; index {}",
            manifest.experiments.len(),
            index_path.display()
        ),
        outputs: vec![index_path],
        failed: failures > 0,
    })
}
