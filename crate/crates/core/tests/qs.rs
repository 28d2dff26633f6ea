use std::f64::consts::PI;

use metric_lab::fractal::{square_map_phi, t_points_space};
use metric_lab::qs::{
    check_eta_with, compose_envelopes, diam_ratio_check, distortion_envelope, invert_envelope,
    qc_constant_probe, DistortionEnvelope, SampledMap, TripleBudget,
};
use metric_lab::FiniteMetricSpace;
use proptest::prelude::*;

fn line(xs: &[f64]) -> FiniteMetricSpace {
    FiniteMetricSpace::from_line_points(FiniteMetricSpace::index_labels(xs.len()), xs.to_vec())
}

fn powered(xs: &[f64], eps: f64) -> FiniteMetricSpace {
    let rows = xs.iter().map(|a| xs.iter().map(|b| (a - b).abs().powf(eps)).collect()).collect();
    FiniteMetricSpace::from_matrix(FiniteMetricSpace::index_labels(xs.len()), rows).unwrap()
}

fn uniform(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Every (t, s) over ordered triples with x ≠ z, straight from the definition.
fn all_ratios(dx: &FiniteMetricSpace, dy: &FiniteMetricSpace) -> Vec<(f64, f64)> {
    let n = dx.len();
    let mut out = Vec::new();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x != z {
                    out.push((dx.dist(x, y) / dx.dist(x, z), dy.dist(x, y) / dy.dist(x, z)));
                }
            }
        }
    }
    out
}

fn step_max(ratios: &[(f64, f64)], t: f64) -> f64 {
    ratios.iter().filter(|r| r.0 <= t).fold(0.0, |a, r| a.max(r.1))
}

fn phi_map() -> SampledMap {
    let mut planar = Vec::new();
    let mut images = Vec::new();
    for k in 1..=6 {
        for j in 0..=8 {
            let (r, th) = (k as f64 / 6.0, j as f64 * PI / 8.0);
            planar.push([r * th.cos(), r * th.sin()]);
            images.push(square_map_phi(r, th).unwrap());
        }
    }
    let labels = FiniteMetricSpace::index_labels(planar.len());
    SampledMap::identity(
        FiniteMetricSpace::from_planar_points(labels.clone(), planar),
        t_points_space(labels, &images),
    )
    .unwrap()
}

#[test]
fn snowflake_envelope_is_the_power_law() {
    let xs = uniform(30);
    let (d, d5) = (line(&xs), powered(&xs, 0.5));
    let f = SampledMap::identity(d.clone(), d5.clone()).unwrap();
    let env = distortion_envelope(&f, TripleBudget::All).unwrap();
    for &(t, s) in env.breakpoints() {
        assert!((s - t.sqrt()).abs() <= 1e-12, "({t}, {s})");
    }
    // Same step function as the brute-force maximum at every breakpoint and
    // just left of it.
    let ratios = all_ratios(&d, &d5);
    for &(t, s) in env.breakpoints() {
        assert!((step_max(&ratios, t) - s).abs() <= 1e-12);
        if t > 0.0 {
            let before = env.eval(t * (1.0 - 1e-9)).unwrap();
            assert!((step_max(&ratios, t * (1.0 - 1e-9)) - before).abs() <= 1e-12);
        }
    }
}

#[test]
fn inversion_round_trips() {
    let xs = uniform(30);
    let f = SampledMap::identity(line(&xs), powered(&xs, 0.5)).unwrap();
    for env in [
        distortion_envelope(&f, TripleBudget::All).unwrap(),
        distortion_envelope(&phi_map(), TripleBudget::All).unwrap(),
    ] {
        let back = invert_envelope(&invert_envelope(&env).unwrap().envelope).unwrap().envelope;
        assert_eq!(back.len(), env.len());
        for (p, q) in back.breakpoints().iter().zip(env.breakpoints()) {
            assert!((p.0 - q.0).abs() <= 1e-9 * q.0.max(1.0), "{p:?} {q:?}");
            assert!((p.1 - q.1).abs() <= 1e-9 * q.1.max(1.0), "{p:?} {q:?}");
        }
    }
}

#[test]
fn inverse_envelope_matches_the_inverse_map() {
    let xs = uniform(20);
    let forward = SampledMap::identity(line(&xs), powered(&xs, 0.5)).unwrap();
    let backward = SampledMap::identity(powered(&xs, 0.5), line(&xs)).unwrap();
    let inv = invert_envelope(&distortion_envelope(&forward, TripleBudget::All).unwrap()).unwrap();
    let direct = distortion_envelope(&backward, TripleBudget::All).unwrap();
    for &(t, s) in inv.envelope.breakpoints() {
        assert!((s - t * t).abs() <= 1e-9 * s.max(1.0));
        let d = direct.eval(t * (1.0 + 1e-12)).unwrap();
        assert!((d - s).abs() <= 1e-9 * s.max(1.0), "t = {t}: {d} vs {s}");
    }
}

#[test]
fn composition_dominates_the_composite_map() {
    let xs = uniform(14);
    let f = SampledMap::identity(line(&xs), powered(&xs, 0.5)).unwrap();
    let g = SampledMap::identity(powered(&xs, 0.5), powered(&xs, 0.25)).unwrap();
    let gf = f.then(&g).unwrap();
    let (ef, eg) = (
        distortion_envelope(&f, TripleBudget::All).unwrap(),
        distortion_envelope(&g, TripleBudget::All).unwrap(),
    );
    let composed = compose_envelopes(&eg, &ef).unwrap();
    let direct = distortion_envelope(&gf, TripleBudget::All).unwrap();
    for &(t, s) in composed.envelope.breakpoints() {
        assert!(direct.eval(t).unwrap() <= s + 1e-12, "t = {t}");
    }
}

#[test]
fn eta_candidates_on_the_snowflake_sample() {
    let xs = uniform(30);
    let f = SampledMap::identity(line(&xs), powered(&xs, 0.5)).unwrap();
    let env = distortion_envelope(&f, TripleBudget::All).unwrap();
    assert!(check_eta_with(&env, |t| Some(t.sqrt())).unwrap().holds);
    let r = check_eta_with(&env, |t| Some(t)).unwrap();
    let (t, hat, eta) = r.worst.unwrap();
    assert!(!r.holds && t < 1.0 && hat > eta);
}

#[test]
fn nested_intervals_satisfy_the_diameter_bounds() {
    let xs = uniform(25);
    let f = SampledMap::identity(line(&xs), powered(&xs, 0.5)).unwrap();
    let env = distortion_envelope(&f, TripleBudget::All).unwrap();
    let pairs: Vec<(Vec<usize>, Vec<usize>)> = [(10, 14, 5, 20), (0, 3, 0, 24), (12, 13, 8, 16), (3, 21, 0, 24)]
        .iter()
        .map(|&(a0, a1, b0, b1)| ((a0..=a1).collect(), (b0..=b1).collect()))
        .collect();
    for row in diam_ratio_check(&f, &env, &pairs).unwrap() {
        assert!(row.holds, "{row:?}");
    }
}

#[test]
fn qc_probes() {
    // Snowflake map on a uniform sample, radii on the grid: exactly 1.
    let xs = uniform(33);
    let f = SampledMap::identity(line(&xs), powered(&xs, 0.5)).unwrap();
    let radii: Vec<f64> = [8.0, 4.0, 2.0, 1.0].iter().map(|k| k / 32.0).collect();
    for row in qc_constant_probe(&f, &radii).unwrap().rows {
        assert!((row.h_max - 1.0).abs() < 1e-9, "{row:?}");
    }
    // The square map is conformal; on the polar sample H stays bounded.
    let rep = qc_constant_probe(&phi_map(), &[0.5, 0.35, 0.25]).unwrap();
    for row in &rep.rows {
        assert!(row.evaluated > 0 && row.h_max.is_finite() && row.h_max < 8.0, "{row:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn subsample_envelopes_stay_below(seed in 0u64..1000, count in 1usize..400) {
        let xs: Vec<f64> = (0..9).map(|i| (i * i) as f64 * 0.1 + i as f64).collect();
        let f = SampledMap::identity(line(&xs), powered(&xs, 0.7)).unwrap();
        let full = distortion_envelope(&f, TripleBudget::All).unwrap();
        let part = distortion_envelope(&f, TripleBudget::Sample { count, seed }).unwrap();
        for &(t, s) in part.breakpoints() {
            prop_assert!(s <= full.eval(t).unwrap() + 1e-12);
        }
    }

    #[test]
    fn rescaling_either_side_keeps_the_envelope(a in 0.1f64..10.0, b in 0.1f64..10.0) {
        let xs: Vec<f64> = (0..8).map(|i| (i as f64).powf(1.3)).collect();
        let base = SampledMap::identity(line(&xs), powered(&xs, 0.6)).unwrap();
        let scaled = SampledMap::identity(line(&xs).scale_by(a), powered(&xs, 0.6).scale_by(b)).unwrap();
        let e0 = distortion_envelope(&base, TripleBudget::All).unwrap();
        let e1 = distortion_envelope(&scaled, TripleBudget::All).unwrap();
        prop_assert_eq!(e0.len(), e1.len());
        for (p, q) in e0.breakpoints().iter().zip(e1.breakpoints()) {
            prop_assert!((p.0 - q.0).abs() <= 1e-9 * p.0.max(1.0));
            prop_assert!((p.1 - q.1).abs() <= 1e-9 * p.1.max(1.0));
        }
    }

    #[test]
    fn tables_invert_twice_to_themselves(steps in prop::collection::vec((0.01f64..1.0, 0.01f64..1.0), 1..12)) {
        let mut pts = vec![(0.0, 0.0)];
        let (mut t, mut s) = (0.0, 0.0);
        for (dt, ds) in steps {
            t += dt;
            s += ds;
            pts.push((t, s));
        }
        let env = DistortionEnvelope::from_breakpoints(pts).unwrap();
        let back = invert_envelope(&invert_envelope(&env).unwrap().envelope).unwrap().envelope;
        for (p, q) in back.breakpoints().iter().zip(env.breakpoints()) {
            prop_assert!((p.0 - q.0).abs() <= 1e-9 * q.0.max(1.0));
            prop_assert!((p.1 - q.1).abs() <= 1e-9 * q.1.max(1.0));
        }
    }
}
