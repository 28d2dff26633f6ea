mod support;

use metric_lab::gh::{
    distortion_of_correspondence, gh_bounds, gh_exact_small, map_distortion, pointed_gh_bounds,
    pointed_gh_exact, Correspondence,
};
use metric_lab::{FiniteMetricSpace, PointedWindow};
use proptest::prelude::*;
use rand::Rng;
use support::{clique_dis, random_space, rng, rows, subset_dis};

const BUDGET: u64 = 50_000_000;

fn line(xs: &[f64]) -> FiniteMetricSpace {
    FiniteMetricSpace::from_line_points(FiniteMetricSpace::index_labels(xs.len()), xs.to_vec())
}

#[test]
fn clique_oracle_agrees_with_subset_enumeration() {
    let mut r = rng(11);
    for _ in 0..40 {
        let nx = r.gen_range(1..=4);
        let ny = r.gen_range(1..=16 / nx.max(1)).min(4);
        let x = rows(&random_space(&mut r, nx));
        let y = rows(&random_space(&mut r, ny));
        assert_eq!(clique_dis(&x, &y, None), subset_dis(&x, &y, None));
        let base = Some((r.gen_range(0..nx), r.gen_range(0..ny)));
        assert_eq!(clique_dis(&x, &y, base), subset_dis(&x, &y, base));
    }
}

#[test]
fn exact_matches_oracle_on_random_pairs() {
    let mut r = rng(2024);
    for _ in 0..30 {
        let x = { let n = r.gen_range(2..=6); random_space(&mut r, n) };
        let y = { let n = r.gen_range(2..=6); random_space(&mut r, n) };
        let want = clique_dis(&rows(&x), &rows(&y), None) / 2.0;
        let got = gh_exact_small(&x, &y, BUDGET).unwrap();
        assert_eq!(got.exact, Some(want));
        let w = got.witness.unwrap();
        assert_eq!(distortion_of_correspondence(&x, &y, &w).unwrap() / 2.0, want);
    }
}

#[test]
fn pointed_exact_matches_oracle() {
    let mut r = rng(99);
    for _ in 0..20 {
        let x = { let n = r.gen_range(2..=5); random_space(&mut r, n) };
        let y = { let n = r.gen_range(2..=5); random_space(&mut r, n) };
        let (bx, by) = (r.gen_range(0..x.len()), r.gen_range(0..y.len()));
        let want = clique_dis(&rows(&x), &rows(&y), Some((bx, by))) / 2.0;
        let w1 = PointedWindow::new(x.clone(), bx, 1.0, x.eccentricity(bx)).unwrap();
        let w2 = PointedWindow::new(y.clone(), by, 1.0, y.eccentricity(by)).unwrap();
        let got = pointed_gh_exact(&w1, &w2, BUDGET).unwrap();
        assert_eq!(got.exact, Some(want));
        assert!(got.witness.unwrap().contains((bx, by)));
        let unpointed = gh_exact_small(&x, &y, BUDGET).unwrap().exact.unwrap();
        assert!(want >= unpointed);
    }
}

#[test]
fn triangle_inequality_on_triples() {
    let mut r = rng(5);
    for _ in 0..15 {
        let s: Vec<_> = (0..3).map(|_| { let n = r.gen_range(1..=6); random_space(&mut r, n) }).collect();
        let d = |a: usize, b: usize| gh_exact_small(&s[a], &s[b], BUDGET).unwrap().exact.unwrap();
        assert!(d(0, 2) <= d(0, 1) + d(1, 2) + 1e-9);
        assert!(d(0, 1) <= d(0, 2) + d(2, 1) + 1e-9);
    }
}

#[test]
fn segments_of_diameter_one_and_three() {
    let a = line(&[0.0, 0.25, 0.5, 0.75, 1.0]);
    let b = line(&[0.0, 0.75, 1.5, 2.25, 3.0]);
    let r = gh_bounds(&a, &b).unwrap();
    assert!(r.lower >= 1.0);
    assert!(r.upper >= r.lower);
    let same = gh_bounds(&a, &a).unwrap();
    assert_eq!((same.lower, same.upper), (0.0, 0.0));
}

/// Twelve-point spaces are beyond the exhaustive oracle, so the comparison
/// is made on an eight-point subsample of each: the local-search bound on
/// the subsample pair can never beat the exhaustive value there.
#[test]
fn local_search_never_beats_exhaustive_on_subsamples() {
    let mut r = rng(12);
    for _ in 0..6 {
        let x = random_space(&mut r, 12);
        let y = random_space(&mut r, 12);
        let sx = x.subspace(&(0..8).collect::<Vec<_>>());
        let sy = y.subspace(&(2..10).collect::<Vec<_>>());
        let exhaustive = clique_dis(&rows(&sx), &rows(&sy), None) / 2.0;
        let b = gh_bounds(&sx, &sy).unwrap();
        assert!(b.upper >= exhaustive);
        assert!(b.lower <= exhaustive);
        let full = gh_bounds(&x, &y).unwrap();
        assert!(full.lower <= full.upper);
    }
}

#[test]
fn pointed_v_windows() {
    let v = |a: f64, b: f64| {
        FiniteMetricSpace::from_matrix(
            FiniteMetricSpace::index_labels(3),
            vec![vec![0.0, a, b], vec![a, 0.0, a + b], vec![b, a + b, 0.0]],
        )
        .unwrap()
    };
    let w1 = PointedWindow::new(v(1.0, 1.0), 0, 1.0, 2.0).unwrap();
    let w2 = PointedWindow::new(v(1.0, 2.0), 0, 1.0, 2.0).unwrap();
    assert_eq!(pointed_gh_bounds(&w1, &w2).unwrap().exact, Some(0.5));
    assert_eq!(pointed_gh_bounds(&w1, &w1).unwrap().upper, 0.0);
}

#[test]
fn pointed_bounds_dominate_unpointed_on_larger_windows() {
    let mut r = rng(77);
    for _ in 0..4 {
        let x = random_space(&mut r, 30);
        let y = random_space(&mut r, 25);
        let w1 = PointedWindow::new(x.clone(), 3, 1.0, 10.0).unwrap();
        let w2 = PointedWindow::new(y.clone(), 4, 1.0, 10.0).unwrap();
        let p = pointed_gh_bounds(&w1, &w2).unwrap();
        let u = gh_bounds(&x, &y).unwrap();
        assert!(p.lower >= u.lower - 1e-12);
        assert!(p.witness.unwrap().contains((3, 4)));
    }
}

#[test]
fn epsilon_isometry_bridge_on_random_maps() {
    let mut r = rng(3);
    for _ in 0..20 {
        let x = { let n = r.gen_range(3..=6); random_space(&mut r, n) };
        let y = { let n = r.gen_range(3..=6); random_space(&mut r, n) };
        let f: Vec<usize> = (0..x.len()).map(|_| r.gen_range(0..y.len())).collect();
        let (e1, e2) = map_distortion(&f, &x, &y).unwrap();
        let exact = gh_exact_small(&x, &y, BUDGET).unwrap().exact.unwrap();
        assert!(exact <= 2.0 * e1.max(e2) + 1e-12);
    }
}

#[test]
fn witness_is_a_full_correspondence() {
    let mut r = rng(8);
    let x = random_space(&mut r, 40);
    let y = random_space(&mut r, 17);
    let b = gh_bounds(&x, &y).unwrap();
    let w: Correspondence = b.witness.unwrap();
    let d = distortion_of_correspondence(&x, &y, &w).unwrap();
    assert_eq!(d / 2.0, b.upper);
}

fn arb_space(max: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    (1..=max, any::<u64>()).prop_map(|(n, seed)| random_space(&mut rng(seed), n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn sandwich(x in arb_space(6), y in arb_space(6)) {
        let e = gh_exact_small(&x, &y, BUDGET).unwrap().exact.unwrap();
        let b = gh_bounds(&x, &y).unwrap();
        prop_assert!(b.lower <= e + 1e-12 && e <= b.upper + 1e-12);
    }

    #[test]
    fn swap_symmetry(x in arb_space(9), y in arb_space(9)) {
        let a = gh_bounds(&x, &y).unwrap();
        let b = gh_bounds(&y, &x).unwrap();
        prop_assert!((a.lower - b.lower).abs() <= 1e-12);
        prop_assert!((a.upper - b.upper).abs() <= 1e-12);
        let ea = gh_exact_small(&x, &y, BUDGET).unwrap().exact.unwrap();
        let eb = gh_exact_small(&y, &x, BUDGET).unwrap().exact.unwrap();
        prop_assert!((ea - eb).abs() <= 1e-12);
    }

    #[test]
    fn scaling(x in arb_space(6), y in arb_space(6), lambda in 0.1f64..10.0) {
        let e = gh_exact_small(&x, &y, BUDGET).unwrap().exact.unwrap();
        let xs = x.rescale(1.0 / lambda).unwrap();
        let ys = y.rescale(1.0 / lambda).unwrap();
        let es = gh_exact_small(&xs, &ys, BUDGET).unwrap().exact.unwrap();
        prop_assert!((es - lambda * e).abs() <= 1e-9 * (1.0 + lambda * e));
    }
}
