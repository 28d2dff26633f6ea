use metric_lab::boundary::{
    boundary_points, cylinder_ball, expanding_cover, expansion_factor_probe, four_point_check,
    parse_word, translate_boundary, ultrametric_check, visual_space, BoundaryPoint, CylinderCount,
    ReducedWord,
};
use proptest::prelude::*;

/// Every string of length `n` over `aAbB` with no adjacent inverse pair.
fn brute_force_words(n: usize) -> Vec<String> {
    let alphabet = ['a', 'A', 'b', 'B'];
    let mut out = vec![String::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| alphabet.iter().map(move |&c| format!("{w}{c}")))
            .collect();
    }
    out.retain(|w| {
        w.as_bytes()
            .windows(2)
            .all(|p| !(p[0] != p[1] && p[0].eq_ignore_ascii_case(&p[1])))
    });
    out
}

fn common_prefix(a: &str, b: &str) -> usize {
    a.bytes().zip(b.bytes()).take_while(|(x, y)| x == y).count()
}

#[test]
fn cylinder_counts_match_enumeration() {
    let words = brute_force_words(3);
    assert_eq!(words.len(), 36);
    let ours = boundary_points(2, 3).unwrap();
    let mut names: Vec<String> = ours.iter().map(|p| p.to_string()).collect();
    names.sort();
    let mut want = words.clone();
    want.sort();
    assert_eq!(names, want);
    // m = 1, N = 3: the first letter is fixed and two free letters follow.
    let p = BoundaryPoint::parse("aba", 2).unwrap();
    let (pts, _) = cylinder_ball(&p, 1, 2, CylinderCount::All, 2.0).unwrap();
    assert_eq!(pts.len(), words.iter().filter(|w| w.starts_with('a')).count());
    assert_eq!(pts.len(), 9);
}

#[test]
fn expansion_ratio_is_exactly_a_to_the_m() {
    let words = brute_force_words(5);
    for m in 1..=3usize {
        for p in &words {
            let prefix = &p[..m];
            let cyl: Vec<&String> = words.iter().filter(|w| w.starts_with(prefix)).collect();
            for x in &cyl {
                for y in &cyl {
                    if x == y {
                        continue;
                    }
                    // Stripping the prefix lowers the common prefix by m.
                    let before = common_prefix(x, y);
                    let after = common_prefix(&x[m..], &y[m..]);
                    assert_eq!(before - after, m);
                }
            }
        }
        let p = BoundaryPoint::parse("abABa", 2).unwrap();
        let s = expansion_factor_probe(&p, m, 2, CylinderCount::All, 2.0).unwrap();
        assert_eq!((s.min, s.max), (2f64.powi(m as i32), 2f64.powi(m as i32)));
        assert_eq!((s.min_exponent, s.max_exponent), (m as i64, m as i64));
    }
}

#[test]
fn every_cylinder_expands_exactly() {
    for p in boundary_points(2, 5).unwrap() {
        for m in 1..=3 {
            let s = expansion_factor_probe(&p, m, 2, CylinderCount::All, 2.0).unwrap();
            assert_eq!(s.min, 2f64.powi(m as i32));
            assert_eq!(s.max, 2f64.powi(m as i32));
        }
    }
}

#[test]
fn translated_cylinder_is_a_rescaled_copy() {
    let a = 3.0;
    let p = BoundaryPoint::parse("aBaBa", 2).unwrap();
    let m = 2;
    let (pts, space) = cylinder_ball(&p, m, 2, CylinderCount::All, a).unwrap();
    let g = p.prefix().prefix(m).inverse();
    let moved: Vec<BoundaryPoint> = pts.iter().map(|x| translate_boundary(&g, x).unwrap().point).collect();
    let image = visual_space(&moved, a).unwrap();
    let scaled = space.scale_by(a.powi(m as i32));
    assert!(image.max_abs_diff(&scaled) < 1e-12);
    assert!((space.diameter() - a.powi(-(m as i32))).abs() < 1e-15);
}

#[test]
fn depth_four_is_an_ultrametric_tree_boundary() {
    let pts = boundary_points(2, 4).unwrap();
    assert_eq!(pts.len(), 108);
    let u = ultrametric_check(&pts).unwrap();
    assert_eq!(u.checked, 108u64.pow(3));
    assert_eq!(u.violations, 0);
    let f = four_point_check(&pts).unwrap();
    assert_eq!(f.checked, 108u64.pow(4));
    assert_eq!(f.violations, 0);
    // The same on the real-valued distances.
    let space = visual_space(&pts, 2.0).unwrap();
    assert!(space.validate().is_metric());
    let n = space.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                assert!(space.dist(i, k) <= space.dist(i, j).max(space.dist(j, k)));
            }
        }
    }
}

#[test]
fn cover_is_a_partition() {
    let pts = boundary_points(3, 3).unwrap();
    for m in 0..=3 {
        let cover = expanding_cover(3, m, 3).unwrap();
        for x in &pts {
            assert_eq!(cover.iter().filter(|c| c.contains(x)).count(), 1);
        }
        for c in &cover {
            assert_eq!(c.g, c.prefix.inverse());
        }
    }
}

proptest! {
    #[test]
    fn reduction_is_idempotent(s in "[aAbBcC]{0,24}") {
        let w = parse_word(&s, 3).unwrap();
        let again = parse_word(&w.to_string(), 3).unwrap();
        prop_assert_eq!(&w, &again);
        prop_assert_eq!(w.mul(&w.inverse()), ReducedWord::identity());
    }

    #[test]
    fn translation_round_trips(x in "[ab]{3,8}", g in "[aAbB]{0,6}") {
        let x = BoundaryPoint::parse(&x, 2).unwrap();
        let g = parse_word(&g, 2).unwrap();
        if let Ok(t) = translate_boundary(&g, &x) {
            // x is positive, so `g·x` keeps at least the tail of x; undoing g
            // restores x wherever the result kept enough depth.
            if let Ok(back) = translate_boundary(&g.inverse(), &t.point) {
                let keep = back.point.depth().min(x.depth());
                prop_assert_eq!(back.point.prefix().prefix(keep), x.prefix().prefix(keep));
            }
        }
    }
}
