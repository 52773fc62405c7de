use landskew::io::{read_json, to_json_string};
use landskew::landscape::*;
use landskew::persistence::{Convention, PersistenceDiagram};
use proptest::prelude::*;

fn dg(pairs: Vec<(f64, f64)>) -> PersistenceDiagram {
    let top = pairs.iter().map(|p| p.1).fold(1.0, f64::max);
    PersistenceDiagram::new(1, Convention::Radius, top, pairs).unwrap()
}

/// k-th largest tent value at x, by sorting every tent.
fn naive_level(pairs: &[(f64, f64)], k: usize, x: f64) -> f64 {
    let mut v: Vec<f64> = pairs.iter().map(|&(b, d)| (x - b).min(d - x).max(0.0)).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v.get(k).copied().unwrap_or(0.0)
}

fn pairs_strategy() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0f64..2.0, 0.01f64..2.0).prop_map(|(b, p)| (b, b + p)), 1..12)
}

#[test]
fn single_pair_peak() {
    let l = landscape_from_diagram(&dg(vec![(0.2, 0.6)]), 2, 401, 1.0).unwrap();
    let i = l.argmax(0);
    assert_eq!(i, 160);
    assert!((l.level(0)[i] - 0.2).abs() < 1e-15);
    assert!(l.level(1).iter().all(|&v| v == 0.0));
    assert_eq!(l.scale_s(), 1.0);
}

#[test]
fn nested_pairs_fill_two_levels() {
    let d = dg(vec![(0.0, 1.0), (0.3, 0.7), (1.5, 1.6)]);
    assert_eq!(default_k(std::slice::from_ref(&d)), 2);
    let l = landscape_from_diagram(&d, 2, 201, 2.0).unwrap();
    assert!((l.level(0)[50] - 0.5).abs() < 1e-15);
    assert!((l.level(1)[50] - 0.2).abs() < 1e-15);
}

#[test]
fn touching_intervals_do_not_overlap() {
    assert_eq!(default_k(&[dg(vec![(0.0, 1.0), (1.0, 2.0)])]), 1);
    assert_eq!(default_k(&[]), 1);
}

#[test]
fn domain_must_cover_every_death() {
    let d = dg(vec![(0.2, 0.9)]);
    assert!(landscape_from_diagram(&d, 1, 64, 0.8).is_err());
    assert!(landscape_from_diagram(&d, 1, 8, 1.0).is_err());
    assert!(landscape_from_diagram(&d, 0, 64, 1.0).is_err());
    assert!((common_domain_end(&[d], DEFAULT_DOMAIN_PAD).unwrap() - 1.125).abs() < 1e-15);
}

#[test]
fn empty_diagram_gives_zero_landscape() {
    let d = PersistenceDiagram::empty(1, Convention::Radius, 1.0).unwrap();
    let l = landscape_from_diagram(&d, 3, 32, 1.0).unwrap();
    assert_eq!(l.sup_norm(), 0.0);
    assert!(common_domain_end(&[d], 1.25).is_err());
}

#[test]
fn refining_the_grid_approaches_the_true_peak() {
    let d = dg(vec![(0.1234, 0.8765)]);
    let peak = 0.5 * (0.8765 - 0.1234);
    let mut last_gap = f64::INFINITY;
    for t in [17, 65, 257, 1025] {
        let l = landscape_from_diagram(&d, 1, t, 1.0).unwrap();
        let gap = peak - l.sup_norm();
        assert!(gap >= 0.0 && gap <= 1.0 / (t - 1) as f64);
        assert!(gap <= last_gap);
        last_gap = gap;
    }
}

#[test]
fn common_domain_matches_direct_construction() {
    let small = dg(vec![(0.1, 0.5)]);
    let big = dg(vec![(0.2, 1.6)]);
    let t = 257;
    let ls = [landscape_from_diagram(&small, 1, t, 0.6).unwrap(), landscape_from_diagram(&big, 1, t, 2.0).unwrap()];
    let common = common_domain(&ls).unwrap();
    assert!(common.iter().all(|l| l.scale_s() == 2.0));
    let direct = landscape_from_diagram(&small, 1, t, 2.0).unwrap();
    let err = common[0].level(0).iter().zip(direct.level(0)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err <= 0.6 / (t - 1) as f64, "{err}");
    assert_eq!(common[1], ls[1]);
}

#[test]
fn json_round_trip() {
    let l = landscape_from_diagram(&dg(vec![(0.1, 0.7), (0.3, 0.4)]), 2, 33, 1.0).unwrap().with_source_id("c7");
    let s = to_json_string(&l).unwrap();
    let dir = std::env::temp_dir().join(format!("landskew-ls-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("l.json");
    std::fs::write(&path, &s).unwrap();
    let back: Landscape = read_json(&path).unwrap();
    assert_eq!(back, l);
    assert_eq!(to_json_string(&back).unwrap(), s);
    std::fs::remove_dir_all(dir).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn matches_sorting_oracle(pairs in pairs_strategy(), k in 1usize..5) {
        let d = dg(pairs.clone());
        let end = 1.25 * d.max_death();
        let t = 97;
        let l = landscape_from_diagram(&d, k, t, end).unwrap();
        for (i, u) in unit_grid(t).into_iter().enumerate() {
            for level in 0..k {
                prop_assert_eq!(l.level(level)[i], naive_level(d.pairs(), level, end * u));
            }
        }
    }

    #[test]
    fn invariants_hold(pairs in pairs_strategy(), k in 1usize..5) {
        let d = dg(pairs);
        let l = landscape_from_diagram(&d, k, 128, 1.25 * d.max_death()).unwrap();
        prop_assert!(l.check_invariants(1e-12).is_ok());
        let dt = 1.0 / 127.0;
        for level in 0..k {
            for w in l.level(level).windows(2) {
                prop_assert!((w[1] - w[0]).abs() <= l.scale_s() * dt * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn scaling_the_diagram_scales_the_heights(pairs in pairs_strategy(), alpha in 0.05f64..20.0) {
        let d = dg(pairs);
        let end = 1.25 * d.max_death();
        let l = landscape_from_diagram(&d, 3, 64, end).unwrap();
        let ls = landscape_from_diagram(&d.scaled(alpha).unwrap(), 3, 64, alpha * end).unwrap();
        prop_assert_eq!(ls.scale_s(), alpha * end);
        for (a, b) in l.values().iter().flatten().zip(ls.values().iter().flatten()) {
            prop_assert!((alpha * a - b).abs() <= 1e-12 * alpha * end);
        }
    }

    #[test]
    fn pair_order_does_not_matter(pairs in pairs_strategy()) {
        let mut rev = pairs.clone();
        rev.reverse();
        let a = landscape_from_diagram(&dg(pairs), 4, 50, 5.0).unwrap();
        let b = landscape_from_diagram(&dg(rev), 4, 50, 5.0).unwrap();
        prop_assert_eq!(a, b);
    }
}
