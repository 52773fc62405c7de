use landskew::persistence::*;
use landskew::simgen::PointCloud;
use proptest::prelude::*;

mod common;
use common::*;

fn assert_pairs_close(got: &[(f64, f64)], want: &[(f64, f64)]) {
    let mut g = got.to_vec();
    let mut w = want.to_vec();
    g.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    w.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    assert_eq!(g.len(), w.len(), "got {g:?}, want {w:?}");
    for (x, y) in g.iter().zip(&w) {
        assert!((x.0 - y.0).abs() < 1e-12 && (x.1 - y.1).abs() < 1e-12, "got {g:?}, want {w:?}");
    }
}

fn deaths(dg: &PersistenceDiagram) -> Vec<f64> {
    let mut d: Vec<f64> = dg.pairs().iter().map(|p| p.1).collect();
    d.sort_by(f64::total_cmp);
    d
}

fn cloud_strategy(max_n: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 3..=max_n)
}

#[test]
fn square_with_diagonal_points() {
    let sq = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    let rips = persistence_deg1_rips(&sq, &PhOptions::default()).unwrap();
    assert_eq!(rips.pairs(), &[(0.5, 0.5 * 2f64.sqrt())]);
    let cech = persistence_deg1_cech2d(&sq, &PhOptions::default()).unwrap();
    assert_eq!(cech.pairs(), &[(0.5, 0.5 * 2f64.sqrt())]);
    let opts = PhOptions { convention: Convention::Diameter, ..PhOptions::default() };
    assert_eq!(persistence_deg1_rips(&sq, &opts).unwrap().pairs(), &[(1.0, 2f64.sqrt())]);
}

#[test]
fn equilateral_triangle_rips_has_no_loop_but_cech_does() {
    let tri = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.5, 3f64.sqrt() / 2.0]]).unwrap();
    assert!(persistence_deg1_rips(&tri, &PhOptions::default()).unwrap().is_empty());
    let cech = persistence_deg1_cech2d(&tri, &PhOptions::default()).unwrap();
    assert_eq!(cech.len(), 1);
    let (b, d) = cech.pairs()[0];
    assert!((b - 0.5).abs() < 1e-15 && (d - 1.0 / 3f64.sqrt()).abs() < 1e-15);
}

#[test]
fn truncation_caps_or_drops_essential_classes() {
    let sq = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    let opts = PhOptions { max_scale: Some(0.6), ..PhOptions::default() };
    assert!(persistence_deg1_rips(&sq, &opts).unwrap().is_empty());
    let capped = persistence_deg1_rips(&sq, &PhOptions { cap_essential: true, ..opts }).unwrap();
    assert_eq!(capped.pairs(), &[(0.5, 0.6)]);
    assert_eq!(capped.max_scale(), 0.6);
    let deg0 = persistence_deg0(&sq, &PhOptions { cap_essential: true, max_scale: Some(0.4), ..PhOptions::default() }).unwrap();
    assert_eq!(deg0.pairs(), &[(0.0, 0.4); 4]);
}

#[test]
fn point_cap_is_enforced() {
    let pts = (0..20).map(|i| vec![i as f64, (i * i) as f64]).collect();
    let cloud = PointCloud::new(pts).unwrap();
    let opts = PhOptions { max_points: 10, ..PhOptions::default() };
    assert!(persistence_deg1_rips(&cloud, &opts).is_err());
    assert!(persistence_deg0(&cloud, &opts).is_ok());
    assert!(diagram(&cloud, 2, Complex::Rips, &opts).is_err());
}

#[test]
fn cech2d_rejects_non_planar_input() {
    let cloud = PointCloud::new(vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]]).unwrap();
    assert!(persistence_deg1_cech2d(&cloud, &PhOptions::default()).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deg0_matches_single_linkage(points in cloud_strategy(12, 3)) {
        let cloud = PointCloud::new(points.clone()).unwrap();
        let dg = persistence_deg0(&cloud, &PhOptions { convention: Convention::Diameter, ..PhOptions::default() }).unwrap();
        let mut want = single_linkage_heights(&points);
        want.sort_by(f64::total_cmp);
        let got = deaths(&dg);
        prop_assert_eq!(got.len(), points.len() - 1);
        for (g, w) in got.iter().zip(&want) {
            prop_assert!((g - w).abs() < 1e-12);
        }
    }

    #[test]
    fn rips_deg1_matches_rank_oracle(points in cloud_strategy(7, 2)) {
        let cloud = PointCloud::new(points.clone()).unwrap();
        let dg = persistence_deg1_rips(&cloud, &PhOptions::default()).unwrap();
        assert_pairs_close(dg.pairs(), &rips_oracle(&points));
    }

    #[test]
    fn rips_deg1_matches_rank_oracle_in_3d(points in cloud_strategy(7, 3)) {
        let cloud = PointCloud::new(points.clone()).unwrap();
        let dg = persistence_deg1_rips(&cloud, &PhOptions::default()).unwrap();
        assert_pairs_close(dg.pairs(), &rips_oracle(&points));
    }

    #[test]
    fn cech_deg1_matches_rank_oracle(points in cloud_strategy(7, 2)) {
        let cloud = PointCloud::new(points.clone()).unwrap();
        let dg = persistence_deg1_cech2d(&cloud, &PhOptions::default()).unwrap();
        assert_pairs_close(dg.pairs(), &cech_oracle(&points));
    }

    #[test]
    fn coboundary_and_boundary_reductions_agree(points in cloud_strategy(14, 2)) {
        let cloud = PointCloud::new(points).unwrap();
        let fast = persistence_deg1_rips(&cloud, &PhOptions::default()).unwrap();
        let slow = rips_filtration(&cloud, 2, None, Convention::Radius).unwrap();
        slow.check_filtration_property().unwrap();
        assert_pairs_close(fast.pairs(), slow.diagram(1).unwrap().pairs());
        let fast = persistence_deg1_cech2d(&cloud, &PhOptions::default()).unwrap();
        let slow = cech2d_filtration(&cloud, None).unwrap();
        slow.check_filtration_property().unwrap();
        assert_pairs_close(fast.pairs(), slow.diagram(1).unwrap().pairs());
    }

    #[test]
    fn diameter_pairs_are_twice_radius_pairs(points in cloud_strategy(20, 2)) {
        let cloud = PointCloud::new(points).unwrap();
        for degree in [0, 1] {
            let r = diagram(&cloud, degree, Complex::Rips, &PhOptions::default()).unwrap();
            let d = diagram(&cloud, degree, Complex::Rips, &PhOptions { convention: Convention::Diameter, ..PhOptions::default() }).unwrap();
            let doubled: Vec<(f64, f64)> = r.pairs().iter().map(|&(b, e)| (2.0 * b, 2.0 * e)).collect();
            prop_assert_eq!(doubled, d.pairs().to_vec());
        }
    }

    #[test]
    fn diagrams_scale_with_the_cloud(points in cloud_strategy(20, 2), alpha in 0.1f64..10.0) {
        let cloud = PointCloud::new(points).unwrap();
        let scaled = cloud.scaled(alpha);
        for (degree, complex) in [(0, Complex::Rips), (1, Complex::Rips), (1, Complex::Cech2d)] {
            let a = diagram(&cloud, degree, complex, &PhOptions::default()).unwrap();
            let b = diagram(&scaled, degree, complex, &PhOptions::default()).unwrap();
            let want: Vec<(f64, f64)> = a.pairs().iter().map(|&(x, y)| (alpha * x, alpha * y)).collect();
            prop_assert_eq!(b.len(), want.len());
            for (g, w) in b.pairs().iter().zip(&want) {
                prop_assert!((g.0 - w.0).abs() <= 1e-9 * w.1 && (g.1 - w.1).abs() <= 1e-9 * w.1);
            }
        }
    }

    #[test]
    fn point_order_does_not_matter(points in cloud_strategy(16, 2), seed in any::<u64>()) {
        let mut shuffled = points.clone();
        let len = shuffled.len();
        shuffled.rotate_left((seed as usize) % len);
        shuffled.reverse();
        let a = PointCloud::new(points).unwrap();
        let b = PointCloud::new(shuffled).unwrap();
        for degree in [0, 1] {
            let da = diagram(&a, degree, Complex::Rips, &PhOptions::default()).unwrap();
            let db = diagram(&b, degree, Complex::Rips, &PhOptions::default()).unwrap();
            assert_pairs_close(da.pairs(), db.pairs());
        }
    }

    #[test]
    fn pairs_lie_above_the_diagonal(points in cloud_strategy(25, 2)) {
        let cloud = PointCloud::new(points).unwrap();
        for degree in [0, 1] {
            let dg = diagram(&cloud, degree, Complex::Rips, &PhOptions::default()).unwrap();
            for &(b, d) in dg.pairs() {
                prop_assert!(0.0 <= b && b < d && d <= dg.max_scale());
            }
        }
    }
}
