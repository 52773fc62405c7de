use std::f64::consts::{PI, TAU};

use landskew::landscape::landscape_from_diagram;
use landskew::persistence::{diagram, Complex, PhOptions};
use landskew::simgen::*;

fn local_maxima(row: &[f64], floor: f64) -> usize {
    let mut count = 0;
    let mut rising = false;
    for w in row.windows(2) {
        let d = w[1] - w[0];
        if d > 1e-12 {
            rising = true;
        } else if d < -1e-12 {
            if rising && w[0] > floor {
                count += 1;
            }
            rising = false;
        }
    }
    count
}

#[test]
fn dense_two_circles_give_two_peaks_then_one() {
    let cfg = SimConfig {
        seed: 5,
        size_range: (200, 200),
        proportion: Some(0.5),
        fixed_radii: Some(vec![1.0]),
        ..SimConfig::for_design(Design::TwoCircles)
    };
    let cloud = sample_two_circles(&cfg, 0).unwrap();
    let dg = diagram(&cloud, 1, Complex::Rips, &PhOptions::default()).unwrap().top_j(2);
    assert_eq!(dg.len(), 2);
    let l = landscape_from_diagram(&dg, 2, 512, 1.25 * dg.max_death()).unwrap();
    let floor = 0.05 * l.sup_norm();
    assert_eq!(local_maxima(l.level(0), floor), 2);
    assert_eq!(local_maxima(l.level(1), floor), 1);
}

#[test]
fn torus_tube_angle_density_is_area_uniform() {
    let (major, minor) = (2.0, 1.0);
    let cfg = SimConfig {
        seed: 3,
        size_range: (100_000, 100_000),
        proportion: Some(0.5),
        fixed_radii: Some(vec![major]),
        ..SimConfig::for_design(Design::Torus)
    };
    let cloud = sample_torus(&cfg, 0).unwrap();
    let bins = 24;
    let mut observed = vec![0.0; bins];
    for p in cloud.points() {
        let w = p[0].hypot(p[1]);
        let theta = p[2].atan2(w - major).rem_euclid(TAU);
        observed[((theta / TAU * bins as f64) as usize).min(bins - 1)] += 1.0;
    }
    let n = cloud.len() as f64;
    let chi2: f64 = (0..bins)
        .map(|k| {
            let (a, b) = (TAU * k as f64 / bins as f64, TAU * (k + 1) as f64 / bins as f64);
            let mass = (major * (b - a) + minor * (b.sin() - a.sin())) / (TAU * major);
            let expected = n * mass;
            (observed[k] - expected).powi(2) / expected
        })
        .sum();
    // 0.999 quantile of chi-square with 23 degrees of freedom.
    assert!(chi2 < 49.7, "chi2 = {chi2}");
}

/// Median distance from a point to the nearest point of the other arm.
fn median_cross_arm_nn(points: &[Vec<f64>]) -> f64 {
    let half = points.len().div_ceil(2);
    let (first, second) = points.split_at(half);
    let nearest = |p: &Vec<f64>, others: &[Vec<f64>]| {
        others.iter().map(|q| (p[0] - q[0]).hypot(p[1] - q[1])).fold(f64::INFINITY, f64::min)
    };
    let mut nn: Vec<f64> =
        first.iter().map(|p| nearest(p, second)).chain(second.iter().map(|p| nearest(p, first))).collect();
    nn.sort_by(f64::total_cmp);
    nn[nn.len() / 2]
}

#[test]
fn tighter_spirals_have_closer_points() {
    let base = SimConfig { seed: 9, ..SimConfig::for_design(Design::Spirals) };
    let tight = sample_spirals(&SimConfig { revolutions: (5.0, 5.0), ..base.clone() }, 0).unwrap();
    let loose = sample_spirals(&SimConfig { revolutions: (2.0, 2.0), ..base }, 0).unwrap();
    assert_eq!(tight.len(), 2000);
    assert!(median_cross_arm_nn(tight.points()) < median_cross_arm_nn(loose.points()));
    let outer = loose.points().iter().map(|p| p[0].hypot(p[1])).fold(0.0, f64::max);
    assert!(outer <= SPIRAL_OUTER_RADIUS + 1e-12 && outer > 0.99);
}

#[test]
fn spiral_arms_are_point_reflections() {
    let cfg = SimConfig { seed: 2, revolutions: (3.0, 3.0), ..SimConfig::for_design(Design::Spirals) };
    let cloud = sample_spirals(&cfg, 0).unwrap();
    let a = 1.0 / (TAU * 3.0);
    for p in cloud.points() {
        let rho = p[0].hypot(p[1]);
        let theta = rho / a;
        assert!(theta >= PI - 1e-9);
        // The polar angle of an arm point agrees with theta modulo pi.
        let phase = (p[1].atan2(p[0]) - theta).rem_euclid(PI);
        assert!(phase < 1e-6 || PI - phase < 1e-6, "phase {phase}");
    }
}

#[test]
fn mixture_streams_are_distinct_and_deterministic() {
    let a = SimConfig { n_clouds: 3, seed: 4, ..SimConfig::for_design(Design::Circle) };
    let b = SimConfig { n_clouds: 3, seed: 4, ..SimConfig::for_design(Design::TwoCircles) };
    let first = generate_mixture(&[a.clone(), b.clone()]).unwrap();
    assert_eq!(first, generate_mixture(&[a.clone(), b]).unwrap());
    assert_eq!(first.len(), 6);
    assert_eq!(first[0], generate(&a).unwrap()[0]);
    assert_eq!(first[3].label(), Some("two-circles"));
}

#[test]
fn generation_ignores_thread_count() {
    let cfg = SimConfig { seed: 17, ..SimConfig::for_design(Design::TwoCircles) };
    let one = landskew::par::with_threads(1, || generate(&cfg).unwrap());
    let many = landskew::par::with_threads(0, || generate(&cfg).unwrap());
    assert_eq!(one, many);
}
