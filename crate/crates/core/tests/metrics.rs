use std::f64::consts::{LN_2, PI};

use eqsphere::compare::random_uniform;
use eqsphere::geometry::{angle_to_chord, chord_to_angle};
use eqsphere::metrics::{
    cap_count, cap_discrepancy, covering_radius, log_energy, max_diameter, min_distance,
    min_distance_brute, packing_density, region_diameter, riesz_energy,
};
use eqsphere::{
    eq_partition, eq_points, metrics_report, CartesianPoint, CodeSet, Dimension, Error, Generator,
    MetricsConfig, PartitionSpec, RegionTree,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

fn dim(d: usize) -> Dimension {
    Dimension::new(d).unwrap()
}

fn tree(d: usize, n: usize) -> RegionTree {
    eq_partition(&PartitionSpec::new(d, n).unwrap()).unwrap()
}

fn code(d: usize, pts: Vec<Vec<f64>>) -> CodeSet {
    let pts = pts
        .into_iter()
        .map(|p| CartesianPoint::normalized(p).unwrap())
        .collect();
    CodeSet::new(dim(d), pts, Generator::External).unwrap()
}

fn antipodes() -> CodeSet {
    code(2, vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, -1.0]])
}

/// A random orthogonal matrix from Gram–Schmidt on Gaussian columns.
fn random_rotation(rng: &mut ChaCha8Rng, m: usize) -> Vec<Vec<f64>> {
    let mut q: Vec<Vec<f64>> = Vec::new();
    while q.len() < m {
        let mut v: Vec<f64> = (0..m).map(|_| rng.sample(StandardNormal)).collect();
        for u in &q {
            let c: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            v.iter_mut().zip(u).for_each(|(x, y)| *x -= c * y);
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            q.push(v.into_iter().map(|x| x / n).collect());
        }
    }
    q
}

fn rotate(c: &CodeSet, q: &[Vec<f64>]) -> CodeSet {
    let pts = c
        .points()
        .iter()
        .map(|p| {
            q.iter()
                .map(|row| row.iter().zip(p.coords()).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    code(c.d().get(), pts)
}

#[test]
fn antipodal_pair() {
    let c = antipodes();
    assert_eq!(min_distance(&c).unwrap(), 2.0);
    assert!((riesz_energy(&c, 1.0).unwrap() - 0.25).abs() < 1e-15);
    assert!((log_energy(&c).unwrap() + LN_2 / 2.0).abs() < 1e-15);
    assert!((packing_density(&c).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn eqp_on_the_circle() {
    for n in [2, 3, 5, 12, 100] {
        let c = eq_points(&tree(1, n));
        let expected = 2.0 * (PI / n as f64).sin();
        assert!(
            (min_distance(&c).unwrap() - expected).abs() < 1e-12,
            "N={n}"
        );
        assert!((packing_density(&c).unwrap() - 1.0).abs() < 1e-9, "N={n}");
    }
}

#[test]
fn single_point_and_coincident_points() {
    let one = code(2, vec![vec![1.0, 0.0, 0.0]]);
    assert!(min_distance(&one).is_err());
    assert!(riesz_energy(&one, 1.0).is_err());
    let twice = code(
        2,
        vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0],
        ],
    );
    match riesz_energy(&twice, 1.0) {
        Err(Error::CoincidentPoints { first, second }) => assert_eq!((first, second), (0, 2)),
        other => panic!("expected coincident points, got {other:?}"),
    }
    assert!(matches!(
        log_energy(&twice),
        Err(Error::CoincidentPoints { .. })
    ));
    assert!(riesz_energy(&antipodes(), 0.0).is_err());
}

#[test]
fn single_point_estimators_tend_to_extremes() {
    let one = code(2, vec![vec![1.0, 0.0, 0.0]]);
    let r = covering_radius(&one, 100_000, 0).unwrap();
    assert!(r > PI - 0.02 && r <= PI);
    let disc = cap_discrepancy(&one, 100_000, 0).unwrap();
    assert!(disc > 0.99 && disc <= 1.0, "{disc}");
}

#[test]
fn diameters() {
    assert_eq!(max_diameter(&tree(2, 1), 5).value, 2.0);
    assert_eq!(max_diameter(&tree(2, 2), 5).value, 2.0);
    assert!((max_diameter(&tree(2, 1), 5).ratio - 2.0).abs() < 1e-15);
    // EQ(2,4) has caps of colatitude π/3.
    let t = tree(2, 4);
    assert!((t.cap_colatitude() - PI / 3.0).abs() < 1e-12);
    let cap = region_diameter(&t.regions()[0], 5);
    assert!(cap.exact);
    assert!((cap.value - 2.0 * (PI / 3.0).sin()).abs() < 1e-12);
    assert!(!max_diameter(&tree(3, 50), 5).exact);
}

#[test]
fn s2_diameters_match_dense_sampling() {
    for n in [3, 10, 33, 100] {
        let t = tree(2, n);
        for r in t.regions() {
            let exact = region_diameter(r, 5).value;
            assert!(region_diameter(r, 200).exact);
            // Dense boundary sampling of the region as an oracle.
            let (a, b) = (r.intervals[0], r.intervals[1]);
            let mut pts = Vec::new();
            let k = 120;
            for i in 0..=k {
                let t0 = a.lo + (a.hi - a.lo) * i as f64 / k as f64;
                for j in 0..=k {
                    if i != 0 && i != k && j != 0 && j != k {
                        continue;
                    }
                    let p = b.lo + (b.hi - b.lo) * j as f64 / k as f64;
                    pts.push([t0.cos(), t0.sin() * p.cos(), t0.sin() * p.sin()]);
                }
            }
            let sampled = pts
                .iter()
                .flat_map(|x| {
                    pts.iter().map(move |y| {
                        x.iter()
                            .zip(y)
                            .map(|(u, v)| (u - v).powi(2))
                            .sum::<f64>()
                            .sqrt()
                    })
                })
                .fold(0.0, f64::max);
            assert!(exact + 1e-12 >= sampled, "EQ(2,{n}): {exact} < {sampled}");
            assert!(exact - sampled < 2e-3, "EQ(2,{n}): {exact} vs {sampled}");
        }
    }
}

#[test]
fn sweep_equals_brute_force_on_random_codes() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for k in 0..50 {
        let d = 1 + k % 4;
        let n = rng.random_range(2..=500);
        let c = random_uniform(dim(d), n, k as u64);
        assert_eq!(
            min_distance(&c).unwrap(),
            min_distance_brute(&c).unwrap(),
            "d={d} N={n}"
        );
    }
    let c = eq_points(&tree(2, 33));
    assert_eq!(min_distance(&c).unwrap(), min_distance_brute(&c).unwrap());
}

#[test]
fn energies_invariant_under_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for d in [2, 3, 4] {
        let c = random_uniform(dim(d), 300, d as u64);
        for _ in 0..3 {
            let r = rotate(&c, &random_rotation(&mut rng, d + 1));
            for s in [0.5, 1.0, 2.0, 3.5] {
                let (a, b) = (riesz_energy(&c, s).unwrap(), riesz_energy(&r, s).unwrap());
                assert!((a - b).abs() <= 1e-10 * a.abs(), "d={d} s={s}");
            }
            let (a, b) = (log_energy(&c).unwrap(), log_energy(&r).unwrap());
            assert!((a - b).abs() <= 1e-10 * a.abs());
        }
    }
}

#[test]
fn packing_density_matches_union_of_caps() {
    let c = eq_points(&tree(2, 400));
    let formula = packing_density(&c).unwrap();
    let radius = 0.5 * chord_to_angle(min_distance(&c).unwrap());
    let threshold = radius.cos();
    let samples = random_uniform(dim(2), 4_000_000, 77);
    let inside = samples
        .points()
        .par_iter()
        .filter(|x| c.points().iter().any(|p| p.dot(x) >= threshold))
        .count();
    let mc = inside as f64 / samples.len() as f64;
    assert!(
        (formula - mc).abs() < 1e-3,
        "formula {formula}, Monte Carlo {mc}"
    );
    assert!(formula > 0.0 && formula <= 1.0);
}

#[test]
fn covering_radius_consistent_with_diameter() {
    let t = tree(2, 400);
    let r = covering_radius(&eq_points(&t), 100_000, 0).unwrap();
    assert!(2.0 * angle_to_chord(r) <= 1.1 * max_diameter(&t, 5).value);
}

#[test]
fn estimators_monotone_and_reproducible() {
    let c = eq_points(&tree(2, 200));
    let mut prev = 0.0;
    for k in [1_000, 2_000, 4_000, 8_000] {
        let r = covering_radius(&c, k, 5).unwrap();
        assert!(r >= prev);
        assert_eq!(r, covering_radius(&c, k, 5).unwrap());
        prev = r;
    }
    let mut prev = 0.0;
    for k in [10, 100, 1_000, 10_000] {
        let v = cap_discrepancy(&c, k, 5).unwrap();
        assert!(v >= prev && (0.0..=1.0).contains(&v));
        assert_eq!(v, cap_discrepancy(&c, k, 5).unwrap());
        prev = v;
    }
}

#[test]
fn cap_count_matches_dot_threshold() {
    let c = random_uniform(dim(2), 50, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..100 {
        let centre = random_uniform(dim(2), 1, rng.random()).points()[0].clone();
        let r = rng.random_range(0.0..PI);
        let manual = c
            .points()
            .iter()
            .filter(|p| p.dot(&centre) >= r.cos())
            .count();
        assert_eq!(cap_count(&c, centre.coords(), r), manual);
    }
}

#[test]
fn riesz_energy_increases_toward_one() {
    let e: Vec<f64> = [100, 400, 1600]
        .iter()
        .map(|&n| riesz_energy(&eq_points(&tree(2, n)), 1.0).unwrap())
        .collect();
    assert!(e[0] < e[1] && e[1] < e[2] && e[2] < 1.0);
    assert!((0.9..1.0).contains(&e[1]));
}

#[test]
fn random_codes_have_higher_log_energy() {
    let eqp = log_energy(&eq_points(&tree(2, 400))).unwrap();
    for seed in 0..10 {
        assert!(log_energy(&random_uniform(dim(2), 400, seed)).unwrap() > eqp);
    }
}

#[test]
fn ratios_bounded_across_sweep() {
    for d in [2, 3] {
        for n in [10, 50, 200, 800, 2000] {
            let t = tree(d, n);
            let scale = (n as f64).powf(1.0 / d as f64);
            let dmin = min_distance(&eq_points(&t)).unwrap() * scale;
            let diam = max_diameter(&t, 5).ratio;
            assert!(dmin >= 0.5 && diam <= 8.0, "EQ({d},{n}): {dmin} {diam}");
        }
    }
}

#[test]
fn report_fields() {
    let t = tree(2, 400);
    let config = MetricsConfig {
        s_values: vec![1.0, 2.0],
        mc_samples: 10_000,
        cap_trials: 1_000,
        ..MetricsConfig::default()
    };
    let r = metrics_report(&eq_points(&t), Some(&t), &config).unwrap();
    assert_eq!(r.riesz_energy.len(), 2);
    assert!(r.diameter_ratio.unwrap() <= 7.0);
    assert!(r.packing_density > 0.0 && r.packing_density <= 1.0);
    assert!((0.0..=1.0).contains(&r.cap_discrepancy_estimate));
    assert!(r.min_distance > 0.0 && r.min_distance <= 2.0);
    assert_eq!((r.d, r.n, r.seed, r.mc_samples), (2, 400, 0, 10_000));
    assert!(metrics_report(&eq_points(&t), Some(&tree(2, 401)), &config).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn sweep_equals_brute_force(d in 1usize..=5, n in 2usize..=300, seed in any::<u64>()) {
        let c = random_uniform(dim(d), n, seed);
        prop_assert_eq!(min_distance(&c).unwrap(), min_distance_brute(&c).unwrap());
    }

    #[test]
    fn metric_ranges(n in 2usize..=300, seed in any::<u64>()) {
        let c = random_uniform(dim(2), n, seed);
        let p = packing_density(&c).unwrap();
        prop_assert!(p > 0.0 && p <= 1.0);
        let disc = cap_discrepancy(&c, 200, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&disc));
        let r = covering_radius(&c, 500, seed).unwrap();
        prop_assert!((0.0..=PI).contains(&r));
    }
}
