use eqsphere::compare::random_uniform;
use eqsphere::export::{
    boundaries, boundaries_to_csv, indices_to_csv, points_to_csv, points_to_json, read_point_rows,
    read_points,
};
use eqsphere::{eq_partition, Dimension, Error, OffsetScheme, PartitionSpec, RegionTree};

fn tree(d: usize, n: usize, scheme: OffsetScheme) -> RegionTree {
    eq_partition(&PartitionSpec::new(d, n).unwrap().with_offsets(scheme)).unwrap()
}

#[test]
fn points_round_trip_bit_exact() {
    for d in 1..=4 {
        let c = random_uniform(Dimension::new(d).unwrap(), 300, d as u64);
        let csv = read_points(&points_to_csv(&c).unwrap()).unwrap();
        let json = read_points(&points_to_json(&c).unwrap()).unwrap();
        assert_eq!(csv.points(), c.points());
        assert_eq!(json, c);
    }
}

#[test]
fn json_echoes_seed() {
    let c = random_uniform(Dimension::new(2).unwrap(), 3, 42);
    let v: serde_json::Value = serde_json::from_str(&points_to_json(&c).unwrap()).unwrap();
    assert_eq!(v["seed"], 42);
    assert_eq!(v["N"], 3);
    assert_eq!(v["generator"], "random_uniform");
}

#[test]
fn malformed_rows_name_their_line() {
    let text = "x0,x1,x2\n1,0,0\n0,1,0\n0,abc,1\n";
    match read_points(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
        other => panic!("{other:?}"),
    }
    match read_points("1,0,0\n0,1\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    match read_points("1,0,0\n0.5,0.5,0\n") {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn empty_point_files() {
    let d2 = Dimension::new(2).unwrap();
    let (_, rows) = read_point_rows("", Some(d2)).unwrap();
    assert!(rows.is_empty());
    assert_eq!(indices_to_csv(&[]).unwrap(), "index,region\n");
}

#[test]
fn boundary_polylines() {
    let two = boundaries(&tree(2, 2, OffsetScheme::None), 0.05).unwrap();
    assert_eq!(two.len(), 2);
    for line in &two {
        assert!(line.vertices.iter().all(|v| v[0].abs() < 1e-15));
    }
    for scheme in [OffsetScheme::None, OffsetScheme::Stagger] {
        let lines = boundaries(&tree(2, 33, scheme), 0.02).unwrap();
        assert_eq!(lines.len(), 33);
        for l in &lines {
            assert_eq!(l.vertices.first(), l.vertices.last());
        }
    }
    assert!(matches!(
        boundaries(&tree(3, 10, OffsetScheme::None), 0.1),
        Err(Error::Unsupported(_))
    ));
    let csv =
        boundaries_to_csv(&boundaries(&tree(2, 5, OffsetScheme::None), 0.1).unwrap()).unwrap();
    assert!(csv.starts_with("region,vertex,x0,x1,x2\n"));
}

#[test]
fn vertices_lie_on_region_edges() {
    for scheme in [OffsetScheme::None, OffsetScheme::Stagger] {
        let t = tree(2, 100, scheme);
        let tau = std::f64::consts::TAU;
        for (line, r) in boundaries(&t, 0.01).unwrap().iter().zip(t.regions()) {
            for v in &line.vertices {
                let theta = v[0].clamp(-1.0, 1.0).acos();
                let phi = (v[2].atan2(v[1]) - r.azimuth_offset).rem_euclid(tau);
                let (a, b) = (r.intervals[0], r.intervals[1]);
                let on_band = (theta - a.lo).abs() < 1e-9 || (theta - a.hi).abs() < 1e-9;
                let near = |x: f64, y: f64| {
                    let dd = (x - y).rem_euclid(tau);
                    dd < 1e-9 || tau - dd < 1e-9
                };
                let on_side = near(phi, b.lo) || near(phi, b.hi);
                let sin = theta.sin();
                assert!(on_band || on_side || sin < 1e-9, "region {:?}", r);
            }
        }
    }
}
