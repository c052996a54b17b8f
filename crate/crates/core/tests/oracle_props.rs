use caustica::caustic::nearest_caustic_point;
use caustica::geometry::{Paraboloid, SpacePoint};
use caustica::normals::{concurrent_normals, SolverOptions};
use caustica::oracle::{count_from_scan, critical_points, scan};
use caustica::Sign;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p14() -> Paraboloid<f64> {
    Paraboloid::new(1.0, 4.0).unwrap()
}

fn random_query(rng: &mut ChaCha8Rng) -> SpacePoint<f64> {
    SpacePoint::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-2.0..8.0)).unwrap()
}

fn far_from_caustic(p: &Paraboloid<f64>, q: SpacePoint<f64>) -> bool {
    nearest_caustic_point(p, q).is_ok_and(|i| i.distance > 1e-3 * (1.0 + q.magnitude()))
}

#[test]
fn feet_match_the_solver() {
    let p = p14();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    while checked < 150 {
        let q = random_query(&mut rng);
        if !far_from_caustic(&p, q) {
            continue;
        }
        checked += 1;
        let o = scan(&p, q, None).unwrap();
        let s = concurrent_normals(&p, q, &SolverOptions::default()).unwrap();
        assert_eq!(o.count, s.count(), "{q:?}");
        assert_eq!(o.count % 2, 1);
        let scale = 1.0 + q.magnitude();
        for f in &s.feet {
            let d = o.feet.iter().map(|g| g.dist(f.point)).fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6 * scale, "{q:?}: {d}");
        }
    }
}

#[test]
fn mirrored_queries_give_equal_counts() {
    let p = p14();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..40 {
        let q = random_query(&mut rng);
        if !far_from_caustic(&p, q) {
            continue;
        }
        let n = count_from_scan(&p, q).unwrap();
        for (sx, sy) in [(Sign::Minus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Minus)] {
            assert_eq!(count_from_scan(&p, q.mirrored(sx, sy)).unwrap(), n);
        }
    }
}

#[test]
fn off_axis_high_query_has_five_feet() {
    let p = p14();
    let q = SpacePoint::new(0.1, 0.1, 5.0).unwrap();
    let o = critical_points(&p, q, 20.0, 256).unwrap();
    let s = concurrent_normals(&p, q, &SolverOptions::default()).unwrap();
    assert_eq!((o.count, s.count()), (5, 5));
    for (a, b) in o.feet.iter().zip(sorted(s.feet.iter().map(|f| f.point).collect())) {
        assert!(a.dist(b) < 1e-6);
    }
}

fn sorted(mut v: Vec<SpacePoint<f64>>) -> Vec<SpacePoint<f64>> {
    v.sort_by(|u, w| (u.x, u.y).partial_cmp(&(w.x, w.y)).unwrap());
    v
}

#[test]
fn single_precision_scan() {
    let p = Paraboloid::<f32>::new(1.0, 4.0).unwrap();
    let q = SpacePoint::new(0.0f32, 0.0, 5.0).unwrap();
    assert_eq!(count_from_scan(&p, q).unwrap(), 5);
}
