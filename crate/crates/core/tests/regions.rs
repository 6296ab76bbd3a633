mod common;

use common::{fixture, pentagon_support, random_binary_bc, random_binary_mac, rng};
use embedcap::regions::{
    compute_region, contains, distance_outside, eval_tuple, format_rate, region_csv,
    support_function, BcCase, BoundKind, Bounds, MacCase, Problem, RatePoint, SearchConfig,
};
use embedcap::Error;
use proptest::prelude::*;

fn bc_cfg() -> SearchConfig {
    let mut cfg = SearchConfig::default();
    cfg.aux.u = Some(2);
    cfg
}

fn cross(o: &RatePoint, a: &RatePoint, b: &RatePoint) -> f64 {
    (a.r1 - o.r1) * (b.r2 - o.r2) - (a.r2 - o.r2) * (b.r1 - o.r1)
}

#[test]
fn hull_is_convex_counterclockwise_from_origin() {
    for name in ["mac_xor_noisy", "mac_or", "mac_mixture", "bc_c_noisy"] {
        let r = compute_region(&fixture(name), &bc_cfg()).unwrap();
        let v = &r.vertices;
        assert_eq!(v[0], RatePoint::new(0.0, 0.0), "{name}");
        assert_eq!(v.len(), r.witnesses.len());
        for i in 0..v.len() {
            let (a, b, c) = (&v[i], &v[(i + 1) % v.len()], &v[(i + 2) % v.len()]);
            if v.len() >= 3 {
                assert!(cross(a, b, c) > 0.0, "{name}: turn at {b:?}");
            }
        }
        for w in &r.witnesses {
            // each witness's own polytope reaches its vertex
            assert!(w.bounds.support(0.5) + 1e-9 >= w.point.weighted(0.5), "{name}");
        }
    }
}

#[test]
fn support_samples_agree_with_vertices() {
    let r = compute_region(&fixture("mac_host_interference"), &SearchConfig::default()).unwrap();
    for &(l, s) in &r.support_samples {
        let best = r.vertices.iter().map(|v| v.weighted(l)).fold(f64::MIN, f64::max);
        assert!((best - s).abs() < 1e-12);
        assert!((support_function(&r, l).unwrap() - s).abs() < 1e-12);
    }
    assert!(matches!(support_function(&r, 1.5), Err(Error::InvalidParameter(_))));
}

#[test]
fn membership_and_distance() {
    let r = compute_region(&fixture("mac_clean_square"), &SearchConfig::default()).unwrap();
    assert!(contains(&r, RatePoint::new(0.5, 0.5), 0.0));
    assert!(contains(&r, RatePoint::new(1.0, 1.0), 1e-12));
    assert!(!contains(&r, RatePoint::new(1.1, 0.5), 1e-9));
    assert!((distance_outside(&r, RatePoint::new(1.25, 0.5)) - 0.25).abs() < 1e-12);
    assert_eq!(distance_outside(&r, RatePoint::new(0.2, 0.2)), 0.0);
}

#[test]
fn larger_budget_never_shrinks_region() {
    let mut r = rng(41);
    for _ in 0..4 {
        let p = random_binary_mac(&mut r, MacCase::C, 0.2);
        let small = compute_region(&Problem::Mac(p.clone()), &SearchConfig::default()).unwrap();
        let big = compute_region(&Problem::Mac(p.with_budgets(0.4, 0.4).unwrap()), &SearchConfig::default()).unwrap();
        if small.empty {
            continue;
        }
        for l in [0.0, 0.3, 0.5, 0.7, 1.0] {
            let (a, b) = (support_function(&small, l).unwrap(), support_function(&big, l).unwrap());
            assert!(a <= b + 1e-6, "lambda {l}: {a} > {b}");
        }
    }
}

#[test]
fn broadcast_c_and_d_share_one_region() {
    let mut r = rng(42);
    let p = random_binary_bc(&mut r, BcCase::C, 0.3);
    let c = compute_region(&Problem::Bc(p.with_case(BcCase::C)), &bc_cfg()).unwrap();
    let d = compute_region(&Problem::Bc(p.with_case(BcCase::D)), &bc_cfg()).unwrap();
    assert_eq!(region_csv(&c), region_csv(&d));
}

#[test]
fn witness_bounds_reevaluate() {
    let problem = fixture("bc_b_noisy");
    let mut cfg = bc_cfg();
    cfg.aux.v = Some(2);
    let inner = compute_region(&problem, &cfg).unwrap();
    for w in &inner.witnesses {
        let b = eval_tuple(&problem, BoundKind::Inner, &w.tuple).unwrap();
        assert!((b.b1 - w.bounds.b1).abs() < 1e-12 && (b.b2 - w.bounds.b2).abs() < 1e-12, "{b:?} vs {:?}", w.bounds);
        assert!(b.support(0.5) + 1e-9 >= w.point.weighted(0.5));
    }
}

#[test]
fn zero_budget_random_host_has_no_rate_pair() {
    // with Δ = 0 the inputs copy the host, and a noisy channel cannot
    // reveal it: H(S1|S2) exceeds what Y carries, so every bound is negative
    let p = random_binary_mac(&mut rng(5), MacCase::C, 0.0);
    let r = compute_region(&Problem::Mac(p), &SearchConfig::default()).unwrap();
    assert!(r.empty);
    assert!(!r.zero_rate_achievable());
    assert!(matches!(support_function(&r, 0.5), Err(Error::EmptyRegion)));
    assert_eq!(region_csv(&r), "kind,lambda,r1,r2\nvertex,,0.000000,0.000000\n");
}

#[test]
fn csv_shape_and_rounding() {
    let r = compute_region(&fixture("mac_clean_square"), &SearchConfig::default()).unwrap();
    let csv = region_csv(&r);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("kind,lambda,r1,r2"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert!(rows.iter().all(|r| r.len() == 4 && (r[0] == "vertex" || r[0] == "support")));
    assert_eq!(rows[2], vec!["vertex", "", "1.000000", "1.000000"]);
    let lambdas: Vec<f64> = rows.iter().filter(|r| r[0] == "support").map(|r| r[1].parse().unwrap()).collect();
    assert!(lambdas.windows(2).all(|w| w[0] < w[1]));

    // exact binary ties at the sixth decimal round half to even
    assert_eq!(format_rate(0.0078125), "0.007812");
    assert_eq!(format_rate(0.0234375), "0.023438");
    assert_eq!(format_rate(-1e-9), "0.000000");
}

proptest! {
    #[test]
    fn polytope_support_matches_corner_enumeration(
        b1 in 0.0f64..2.0, b2 in 0.0f64..2.0, c in 0.0f64..3.0, lambda in 0.0f64..=1.0,
    ) {
        let b = Bounds { b1, b2, b12: Some(c) };
        let want = pentagon_support(b1, b2, c, lambda).unwrap();
        prop_assert!((b.support(lambda) - want).abs() < 1e-9);
    }

    #[test]
    fn negative_bound_means_no_polytope(b1 in -2.0f64..-1e-6, b2 in 0.0f64..1.0) {
        let b = Bounds { b1, b2, b12: None };
        prop_assert!(b.polytope().is_none());
        prop_assert_eq!(b.support(0.5), f64::NEG_INFINITY);
    }
}
