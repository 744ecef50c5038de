use proptest::prelude::*;
use ucw::models::{check_cat0, parse_edge_list, DiskPoint, Euclidean, LpSpace, MetricTree, PoincareDisk, BUILTIN_TREE};
use ucw::sampling::rng_from_seed;
use ucw::{check_axioms, CheckId, GeodesicSpace};

fn plane() -> Euclidean {
    Euclidean::new(2, 1.0).unwrap()
}

fn disk() -> PoincareDisk {
    PoincareDisk::new(0.9).unwrap()
}

fn builtin_tree() -> MetricTree {
    MetricTree::from_edges(&parse_edge_list(BUILTIN_TREE).unwrap(), 3.0).unwrap()
}

fn two_edge_tree() -> MetricTree {
    let edges = parse_edge_list("A B 1\nB C 2\n").unwrap();
    MetricTree::from_edges(&edges, 3.0).unwrap()
}

#[test]
fn euclidean_interpolation_and_distance() {
    let e = plane();
    // [TRIVIAL] linear interpolation
    assert_eq!(e.geodesic(&vec![0.0, 0.0], &vec![2.0, 0.0], 0.25), vec![0.5, 0.0]);
    // [TRIVIAL] Pythagoras
    assert_eq!(e.dist(&vec![0.0, 0.0], &vec![3.0, 4.0]), 5.0);
}

#[test]
fn disk_distance_from_origin() {
    // [DERIVED] arccosh(1 + 2·0.25/0.75) = arccosh(5/3) = ln 3
    let d = disk().dist(&DiskPoint::ORIGIN, &DiskPoint::new(0.5, 0.0));
    assert!((d - 1.0986122886681098).abs() < 1e-12, "{d}");
    assert!((d - 3f64.ln()).abs() < 1e-12);
}

#[test]
fn disk_midpoint_is_radial() {
    // [DERIVED] the point at hyperbolic distance s from 0 has euclidean radius
    // tanh(s/2); s = ln 3 / 2 gives tanh(ln 3 / 4) = 2 − √3
    let m = disk();
    let (x, y) = (DiskPoint::ORIGIN, DiskPoint::new(0.5, 0.0));
    let p = m.geodesic(&x, &y, 0.5);
    assert!((p.x - 0.2679491924311228).abs() < 1e-9 && p.y.abs() < 1e-12, "{p:?}");
    assert!((m.dist(&x, &p) - 0.5 * m.dist(&x, &y)).abs() < 1e-9);
    assert!((m.dist(&x, &p) - m.dist(&p, &y)).abs() < 1e-9);
}

#[test]
fn tree_path_metric() {
    // [TRIVIAL] 0.5 to B, then 1 along B–C
    let t = two_edge_tree();
    let p = t.point_between("A", "B", 0.5).unwrap();
    let q = t.point_between("B", "C", 1.0).unwrap();
    assert!((t.dist(&p, &q) - 1.5).abs() < 1e-12);
}

#[test]
fn zero_weight_returns_the_start() {
    // [TRIVIAL] endpoint axiom, on every model
    let mut rng = rng_from_seed(5);
    let e = plane();
    let x = e.sample(&mut rng);
    assert_eq!(e.geodesic(&x, &e.sample(&mut rng), 0.0), x);
    let d = disk();
    let x = d.sample(&mut rng);
    assert!(d.dist(&d.geodesic(&x, &d.sample(&mut rng), 0.0), &x) < 1e-12);
    let t = builtin_tree();
    let x = t.sample(&mut rng);
    assert!(t.dist(&t.geodesic(&x, &t.sample(&mut rng), 0.0), &x) < 1e-12);
}

#[test]
fn degenerate_segment_has_no_spread() {
    // [TRIVIAL] W(x, x, λ) = x for all λ
    let d = disk();
    let x = DiskPoint::new(0.3, -0.4);
    let a = d.geodesic(&x, &x, 0.2);
    let b = d.geodesic(&x, &x, 0.9);
    assert_eq!(d.dist(&a, &b), 0.0);
}

fn assert_axioms_hold<S: GeodesicSpace>(m: &S, tol: f64) {
    let reports = check_axioms(m, 11, 10_000, tol).unwrap();
    let ids: Vec<CheckId> = reports.iter().map(|r| r.check).collect();
    for id in [CheckId::Metric, CheckId::W1, CheckId::W2, CheckId::W3, CheckId::W4, CheckId::W5] {
        assert!(ids.contains(&id), "{id:?} missing");
    }
    for r in &reports {
        assert_eq!(r.tolerance, tol);
        assert!(r.passed(), "{}: {:?}", m.name(), r);
        assert_eq!(r.evaluated(), 10_000);
    }
}

#[test]
fn axiom_sweeps_on_every_model() {
    // [DERIVED] numerical sweeps; the linear and geodesic W satisfy W1–W5
    assert_axioms_hold(&plane(), 1e-9);
    assert_axioms_hold(&LpSpace::new(3, 4.0, 1.0).unwrap(), 1e-9);
    assert_axioms_hold(&disk(), 1e-7);
    assert_axioms_hold(&builtin_tree(), 1e-9);
}

#[test]
fn cat0_midpoint_inequality() {
    // [TRIVIAL] the parallelogram law makes the euclidean case an identity
    let r = check_cat0(&plane(), 3, 10_000, 1e-9).unwrap();
    assert!(r.passed());
    assert!(r.max_abs_gap < 1e-12, "{}", r.max_abs_gap);
    // [DERIVED] numerical sweeps
    assert!(check_cat0(&disk(), 3, 10_000, 1e-7).unwrap().passed());
    assert!(check_cat0(&builtin_tree(), 3, 10_000, 1e-9).unwrap().passed());
    assert!(check_cat0(&LpSpace::new(2, 4.0, 1.0).unwrap(), 3, 10, 1e-9).is_err());
}

#[test]
fn invalid_models_are_rejected() {
    assert!(LpSpace::new(2, 1.5, 1.0).is_err());
    assert!(Euclidean::new(0, 1.0).is_err());
    assert!(PoincareDisk::new(1.0).is_err());
    assert!(parse_edge_list("a b 1\nb c 1\nc a 1\n").and_then(|e| MetricTree::from_edges(&e, 1.0)).is_err());
    assert!(parse_edge_list("a b 1\nc d 1\n").and_then(|e| MetricTree::from_edges(&e, 1.0)).is_err());
    assert!(parse_edge_list("a b -1\n").and_then(|e| MetricTree::from_edges(&e, 1.0)).is_err());
}

fn metric_props<S: GeodesicSpace>(m: &S, seed: u64, lam: f64) -> Result<(), TestCaseError> {
    let mut rng = rng_from_seed(seed);
    let (x, y, z) = (m.sample(&mut rng), m.sample(&mut rng), m.sample(&mut rng));
    let tol = m.tolerance();
    prop_assert!((m.dist(&x, &y) - m.dist(&y, &x)).abs() <= tol);
    prop_assert!(m.dist(&x, &z) <= m.dist(&x, &y) + m.dist(&y, &z) + tol);
    let w = m.geodesic(&x, &y, lam);
    prop_assert!((m.dist(&x, &w) - lam * m.dist(&x, &y)).abs() <= tol);
    prop_assert!((m.dist(&w, &y) - (1.0 - lam) * m.dist(&x, &y)).abs() <= tol);
    Ok(())
}

proptest! {
    #[test]
    fn euclidean_metric_and_geodesics(seed in any::<u64>(), lam in 0.0f64..=1.0) {
        metric_props(&Euclidean::new(3, 2.0).unwrap(), seed, lam)?;
    }

    #[test]
    fn lp_metric_and_geodesics(seed in any::<u64>(), lam in 0.0f64..=1.0, p in 2.0f64..8.0) {
        metric_props(&LpSpace::new(3, p, 2.0).unwrap(), seed, lam)?;
    }

    #[test]
    fn disk_metric_and_geodesics(seed in any::<u64>(), lam in 0.0f64..=1.0) {
        metric_props(&disk(), seed, lam)?;
    }

    #[test]
    fn tree_metric_and_geodesics(seed in any::<u64>(), lam in 0.0f64..=1.0) {
        metric_props(&builtin_tree(), seed, lam)?;
    }

    #[test]
    fn sampled_points_are_valid(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let d = disk();
        let p = d.sample(&mut rng);
        prop_assert!(d.validate(&p).is_ok());
        prop_assert!(p.x * p.x + p.y * p.y <= 0.81 + 1e-12);
        let t = builtin_tree();
        prop_assert!(t.validate(&t.sample(&mut rng)).is_ok());
    }
}
