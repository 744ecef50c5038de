use ucw::fixpoint::{contraction_toward, identity};
use ucw::models::{DiskPoint, Euclidean, ModelKind, PoincareDisk};
use ucw::shadow::{fejer_shadow_metastability, iterate_scheme, quasi_fejer_shadow_metastability, Scheme};
use ucw::{project, run_scenarios, ConvexSet, CounterFn, GeodesicSpace, IterationTrace, MetaStatus, ScenarioConfig, ShadowCache};

fn plane() -> Euclidean {
    Euclidean::new(2, 10.0).unwrap()
}

#[test]
fn projection_onto_a_line() {
    // [TRIVIAL]
    let e = plane();
    let line = ConvexSet::affine(&e, vec![0.0, 0.0], &[vec![1.0, 0.0]], 10.0).unwrap();
    let p = project(&e, &line, &vec![3.0, 4.0], 1e-9).unwrap();
    assert!(e.dist(&p, &vec![3.0, 0.0]) < 1e-9, "{p:?}");
}

#[test]
fn projection_onto_a_ball() {
    // [TRIVIAL]
    let e = plane();
    let ball = ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap();
    assert_eq!(project(&e, &ball, &vec![0.0, 2.0], 1e-9).unwrap(), vec![0.0, 1.0]);
    assert_eq!(project(&e, &ball, &vec![0.5, 0.1], 1e-9).unwrap(), vec![0.5, 0.1]);
    // the same point by segment search
    let seg = ConvexSet::segment(&e, vec![0.0, -1.0], vec![0.0, 1.0]);
    assert!(e.dist(&project(&e, &seg, &vec![0.0, 2.0], 1e-9).unwrap(), &vec![0.0, 1.0]) < 1e-9);
}

#[test]
fn projection_onto_a_disk_geodesic() {
    // [TRIVIAL] the real axis is a geodesic; by symmetry (0, 0.3) projects
    // to the origin
    let d = PoincareDisk::new(0.9).unwrap();
    let seg = ConvexSet::segment(&d, DiskPoint::new(-0.5, 0.0), DiskPoint::new(0.5, 0.0));
    let p = project(&d, &seg, &DiskPoint::new(0.0, 0.3), 1e-9).unwrap();
    assert!(d.dist(&p, &DiskPoint::ORIGIN) < 1e-7, "{p:?}");
}

#[test]
fn zero_steps_give_a_constant_trace() {
    // [TRIVIAL] α ≡ 0 never moves
    let e = plane();
    let t = contraction_toward(&e, vec![0.0, 0.0], 0.5);
    let x0 = vec![1.0, 1.0];
    let mut trace = iterate_scheme(&e, &t, x0.clone(), |_| 0.0, Scheme::Mann, 50, vec![]).unwrap();
    assert_eq!(trace.len(), 50);
    assert!(trace.points().iter().all(|p| *p == x0));
    assert_eq!(trace.point(200).unwrap(), &x0);
}

#[test]
fn full_steps_of_a_contraction() {
    // [TRIVIAL] α ≡ 1, t = ½: x_n = 2⁻ⁿ x₀
    let e = plane();
    let t = contraction_toward(&e, vec![0.0, 0.0], 0.5);
    let trace = iterate_scheme(&e, &t, vec![1.0, 0.0], |_| 1.0, Scheme::Mann, 20, vec![]).unwrap();
    for (n, p) in trace.points().iter().enumerate() {
        assert_eq!(p[0], 0.5f64.powi(n as i32));
    }
    // shadows onto the fixed point set {0} are constant, so N = 0
    let set = ConvexSet::ball(&e, vec![0.0, 0.0], 0.0).unwrap();
    let mut cache = ShadowCache::new(&e, &set, trace, 1e-12);
    let r = fejer_shadow_metastability(&mut cache, 1.0, 0.01, &CounterFn::constant(5)).unwrap();
    assert_eq!(r.found_n, Some(0));
}

#[test]
fn mann_iteration_of_identity_onto_a_line() {
    // [DERIVED] every point is fixed; shadows onto the line are constant
    let e = plane();
    let line = ConvexSet::affine(&e, vec![0.0, 0.0], &[vec![1.0, 0.0]], 10.0).unwrap();
    let trace = iterate_scheme(&e, &identity(&e), vec![2.0, 1.0], |_| 0.5, Scheme::Mann, 100, vec![]).unwrap();
    let mut cache = ShadowCache::new(&e, &line, trace, 1e-12);
    for g in CounterFn::test_family(1) {
        let r = fejer_shadow_metastability(&mut cache, 1.5, 0.1, &g).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}

#[test]
fn shadows_of_a_converging_list() {
    // [DERIVED] points on a line approaching the ball: the shadows are all
    // (0, 1), a Fejér sequence with respect to the ball
    let e = plane();
    let ball = ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap();
    let pts: Vec<Vec<f64>> = (0..40).map(|n| vec![0.0, 1.0 + 0.5f64.powi(n)]).collect();
    let trace = IterationTrace::from_points(&e, pts).unwrap();
    let mut cache = ShadowCache::new(&e, &ball, trace, 1e-12);
    let r = quasi_fejer_shadow_metastability(&mut cache, 1.0, 0.0, 0.01, &CounterFn::linear()).unwrap();
    assert_eq!(r.status, MetaStatus::Pass);
    assert!(cache.gap(0).unwrap().unwrap() - 1.0 < 1e-12);
}

#[test]
fn start_outside_b_is_rejected() {
    let e = plane();
    let ball = ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap();
    let trace = IterationTrace::from_points(&e, vec![vec![0.0, 5.0]]).unwrap();
    let mut cache = ShadowCache::new(&e, &ball, trace, 1e-12);
    assert!(fejer_shadow_metastability(&mut cache, 1.0, 0.1, &CounterFn::constant(1)).is_err());
}

#[test]
fn scenario_library_filtered_by_model() {
    // [DERIVED] no scenario fails; only euclidean scenarios run
    let cfg = ScenarioConfig { horizon: 2000, tail_window: 200, models: vec![ModelKind::Euclidean], ..ScenarioConfig::default() };
    let out = run_scenarios(&cfg);
    assert!(!out.is_empty());
    for (name, res) in out {
        let o = res.unwrap_or_else(|e| panic!("{name}: {e}"));
        assert_eq!(o.kind, ModelKind::Euclidean);
        assert_eq!(o.count(MetaStatus::Fail), 0, "{name}");
    }
}
