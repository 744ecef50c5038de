use proptest::prelude::*;
use ucw::models::{DiskPoint, Euclidean, PoincareDisk};
use ucw::proximal::{
    check_prox_closed_form, check_prox_descent, check_prox_indicator, check_prox_order_lambda, check_prox_uniqueness,
    describe_functional, functional_library, minimizer_fixed_point_check, objective, prox_by_search, proximal_point_iterate, PROX_TOL,
};
use ucw::{parse_functional, prox, ConvexSet, ExtReal, Functional, GeodesicSpace, ProxProblem};

fn plane() -> Euclidean {
    Euclidean::new(2, 3.0).unwrap()
}

#[test]
fn objective_values() {
    // [TRIVIAL] ι_B(x) + d²(x, a)/(2λ) with a = (0, 3), λ = 2
    let e = plane();
    let ball = ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap();
    let prob = ProxProblem::new(Functional::indicator_of(ball), 2.0, vec![0.0, 3.0]).unwrap();
    assert_eq!(objective(&e, &prob, &vec![0.0, 1.0]), ExtReal::new(1.0));
    assert_eq!(objective(&e, &prob, &vec![0.0, 2.0]), ExtReal::PosInf);
}

#[test]
fn half_square_prox() {
    // [DERIVED] argmin ½|x − p|² + |x − a|²/2 = (p + a)/2
    let e = plane();
    let prob = ProxProblem::new(Functional::half_sq_dist_to(vec![1.0, 0.0]), 1.0, vec![0.0, 0.0]).unwrap();
    let x = prox(&e, &prob, PROX_TOL).unwrap();
    assert!(e.dist(&x, &vec![0.5, 0.0]) < 1e-15);
    let y = prox_by_search(&e, &prob, PROX_TOL).unwrap();
    assert!(e.dist(&y, &vec![0.5, 0.0]) < PROX_TOL);
}

#[test]
fn indicator_prox_projects() {
    // [TRIVIAL]
    let e = plane();
    let ball = ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap();
    let prob = ProxProblem::new(Functional::indicator_of(ball), 0.3, vec![0.0, 3.0]).unwrap();
    assert!(e.dist(&prox(&e, &prob, PROX_TOL).unwrap(), &vec![0.0, 1.0]) < 1e-15);
    assert!(e.dist(&prox_by_search(&e, &prob, PROX_TOL).unwrap(), &vec![0.0, 1.0]) < PROX_TOL);
}

#[test]
fn disk_closed_form_against_search() {
    // [DERIVED] 100 random instances
    let d = PoincareDisk::new(0.8).unwrap();
    let r = check_prox_closed_form(&d, 3, 100, PROX_TOL).unwrap();
    assert!(r.passed(), "{:?}", r.violations.first());
    // [TRIVIAL] symmetric anchors meet at the origin
    let prob = ProxProblem::new(Functional::half_sq_dist_to(DiskPoint::new(0.0, 0.4)), 1.0, DiskPoint::new(0.0, -0.4)).unwrap();
    let x = prox(&d, &prob, PROX_TOL).unwrap();
    assert!(d.dist(&x, &DiskPoint::ORIGIN) < 1e-12);
}

#[test]
fn fixed_points_and_minimizers() {
    let e = plane();
    let p = vec![1.0, -1.0];
    let f = Functional::dist_to(p.clone());
    let r = minimizer_fixed_point_check(&e, &f, &[p.clone(), vec![0.0, 0.0]], PROX_TOL).unwrap();
    assert!(r.passed(), "{r:?}");
    assert!(r.entries[0].is_fixed && r.entries[0].is_minimizer);
    assert!(!r.entries[1].is_fixed && !r.entries[1].is_minimizer);
    assert!(r.infimum.abs() < 1e-6);
}

#[test]
fn proximal_point_on_a_half_square() {
    // [DERIVED] each step halves the distance to p
    let e = plane();
    let f = Functional::half_sq_dist_to(vec![0.0, 0.0]);
    let t = proximal_point_iterate(&e, &f, |_| 1.0, vec![2.0, 0.0], 12, PROX_TOL).unwrap();
    for w in t.steps.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 1e-12);
    }
}

#[test]
fn proximal_point_on_an_indicator() {
    // [TRIVIAL] one step lands in the set, after which nothing moves
    let e = plane();
    let seg = ConvexSet::segment(&e, vec![-1.0, 0.0], vec![1.0, 0.0]);
    let t = proximal_point_iterate(&e, &Functional::indicator_of(seg), |_| 0.5, vec![0.3, 2.0], 4, PROX_TOL).unwrap();
    assert!(e.dist(&t.trace.points()[1], &vec![0.3, 0.0]) < PROX_TOL);
    assert!(t.steps[1..].iter().all(|s| *s < PROX_TOL));
}

#[test]
fn constrained_proximal_point_descends() {
    // [DERIVED] f = ½d²(·, q) + ι_[a,b]; its minimiser is the projection of q
    // onto the segment, and f(x_n) is nonincreasing along the iteration
    let e = plane();
    let q = vec![2.0, 1.0];
    let seg = ConvexSet::segment(&e, vec![-1.0, 0.0], vec![1.0, 0.0]);
    let f = Functional::sum(Functional::half_sq_dist_to(q), Functional::indicator_of(seg));
    let t = proximal_point_iterate(&e, &f, |_| 1.0, vec![-1.0, 0.0], 40, PROX_TOL).unwrap();
    let values: Vec<f64> = t.values.iter().map(|v| v.to_f64()).collect();
    for w in values.windows(2) {
        assert!(w[1] <= w[0] + 1e-12, "{w:?}");
    }
    assert!(e.dist(t.trace.points().last().unwrap(), &vec![1.0, 0.0]) < 1e-5);
}

fn library_checks<S: ucw::proximal::PointSyntax>(model: &S, seed: u64, trials: usize) {
    for lib in functional_library(model, seed) {
        let name = lib.name;
        assert!(check_prox_uniqueness(model, &lib.f, seed, trials, 2.0 * PROX_TOL).unwrap().passed(), "{name}: uniqueness");
        assert!(check_prox_order_lambda(model, &lib.f, seed, trials, 2.0 * PROX_TOL).unwrap().passed(), "{name}: order of lambda");
        assert!(check_prox_descent(model, &lib.f, seed, trials, 200, 1e-9).unwrap().passed(), "{name}: descent");
        let r = minimizer_fixed_point_check(model, &lib.f, &lib.minimizers, PROX_TOL).unwrap();
        assert!(r.passed() && r.entries.iter().all(|e| e.is_fixed), "{name}: {r:?}");
    }
    let mut rng = ucw::sampling::rng_from_seed(seed);
    let c = model.sample(&mut rng);
    let ball = ConvexSet::ball(model, c, 0.5 * model.sampling_radius()).unwrap();
    assert!(check_prox_indicator(model, &ball, seed, trials, PROX_TOL).unwrap().passed());
}

#[test]
fn library_on_the_plane() {
    library_checks(&plane(), 21, 25);
}

#[test]
fn library_on_the_disk() {
    library_checks(&PoincareDisk::new(0.9).unwrap(), 22, 10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parse_and_describe_round_trip(x in -2.0f64..2.0, y in -2.0f64..2.0, c in 0.1f64..5.0, r in 0.1f64..2.0) {
        let e = plane();
        let text = format!("sum(scale({c}, halfsqdist([{x}, {y}])), max(dist([0, 0]), indicator(ball([{y}, {x}], {r}))))");
        let f = parse_functional(&e, &text).unwrap();
        let again = parse_functional(&e, &describe_functional(&e, &f)).unwrap();
        prop_assert_eq!(describe_functional(&e, &again), describe_functional(&e, &f));
        for p in [vec![0.0, 0.0], vec![x, y], vec![y, x]] {
            prop_assert_eq!(f.eval(&e, &p), again.eval(&e, &p));
        }
    }

    #[test]
    fn prox_does_not_increase_the_objective(ax in -2.0f64..2.0, ay in -2.0f64..2.0, lambda in 0.1f64..5.0) {
        // h(Prox a) ≤ h(a) for the sum of distances
        let e = plane();
        let f = Functional::sum(Functional::dist_to(vec![1.0, 0.0]), Functional::dist_to(vec![-1.0, 0.5]));
        let prob = ProxProblem::new(f, lambda, vec![ax, ay]).unwrap();
        let x = prox(&e, &prob, PROX_TOL).unwrap();
        prop_assert!(objective(&e, &prob, &x).to_f64() <= objective(&e, &prob, &vec![ax, ay]).to_f64() + 1e-12);
    }
}
