//! Proximal mappings of convex functionals.
//!
//! `Prox^λ_f a` minimises `h(x) = f(x) + d²(x, a)/(2λ)`, which is uniformly
//! convex and so has a unique minimiser. Indicators prox to projections and
//! `c·d²(·, p)` proxes to the point `W(a, p, μ/(1+μ))`, `μ = 2cλ`, since the
//! minimiser of a weighted sum of squared distances to two points lies on the
//! geodesic joining them. Everything else goes through nested golden-section
//! search over a bounded parameterization.

mod functional;
mod library;
mod parse;

use serde::Serialize;
use serde_json::json;

use crate::check::{run_check, AxiomReport, CheckId, Measurement};
use crate::error::{usage, Error, Result};
use crate::models::ModelSpace;
use crate::sampling::{rng_from_seed, uniform};
use crate::search::{minimize, Chart, SearchOptions, SearchRegion};
use crate::sets::{project, ConvexSet, SetSearch};
use crate::shadow::IterationTrace;
use crate::space::to_json;

pub use functional::{check_functional_convexity, check_properness, ExtReal, Functional};
pub use library::{functional_library, LibraryFunctional};
pub use parse::{describe_functional, parse_functional, PointLiteral, PointSyntax};

/// Default target accuracy of a prox in point distance.
pub const PROX_TOL: f64 = 1e-6;

/// Search options for proxes. When the inner minimiser of a nested search
/// sits on a kink or on the domain boundary, a parameter error `δ` shows up
/// as value noise of order `δ` in the outer line search and as an error of
/// order `√δ` in the outer coordinate, so the bracket is shrunk to near
/// machine precision.
pub fn prox_search_options() -> SearchOptions {
    SearchOptions { param_tol: 1e-14, ..SearchOptions::default() }
}

/// Membership tolerance of indicators during searches. A looser one lets
/// the search trade a slight exit from the set against the objective, which
/// in weakly convex geometries moves the minimiser far more than the exit.
pub const SEARCH_MEMBERSHIP_TOL: f64 = 1e-13;


#[derive(Clone, Debug)]
pub struct ProxProblem<P> {
    pub f: Functional<P>,
    pub lambda: f64,
    pub anchor: P,
    /// Where to search when `f` has no indicator to search along.
    pub region: Option<SearchRegion<P>>,
}

impl<P: Clone + Serialize + Send + Sync + 'static> ProxProblem<P> {
    pub fn new(f: Functional<P>, lambda: f64, anchor: P) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return usage(format!("lambda must be positive and finite, got {lambda}"));
        }
        Ok(Self { f, lambda, anchor, region: None })
    }

    pub fn with_region(mut self, region: SearchRegion<P>) -> Self {
        self.region = Some(region);
        self
    }
}

/// `f(x) + d²(x, a)/(2λ)`.
pub fn objective<S: ModelSpace + Clone + 'static>(model: &S, prob: &ProxProblem<S::Point>, x: &S::Point) -> ExtReal {
    prob.f.eval(model, x) + ExtReal::new(model.dist2(x, &prob.anchor) / (2.0 * prob.lambda))
}

/// The closed form of the prox, when `f` matches a known pattern.
pub fn prox_closed_form<S: ModelSpace + Clone + 'static>(model: &S, prob: &ProxProblem<S::Point>, tol: f64) -> Option<Result<S::Point>> {
    let a = &prob.anchor;
    match &prob.f {
        Functional::Indicator(s) => Some(project(model, s, a, tol)),
        Functional::Scale(_, g) if matches!(**g, Functional::Indicator(_)) => {
            let Functional::Indicator(s) = &**g else { unreachable!() };
            Some(project(model, s, a, tol))
        }
        Functional::SqDist(p) => Some(Ok(toward(model, a, p, 2.0 * prob.lambda))),
        Functional::Scale(c, g) => match &**g {
            Functional::SqDist(p) => Some(Ok(toward(model, a, p, 2.0 * c * prob.lambda))),
            _ => None,
        },
        _ => None,
    }
}

fn toward<S: ModelSpace + Clone + 'static>(model: &S, a: &S::Point, p: &S::Point, mu: f64) -> S::Point {
    model.geodesic(a, p, mu / (1.0 + mu))
}

/// `Prox^λ_f a`: closed form if available, else [`prox_by_search`].
pub fn prox<S: ModelSpace + Clone + 'static>(model: &S, prob: &ProxProblem<S::Point>, tol: f64) -> Result<S::Point> {
    match prox_closed_form(model, prob, tol) {
        Some(p) => p,
        None => prox_by_search(model, prob, tol),
    }
}

fn set_region<S: ModelSpace + Clone + 'static>(model: &S, set: &ConvexSet<S::Point>) -> SearchRegion<S::Point> {
    match &set.search {
        SetSearch::Segment { start, end } => {
            let (m, a, b) = (model.clone(), start.clone(), end.clone());
            SearchRegion::single(Chart::new(vec![0.0], vec![1.0], move |t| Some(m.geodesic(&a, &b, t[0]))).expect("unit interval"))
        }
        SetSearch::Ball { center, radius } => model.ball_region(center, *radius),
        SetSearch::Region(r) => r.clone(),
    }
}

/// The region searched for `prob`: the first indicator's own
/// parameterization, else the supplied region, else the ball around the
/// anchor that must contain the minimiser. Off the domain the objective is
/// `+∞`, which the line searches bracket around. As the library's functionals are
/// nonnegative, `d²(x*, a)/(2λ) ≤ h(x*) ≤ h(w)` for any `w`.
fn search_region<S: ModelSpace + Clone + 'static>(model: &S, prob: &ProxProblem<S::Point>, center: Option<&S::Point>) -> Result<SearchRegion<S::Point>> {
    if let Some(s) = prob.f.hard_constraints().first() {
        return Ok(set_region(model, s));
    }
    if let Some(r) = &prob.region {
        return Ok(r.clone());
    }
    if !prob.f.is_checked() {
        return usage("functional contains a custom term; supply a search region");
    }
    let w = prob
        .f
        .witness(model, &prob.anchor)
        .ok_or_else(|| Error::Input("no point with a finite value near the anchor".into()))?;
    let h = objective(model, prob, &w).to_f64();
    let radius = (2.0 * prob.lambda * h).sqrt() * 1.001 + 1e-9;
    let c = center.unwrap_or(&prob.anchor);
    Ok(model.ball_region(c, radius + model.dist(c, &prob.anchor)))
}

fn solve<S: ModelSpace + Clone + 'static>(
    model: &S,
    prob: &ProxProblem<S::Point>,
    region: &SearchRegion<S::Point>,
    opts: &SearchOptions,
) -> Result<S::Point> {
    let twice_lambda = 2.0 * prob.lambda;
    let h = |x: &S::Point| (prob.f.eval_at(model, x, SEARCH_MEMBERSHIP_TOL) + ExtReal::new(model.dist2(x, &prob.anchor) / twice_lambda)).to_f64();
    let best = minimize(region, &h, opts)?;
    let value = objective(model, prob, &best.point);
    if !value.is_finite() {
        return Err(Error::Solver {
            message: "no point with a finite objective found in the search region".into(),
            residual: best.value,
        });
    }
    Ok(best.point)
}

/// `Prox^λ_f a` by search, ignoring closed forms.
pub fn prox_by_search<S: ModelSpace + Clone + 'static>(model: &S, prob: &ProxProblem<S::Point>, _tol: f64) -> Result<S::Point> {
    let region = search_region(model, prob, None)?;
    solve(model, prob, &region, &prox_search_options())
}

/// A second, independent search: a different grid over a region centred at
/// a point of the domain instead of the anchor.
pub fn prox_second_start<S: ModelSpace + Clone + 'static>(model: &S, prob: &ProxProblem<S::Point>, _tol: f64) -> Result<S::Point> {
    let w = prob.f.witness(model, &prob.anchor);
    let region = search_region(model, prob, w.as_ref())?;
    let opts = SearchOptions { grid: 41, ..prox_search_options() };
    solve(model, prob, &region, &opts)
}

fn anchor_and_lambda<S: ModelSpace + Clone + 'static>(model: &S, rng: &mut crate::sampling::SimRng) -> (S::Point, f64) {
    let a = model.sample(rng);
    let lambda = 10f64.powf(uniform(rng, -1.0, 0.7));
    (a, lambda)
}

/// Search against the closed form for `f = ½d²(·, p)` at random `(a, p, λ)`.
pub fn check_prox_closed_form<S: ModelSpace + Clone + 'static>(model: &S, seed: u64, trials: usize, tol: f64) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    let report = run_check(CheckId::ProxClosedForm, seed, trials, tol, |rng| {
        let (a, lambda) = anchor_and_lambda(model, rng);
        let p = model.sample(rng);
        let prob = ProxProblem::new(Functional::half_sq_dist_to(p.clone()), lambda, a.clone()).ok()?;
        let closed = prox_closed_form(model, &prob, tol)?.ok()?;
        let inputs = json!({ "a": to_json(&a), "p": to_json(&p), "lambda": lambda });
        Some(match prox_by_search(model, &prob, tol) {
            Ok(x) => Measurement::eq(model.dist(&x, &closed), 0.0, inputs),
            Err(_) => Measurement::eq(f64::INFINITY, 0.0, inputs),
        })
    });
    Ok(report)
}

/// The searched prox of an indicator against the projection.
pub fn check_prox_indicator<S: ModelSpace + Clone + 'static>(
    model: &S,
    set: &ConvexSet<S::Point>,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    let f = Functional::indicator_of(set.clone().without_closed_form());
    Ok(run_check(CheckId::ProxIndicator, seed, trials, tol, |rng| {
        let (a, lambda) = anchor_and_lambda(model, rng);
        let inputs = json!({ "a": to_json(&a), "lambda": lambda });
        let prob = ProxProblem::new(f.clone(), lambda, a.clone()).ok()?;
        let (Ok(x), Ok(p)) = (prox_by_search(model, &prob, tol), project(model, set, &a, tol)) else {
            return Some(Measurement::eq(f64::INFINITY, 0.0, inputs));
        };
        Some(Measurement::eq(model.dist(&x, &p), 0.0, inputs))
    }))
}

/// Two independent searches agree within `2·tol`.
pub fn check_prox_uniqueness<S: ModelSpace + Clone + 'static>(
    model: &S,
    f: &Functional<S::Point>,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    Ok(run_check(CheckId::ProxUniqueness, seed, trials, 2.0 * tol, |rng| {
        let (a, lambda) = anchor_and_lambda(model, rng);
        let inputs = json!({ "a": to_json(&a), "lambda": lambda });
        let prob = ProxProblem::new(f.clone(), lambda, a).ok()?;
        Some(match (prox_by_search(model, &prob, tol), prox_second_start(model, &prob, tol)) {
            (Ok(x), Ok(y)) => Measurement::eq(model.dist(&x, &y), 0.0, inputs),
            _ => Measurement::eq(f64::INFINITY, 0.0, inputs),
        })
    }))
}

/// `Prox^λ_f a`, `Prox_{λf} a` and the searched argmin of
/// `f + d²(·, a)/(2λ)` coincide.
pub fn check_prox_order_lambda<S: ModelSpace + Clone + 'static>(
    model: &S,
    f: &Functional<S::Point>,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    Ok(run_check(CheckId::ProxOrderLambda, seed, trials, tol, |rng| {
        let (a, lambda) = anchor_and_lambda(model, rng);
        let inputs = json!({ "a": to_json(&a), "lambda": lambda });
        let order = ProxProblem::new(f.clone(), lambda, a.clone()).ok()?;
        let scaled = ProxProblem::new(Functional::scale(lambda, f.clone()).ok()?, 1.0, a).ok()?;
        let results = [prox(model, &order, tol), prox(model, &scaled, tol), prox_by_search(model, &order, tol)];
        let [Ok(x), Ok(y), Ok(z)] = results else {
            return Some(Measurement::eq(f64::INFINITY, 0.0, inputs));
        };
        let spread = model.dist(&x, &y).max(model.dist(&y, &z)).max(model.dist(&x, &z));
        Some(Measurement::eq(spread, 0.0, inputs))
    }))
}

/// `h(Prox a) ≤ h(x)` for `samples` points `x` near the anchor per trial.
pub fn check_prox_descent<S: ModelSpace + Clone + 'static>(
    model: &S,
    f: &Functional<S::Point>,
    seed: u64,
    trials: usize,
    samples: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    Ok(run_check(CheckId::ProxDescent, seed, trials, tol, |rng| {
        let (a, lambda) = anchor_and_lambda(model, rng);
        let inputs = json!({ "a": to_json(&a), "lambda": lambda });
        let prob = ProxProblem::new(f.clone(), lambda, a.clone()).ok()?;
        let Ok(x) = prox(model, &prob, tol) else {
            return Some(Measurement::le(f64::INFINITY, 0.0, inputs));
        };
        let hx = objective(model, &prob, &x).to_f64();
        let reach = model.dist(&a, &x) * 2.0 + 0.1;
        let mut best = f64::INFINITY;
        for _ in 0..samples {
            let y = model.sample_within(&x, reach, rng);
            best = best.min(objective(model, &prob, &y).to_f64());
        }
        Some(Measurement::le(hx, best, inputs))
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointEntry {
    pub candidate: serde_json::Value,
    /// `d(a, Prox_f a)`.
    pub fix_residual: f64,
    /// `f(a) − inf f`, with the infimum estimated by search.
    pub min_gap: f64,
    /// The gap below which the candidate counts as a minimiser.
    pub gap_tolerance: f64,
    pub is_fixed: bool,
    pub is_minimizer: bool,
    pub consistent: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointReport {
    pub check: CheckId,
    pub functional: String,
    pub tolerance: f64,
    pub infimum: f64,
    pub entries: Vec<FixedPointEntry>,
    pub violation_count: usize,
}

impl FixedPointReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

/// Checks that candidates are fixed points of `Prox_f` exactly when they
/// minimise `f`, at tolerance.
///
/// With `x* = Prox_f a` and `r = d(a, x*)`, `h(x*) ≤ h(a)` gives
/// `r ≤ √(2 (f(a) − inf f))`, and comparing `h(x*)` with `h` along the
/// geodesic from `x*` to any `x` gives `f(x*) − f(x) ≤ r d(x, x*)`. So a
/// fixed point at `tol` has gap at most `(L + D)·tol`, `L` a Lipschitz
/// bound of `f` near `a` (taken as twice the largest sampled difference
/// quotient) and `D` the distance to a minimiser, and a candidate with gap
/// below `tol²/2` has residual at most `tol`.
pub fn minimizer_fixed_point_check<S: ModelSpace + Clone + 'static>(
    model: &S,
    f: &Functional<S::Point>,
    candidates: &[S::Point],
    tol: f64,
) -> Result<FixedPointReport> {
    if candidates.is_empty() {
        return usage("no candidates");
    }
    let witness = candidates
        .iter()
        .find_map(|c| f.witness(model, c))
        .ok_or_else(|| Error::Input("functional is +inf at every candidate".into()))?;
    // f ≥ 0 bounds every minimiser by the sublevel set of the witness; the
    // search therefore covers a ball through all candidates and the witness.
    let reach = candidates.iter().map(|c| model.dist(c, &witness)).fold(0.0, f64::max);
    let region = match f.hard_constraints().first() {
        Some(s) => set_region(model, s),
        None => model.ball_region(&witness, reach + f.eval(model, &witness).to_f64() + 1.0),
    };
    let fine = SearchOptions { grid: 65, ..prox_search_options() };
    let minimizer = minimize(&region, &|x: &S::Point| f.eval_at(model, x, SEARCH_MEMBERSHIP_TOL).to_f64(), &fine)?;
    let infimum = f.eval(model, &minimizer.point).to_f64();
    if !infimum.is_finite() {
        return Err(Error::Solver { message: "infimum search found no finite value".into(), residual: minimizer.value });
    }
    let gap_floor = 0.5 * tol * tol;
    let mut rng = rng_from_seed(0);
    let mut entries = Vec::new();
    for a in candidates {
        let prob = ProxProblem::new(f.clone(), 1.0, a.clone())?;
        let x = prox(model, &prob, tol)?;
        let r = model.dist(a, &x);
        let fa = f.eval(model, a).to_f64();
        let min_gap = (fa - infimum).max(0.0);
        // local Lipschitz estimate from difference quotients around a
        let mut lip: f64 = 0.0;
        if fa.is_finite() {
            for _ in 0..200 {
                let y = model.sample_within(a, 0.1, &mut rng);
                if let Some(fy) = f.eval(model, &y).finite() {
                    let d = model.dist(a, &y);
                    if d > 0.0 {
                        lip = lip.max((fy - fa).abs() / d);
                    }
                }
            }
        }
        let reach = model.dist(&x, &minimizer.point) + tol;
        let gap_tolerance = (2.0 * lip + reach) * tol + 1e-9;
        let is_fixed = r <= tol;
        let is_minimizer = min_gap <= gap_tolerance;
        let consistent = (!is_fixed || is_minimizer) && (min_gap > gap_floor || r <= 2.0 * tol);
        entries.push(FixedPointEntry {
            candidate: to_json(a),
            fix_residual: r,
            min_gap,
            gap_tolerance,
            is_fixed,
            is_minimizer,
            consistent,
        });
    }
    let violation_count = entries.iter().filter(|e| !e.consistent).count();
    Ok(FixedPointReport {
        check: CheckId::MinimizerFixedPoint,
        functional: format!("{f:?}"),
        tolerance: tol,
        infimum,
        entries,
        violation_count,
    })
}

#[derive(Clone)]
pub struct ProxTrace<P> {
    pub trace: IterationTrace<P>,
    pub lambdas: Vec<f64>,
    /// `f(x_n)`.
    pub values: Vec<ExtReal>,
    /// `h_n(x_{n+1})`, the minimised objective of each step.
    pub h_values: Vec<ExtReal>,
    /// `d(x_n, x_{n+1})`.
    pub steps: Vec<f64>,
}

/// `x_{n+1} = Prox^{λ_n}_f x_n` for `horizon` steps.
pub fn proximal_point_iterate<S: ModelSpace + Clone + 'static>(
    model: &S,
    f: &Functional<S::Point>,
    lambdas: impl Fn(u64) -> f64,
    x0: S::Point,
    horizon: usize,
    tol: f64,
) -> Result<ProxTrace<S::Point>> {
    model.validate(&x0)?;
    let mut points = vec![x0];
    let (mut lams, mut h_values, mut steps) = (Vec::new(), Vec::new(), Vec::new());
    for n in 0..horizon {
        let lambda = lambdas(n as u64);
        let prob = ProxProblem::new(f.clone(), lambda, points[n].clone())?;
        let next = prox(model, &prob, tol).map_err(|e| match e {
            Error::Solver { message, residual } => Error::Solver { message: format!("step {n}: {message}"), residual },
            other => other,
        })?;
        h_values.push(objective(model, &prob, &next));
        steps.push(model.dist(&points[n], &next));
        lams.push(lambda);
        points.push(next);
    }
    let values = points.iter().map(|p| f.eval(model, p)).collect();
    Ok(ProxTrace { trace: IterationTrace::from_points(model, points)?, lambdas: lams, values, h_values, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{DiskPoint, Euclidean, PoincareDisk};
    use crate::space::GeodesicSpace;

    fn plane() -> Euclidean {
        Euclidean::new(2, 3.0).unwrap()
    }

    #[test]
    fn objective_of_primitives() {
        let e = plane();
        let ball = ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap();
        let prob = ProxProblem::new(Functional::indicator_of(ball), 2.0, vec![0.0, 3.0]).unwrap();
        assert_eq!(objective(&e, &prob, &vec![0.0, 1.0]), ExtReal::Finite(1.0));
        assert_eq!(objective(&e, &prob, &vec![0.0, 2.0]), ExtReal::PosInf);
        let prob = ProxProblem::new(Functional::half_sq_dist_to(vec![2.0, 0.0]), 1.0, vec![0.0, 0.0]).unwrap();
        assert!((objective(&e, &prob, &vec![1.0, 1.0]).to_f64() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn half_square_prox_moves_a_third_of_the_way() {
        let e = plane();
        let prob = ProxProblem::new(Functional::half_sq_dist_to(vec![2.0, 0.0]), 1.0, vec![0.0, 0.0]).unwrap();
        assert_eq!(prox(&e, &prob, PROX_TOL).unwrap(), vec![1.0, 0.0]);
        let x = prox_by_search(&e, &prob, PROX_TOL).unwrap();
        assert!(e.dist(&x, &vec![1.0, 0.0]) < 1e-8, "{x:?}");
    }

    #[test]
    fn indicator_prox_is_projection() {
        let e = plane();
        let ball = ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap();
        for lambda in [0.1, 1.0, 7.0] {
            let prob = ProxProblem::new(Functional::indicator_of(ball.clone().without_closed_form()), lambda, vec![0.0, 3.0]).unwrap();
            let x = prox(&e, &prob, PROX_TOL).unwrap();
            assert!(e.dist(&x, &vec![0.0, 1.0]) < 1e-8, "{x:?}");
        }
    }

    #[test]
    fn poincare_closed_form_matches_search() {
        let d = PoincareDisk::new(0.8).unwrap();
        let r = check_prox_closed_form(&d, 5, 30, 1e-6).unwrap();
        assert!(r.passed(), "{r:?}");
        let prob = ProxProblem::new(Functional::half_sq_dist_to(DiskPoint::new(0.5, 0.0)), 1.0, DiskPoint::new(-0.5, 0.0)).unwrap();
        let x = prox(&d, &prob, PROX_TOL).unwrap();
        assert!(x.x.abs() < 1e-12 && x.y.abs() < 1e-12, "{x:?}");
    }

    #[test]
    fn proximal_point_on_half_square_halves_the_distance() {
        let e = plane();
        let f = Functional::half_sq_dist_to(vec![1.0, 1.0]);
        let t = proximal_point_iterate(&e, &f, |_| 1.0, vec![-3.0, 1.0], 10, PROX_TOL).unwrap();
        for (n, s) in t.steps.iter().enumerate() {
            assert!((s - 2.0 * 0.5f64.powi(n as i32)).abs() < 1e-12);
        }
    }

    #[test]
    fn proximal_point_on_indicator_stops_after_one_step() {
        let e = plane();
        let ball = ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap();
        let t = proximal_point_iterate(&e, &Functional::indicator_of(ball), |_| 1.0, vec![3.0, 4.0], 5, PROX_TOL).unwrap();
        assert!(e.dist(&t.trace.points()[1], &vec![0.6, 0.8]) < 1e-15);
        assert!(t.steps[1..].iter().all(|s| *s == 0.0));
    }

    #[test]
    fn fixed_points_are_minimizers() {
        let e = plane();
        let p = vec![0.5, -0.5];
        let f = Functional::half_sq_dist_to(p.clone());
        let r = minimizer_fixed_point_check(&e, &f, &[p.clone(), vec![1.0, 1.0], vec![0.5, -0.4]], PROX_TOL).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.entries[0].is_fixed && r.entries[0].is_minimizer);
        assert!(!r.entries[1].is_fixed && !r.entries[1].is_minimizer);
        let g = Functional::dist_to(p.clone());
        let r = minimizer_fixed_point_check(&e, &g, &[p.clone(), vec![2.0, 0.0]], PROX_TOL).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.entries[0].is_fixed);
    }

    #[test]
    fn custom_terms_need_a_region() {
        let e = plane();
        let f = Functional::custom("zero", |_: &Vec<f64>| ExtReal::ZERO);
        let prob = ProxProblem::new(f, 1.0, vec![0.0, 0.0]).unwrap();
        assert!(matches!(prox(&e, &prob, PROX_TOL), Err(Error::Usage(_))));
        let prob = prob.with_region(e.ball_region(&vec![0.0, 0.0], 1.0));
        assert!(e.dist(&prox(&e, &prob, PROX_TOL).unwrap(), &vec![0.0, 0.0]) < 1e-8);
        assert!(ProxProblem::new(Functional::dist_to(vec![0.0, 0.0]), 0.0, vec![0.0, 0.0]).is_err());
    }
}
