//! Geodesic spaces with a convexity operator `W` and the sampled verification
//! of the W-hyperbolic axioms.
//!
//! A space supplies a metric `dist` and `geodesic(x, y, λ)`, the point
//! `W(x, y, λ)` at fraction `λ` of the way from `x` to `y`. Everything else in
//! the crate is written against this trait.

use std::fmt::Debug;

use serde::Serialize;
use serde_json::{json, Value};

use crate::check::{run_check, AxiomReport, CheckId, Measurement};
use crate::error::{usage, Result};
use crate::sampling::{coin, derive_seed, unit, SimRng, DEGENERATE_RATE};

/// Tolerance for models whose operations are free of transcendental functions.
pub const TOL_EXACT: f64 = 1e-9;
/// Tolerance for models evaluated through `acosh`, `tanh` and Möbius maps.
pub const TOL_TRANSCENDENTAL: f64 = 1e-7;

pub trait GeodesicSpace: Send + Sync {
    type Point: Clone + Debug + PartialEq + Serialize + Send + Sync + 'static;

    fn name(&self) -> String;

    fn dist(&self, x: &Self::Point, y: &Self::Point) -> f64;

    /// `W(x, y, lam)`; `lam` is assumed to lie in `[0, 1]`. Must return `x`
    /// for `lam == 0` and `y` for `lam == 1`.
    fn geodesic(&self, x: &Self::Point, y: &Self::Point, lam: f64) -> Self::Point;

    /// Checks the representation invariants of a point of this space.
    fn validate(&self, p: &Self::Point) -> Result<()>;

    /// Draws a point from the model's bounded sampling region.
    fn sample(&self, rng: &mut SimRng) -> Self::Point;

    /// Draws a point at distance at most `radius` from `center`.
    fn sample_within(&self, center: &Self::Point, radius: f64, rng: &mut SimRng) -> Self::Point;

    /// Numerical tolerance appropriate for identities in this model.
    fn tolerance(&self) -> f64;

    /// Validated `W(x, y, lam)`.
    fn combine(&self, x: &Self::Point, y: &Self::Point, lam: f64) -> Result<Self::Point> {
        if !(0.0..=1.0).contains(&lam) {
            return usage(format!("combination weight {lam} outside [0, 1]"));
        }
        self.validate(x)?;
        self.validate(y)?;
        Ok(self.geodesic(x, y, lam))
    }

    fn midpoint(&self, x: &Self::Point, y: &Self::Point) -> Self::Point {
        self.geodesic(x, y, 0.5)
    }

    fn dist2(&self, x: &Self::Point, y: &Self::Point) -> f64 {
        let d = self.dist(x, y);
        d * d
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).unwrap_or(Value::Null)
}

/// Samples `y` as an independent point, or as `x` itself at the degenerate rate.
pub fn sample_partner<S: GeodesicSpace>(space: &S, x: &S::Point, rng: &mut SimRng) -> S::Point {
    if coin(rng, DEGENERATE_RATE) {
        x.clone()
    } else {
        space.sample(rng)
    }
}

/// Weight in `[0, 1]`, hitting each endpoint exactly with small probability.
pub fn sample_weight(rng: &mut SimRng) -> f64 {
    let u = unit(rng);
    if u < 0.01 {
        0.0
    } else if u < 0.02 {
        1.0
    } else {
        unit(rng)
    }
}

/// Samples every W-hyperbolic axiom, the metric axioms, convexity of the
/// squared distance and geodesic consistency.
pub fn check_axioms<S: GeodesicSpace>(space: &S, seed: u64, trials: usize, tol: f64) -> Result<Vec<AxiomReport>> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    let checks = [
        CheckId::Metric,
        CheckId::W1,
        CheckId::W2,
        CheckId::W3,
        CheckId::W4,
        CheckId::W5,
        CheckId::SquaredConvexity,
        CheckId::GeodesicConsistency,
    ];
    Ok(checks
        .iter()
        .enumerate()
        .map(|(k, &check)| {
            run_check(check, derive_seed(seed, k as u64 + 1), trials, tol, |rng| {
                Some(axiom_trial(space, check, rng))
            })
        })
        .collect())
}

fn axiom_trial<S: GeodesicSpace>(space: &S, check: CheckId, rng: &mut SimRng) -> Measurement {
    let x = space.sample(rng);
    let y = sample_partner(space, &x, rng);
    let lam = sample_weight(rng);
    let d = |a: &S::Point, b: &S::Point| space.dist(a, b);
    let w = |a: &S::Point, b: &S::Point, t: f64| space.geodesic(a, b, t);
    match check {
        CheckId::Metric => {
            let z = space.sample(rng);
            let inputs = json!({ "x": to_json(&x), "y": to_json(&y), "z": to_json(&z) });
            let symmetry = Measurement::eq(d(&x, &y), d(&y, &x), inputs.clone());
            let identity = Measurement::eq(d(&x, &x), 0.0, inputs.clone());
            let nonneg = Measurement::le(-d(&x, &y), 0.0, inputs.clone());
            let triangle = Measurement::le(d(&x, &z), d(&x, &y) + d(&y, &z), inputs);
            symmetry.worst(identity).worst(nonneg).worst(triangle)
        }
        CheckId::W1 => {
            let z = space.sample(rng);
            let lhs = d(&z, &w(&x, &y, lam));
            let rhs = (1.0 - lam) * d(&z, &x) + lam * d(&z, &y);
            Measurement::le(lhs, rhs, json!({ "x": to_json(&x), "y": to_json(&y), "z": to_json(&z), "lam": lam }))
        }
        CheckId::W2 => {
            let mu = sample_weight(rng);
            let lhs = d(&w(&x, &y, lam), &w(&x, &y, mu));
            let rhs = (lam - mu).abs() * d(&x, &y);
            Measurement::eq(lhs, rhs, json!({ "x": to_json(&x), "y": to_json(&y), "lam": lam, "mu": mu }))
        }
        CheckId::W3 => {
            let lhs = d(&w(&x, &y, lam), &w(&y, &x, 1.0 - lam));
            Measurement::le(lhs, 0.0, json!({ "x": to_json(&x), "y": to_json(&y), "lam": lam }))
        }
        CheckId::W4 => {
            let z = space.sample(rng);
            let v = space.sample(rng);
            let lhs = d(&w(&x, &z, lam), &w(&y, &v, lam));
            let rhs = (1.0 - lam) * d(&x, &y) + lam * d(&z, &v);
            Measurement::le(
                lhs,
                rhs,
                json!({ "x": to_json(&x), "y": to_json(&y), "z": to_json(&z), "w": to_json(&v), "lam": lam }),
            )
        }
        CheckId::W5 => {
            let z = space.sample(rng);
            let lhs = d(&w(&x, &z, lam), &w(&y, &z, lam));
            Measurement::le(lhs, d(&x, &y), json!({ "x": to_json(&x), "y": to_json(&y), "z": to_json(&z), "lam": lam }))
        }
        CheckId::SquaredConvexity => {
            let a = space.sample(rng);
            let lhs = space.dist2(&w(&x, &y, lam), &a);
            let rhs = (1.0 - lam) * space.dist2(&x, &a) + lam * space.dist2(&y, &a);
            Measurement::le(lhs, rhs, json!({ "x": to_json(&x), "y": to_json(&y), "a": to_json(&a), "lam": lam }))
        }
        CheckId::GeodesicConsistency => {
            let p = w(&x, &y, lam);
            let inputs = json!({ "x": to_json(&x), "y": to_json(&y), "lam": lam });
            let head = Measurement::eq(d(&x, &p), lam * d(&x, &y), inputs.clone());
            let tail = Measurement::eq(d(&p, &y), (1.0 - lam) * d(&x, &y), inputs);
            head.worst(tail)
        }
        other => unreachable!("{} is not an axiom check", other.name()),
    }
}
