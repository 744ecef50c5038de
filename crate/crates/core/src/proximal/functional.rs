//! Proper convex lower semicontinuous functionals built from a closed set of
//! primitives, valued in the extended reals.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::sync::Arc;

use serde::{Serialize, Serializer};
use serde_json::json;

use crate::check::{run_check, AxiomReport, CheckId, Measurement};
use crate::error::{usage, Error, Result};
use crate::models::ModelSpace;
use crate::sampling::{rng_from_seed, SimRng};
use crate::sets::{project, ConvexSet, SetSearch};
use crate::space::{sample_partner, sample_weight, to_json, GeodesicSpace};

/// A value in `ℝ ∪ {+∞}`. `+∞` absorbs addition and nonnegative scaling,
/// including `0 · (+∞) = +∞`, so scaling never enlarges a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// `+∞` and NaN map to `PosInf`.
    pub fn new(v: f64) -> Self {
        if v.is_nan() || v == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// The value as an `f64`, `+∞` for `PosInf`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn scale(self, c: f64) -> Self {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(c * v),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        match self {
            ExtReal::Finite(v) => s.serialize_f64(*v),
            ExtReal::PosInf => s.serialize_str("+inf"),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

type CustomEval<P> = Arc<dyn Fn(&P) -> ExtReal + Send + Sync>;

/// Expression tree of a functional. Every primitive except `Custom` is
/// nonnegative, convex along geodesics and lower semicontinuous.
#[derive(Clone)]
pub enum Functional<P> {
    /// `d²(·, p)`.
    SqDist(P),
    /// `d(·, p)`.
    Dist(P),
    /// `0` on the set, `+∞` off it.
    Indicator(ConvexSet<P>),
    /// `c · f`, `c ≥ 0`.
    Scale(f64, Box<Functional<P>>),
    Sum(Box<Functional<P>>, Box<Functional<P>>),
    Max(Box<Functional<P>>, Box<Functional<P>>),
    /// A user-supplied function; convexity is not guaranteed.
    Custom { name: String, eval: CustomEval<P> },
}

impl<P> fmt::Debug for Functional<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Functional::SqDist(_) => f.write_str("SqDist"),
            Functional::Dist(_) => f.write_str("Dist"),
            Functional::Indicator(s) => write!(f, "Indicator({})", s.label),
            Functional::Scale(c, g) => write!(f, "Scale({c}, {g:?})"),
            Functional::Sum(a, b) => write!(f, "Sum({a:?}, {b:?})"),
            Functional::Max(a, b) => write!(f, "Max({a:?}, {b:?})"),
            Functional::Custom { name, .. } => write!(f, "Custom({name})"),
        }
    }
}

impl<P: Clone + Serialize + Send + Sync + 'static> Functional<P> {
    pub fn half_sq_dist_to(p: P) -> Self {
        Functional::Scale(0.5, Box::new(Functional::SqDist(p)))
    }

    pub fn dist_to(p: P) -> Self {
        Functional::Dist(p)
    }

    pub fn indicator_of(set: ConvexSet<P>) -> Self {
        Functional::Indicator(set)
    }

    pub fn scale(c: f64, f: Self) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return usage(format!("scale factor must be finite and nonnegative, got {c}"));
        }
        Ok(Functional::Scale(c, Box::new(f)))
    }

    pub fn sum(f: Self, g: Self) -> Self {
        Functional::Sum(Box::new(f), Box::new(g))
    }

    pub fn max(f: Self, g: Self) -> Self {
        Functional::Max(Box::new(f), Box::new(g))
    }

    pub fn custom(name: impl Into<String>, eval: impl Fn(&P) -> ExtReal + Send + Sync + 'static) -> Self {
        Functional::Custom { name: name.into(), eval: Arc::new(eval) }
    }

    /// False when the expression contains a user-supplied function, whose
    /// convexity and lower semicontinuity the library cannot vouch for.
    pub fn is_checked(&self) -> bool {
        match self {
            Functional::Custom { .. } => false,
            Functional::Scale(_, g) => g.is_checked(),
            Functional::Sum(a, b) | Functional::Max(a, b) => a.is_checked() && b.is_checked(),
            _ => true,
        }
    }

    /// `f(x)`, with set membership tested at the model's tolerance.
    pub fn eval<S: GeodesicSpace<Point = P>>(&self, model: &S, x: &P) -> ExtReal {
        self.eval_at(model, x, model.tolerance())
    }

    /// `f(x)`, with set membership tested at `membership_tol`.
    pub fn eval_at<S: GeodesicSpace<Point = P>>(&self, model: &S, x: &P, membership_tol: f64) -> ExtReal {
        match self {
            Functional::SqDist(p) => ExtReal::new(model.dist2(x, p)),
            Functional::Dist(p) => ExtReal::new(model.dist(x, p)),
            Functional::Indicator(s) => {
                if s.contains(x, membership_tol) {
                    ExtReal::ZERO
                } else {
                    ExtReal::PosInf
                }
            }
            Functional::Scale(c, g) => g.eval_at(model, x, membership_tol).scale(*c),
            Functional::Sum(a, b) => a.eval_at(model, x, membership_tol) + b.eval_at(model, x, membership_tol),
            Functional::Max(a, b) => a.eval_at(model, x, membership_tol).max(b.eval_at(model, x, membership_tol)),
            Functional::Custom { eval, .. } => eval(x),
        }
    }

    /// The indicator sets reached through sums, maxima and scalings; the
    /// domain of the functional lies in all of them.
    pub(crate) fn hard_constraints(&self) -> Vec<&ConvexSet<P>> {
        match self {
            Functional::Indicator(s) => vec![s],
            Functional::Scale(_, g) => g.hard_constraints(),
            Functional::Sum(a, b) | Functional::Max(a, b) => {
                let mut v = a.hard_constraints();
                v.extend(b.hard_constraints());
                v
            }
            _ => Vec::new(),
        }
    }

    /// A point near `near` where the functional is finite, if one is found.
    pub fn witness<S: GeodesicSpace<Point = P>>(&self, model: &S, near: &P) -> Option<P> {
        let mut candidates = vec![near.clone()];
        for s in self.hard_constraints() {
            if let Ok(p) = project(model, s, near, model.tolerance()) {
                candidates.push(p);
            }
        }
        candidates.into_iter().find(|p| self.eval(model, p).is_finite())
    }

    /// Renders the expression in the grammar accepted by
    /// [`parse_functional`](super::parse_functional).
    pub fn describe(&self, point: &dyn Fn(&P) -> String) -> String {
        match self {
            Functional::SqDist(p) => format!("sqdist({})", point(p)),
            Functional::Dist(p) => format!("dist({})", point(p)),
            Functional::Indicator(s) => format!("indicator({})", describe_set(s, point)),
            Functional::Scale(c, g) => format!("scale({c}, {})", g.describe(point)),
            Functional::Sum(a, b) => format!("sum({}, {})", a.describe(point), b.describe(point)),
            Functional::Max(a, b) => format!("max({}, {})", a.describe(point), b.describe(point)),
            Functional::Custom { name, .. } => format!("custom({name})"),
        }
    }
}

pub(crate) fn describe_set<P>(s: &ConvexSet<P>, point: &dyn Fn(&P) -> String) -> String {
    match &s.search {
        SetSearch::Ball { center, radius } => format!("ball({}, {radius})", point(center)),
        SetSearch::Segment { start, end } => format!("segment({}, {})", point(start), point(end)),
        SetSearch::Region(_) => s.label.clone(),
    }
}

/// Properness: some sampled point, or the functional's own witness near the
/// sampling origin, has a finite value.
pub fn check_properness<S: ModelSpace + Clone + 'static>(model: &S, f: &Functional<S::Point>, seed: u64, trials: usize) -> Result<S::Point> {
    let mut rng = rng_from_seed(seed);
    let origin = model.sample(&mut rng);
    if let Some(w) = f.witness(model, &origin) {
        return Ok(w);
    }
    for _ in 0..trials {
        let x = model.sample(&mut rng);
        if f.eval(model, &x).is_finite() {
            return Ok(x);
        }
    }
    Err(Error::Input("functional is +inf at every sampled point".into()))
}

fn sample_in_domain<S: ModelSpace + Clone + 'static>(model: &S, f: &Functional<S::Point>, rng: &mut SimRng) -> Option<S::Point> {
    let x = model.sample(rng);
    f.witness(model, &x)
}

/// `f(W(x, y, λ)) ≤ (1 − λ) f(x) + λ f(y)` on pairs with both values finite.
pub fn check_functional_convexity<S: ModelSpace + Clone + 'static>(
    model: &S,
    f: &Functional<S::Point>,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    Ok(run_check(CheckId::FunctionalConvexity, seed, trials, tol, |rng| {
        let x = sample_in_domain(model, f, rng)?;
        let y = f.witness(model, &sample_partner(model, &x, rng))?;
        let lam = sample_weight(rng);
        let (fx, fy) = (f.eval(model, &x).finite()?, f.eval(model, &y).finite()?);
        let z = model.geodesic(&x, &y, lam);
        let scale = 1.0 + fx.abs().max(fy.abs());
        Some(Measurement::le(
            f.eval(model, &z).to_f64() / scale,
            ((1.0 - lam) * fx + lam * fy) / scale,
            json!({ "x": to_json(&x), "y": to_json(&y), "lambda": lam }),
        ))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Euclidean;

    #[test]
    fn infinity_absorbs() {
        let inf = ExtReal::PosInf;
        assert_eq!(inf + ExtReal::Finite(-3.0), inf);
        assert_eq!(inf.scale(0.0), inf);
        assert!(inf > ExtReal::Finite(1e300));
        assert_eq!(ExtReal::new(f64::NAN), inf);
        assert_eq!(serde_json::to_string(&inf).unwrap(), "\"+inf\"");
    }

    #[test]
    fn primitives_evaluate() {
        let e = Euclidean::new(2, 3.0).unwrap();
        let f = Functional::sum(
            Functional::half_sq_dist_to(vec![1.0, 0.0]),
            Functional::indicator_of(ConvexSet::ball(&e, vec![0.0, 0.0], 1.0).unwrap()),
        );
        assert_eq!(f.eval(&e, &vec![0.0, 0.0]), ExtReal::Finite(0.5));
        assert_eq!(f.eval(&e, &vec![0.0, 2.0]), ExtReal::PosInf);
        let g = Functional::max(Functional::dist_to(vec![0.0, 0.0]), Functional::dist_to(vec![4.0, 0.0]));
        assert_eq!(g.eval(&e, &vec![1.0, 0.0]), ExtReal::Finite(3.0));
        assert!(f.is_checked());
        assert!(!Functional::<Vec<f64>>::custom("c", |_| ExtReal::ZERO).is_checked());
    }

    #[test]
    fn library_shapes_are_convex() {
        let e = Euclidean::new(2, 3.0).unwrap();
        let f = Functional::max(
            Functional::half_sq_dist_to(vec![1.0, 0.0]),
            Functional::sum(
                Functional::dist_to(vec![-1.0, 1.0]),
                Functional::indicator_of(ConvexSet::ball(&e, vec![0.0, 0.0], 2.0).unwrap()),
            ),
        );
        let r = check_functional_convexity(&e, &f, 3, 2000, 1e-9).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.evaluated() > 1000);
    }

    #[test]
    fn nonconvex_custom_is_caught() {
        let e = Euclidean::new(1, 3.0).unwrap();
        let f = Functional::custom("-x^2", |x: &Vec<f64>| ExtReal::Finite(-x[0] * x[0]));
        assert!(!check_functional_convexity(&e, &f, 3, 500, 1e-9).unwrap().passed());
    }
}
