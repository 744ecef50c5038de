//! Moduli of uniform convexity and of property (G).
//!
//! A monotone modulus of uniform convexity `η(r, ε)` bounds how far the
//! midpoint of two points of a ball of radius `r` that are at least `εr` apart
//! lies inside the ball. From it, [`psi_eta`] builds an explicit modulus of
//! uniform convexity for the squared distance ("property (G)"):
//!
//! ```text
//! d²((x+y)/2, a) ≤ ½d²(x,a) + ½d²(y,a) − ψ(r, ε)
//! whenever d(x,a) ≤ r, d(y,a) ≤ r, d(x,y) ≥ ε.
//! ```

use std::fmt;
use std::sync::Arc;

use serde_json::json;

use crate::check::{AxiomReport, CheckId, Measurement};
use crate::error::{usage, Error, Result};
use crate::models::ModelSpace;
use crate::sampling::{coin, run_trials, uniform, unit, SimRng};
use crate::space::{sample_weight, to_json};

/// Retry cap for the fixed-`(r, ε)` constrained sampler.
pub const SAMPLER_RETRIES: usize = 1000;

type ModulusFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// A monotone modulus of uniform convexity.
#[derive(Clone)]
pub enum UcModulus {
    /// `ε²/8`, valid in every CAT(0) space.
    Cat0,
    /// `1 − (1 − (ε/2)^p)^(1/p)`, Clarkson's modulus of `ℓ_p`, `p ≥ 2`.
    Clarkson { p: f64 },
    Custom { name: String, eval: ModulusFn, exceeds_unit: bool },
}

impl fmt::Debug for UcModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}

const GRID_R: [f64; 13] = [1e-3, 3e-3, 1e-2, 3e-2, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0, 300.0, 1e3];

fn eps_grid() -> impl Iterator<Item = f64> {
    (1..=40).map(|k| k as f64 * 0.05)
}

impl UcModulus {
    /// Wraps a user-supplied modulus after checking positivity and
    /// monotonicity in `r` on a grid. Non-monotone inputs are rejected.
    /// Values above 1 are accepted but flagged (see [`UcModulus::exceeds_unit`]).
    pub fn custom(name: impl Into<String>, eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let eval: ModulusFn = Arc::new(eval);
        let mut exceeds_unit = false;
        for eps in eps_grid() {
            let mut prev = f64::INFINITY;
            for r in GRID_R {
                let v = eval(r, eps);
                if !(v > 0.0) || !v.is_finite() {
                    return usage(format!("modulus must be positive and finite, got {v} at r={r}, eps={eps}"));
                }
                if v > prev * (1.0 + 1e-12) {
                    return usage(format!("modulus is not monotone in r at r={r}, eps={eps}"));
                }
                exceeds_unit |= v > 1.0;
                prev = v;
            }
        }
        Ok(UcModulus::Custom { name: name.into(), eval, exceeds_unit })
    }

    pub fn eval(&self, r: f64, eps: f64) -> f64 {
        match self {
            UcModulus::Cat0 => eps * eps / 8.0,
            UcModulus::Clarkson { p } => {
                let q = (eps / 2.0).powf(*p);
                // 1 − (1−q)^(1/p) without cancellation for small q
                -((1.0 / p) * (-q).ln_1p()).exp_m1()
            }
            UcModulus::Custom { eval, .. } => eval(r, eps),
        }
    }

    /// Whether the modulus was seen to exceed 1 somewhere on the check grid.
    pub fn exceeds_unit(&self) -> bool {
        matches!(self, UcModulus::Custom { exceeds_unit: true, .. })
    }

    pub fn describe(&self) -> String {
        match self {
            UcModulus::Cat0 => "eps^2/8".to_string(),
            UcModulus::Clarkson { p } => format!("1-(1-(eps/2)^{p})^(1/{p})"),
            UcModulus::Custom { name, .. } => name.clone(),
        }
    }

    /// Grid check of `s ≤ r ⟹ η(r,ε) ≤ η(s,ε)`.
    pub fn is_monotone_on_grid(&self) -> bool {
        eps_grid().all(|eps| GRID_R.windows(2).all(|w| self.eval(w[1], eps) <= self.eval(w[0], eps) * (1.0 + 1e-12)))
    }
}

/// Property-(G) modulus `ψ(r, ε)` from the closed form built on `η`.
pub fn psi_eta(eta: &UcModulus, r: f64, eps: f64) -> Result<f64> {
    if !(r > 0.0) || !(eps > 0.0) {
        return usage(format!("psi_eta needs r > 0 and eps > 0, got r={r}, eps={eps}"));
    }
    Ok(psi_eta_unchecked(eta, r, eps))
}

pub(crate) fn psi_eta_unchecked(eta: &UcModulus, r: f64, eps: f64) -> f64 {
    let e = eta.eval(r, (eps / (2.0 * r)).min(2.0));
    let e2 = e * e;
    let inner = (eps / 2.0).min(eps * eps / (96.0 * r) * e2);
    (inner * inner / 4.0).min(eps * eps / 32.0 * e2)
}

/// Property-(G) modulus `ε²/4` of CAT(0) spaces; `r` is unused.
pub fn psi_cat0_direct(_r: f64, eps: f64) -> f64 {
    eps * eps / 4.0
}

#[derive(Clone, Debug)]
pub enum PropertyGModulus {
    Derived(UcModulus),
    Cat0Direct,
}

impl PropertyGModulus {
    pub fn for_model<S: ModelSpace>(model: &S) -> Self {
        PropertyGModulus::Derived(model.modulus())
    }

    pub fn eval(&self, r: f64, eps: f64) -> f64 {
        match self {
            PropertyGModulus::Derived(eta) => psi_eta_unchecked(eta, r, eps),
            PropertyGModulus::Cat0Direct => psi_cat0_direct(r, eps),
        }
    }

    pub fn provenance(&self) -> &'static str {
        match self {
            PropertyGModulus::Derived(_) => "derived",
            PropertyGModulus::Cat0Direct => "cat0_direct",
        }
    }
}

/// How constrained `(a, x, y, r, ε)` tuples are drawn.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstraintSampling {
    /// Draw `a, x, y` first, then `r ≥ max(d(x,a), d(y,a))` and
    /// `ε ∈ (0, d(x,y)]`; half of the draws are tight on each constraint.
    Derived,
    /// Fixed `r` and `ε`: draw `x, y` in the ball of radius `r` around `a` and
    /// reject until `d(x,y) ≥ ε`, at most [`SAMPLER_RETRIES`] times.
    Fixed { r: f64, eps: f64 },
}

#[derive(Clone, Debug)]
pub struct ConstrainedTuple<P> {
    pub a: P,
    pub x: P,
    pub y: P,
    pub r: f64,
    pub eps: f64,
}

/// Draws `(a, x, y, r, ε)` with `d(x,a) ≤ r`, `d(y,a) ≤ r`, `d(x,y) ≥ ε > 0`.
pub fn sample_constrained<S: ModelSpace>(
    model: &S,
    mode: ConstraintSampling,
    rng: &mut SimRng,
) -> Result<ConstrainedTuple<S::Point>> {
    match mode {
        ConstraintSampling::Derived => {
            for _ in 0..SAMPLER_RETRIES {
                let a = model.sample(rng);
                let x = model.sample(rng);
                let y = if coin(rng, 0.5) {
                    let rx = model.dist(&x, &a);
                    model.sample_within(&a, rx, rng)
                } else {
                    model.sample(rng)
                };
                let dxy = model.dist(&x, &y);
                if !(dxy > 0.0) {
                    continue;
                }
                let rmax = model.dist(&x, &a).max(model.dist(&y, &a));
                let r = if coin(rng, 0.5) { rmax } else { rmax * uniform(rng, 1.0, 1.5) };
                let eps = if coin(rng, 0.5) { dxy } else { dxy * (1.0 - unit(rng)) };
                if r > 0.0 && eps > 0.0 {
                    return Ok(ConstrainedTuple { a, x, y, r, eps });
                }
            }
            Err(Error::Sampling { attempts: SAMPLER_RETRIES, reason: "no nondegenerate tuple".into() })
        }
        ConstraintSampling::Fixed { r, eps } => {
            if !(r > 0.0) || !(eps > 0.0) {
                return usage(format!("constrained sampling needs r > 0 and eps > 0, got r={r}, eps={eps}"));
            }
            let a = model.sample(rng);
            for _ in 0..SAMPLER_RETRIES {
                let x = model.sample_within(&a, r, rng);
                let y = model.sample_within(&a, r, rng);
                let ok = model.dist(&x, &y) >= eps && model.dist(&x, &a) <= r && model.dist(&y, &a) <= r;
                if ok {
                    return Ok(ConstrainedTuple { a, x, y, r, eps });
                }
            }
            Err(Error::Sampling {
                attempts: SAMPLER_RETRIES,
                reason: format!("infeasible request r={r}, eps={eps}"),
            })
        }
    }
}

fn collect_report(
    check: CheckId,
    tol: f64,
    outcomes: Vec<Result<Option<Measurement>>>,
) -> Result<AxiomReport> {
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(AxiomReport::from_measurements(check, tol, outcomes))
}

fn tuple_json<P: serde::Serialize>(t: &ConstrainedTuple<P>) -> serde_json::Value {
    json!({ "a": to_json(&t.a), "x": to_json(&t.x), "y": to_json(&t.y), "r": t.r, "eps": t.eps })
}

/// Samples the property-(G) inequality with modulus `psi`.
pub fn check_property_g<S: ModelSpace>(
    model: &S,
    psi: &PropertyGModulus,
    mode: ConstraintSampling,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    if matches!(psi, PropertyGModulus::Cat0Direct) && !model.is_cat0() {
        return usage(format!("the CAT(0) modulus eps^2/4 does not apply to {}", model.name()));
    }
    let outcomes = run_trials(seed, trials, |_, rng| {
        let t = sample_constrained(model, mode, rng)?;
        let m = model.midpoint(&t.x, &t.y);
        let lhs = model.dist2(&m, &t.a);
        let rhs = 0.5 * model.dist2(&t.x, &t.a) + 0.5 * model.dist2(&t.y, &t.a) - psi.eval(t.r, t.eps);
        Ok(Some(Measurement::le(lhs, rhs, tuple_json(&t))))
    });
    collect_report(CheckId::PropertyG, tol, outcomes)
}

/// Samples the λ-weighted uniform convexity of `d²(·, a)` in both its
/// `2 min(λ, 1−λ)` and `2λ(1−λ)` forms, and the midpoint chain used to derive
/// it. Returns three reports in that order.
pub fn check_lambda_convexity<S: ModelSpace>(
    model: &S,
    mode: ConstraintSampling,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<Vec<AxiomReport>> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    let eta = model.modulus();
    let outcomes = run_trials(seed, trials, |_, rng| {
        let t = sample_constrained(model, mode, rng)?;
        let lam = sample_weight(rng);
        let psi = psi_eta_unchecked(&eta, t.r, t.eps);
        let z = model.geodesic(&t.x, &t.y, lam);
        let lhs = model.dist2(&z, &t.a);
        let base = (1.0 - lam) * model.dist2(&t.x, &t.a) + lam * model.dist2(&t.y, &t.a);
        let mut inputs = tuple_json(&t);
        inputs["lam"] = json!(lam);
        let strong = Measurement::le(lhs, base - 2.0 * lam.min(1.0 - lam) * psi, inputs.clone());
        let weak = Measurement::le(lhs, base - 2.0 * lam * (1.0 - lam) * psi, inputs.clone());
        // the chain is stated for λ ≤ 1/2; use the mirrored pair otherwise
        let (near, far, mu) = if lam <= 0.5 { (&t.x, &t.y, lam) } else { (&t.y, &t.x, 1.0 - lam) };
        let m = model.midpoint(near, far);
        let chain = Measurement::le(
            lhs,
            (1.0 - 2.0 * mu) * model.dist2(near, &t.a) + 2.0 * mu * model.dist2(&m, &t.a),
            inputs,
        );
        Ok([strong, weak, chain])
    });
    let outcomes = outcomes.into_iter().collect::<Result<Vec<_>>>()?;
    let mut columns: [Vec<Option<Measurement>>; 3] = Default::default();
    for row in outcomes {
        for (col, m) in columns.iter_mut().zip(row) {
            col.push(Some(m));
        }
    }
    let [strong, weak, chain] = columns;
    Ok(vec![
        AxiomReport::from_measurements(CheckId::LambdaConvexity, tol, strong),
        AxiomReport::from_measurements(CheckId::LambdaConvexityWeak, tol, weak),
        AxiomReport::from_measurements(CheckId::MidpointChain, tol, chain),
    ])
}

/// Samples the defining inequality of the model's modulus of uniform
/// convexity: `d(m, a) ≤ (1 − η(r, ε)) r` for `d(x,a), d(y,a) ≤ r`,
/// `d(x,y) ≥ εr`.
pub fn check_uniform_convexity<S: ModelSpace>(model: &S, seed: u64, trials: usize, tol: f64) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    let eta = model.modulus();
    let outcomes = run_trials(seed, trials, |_, rng| {
        let t = sample_constrained(model, ConstraintSampling::Derived, rng)?;
        let dxy = model.dist(&t.x, &t.y);
        let eps = (dxy / t.r).min(2.0) * if coin(rng, 0.5) { 1.0 } else { 1.0 - unit(rng) };
        if !(eps > 0.0) {
            return Ok(None);
        }
        let m = model.midpoint(&t.x, &t.y);
        let lhs = model.dist(&m, &t.a);
        let rhs = (1.0 - eta.eval(t.r, eps)) * t.r;
        let mut inputs = tuple_json(&t);
        inputs["eps"] = json!(eps);
        Ok(Some(Measurement::le(lhs, rhs, inputs)))
    });
    collect_report(CheckId::UniformConvexity, tol, outcomes)
}
