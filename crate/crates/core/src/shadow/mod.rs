//! Mann and Schu iterations and metastability of their shadows.
//!
//! For a trace `(x_n)` that is Fejér monotone with respect to a closed
//! convex set `S`, the shadow sequence `P_S x_n` is Cauchy with rate
//! `g̃^(⌈b²/ψ(b,ε)⌉)(0)`, where `b ≥ d(x₀, P_S x₀)` and `ψ` is the
//! property-(G) modulus built from `η`. With summable errors
//! `d(x_{n+1}, q) ≤ d(x_n, q) + δ_n`, `Σδ_n ≤ B`, the rate becomes
//! `(g^M)~^(⌈2C/ψ(C,ε)⌉)(γ(ψ(C,ε)/(4C)))` with `C = 2b + 3B`.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;
use serde_json::Value;

use crate::error::{usage, Error, Result};
use crate::fixpoint::MappingSpec;
use crate::models::ModelSpace;
use crate::moduli::psi_eta;
use crate::rates::{
    ceil_count, iterate, metastable_search, CounterFn, ErrorSeq, MetastabilityReport, WindowVerdict, INDEX_CAP,
};
use crate::sampling::rng_from_seed;
use crate::sets::{project, ConvexSet};
use crate::space::GeodesicSpace;

mod scenarios;

pub use scenarios::{run_scenarios, scenario_names, ScenarioConfig, ScenarioOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// `x_{n+1} = W(x_n, T x_n, α_n)`.
    Mann,
    /// `x_{n+1} = W(x_n, Tⁿ x_n, α_n)`.
    Schu,
    Custom,
}

type Stepper<P> = Arc<dyn Fn(u64, &P) -> (f64, P) + Send + Sync>;

/// A materialised prefix of an iteration, extendable on demand when built
/// from a step rule.
#[derive(Clone)]
pub struct IterationTrace<P> {
    pub scheme: Scheme,
    points: Vec<P>,
    alphas: Vec<f64>,
    step: Option<Stepper<P>>,
    pub errors: Option<ErrorSeq>,
    witnesses: Vec<P>,
    /// `max_q d(x_{n+1}, q) − d(x_n, q)` over the witnesses, per step.
    fejer_residuals: Vec<f64>,
    dist: Arc<dyn Fn(&P, &P) -> f64 + Send + Sync>,
}

impl<P: Clone + Send + Sync + 'static> IterationTrace<P> {
    /// A fixed list of points, not extendable.
    pub fn from_points<S: GeodesicSpace<Point = P> + Clone + 'static>(model: &S, points: Vec<P>) -> Result<Self> {
        if points.is_empty() {
            return usage("a trace needs at least one point");
        }
        let m = model.clone();
        Ok(Self {
            scheme: Scheme::Custom,
            alphas: vec![f64::NAN; points.len() - 1],
            points,
            step: None,
            errors: None,
            witnesses: Vec::new(),
            fejer_residuals: Vec::new(),
            dist: Arc::new(move |a, b| m.dist(a, b)),
        })
        .map(|mut t: Self| {
            t.recompute_residuals();
            t
        })
    }

    /// A trace driven by `step(n, x_n) = (α_n, x_{n+1})`.
    pub fn from_step<S: GeodesicSpace<Point = P> + Clone + 'static>(
        model: &S,
        scheme: Scheme,
        x0: P,
        step: impl Fn(u64, &P) -> (f64, P) + Send + Sync + 'static,
        witnesses: Vec<P>,
    ) -> Self {
        let m = model.clone();
        Self {
            scheme,
            points: vec![x0],
            alphas: Vec::new(),
            step: Some(Arc::new(step)),
            errors: None,
            witnesses,
            fejer_residuals: Vec::new(),
            dist: Arc::new(move |a, b| m.dist(a, b)),
        }
    }

    pub fn with_errors(mut self, errors: ErrorSeq) -> Self {
        self.errors = Some(errors);
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn fejer_residuals(&self) -> &[f64] {
        &self.fejer_residuals
    }

    /// `δ_n`, zero without an error sequence.
    pub fn delta(&self, n: u64) -> f64 {
        self.errors.as_ref().map_or(0.0, |e| e.delta(n))
    }

    /// Materialises `x_0, …, x_n`; false if the trace cannot reach `n`.
    pub fn extend_to(&mut self, n: u64) -> bool {
        if (n as usize) < self.points.len() {
            return true;
        }
        let Some(step) = self.step.clone() else { return false };
        if n > INDEX_CAP {
            return false;
        }
        while self.points.len() <= n as usize {
            let k = self.points.len() - 1;
            let (alpha, next) = step(k as u64, &self.points[k]);
            self.alphas.push(alpha);
            self.points.push(next);
            self.push_residual(k);
        }
        true
    }

    pub fn point(&mut self, n: u64) -> Option<&P> {
        if self.extend_to(n) {
            self.points.get(n as usize)
        } else {
            None
        }
    }

    fn push_residual(&mut self, k: usize) {
        let (a, b) = (&self.points[k], &self.points[k + 1]);
        let r = self
            .witnesses
            .iter()
            .map(|q| (self.dist)(b, q) - (self.dist)(a, q))
            .fold(f64::NEG_INFINITY, f64::max);
        self.fejer_residuals.push(r);
    }

    fn recompute_residuals(&mut self) {
        self.fejer_residuals.clear();
        for k in 0..self.points.len().saturating_sub(1) {
            self.push_residual(k);
        }
    }
}

/// Mann or Schu iteration of `t` from `x0`, materialised to `horizon`
/// points and extendable beyond. `witnesses` are points of the target set
/// against which per-step Fejér residuals are recorded.
pub fn iterate_scheme<S: ModelSpace + Clone + 'static>(
    model: &S,
    t: &MappingSpec<S::Point>,
    x0: S::Point,
    alphas: impl Fn(u64) -> f64 + Send + Sync + 'static,
    scheme: Scheme,
    horizon: usize,
    witnesses: Vec<S::Point>,
) -> Result<IterationTrace<S::Point>> {
    if horizon == 0 {
        return usage("horizon must be at least 1");
    }
    model.validate(&x0)?;
    let m = model.clone();
    let t = t.clone();
    let step = move |n: u64, x: &S::Point| {
        let a = alphas(n).clamp(0.0, 1.0);
        let tx = match scheme {
            Scheme::Schu => t.power(x, n),
            _ => t.apply(x),
        };
        (a, m.geodesic(x, &tx, a))
    };
    if scheme == Scheme::Custom {
        return usage("custom traces are built with IterationTrace::from_points or from_step");
    }
    let mut trace = IterationTrace::from_step(model, scheme, x0, step, witnesses);
    trace.extend_to(horizon as u64 - 1);
    Ok(trace)
}

/// Error sequence of a Schu iteration of an asymptotically nonexpansive map
/// with summable `(δ_n)`: for `q` fixed, `d(x_{n+1}, q) ≤ d(x_n, q) +
/// α_n δ_n d(x_n, q)` and `d(x_n, q) ≤ r0 · e^{Σδ}` where
/// `r0 ≥ sup_{q∈S} d(x₀, q)`.
pub fn schu_errors(mapping_errors: &ErrorSeq, r0: f64) -> ErrorSeq {
    let scale = r0 * mapping_errors.total.exp();
    let d = mapping_errors.clone();
    let g = mapping_errors.clone();
    ErrorSeq::new(
        format!("{scale:.4} * ({})", mapping_errors.descriptor),
        move |n| scale * d.delta(n),
        move |e| g.gamma_tail(e / scale),
        scale * mapping_errors.total,
    )
}

/// Windows up to this many points have their oscillation computed over all
/// pairs; wider windows use the triangle bounds `m ≤ osc ≤ 2m`, `m` the
/// largest distance from the window's first shadow.
pub const EXACT_WINDOW: u64 = 256;

/// Lazily computed shadows `P_S x_n` of a trace.
pub struct ShadowCache<'a, S: GeodesicSpace> {
    model: &'a S,
    set: &'a ConvexSet<S::Point>,
    trace: IterationTrace<S::Point>,
    shadows: Vec<S::Point>,
    witnesses: Vec<S::Point>,
    checked: usize,
    tol: f64,
}

impl<'a, S: ModelSpace> ShadowCache<'a, S> {
    pub fn new(model: &'a S, set: &'a ConvexSet<S::Point>, trace: IterationTrace<S::Point>, tol: f64) -> Self {
        let mut rng = rng_from_seed(0);
        let witnesses = (0..8).map(|_| set.sample_member(&mut rng)).collect();
        Self { model, set, trace, shadows: Vec::new(), witnesses, checked: 0, tol }
    }

    pub fn trace(&self) -> &IterationTrace<S::Point> {
        &self.trace
    }

    /// `P_S x_n`, `None` when the trace cannot reach `n`.
    pub fn shadow(&mut self, n: u64) -> Result<Option<S::Point>> {
        if !self.trace.extend_to(n) {
            return Ok(None);
        }
        while self.shadows.len() <= n as usize {
            let x = &self.trace.points[self.shadows.len()];
            self.shadows.push(project(self.model, self.set, x, self.tol)?);
        }
        Ok(Some(self.shadows[n as usize].clone()))
    }

    /// `d(x_n, P_S x_n)`.
    pub fn gap(&mut self, n: u64) -> Result<Option<f64>> {
        Ok(self.shadow(n)?.map(|p| self.model.dist(&self.trace.points[n as usize], &p)))
    }

    fn window(&mut self, lo: u64, hi: u64, eps: f64) -> Result<WindowVerdict> {
        if self.shadow(hi)?.is_none() {
            return Ok(WindowVerdict::Unknown);
        }
        let pts = &self.shadows[lo as usize..=hi as usize];
        let within = |osc: f64| if osc <= eps + self.tol { WindowVerdict::Within(osc) } else { WindowVerdict::Exceeds(osc) };
        if hi - lo < EXACT_WINDOW {
            return Ok(within(max_pairwise(self.model, pts)));
        }
        let m = pts.iter().map(|p| self.model.dist(&pts[0], p)).fold(0.0, f64::max);
        Ok(if 2.0 * m <= eps + self.tol {
            WindowVerdict::Within(2.0 * m)
        } else if m > eps + self.tol {
            WindowVerdict::Exceeds(m)
        } else {
            WindowVerdict::Unknown
        })
    }

    /// Checks `d(x_{n+1}, q) ≤ d(x_n, q) + δ_n` for sampled `q ∈ S` and the
    /// shadows, and `d(x_{n+1}, P x_{n+1}) ≤ d(x_n, P x_n) + δ_n`, on every
    /// step of the materialised prefix not yet checked.
    pub fn check_fejer(&mut self) -> Result<()> {
        let len = self.trace.len();
        if len == 0 {
            return Ok(());
        }
        self.shadow(len as u64 - 1)?;
        for n in self.checked..len - 1 {
            let (x, y) = (&self.trace.points[n], &self.trace.points[n + 1]);
            let slack = self.trace.delta(n as u64) + self.tol;
            let shadow_pair = [&self.shadows[n], &self.shadows[n + 1]];
            for q in self.witnesses.iter().chain(shadow_pair) {
                let (before, after) = (self.model.dist(x, q), self.model.dist(y, q));
                if after > before + slack {
                    return Err(Error::Input(format!(
                        "trace is not {}Fejer monotone at n = {n}: distance to a point of the set grows from {before} to {after}",
                        if self.trace.errors.is_some() { "quasi-" } else { "" }
                    )));
                }
            }
            let (g0, g1) = (self.model.dist(x, &self.shadows[n]), self.model.dist(y, &self.shadows[n + 1]));
            if g1 > g0 + slack {
                return Err(Error::Input(format!("d(x_n, P x_n) increases at n = {n}: {g0} to {g1}")));
            }
        }
        self.checked = len.saturating_sub(1);
        Ok(())
    }

    fn check_start(&mut self, b: f64) -> Result<()> {
        let gap = self.gap(0)?.expect("trace has x_0");
        if gap > b + self.tol {
            return Err(Error::Input(format!("d(x_0, P x_0) = {gap} exceeds b = {b}")));
        }
        Ok(())
    }

    /// `max d(P x_n, P x_m)` over `n, m ∈ [end − k, end)`.
    pub fn tail_oscillation(&mut self, end: usize, k: usize) -> Result<f64> {
        if end == 0 || self.shadow(end as u64 - 1)?.is_none() {
            return usage(format!("trace cannot reach index {end}"));
        }
        Ok(max_pairwise(self.model, &self.shadows[end.saturating_sub(k)..end]))
    }
}

fn max_pairwise<S: GeodesicSpace>(model: &S, pts: &[S::Point]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            m = m.max(model.dist(&pts[i], &pts[j]));
        }
    }
    m
}

fn check_params(b: f64, eps: f64) -> Result<()> {
    if !(b > 0.0) || !(eps > 0.0) {
        return usage(format!("b and eps must be positive, got b={b}, eps={eps}"));
    }
    Ok(())
}

/// Verifies the shadow metastability bound for a Fejér monotone trace.
pub fn fejer_shadow_metastability<S: ModelSpace>(
    cache: &mut ShadowCache<'_, S>,
    b: f64,
    eps: f64,
    g: &CounterFn,
) -> Result<MetastabilityReport> {
    check_params(b, eps)?;
    if cache.trace.errors.as_ref().is_some_and(|e| e.total > 0.0) {
        return usage("trace carries errors; use the quasi-Fejer verifier");
    }
    cache.check_start(b)?;
    let psi = psi_eta(&cache.model.modulus(), b, eps)?;
    let bound = iterate(&g.tilde(), ceil_count(b * b / psi), 0);
    let subject = format!("Fejer shadows onto {}", cache.set.label);
    let report = metastable_search(&subject, eps, g, 0, bound, |n, end| cache.window(n, end, eps))?;
    cache.check_fejer()?;
    Ok(report)
}

/// Verifies the shadow metastability bound for a trace with
/// `d(x_{n+1}, q) ≤ d(x_n, q) + δ_n`, `Σ δ_n ≤ big_b`.
pub fn quasi_fejer_shadow_metastability<S: ModelSpace>(
    cache: &mut ShadowCache<'_, S>,
    b: f64,
    big_b: f64,
    eps: f64,
    g: &CounterFn,
) -> Result<MetastabilityReport> {
    check_params(b, eps)?;
    if !(big_b >= 0.0) {
        return usage(format!("B must be nonnegative, got {big_b}"));
    }
    let errors = cache.trace.errors.clone().unwrap_or_else(ErrorSeq::zero);
    if errors.total > big_b {
        return usage(format!("error total {} exceeds B = {big_b}", errors.total));
    }
    cache.check_start(b)?;
    let c = 2.0 * b + 3.0 * big_b;
    let psi = psi_eta(&cache.model.modulus(), c, eps)?;
    let lower = errors.gamma_tail(psi / (4.0 * c));
    let bound = iterate(&g.running_max().tilde(), ceil_count(2.0 * c / psi), lower);
    let subject = format!("quasi-Fejer shadows onto {}", cache.set.label);
    let report = metastable_search(&subject, eps, g, lower, bound, |n, end| cache.window(n, end, eps))?;
    cache.check_fejer()?;
    errors.check_tail(psi / (4.0 * c), cache.trace.len() as u64, cache.tol)?;
    Ok(report)
}

fn flatten(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::Array(a) => a.iter().for_each(|x| flatten(x, out)),
        Value::Object(o) => o.values().for_each(|x| flatten(x, out)),
        other => out.push(other.to_string()),
    }
}

/// CSV rows `n, coordinates…, d(x_n, P x_n), δ_n` for the materialised trace.
pub fn trace_csv<S: ModelSpace>(cache: &mut ShadowCache<'_, S>) -> Result<String> {
    let len = cache.trace.len();
    let mut out = String::new();
    for n in 0..len {
        let gap = cache.gap(n as u64)?.expect("materialised");
        let mut coords = Vec::new();
        flatten(&serde_json::to_value(&cache.trace.points[n]).unwrap_or(Value::Null), &mut coords);
        if n == 0 {
            let cols: Vec<String> = (0..coords.len()).map(|i| format!("x{i}")).collect();
            let _ = writeln!(out, "n,{},dist_to_shadow,delta", cols.join(","));
        }
        let _ = writeln!(out, "{n},{},{gap:e},{:e}", coords.join(","), cache.trace.delta(n as u64));
    }
    Ok(out)
}
