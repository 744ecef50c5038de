//! Approximate fixed points along geodesic segments.
//!
//! If `T` is nonexpansive and both endpoints of a segment of length at most
//! `b` move by at most `δ(b, ε)`, every point of the segment moves by at most
//! `ε`. For asymptotically nonexpansive maps the same transfer holds for `Tⁿ`
//! with `n ≥ γ(ε)` and threshold `Θ(ε)`, and for `T` itself with threshold
//! `Ω(ε)`. The checks here sample admissible instances and test the
//! conclusion; inadmissible samples are counted as skipped.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::check::{AxiomReport, CheckId, Measurement, run_check};
use crate::error::{usage, Result};
use crate::models::{DiskPoint, Euclidean, LpSpace, MetricTree, ModelSpace, PoincareDisk, TreePoint};
use crate::moduli::UcModulus;
use crate::rates::ceil_count;
use crate::sampling::{index, run_trials, uniform, SimRng};
use crate::sets::{project, ConvexSet};
use crate::space::{sample_weight, to_json, GeodesicSpace};

type PointMap<P> = Arc<dyn Fn(&P) -> P + Send + Sync>;
type PowerMap<P> = Arc<dyn Fn(&P, u64) -> P + Send + Sync>;
type Sampler<P> = Arc<dyn Fn(&mut SimRng) -> P + Send + Sync>;
type RateFn = Arc<dyn Fn(f64) -> u64 + Send + Sync>;

/// Indices on which a convergence modulus `u` is checked against `(δ_n)`.
pub const MODULUS_CHECK_LEN: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MappingKind {
    Nonexpansive,
    AsymptoticallyNonexpansive,
}

/// A self-map with a sampler of its fixed points.
///
/// Asymptotically nonexpansive maps carry `(δ_n)`, a modulus `u` with
/// `δ_n ≤ ε` for `n ≥ u(ε)`, and `B ≥ sup δ_n`. `displacement_gain` bounds
/// `d(x, Tx) / d(x, p)` near a fixed point `p` (and `d(x, Tⁿx) / d(x, p)`
/// for every `n` when `uniform_gain` is set); samplers use it to place points
/// at a controlled displacement.
#[derive(Clone)]
pub struct MappingSpec<P> {
    pub name: String,
    pub kind: MappingKind,
    apply: PointMap<P>,
    power: Option<PowerMap<P>>,
    delta: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    modulus: RateFn,
    pub sup_delta: f64,
    fixed: Sampler<P>,
    pub displacement_gain: f64,
    pub uniform_gain: bool,
}

impl<P> fmt::Debug for MappingSpec<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MappingSpec({}, {:?})", self.name, self.kind)
    }
}

impl<P: Clone + Send + Sync + 'static> MappingSpec<P> {
    pub fn nonexpansive(
        name: impl Into<String>,
        apply: impl Fn(&P) -> P + Send + Sync + 'static,
        fixed: impl Fn(&mut SimRng) -> P + Send + Sync + 'static,
        displacement_gain: f64,
    ) -> Self {
        Self {
            name: name.into(),
            kind: MappingKind::Nonexpansive,
            apply: Arc::new(apply),
            power: None,
            delta: Arc::new(|_| 0.0),
            modulus: Arc::new(|_| 0),
            sup_delta: 0.0,
            fixed: Arc::new(fixed),
            displacement_gain,
            uniform_gain: false,
        }
    }

    /// An asymptotically nonexpansive map; `u` and `sup_delta` are checked
    /// against `delta` on the first [`MODULUS_CHECK_LEN`] indices.
    #[allow(clippy::too_many_arguments)]
    pub fn asymptotic(
        name: impl Into<String>,
        apply: impl Fn(&P) -> P + Send + Sync + 'static,
        delta: impl Fn(u64) -> f64 + Send + Sync + 'static,
        u: impl Fn(f64) -> u64 + Send + Sync + 'static,
        sup_delta: f64,
        fixed: impl Fn(&mut SimRng) -> P + Send + Sync + 'static,
        displacement_gain: f64,
    ) -> Result<Self> {
        let spec = Self {
            name: name.into(),
            kind: MappingKind::AsymptoticallyNonexpansive,
            apply: Arc::new(apply),
            power: None,
            delta: Arc::new(delta),
            modulus: Arc::new(u),
            sup_delta,
            fixed: Arc::new(fixed),
            displacement_gain,
            uniform_gain: true,
        };
        spec.validate_modulus()?;
        Ok(spec)
    }

    /// Supplies a closed form for `Tⁿ`.
    pub fn with_power(mut self, power: impl Fn(&P, u64) -> P + Send + Sync + 'static) -> Self {
        self.power = Some(Arc::new(power));
        self
    }

    pub fn apply(&self, x: &P) -> P {
        (self.apply)(x)
    }

    pub fn power(&self, x: &P, n: u64) -> P {
        if let Some(p) = &self.power {
            return p(x, n);
        }
        let mut y = x.clone();
        for _ in 0..n {
            y = self.apply(&y);
        }
        y
    }

    /// Bound on `d(x, Tⁿx) / d(x, p)`: the one-step gain grows at most
    /// linearly in `n` and never beyond `2 + B`.
    pub fn gain_at(&self, n: u64) -> f64 {
        if self.uniform_gain {
            self.displacement_gain
        } else {
            (self.displacement_gain * n.max(1) as f64).min(2.0 + self.sup_delta)
        }
    }

    pub fn delta(&self, n: u64) -> f64 {
        (self.delta)(n)
    }

    pub fn u(&self, eps: f64) -> u64 {
        (self.modulus)(eps)
    }

    pub fn fixed_point(&self, rng: &mut SimRng) -> P {
        (self.fixed)(rng)
    }

    /// Checks `δ_n ≥ 0`, `δ_n ≤ B` and `δ_n ≤ ε` for `n ≥ u(ε)` on a grid of
    /// `ε` and the first [`MODULUS_CHECK_LEN`] indices.
    pub fn validate_modulus(&self) -> Result<()> {
        let deltas: Vec<f64> = (0..MODULUS_CHECK_LEN as u64).map(|n| self.delta(n)).collect();
        if let Some(n) = deltas.iter().position(|d| !(*d >= 0.0) || !d.is_finite()) {
            return usage(format!("{}: delta_{n} = {} is not a nonnegative real", self.name, deltas[n]));
        }
        if let Some(n) = deltas.iter().position(|d| *d > self.sup_delta) {
            return usage(format!("{}: delta_{n} = {} exceeds B = {}", self.name, deltas[n], self.sup_delta));
        }
        let mut suffix = vec![0.0f64; MODULUS_CHECK_LEN + 1];
        for n in (0..MODULUS_CHECK_LEN).rev() {
            suffix[n] = suffix[n + 1].max(deltas[n]);
        }
        for k in -48..=8 {
            let eps = 10f64.powf(k as f64 / 4.0);
            let start = self.u(eps) as usize;
            if start < MODULUS_CHECK_LEN && suffix[start] > eps {
                return usage(format!(
                    "{}: modulus u({eps:e}) = {start} but some delta_n with n >= {start} is {}",
                    self.name, suffix[start]
                ));
            }
        }
        Ok(())
    }
}

/// `min(ε/2, b, ε²/(16b) · η(2b, min(ε/(2b), 2)))`.
pub fn afp_delta(b: f64, eps: f64, eta: &UcModulus) -> Result<f64> {
    if !(b > 0.0) || !(eps > 0.0) || !b.is_finite() || !eps.is_finite() {
        return usage(format!("afp_delta needs finite b > 0 and eps > 0, got b={b}, eps={eps}"));
    }
    Ok(delta_unchecked(b, eps, eta))
}

fn delta_unchecked(b: f64, eps: f64, eta: &UcModulus) -> f64 {
    let tail = eps * eps / (16.0 * b) * eta.eval(2.0 * b, (eps / (2.0 * b)).min(2.0));
    (eps / 2.0).min(b).min(tail)
}

/// The thresholds `Θ`, `γ`, `N`, `Ω` for asymptotically nonexpansive maps.
#[derive(Clone)]
pub struct AfpBundle {
    pub b: f64,
    pub big_b: f64,
    eta: UcModulus,
    u: RateFn,
}

impl fmt::Debug for AfpBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AfpBundle(b={}, B={}, eta={:?})", self.b, self.big_b, self.eta)
    }
}

pub fn afp_bundle(b: f64, eta: UcModulus, u: impl Fn(f64) -> u64 + Send + Sync + 'static, big_b: f64) -> Result<AfpBundle> {
    if !(b > 0.0) || !b.is_finite() {
        return usage(format!("bundle needs finite b > 0, got {b}"));
    }
    if !(big_b >= 0.0) || !big_b.is_finite() {
        return usage(format!("bundle needs finite B >= 0, got {big_b}"));
    }
    Ok(AfpBundle { b, big_b, eta, u: Arc::new(u) })
}

impl AfpBundle {
    /// Bundle for `mapping` with its own modulus and bound.
    pub fn for_mapping<P: Clone + Send + Sync + 'static>(b: f64, eta: UcModulus, mapping: &MappingSpec<P>) -> Result<Self> {
        let m = mapping.modulus.clone();
        afp_bundle(b, eta, move |e| m(e), mapping.sup_delta)
    }

    pub fn theta(&self, eps: f64) -> f64 {
        0.5 * delta_unchecked(self.b, eps, &self.eta)
    }

    pub fn gamma_rate(&self, eps: f64) -> u64 {
        (self.u)(self.theta(eps) / self.b)
    }

    pub fn n_index(&self, eps: f64) -> u64 {
        self.gamma_rate(eps / (2.0 + self.big_b))
    }

    pub fn omega(&self, eps: f64) -> f64 {
        let n = self.n_index(eps);
        self.theta(eps / (2.0 + self.big_b)) / ((n as f64 + 1.0) * (1.0 + self.big_b))
    }
}

/// The case of the proof that applies to an instance; diagnostic only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ProofCase {
    /// `λ ≤ ε/(4b)`.
    I,
    /// `1 − λ ≤ ε/(4b)`.
    II,
    /// `d(x,y) ≤ ε/4`.
    III,
    IV,
}

impl ProofCase {
    pub fn infer(lam: f64, dist_xy: f64, eps: f64, b: f64) -> Self {
        let c = eps / (4.0 * b);
        if lam <= c {
            ProofCase::I
        } else if 1.0 - lam <= c {
            ProofCase::II
        } else if dist_xy <= eps / 4.0 {
            ProofCase::III
        } else {
            ProofCase::IV
        }
    }

    fn slot(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AfpMode {
    /// Nonexpansive `T`, threshold `δ`.
    Segment,
    /// `Tⁿ` with `n ≥ γ(ε)`, threshold `Θ(ε)`.
    Power(u64),
    /// `T` with threshold `Ω(ε)`.
    SingleStep,
}

/// One evaluated instance. `residual` is `d(z, Tz)` (or `d(z, Tⁿz)`).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfpVerdict {
    pub mode: AfpMode,
    pub admissible: bool,
    pub skip_reason: Option<String>,
    pub lambda: f64,
    pub dist_xy: f64,
    pub b: f64,
    pub eps: f64,
    pub threshold: f64,
    pub displacement_x: f64,
    pub displacement_y: f64,
    pub residual: f64,
    pub case: ProofCase,
    pub passed: bool,
}

impl AfpVerdict {
    /// Admissible and the conclusion failed.
    pub fn violated(&self) -> bool {
        self.admissible && !self.passed
    }
}

#[allow(clippy::too_many_arguments)]
fn verdict<S: ModelSpace>(
    model: &S,
    t: &MappingSpec<S::Point>,
    x: &S::Point,
    y: &S::Point,
    lam: f64,
    eps: f64,
    b: f64,
    threshold: f64,
    mode: AfpMode,
    tol: f64,
) -> Result<AfpVerdict> {
    if !(0.0..=1.0).contains(&lam) {
        return usage(format!("lambda must lie in [0, 1], got {lam}"));
    }
    if !(eps > 0.0) || !(b > 0.0) {
        return usage(format!("eps and b must be positive, got eps={eps}, b={b}"));
    }
    let n = match mode {
        AfpMode::Power(n) => n,
        _ => 1,
    };
    let dist_xy = model.dist(x, y);
    let dx = model.dist(x, &t.power(x, n));
    let dy = model.dist(y, &t.power(y, n));
    let z = model.geodesic(x, y, lam);
    let residual = model.dist(&z, &t.power(&z, n));
    let skip_reason = if dist_xy > b {
        Some(format!("d(x,y) = {dist_xy} exceeds b = {b}"))
    } else if dx > threshold {
        Some(format!("d(x,Tx) = {dx} exceeds threshold {threshold}"))
    } else if dy > threshold {
        Some(format!("d(y,Ty) = {dy} exceeds threshold {threshold}"))
    } else {
        None
    };
    let admissible = skip_reason.is_none();
    Ok(AfpVerdict {
        mode,
        admissible,
        skip_reason,
        lambda: lam,
        dist_xy,
        b,
        eps,
        threshold,
        displacement_x: dx,
        displacement_y: dy,
        residual,
        case: ProofCase::infer(lam, dist_xy, eps, b),
        passed: admissible && residual <= eps + tol,
    })
}

/// Tests `d(z, Tz) ≤ ε` for `z = W(x, y, λ)` given endpoints that move by at
/// most `afp_delta(b, ε, η)`.
#[allow(clippy::too_many_arguments)]
pub fn check_afp_segment<S: ModelSpace>(
    model: &S,
    t: &MappingSpec<S::Point>,
    x: &S::Point,
    y: &S::Point,
    lam: f64,
    eps: f64,
    b: f64,
    tol: f64,
) -> Result<AfpVerdict> {
    if t.kind != MappingKind::Nonexpansive {
        return usage(format!("{} is not declared nonexpansive", t.name));
    }
    let delta = afp_delta(b, eps, &model.modulus())?;
    verdict(model, t, x, y, lam, eps, b, delta, AfpMode::Segment, tol)
}

/// Tests the power or single-step conclusion for asymptotically
/// nonexpansive `T`.
#[allow(clippy::too_many_arguments)]
pub fn check_afp_asymptotic<S: ModelSpace>(
    model: &S,
    t: &MappingSpec<S::Point>,
    x: &S::Point,
    y: &S::Point,
    lam: f64,
    eps: f64,
    bundle: &AfpBundle,
    mode: AfpMode,
    tol: f64,
) -> Result<AfpVerdict> {
    let threshold = match mode {
        AfpMode::Power(n) => {
            let g = bundle.gamma_rate(eps);
            if n < g {
                return usage(format!("power mode needs n >= gamma_rate(eps) = {g}, got {n}"));
            }
            bundle.theta(eps)
        }
        AfpMode::SingleStep => bundle.omega(eps),
        AfpMode::Segment => return usage("segment mode is checked by check_afp_segment"),
    };
    verdict(model, t, x, y, lam, eps, bundle.b, threshold, mode, tol)
}

/// Which implication a campaign samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AfpProposition {
    Segment,
    Power,
    SingleStep,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AfpCampaign {
    pub mapping: String,
    pub proposition: AfpProposition,
    pub admissible: usize,
    /// Admissible instances per proof case I–IV.
    pub cases: [usize; 4],
    pub report: AxiomReport,
}

impl AfpCampaign {
    pub fn admissible_fraction(&self) -> f64 {
        self.admissible as f64 / self.report.trials as f64
    }
}

/// Samples instances around pairs of fixed points and tests the conclusion.
///
/// `b` is drawn at or above the distance of the two fixed points, `ε` as
/// `b · 10^U(−1.5, 0.7)` so the clamp `ε/(2b) ≥ 2` is hit, and the endpoints
/// at a displacement up to 1.1 times the threshold.
pub fn afp_campaign<S: ModelSpace>(
    model: &S,
    t: &MappingSpec<S::Point>,
    proposition: AfpProposition,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AfpCampaign> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    if proposition == AfpProposition::Segment && t.kind != MappingKind::Nonexpansive {
        return usage(format!("{} is not declared nonexpansive", t.name));
    }
    let eta = model.modulus();
    let outcomes: Vec<Result<AfpVerdict>> = run_trials(seed, trials, |_, rng| {
        let p = t.fixed_point(rng);
        let q = t.fixed_point(rng);
        let floor = uniform(rng, 0.05, 1.0) * model.sampling_radius().min(1.0);
        let b = (model.dist(&p, &q) * uniform(rng, 1.0, 1.5)).max(floor);
        let eps = b * 10f64.powf(uniform(rng, -1.5, 0.7));
        let lam = sample_weight(rng);
        let (threshold, mode, bundle) = match proposition {
            AfpProposition::Segment => (afp_delta(b, eps, &eta)?, AfpMode::Segment, None),
            AfpProposition::Power => {
                let bundle = AfpBundle::for_mapping(b, eta.clone(), t)?;
                let n = bundle.gamma_rate(eps).max(1) + index(rng, 4) as u64;
                (bundle.theta(eps), AfpMode::Power(n), Some(bundle))
            }
            AfpProposition::SingleStep => {
                let bundle = AfpBundle::for_mapping(b, eta.clone(), t)?;
                (bundle.omega(eps), AfpMode::SingleStep, Some(bundle))
            }
        };
        let gain = match mode {
            AfpMode::Power(n) => t.gain_at(n),
            _ => t.gain_at(1),
        };
        let radius = |rng: &mut SimRng| {
            let r = threshold * uniform(rng, 0.0, 1.1);
            if gain > 0.0 { r / gain } else { 0.25 * b * uniform(rng, 0.0, 1.0) }
        };
        let rx = radius(rng);
        let x = model.sample_within(&p, rx, rng);
        let ry = radius(rng);
        let y = model.sample_within(&q, ry, rng);
        match &bundle {
            None => check_afp_segment(model, t, &x, &y, lam, eps, b, tol),
            Some(bundle) => check_afp_asymptotic(model, t, &x, &y, lam, eps, bundle, mode, tol),
        }
    });
    let mut cases = [0usize; 4];
    let mut admissible = 0;
    let mut measurements = Vec::with_capacity(trials);
    for o in outcomes {
        let v = o?;
        if v.admissible {
            admissible += 1;
            cases[v.case.slot()] += 1;
            measurements.push(Some(Measurement::le(
                v.residual,
                v.eps,
                json!({ "lambda": v.lambda, "b": v.b, "eps": v.eps, "dist_xy": v.dist_xy, "threshold": v.threshold }),
            )));
        } else {
            measurements.push(None);
        }
    }
    let check = match proposition {
        AfpProposition::Segment => CheckId::AfpSegment,
        AfpProposition::Power => CheckId::AfpPower,
        AfpProposition::SingleStep => CheckId::AfpSingleStep,
    };
    Ok(AfpCampaign {
        mapping: t.name.clone(),
        proposition,
        admissible,
        cases,
        report: AxiomReport::from_measurements(check, tol, measurements),
    })
}

/// Samples `d(Tx, Ty) ≤ d(x, y)`, or `d(Tⁿx, Tⁿy) ≤ (1 + δ_n) d(x, y)` for
/// `n ≤ 8` when `T` is asymptotically nonexpansive.
pub fn check_mapping<S: ModelSpace>(
    model: &S,
    t: &MappingSpec<S::Point>,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    let check = match t.kind {
        MappingKind::Nonexpansive => CheckId::Nonexpansive,
        MappingKind::AsymptoticallyNonexpansive => CheckId::AsymptoticNonexpansive,
    };
    Ok(run_check(check, seed, trials, tol, |rng| {
        let x = model.sample(rng);
        let y = model.sample(rng);
        let n = match t.kind {
            MappingKind::Nonexpansive => 1,
            MappingKind::AsymptoticallyNonexpansive => 1 + index(rng, 8) as u64,
        };
        let lhs = model.dist(&t.power(&x, n), &t.power(&y, n));
        let rhs = (1.0 + t.delta(n)) * model.dist(&x, &y);
        Some(Measurement::le(lhs, rhs, json!({ "x": to_json(&x), "y": to_json(&y), "n": n })))
    }))
}

/// Convexity of the fixed-point set: `W(p, q, λ)` is fixed for fixed `p`, `q`.
pub fn check_fixed_point_convexity<S: ModelSpace>(
    model: &S,
    t: &MappingSpec<S::Point>,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    Ok(run_check(CheckId::FixedPointConvexity, seed, trials, tol, |rng| {
        let p = t.fixed_point(rng);
        let q = t.fixed_point(rng);
        let lam = sample_weight(rng);
        let z = model.geodesic(&p, &q, lam);
        let moved = model.dist(&z, &t.apply(&z));
        Some(Measurement::le(moved, 0.0, json!({ "p": to_json(&p), "q": to_json(&q), "lambda": lam })))
    }))
}

/// The identity map.
pub fn identity<S: ModelSpace + Clone + 'static>(model: &S) -> MappingSpec<S::Point> {
    let m = model.clone();
    MappingSpec::nonexpansive("identity", |x: &S::Point| x.clone(), move |rng| m.sample(rng), 0.0)
}

/// `x ↦ W(x, c, t)`, a `(1 − t)`-contraction with fixed point `c`.
pub fn contraction_toward<S: ModelSpace + Clone + 'static>(model: &S, center: S::Point, t: f64) -> MappingSpec<S::Point> {
    let m = model.clone();
    let c = center.clone();
    MappingSpec::nonexpansive(
        format!("contraction toward {} by {t}", serde_json::to_string(&center).unwrap_or_default()),
        move |x| m.geodesic(x, &c, t),
        move |_| center.clone(),
        t,
    )
}

/// `x ↦ W(x, P_S x, t)` for a set whose metric projection is nonexpansive
/// (any closed convex set of a CAT(0) space, coordinate subspaces of `ℓ_p`).
/// Its fixed points are the members of `S`.
pub fn relaxed_projection<S: ModelSpace + Clone + 'static>(model: &S, set: ConvexSet<S::Point>, t: f64) -> MappingSpec<S::Point> {
    let m = model.clone();
    let s = set.clone();
    let tol = model.tolerance();
    let name = if t == 1.0 { format!("projection onto {}", set.label) } else { format!("relaxed({t}) projection onto {}", set.label) };
    MappingSpec::nonexpansive(
        name,
        move |x| {
            let p = project(&m, &s, x, tol).unwrap_or_else(|_| x.clone());
            m.geodesic(x, &p, t)
        },
        move |rng| set.sample_member(rng),
        t,
    )
}

/// Rotation by `theta` in the plane of the first two coordinates.
pub fn euclidean_rotation(model: &Euclidean, theta: f64) -> Result<MappingSpec<Vec<f64>>> {
    if model.dim() < 2 {
        return usage("rotation needs dimension at least 2");
    }
    let (s, c) = theta.sin_cos();
    let m = model.clone();
    Ok(MappingSpec::nonexpansive(
        format!("rotation by {theta}"),
        move |x: &Vec<f64>| {
            let mut y = x.clone();
            y[0] = c * x[0] - s * x[1];
            y[1] = s * x[0] + c * x[1];
            y
        },
        move |rng| {
            let mut p = m.sample(rng);
            p[0] = 0.0;
            p[1] = 0.0;
            p
        },
        2.0 * (theta / 2.0).sin().abs(),
    ))
}

/// The shear `(x₁, x₂, x₃) ↦ (x₁, x₂/2 + x₃, x₃/2)` on the first three
/// coordinates. It expands some distances (by about 1.207 in one step) but
/// `‖Tⁿ‖ ≤ 1 + 2⁻ⁿ`, so it is asymptotically nonexpansive with
/// `δ_n = 2⁻ⁿ`, `u(ε) = ⌈log₂(1/ε)⌉`, `B = 1`. Its fixed points are the
/// `x₁`-axis.
pub fn euclidean_shear(model: &Euclidean) -> Result<MappingSpec<Vec<f64>>> {
    if model.dim() < 3 {
        return usage("shear needs dimension at least 3");
    }
    let r = model.sampling_radius();
    let dim = model.dim();
    let power = |x: &Vec<f64>, n: u64| {
        // [[a, 1], [0, a]]ⁿ = [[aⁿ, n aⁿ⁻¹], [0, aⁿ]] with a = 1/2
        let mut y = x.clone();
        if n == 0 {
            return y;
        }
        let an = 0.5f64.powi(n.min(2000) as i32);
        let off = n as f64 * 0.5f64.powi((n - 1).min(2000) as i32);
        y[1] = an * x[1] + off * x[2];
        y[2] = an * x[2];
        y
    };
    Ok(MappingSpec::asymptotic(
        "shear",
        move |x| power(x, 1),
        |n| 0.5f64.powi(n.min(2000) as i32),
        |e| ceil_count((1.0 / e).log2()),
        1.0,
        move |rng| {
            let mut p = vec![0.0; dim];
            p[0] = uniform(rng, -r, r);
            p
        },
        1.2,
    )?
    .with_power(power))
}

/// Negates coordinate `i` of `ℓ_p`; fixed points are `{x_i = 0}`.
pub fn lp_reflection(model: &LpSpace, i: usize) -> Result<MappingSpec<Vec<f64>>> {
    if i >= model.dim() {
        return usage(format!("coordinate {i} out of range"));
    }
    let m = model.clone();
    Ok(MappingSpec::nonexpansive(
        format!("reflection of coordinate {i}"),
        move |x: &Vec<f64>| {
            let mut y = x.clone();
            y[i] = -y[i];
            y
        },
        move |rng| {
            let mut p = m.sample(rng);
            p[i] = 0.0;
            p
        },
        2.0,
    ))
}

/// Hyperbolic rotation about the origin by `theta`; the origin is the only
/// fixed point.
pub fn poincare_rotation(theta: f64) -> MappingSpec<DiskPoint> {
    let (s, c) = theta.sin_cos();
    MappingSpec::nonexpansive(
        format!("rotation by {theta}"),
        move |p: &DiskPoint| DiskPoint::new(c * p.x - s * p.y, s * p.x + c * p.y),
        |_| DiskPoint::ORIGIN,
        // d(x, Rx) = 2 asinh(sinh(r) sin(θ/2)) ≈ 2 sin(θ/2) r for small r
        2.0 * (theta / 2.0).sin().abs() * 1.05,
    )
}

/// Reflection in the real diameter; fixed points are the diameter.
pub fn poincare_reflection(model: &PoincareDisk) -> MappingSpec<DiskPoint> {
    let r = model.sampling_radius();
    MappingSpec::nonexpansive(
        "reflection in the real axis",
        |p: &DiskPoint| DiskPoint::new(p.x, -p.y),
        move |rng| DiskPoint::new(uniform(rng, -r, r), 0.0),
        2.0,
    )
}

/// Maps with known fixed-point sets used by the test campaigns.
pub trait ShippedMappings: ModelSpace + Clone + 'static {
    fn mapping_library(&self) -> Vec<MappingSpec<Self::Point>>;
}

impl ShippedMappings for Euclidean {
    fn mapping_library(&self) -> Vec<MappingSpec<Vec<f64>>> {
        let n = self.dim();
        let r = self.sampling_radius();
        let mut e1 = vec![0.0; n];
        e1[0] = 1.0;
        let mut out = vec![identity(self), contraction_toward(self, vec![0.0; n], 0.1)];
        let line = ConvexSet::affine(self, vec![0.0; n], &[e1], r).expect("line through the origin");
        out.push(relaxed_projection(self, line, 1.0));
        let ball = ConvexSet::ball(self, vec![0.0; n], 0.5 * r).expect("ball");
        out.push(relaxed_projection(self, ball, 0.5));
        if n >= 2 {
            out.push(euclidean_rotation(self, 0.3).expect("dimension checked"));
        }
        if n >= 3 {
            out.push(euclidean_shear(self).expect("dimension checked"));
        }
        out
    }
}

impl ShippedMappings for LpSpace {
    fn mapping_library(&self) -> Vec<MappingSpec<Vec<f64>>> {
        let n = self.dim();
        let r = self.sampling_radius();
        let mut out = vec![identity(self), contraction_toward(self, vec![0.0; n], 0.1)];
        let zeroed: Vec<usize> = (1..n).collect();
        let axis = ConvexSet::coordinate_subspace(self, &zeroed, r).expect("valid coordinates");
        out.push(relaxed_projection(self, axis.clone(), 1.0));
        out.push(relaxed_projection(self, axis, 0.5));
        out.push(lp_reflection(self, n - 1).expect("valid coordinate"));
        out
    }
}

impl ShippedMappings for PoincareDisk {
    fn mapping_library(&self) -> Vec<MappingSpec<DiskPoint>> {
        let ball = ConvexSet::ball(self, DiskPoint::new(0.2, 0.1), 0.4).expect("ball");
        vec![
            identity(self),
            contraction_toward(self, DiskPoint::ORIGIN, 0.1),
            contraction_toward(self, DiskPoint::new(0.3, -0.2), 0.25),
            poincare_rotation(0.3),
            poincare_reflection(self),
            relaxed_projection(self, ball.clone(), 1.0),
            relaxed_projection(self, ball, 0.5),
        ]
    }
}

impl ShippedMappings for MetricTree {
    fn mapping_library(&self) -> Vec<MappingSpec<TreePoint>> {
        let mut out = vec![identity(self)];
        let names: Vec<String> = (0..self.vertex_count()).map(|v| self.vertex_name(v).to_string()).collect();
        out.push(contraction_toward(self, self.vertex_point(0), 0.1));
        if let Some(leaf) = (0..self.vertex_count()).rev().find(|&v| v != 0) {
            out.push(contraction_toward(self, self.vertex_point(leaf), 0.3));
        }
        // the first edge, as a subtree
        if self.edge_count() > 0 {
            let (u, v) = self.endpoints(0);
            let sub = self.subtree(&[names[u].as_str(), names[v].as_str()]).expect("adjacent vertices");
            let set = ConvexSet::subtree(self, sub);
            out.push(relaxed_projection(self, set.clone(), 1.0));
            out.push(relaxed_projection(self, set, 0.5));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    #[test]
    fn delta_reference_value() {
        // CAT(0), b = 1, ε = 2: min(1, 1, (4/16)·η(2, 1)) with η(2, 1) = 1/8
        assert_eq!(afp_delta(1.0, 2.0, &UcModulus::Cat0).unwrap(), 0.03125);
        assert!(afp_delta(0.0, 1.0, &UcModulus::Cat0).is_err());
        assert!(afp_delta(1.0, -1.0, &UcModulus::Cat0).is_err());
    }

    #[test]
    fn degenerate_bundle() {
        let bundle = afp_bundle(1.5, UcModulus::Cat0, |_| 0, 0.0).unwrap();
        for eps in [0.01, 0.3, 2.0, 9.0] {
            assert_eq!(bundle.gamma_rate(eps), 0);
            assert_eq!(bundle.n_index(eps), 0);
            assert_eq!(bundle.omega(eps), bundle.theta(eps / 2.0));
            assert_eq!(bundle.theta(eps), afp_delta(1.5, eps, &UcModulus::Cat0).unwrap() / 2.0);
        }
    }

    #[test]
    fn shear_modulus_is_accepted_and_bad_moduli_rejected() {
        let e = Euclidean::new(3, 1.0).unwrap();
        let shear = euclidean_shear(&e).unwrap();
        assert_eq!(shear.kind, MappingKind::AsymptoticallyNonexpansive);
        let p = vec![0.3, 0.2, -0.1];
        assert_eq!(shear.power(&p, 5), (0..5).fold(p.clone(), |y, _| shear.apply(&y)));
        let bad = MappingSpec::asymptotic("bad", |x: &Vec<f64>| x.clone(), |n| 1.0 / (n + 1) as f64, |_| 3, 1.0, |_| vec![0.0], 1.0);
        assert!(bad.is_err());
        let unbounded = MappingSpec::asymptotic("unbounded", |x: &Vec<f64>| x.clone(), |n| 0.5f64.powi(n as i32), |_| 0, 0.5, |_| vec![0.0], 1.0);
        assert!(unbounded.is_err());
    }

    #[test]
    fn shear_is_not_nonexpansive_but_asymptotically_so() {
        let e = Euclidean::new(3, 1.0).unwrap();
        let shear = euclidean_shear(&e).unwrap();
        let v = vec![0.0, 0.0, 1.0];
        assert!(e.dist(&shear.apply(&v), &vec![0.0; 3]) > 1.1);
        assert!(check_mapping(&e, &shear, 3, 5000, 1e-9).unwrap().passed());
    }

    #[test]
    fn identity_passes_trivially() {
        let e = Euclidean::new(2, 1.0).unwrap();
        let id = identity(&e);
        let v = check_afp_segment(&e, &id, &vec![0.0, 0.0], &vec![0.5, 0.0], 0.3, 0.1, 1.0, 1e-9).unwrap();
        assert!(v.admissible && v.passed);
        assert_eq!(v.residual, 0.0);
    }

    #[test]
    fn inadmissible_instances_are_skipped_not_failed() {
        let e = Euclidean::new(2, 1.0).unwrap();
        let rot = euclidean_rotation(&e, 0.3).unwrap();
        let v = check_afp_segment(&e, &rot, &vec![1.0, 0.0], &vec![0.0, 1.0], 0.5, 0.01, 2.0, 1e-9).unwrap();
        assert!(!v.admissible);
        assert!(!v.violated());
    }

    #[test]
    fn proof_cases() {
        assert_eq!(ProofCase::infer(0.01, 1.0, 0.1, 1.0), ProofCase::I);
        assert_eq!(ProofCase::infer(0.99, 1.0, 0.1, 1.0), ProofCase::II);
        assert_eq!(ProofCase::infer(0.5, 0.01, 0.1, 1.0), ProofCase::III);
        assert_eq!(ProofCase::infer(0.5, 1.0, 0.1, 1.0), ProofCase::IV);
    }

    #[test]
    fn library_fixed_points_are_fixed() {
        let e = Euclidean::new(3, 2.0).unwrap();
        let mut rng = rng_from_seed(2);
        for t in e.mapping_library() {
            for _ in 0..50 {
                let p = t.fixed_point(&mut rng);
                assert!(e.dist(&p, &t.apply(&p)) < 1e-12, "{}", t.name);
            }
        }
    }
}
