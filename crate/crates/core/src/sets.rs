//! Closed convex sets and metric projections onto them.
//!
//! A set is given by a membership residual (zero inside, positive outside),
//! a bounded parameterization used by the projection solver, an optional
//! closed-form projection and a sampler of members. Since `d(x, ·)` is convex
//! along geodesics, golden-section search along a parameterization by
//! geodesics finds the nearest point.

use std::fmt;
use std::sync::Arc;

use serde_json::json;

use crate::check::{run_check, AxiomReport, CheckId, Measurement};
use crate::error::{usage, Error, Result};
use crate::models::{Euclidean, LpSpace, MetricTree, ModelSpace, Subtree};
use crate::sampling::{uniform, unit, SimRng};
use crate::search::{minimize, minimize_1d, Chart, SearchOptions, SearchRegion};
use crate::space::{sample_weight, to_json, GeodesicSpace};

type Residual<P> = Arc<dyn Fn(&P) -> f64 + Send + Sync>;
type Projector<P> = Arc<dyn Fn(&P) -> P + Send + Sync>;
type Sampler<P> = Arc<dyn Fn(&mut SimRng) -> P + Send + Sync>;

/// How the projection solver walks the set.
#[derive(Clone, Debug)]
pub enum SetSearch<P> {
    Segment { start: P, end: P },
    Ball { center: P, radius: f64 },
    Region(SearchRegion<P>),
}

#[derive(Clone)]
pub struct ConvexSet<P> {
    pub label: String,
    pub search: SetSearch<P>,
    residual: Residual<P>,
    closed_form: Option<Projector<P>>,
    sampler: Sampler<P>,
}

impl<P> fmt::Debug for ConvexSet<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ConvexSet({})", self.label)
    }
}

impl<P: Clone + Send + Sync + 'static> ConvexSet<P> {
    /// A set from its parts. `residual` must vanish exactly on the set.
    pub fn new(
        label: impl Into<String>,
        search: SetSearch<P>,
        residual: impl Fn(&P) -> f64 + Send + Sync + 'static,
        sampler: impl Fn(&mut SimRng) -> P + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            search,
            residual: Arc::new(residual),
            closed_form: None,
            sampler: Arc::new(sampler),
        }
    }

    pub fn with_closed_form(mut self, project: impl Fn(&P) -> P + Send + Sync + 'static) -> Self {
        self.closed_form = Some(Arc::new(project));
        self
    }

    /// Drops the closed form so projections go through the solver.
    pub fn without_closed_form(mut self) -> Self {
        self.closed_form = None;
        self
    }

    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    /// Distance-like membership residual: `0` on the set.
    pub fn residual(&self, p: &P) -> f64 {
        (self.residual)(p)
    }

    pub fn contains(&self, p: &P, tol: f64) -> bool {
        self.residual(p) <= tol
    }

    pub fn sample_member(&self, rng: &mut SimRng) -> P {
        (self.sampler)(rng)
    }

    /// The geodesic segment `[a, b]`.
    pub fn segment<S>(model: &S, a: S::Point, b: S::Point) -> Self
    where
        S: GeodesicSpace<Point = P> + Clone + 'static,
    {
        let m = model.clone();
        let (a1, b1) = (a.clone(), b.clone());
        let len = model.dist(&a, &b);
        let m2 = model.clone();
        let (a2, b2) = (a.clone(), b.clone());
        ConvexSet::new(
            "segment",
            SetSearch::Segment { start: a, end: b },
            move |p| (m.dist(&a1, p) + m.dist(p, &b1) - len).max(0.0),
            move |rng| m2.geodesic(&a2, &b2, sample_weight(rng)),
        )
    }

    /// The closed ball `B(c, r)`, projected radially.
    pub fn ball<S>(model: &S, center: S::Point, radius: f64) -> Result<Self>
    where
        S: GeodesicSpace<Point = P> + Clone + 'static,
    {
        if !(radius >= 0.0) || !radius.is_finite() {
            return usage(format!("ball radius must be finite and nonnegative, got {radius}"));
        }
        let (m, c) = (model.clone(), center.clone());
        let (m2, c2) = (model.clone(), center.clone());
        let (m3, c3) = (model.clone(), center.clone());
        Ok(ConvexSet::new(
            format!("ball(r={radius})"),
            SetSearch::Ball { center, radius },
            move |p| (m.dist(&c, p) - radius).max(0.0),
            move |rng| m2.sample_within(&c2, radius, rng),
        )
        .with_closed_form(move |x| {
            let d = m3.dist(&c3, x);
            if d <= radius {
                x.clone()
            } else {
                m3.geodesic(&c3, x, radius / d)
            }
        }))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ConvexSet<Vec<f64>> {
    /// The affine subspace `point + span(basis)` of euclidean space.
    /// `extent` bounds the coefficients seen by the solver and the sampler.
    pub fn affine(model: &Euclidean, point: Vec<f64>, basis: &[Vec<f64>], extent: f64) -> Result<Self> {
        let n = model.dim();
        if point.len() != n || basis.iter().any(|v| v.len() != n) {
            return usage("affine subspace vectors must match the model dimension");
        }
        // Gram-Schmidt
        let mut ortho: Vec<Vec<f64>> = Vec::new();
        for v in basis {
            let mut w = v.clone();
            for u in &ortho {
                let c = dot(&w, u);
                w.iter_mut().zip(u).for_each(|(a, b)| *a -= c * b);
            }
            let norm = dot(&w, &w).sqrt();
            if norm < 1e-12 {
                return usage("affine subspace basis is linearly dependent");
            }
            ortho.push(w.into_iter().map(|a| a / norm).collect());
        }
        let k = ortho.len();
        let ortho = Arc::new(ortho);
        let point = Arc::new(point);
        let project = {
            let (ortho, point) = (ortho.clone(), point.clone());
            move |x: &Vec<f64>| {
                let rel: Vec<f64> = x.iter().zip(point.iter()).map(|(a, b)| a - b).collect();
                let mut out = (*point).clone();
                for u in ortho.iter() {
                    let c = dot(&rel, u);
                    out.iter_mut().zip(u).for_each(|(o, b)| *o += c * b);
                }
                out
            }
        };
        let embed = {
            let (ortho, point) = (ortho.clone(), point.clone());
            move |c: &[f64]| {
                let mut out = (*point).clone();
                for (u, ci) in ortho.iter().zip(c) {
                    out.iter_mut().zip(u).for_each(|(o, b)| *o += ci * b);
                }
                out
            }
        };
        let search = if k == 0 {
            let p = (*point).clone();
            SetSearch::Region(SearchRegion::single(Chart::new(vec![0.0], vec![0.0], move |_: &[f64]| Some(p.clone()))?))
        } else {
            let e = embed.clone();
            SetSearch::Region(SearchRegion::single(Chart::new(vec![-extent; k], vec![extent; k], move |c: &[f64]| Some(e(c)))?))
        };
        let m = model.clone();
        let p2 = project.clone();
        Ok(ConvexSet::new(
            format!("affine(dim={k})"),
            search,
            move |x| m.dist(x, &p2(x)),
            move |rng| {
                let c: Vec<f64> = (0..k).map(|_| uniform(rng, -extent, extent)).collect();
                embed(&c)
            },
        )
        .with_closed_form(project))
    }

    /// `{x : x_i = 0 for i in zeroed}` in `ℓ_p`; the nearest point zeroes
    /// those coordinates.
    pub fn coordinate_subspace(model: &LpSpace, zeroed: &[usize], extent: f64) -> Result<Self> {
        let n = model.dim();
        if zeroed.iter().any(|&i| i >= n) {
            return usage(format!("coordinate index out of range for dimension {n}"));
        }
        let mut mask = vec![false; n];
        zeroed.iter().for_each(|&i| mask[i] = true);
        let free: Vec<usize> = (0..n).filter(|&i| !mask[i]).collect();
        let mask = Arc::new(mask);
        let zero = {
            let mask = mask.clone();
            move |x: &Vec<f64>| x.iter().zip(mask.iter()).map(|(v, &z)| if z { 0.0 } else { *v }).collect::<Vec<f64>>()
        };
        let embed = {
            let free = free.clone();
            move |c: &[f64]| {
                let mut out = vec![0.0; n];
                free.iter().zip(c).for_each(|(&i, v)| out[i] = *v);
                out
            }
        };
        let search = if free.is_empty() {
            SetSearch::Region(SearchRegion::single(Chart::new(vec![0.0], vec![0.0], move |_: &[f64]| Some(vec![0.0; n]))?))
        } else {
            let e = embed.clone();
            let k = free.len();
            SetSearch::Region(SearchRegion::single(Chart::new(vec![-extent; k], vec![extent; k], move |c: &[f64]| Some(e(c)))?))
        };
        let m = model.clone();
        let z2 = zero.clone();
        let k = free.len();
        Ok(ConvexSet::new(
            format!("coordinate subspace(zeroed={zeroed:?})"),
            search,
            move |x| m.dist(x, &z2(x)),
            move |rng| {
                let c: Vec<f64> = (0..k).map(|_| uniform(rng, -extent, extent)).collect();
                embed(&c)
            },
        )
        .with_closed_form(zero))
    }
}

impl ConvexSet<crate::models::TreePoint> {
    pub fn subtree(model: &MetricTree, sub: Subtree) -> Self {
        let region = sub.region();
        let m = model.clone();
        let s1 = sub.clone();
        let s2 = sub.clone();
        let charts = region.charts.clone();
        ConvexSet::new(
            "subtree",
            SetSearch::Region(region),
            move |p| m.dist(p, &s1.project(p)),
            move |rng| {
                let c = &charts[crate::sampling::index(rng, charts.len())];
                let t = c.lower()[0] + unit(rng) * (c.upper()[0] - c.lower()[0]);
                c.point(&[t]).expect("edge chart")
            },
        )
        .with_closed_form(move |p| s2.project(p))
    }
}

/// Metric projection of `x` onto `set`.
///
/// Uses the closed form when available, else golden-section search along the
/// set's parameterization. The result is checked for membership at `tol`.
pub fn project<S: GeodesicSpace>(model: &S, set: &ConvexSet<S::Point>, x: &S::Point, tol: f64) -> Result<S::Point> {
    if let Some(f) = &set.closed_form {
        return Ok(f(x));
    }
    let opts = SearchOptions::default();
    let p = match &set.search {
        SetSearch::Segment { start, end } => {
            let (t, _) = minimize_1d(|t| model.dist(x, &model.geodesic(start, end, t)), 0.0, 1.0, &opts);
            model.geodesic(start, end, t)
        }
        SetSearch::Ball { center, radius } => {
            let d = model.dist(center, x);
            if d <= *radius {
                x.clone()
            } else {
                model.geodesic(center, x, radius / d)
            }
        }
        SetSearch::Region(region) => minimize(region, &|p: &S::Point| model.dist(x, p), &opts)?.point,
    };
    let r = set.residual(&p);
    if r > tol {
        return Err(Error::Solver { message: format!("projection onto {} left the set", set.label), residual: r });
    }
    Ok(p)
}

/// Samples `combine(s, t, λ) ∈ S` for members `s`, `t`.
pub fn check_set_convexity<S: GeodesicSpace>(
    model: &S,
    set: &ConvexSet<S::Point>,
    seed: u64,
    trials: usize,
    tol: f64,
) -> Result<AxiomReport> {
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    Ok(run_check(CheckId::SetConvexity, seed, trials, tol, |rng| {
        let s = set.sample_member(rng);
        let t = set.sample_member(rng);
        let lam = sample_weight(rng);
        let z = model.geodesic(&s, &t, lam);
        Some(Measurement::le(set.residual(&z), 0.0, json!({ "s": to_json(&s), "t": to_json(&t), "lambda": lam })))
    }))
}

/// Projection optimality `d(x, P x) ≤ d(x, s)` against `members` sampled
/// points `s` per trial, and idempotence `P P x = P x`.
pub fn check_projection<S: ModelSpace>(
    model: &S,
    set: &ConvexSet<S::Point>,
    seed: u64,
    trials: usize,
    members: usize,
    tol: f64,
) -> Result<[AxiomReport; 2]> {
    if trials == 0 || members == 0 {
        return usage("trials and members must be at least 1");
    }
    let outcomes: Vec<Result<(Measurement, Measurement)>> = crate::sampling::run_trials(seed, trials, |_, rng| {
        let x = model.sample(rng);
        let p = project(model, set, &x, tol)?;
        let dp = model.dist(&x, &p);
        let mut worst: Option<Measurement> = None;
        for _ in 0..members {
            let s = set.sample_member(rng);
            let m = Measurement::le(dp, model.dist(&x, &s), json!({ "x": to_json(&x), "s": to_json(&s) }));
            worst = Some(match worst {
                None => m,
                Some(w) => w.worst(m),
            });
        }
        let pp = project(model, set, &p, tol)?;
        let idem = Measurement::eq(model.dist(&pp, &p), 0.0, json!({ "x": to_json(&x) }));
        Ok((worst.expect("members >= 1"), idem))
    });
    let mut opt = Vec::with_capacity(trials);
    let mut idem = Vec::with_capacity(trials);
    for o in outcomes {
        let (a, b) = o?;
        opt.push(Some(a));
        idem.push(Some(b));
    }
    Ok([
        AxiomReport::from_measurements(CheckId::ProjectionOptimality, tol, opt),
        AxiomReport::from_measurements(CheckId::ProjectionIdempotence, tol, idem),
    ])
}
