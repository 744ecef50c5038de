//! A fixed library of (trace, target set) pairs on every model, run over an
//! `(ε, g)` grid.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    fejer_shadow_metastability, iterate_scheme, quasi_fejer_shadow_metastability, schu_errors, IterationTrace,
    Scheme, ShadowCache,
};
use crate::error::Result;
use crate::fixpoint::{
    contraction_toward, euclidean_rotation, euclidean_shear, lp_reflection, poincare_reflection, poincare_rotation,
    relaxed_projection, MappingSpec,
};
use crate::models::{parse_edge_list, DiskPoint, ModelKind, Euclidean, LpSpace, MetricTree, ModelSpace, PoincareDisk, BUILTIN_TREE};
use crate::rates::{ceil_count, CounterFn, ErrorSeq, MetaStatus, MetastabilityReport};
use crate::sets::ConvexSet;
use crate::space::GeodesicSpace;

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioConfig {
    pub horizon: usize,
    /// Number of final shadows over which the tail oscillation is measured.
    pub tail_window: usize,
    pub eps: Vec<f64>,
    /// Seeds the random member of the counter-function family.
    pub seed: u64,
    /// Models whose scenarios run; empty means all.
    pub models: Vec<ModelKind>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self { horizon: 10_000, tail_window: 1000, eps: vec![1e-1, 1e-2, 1e-3], seed: 0, models: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioOutcome {
    pub name: String,
    pub kind: ModelKind,
    pub model: String,
    pub set: String,
    pub mapping: String,
    pub scheme: Scheme,
    pub b: f64,
    pub big_b: f64,
    pub horizon: usize,
    pub materialised: usize,
    pub tail_oscillation: f64,
    pub reports: Vec<MetastabilityReport>,
}

impl ScenarioOutcome {
    pub fn count(&self, status: MetaStatus) -> usize {
        self.reports.iter().filter(|r| r.status == status).count()
    }
}

type Runner = Box<dyn Fn(&ScenarioConfig) -> Result<ScenarioOutcome> + Send + Sync>;

struct Entry {
    name: &'static str,
    kind: ModelKind,
    run: Runner,
}

struct Trace<S: ModelSpace> {
    model: S,
    set: ConvexSet<S::Point>,
    mapping: MappingSpec<S::Point>,
    x0: S::Point,
    scheme: Scheme,
    alpha: fn(u64) -> f64,
    /// `(δ_n of the map, sup_{q∈S} d(x₀, q))` for Schu traces.
    schu: Option<(ErrorSeq, f64)>,
}

fn half(_: u64) -> f64 {
    0.5
}

fn harmonic(n: u64) -> f64 {
    1.0 / (n as f64 + 2.0)
}

fn run<S: ModelSpace + Clone + 'static>(name: &str, spec: &Trace<S>, cfg: &ScenarioConfig) -> Result<ScenarioOutcome> {
    let mut witnesses = Vec::new();
    let mut rng = crate::sampling::rng_from_seed(1);
    for _ in 0..4 {
        witnesses.push(spec.set.sample_member(&mut rng));
    }
    let mut trace: IterationTrace<S::Point> =
        iterate_scheme(&spec.model, &spec.mapping, spec.x0.clone(), spec.alpha, spec.scheme, cfg.horizon, witnesses)?;
    if let Some((delta, r0)) = &spec.schu {
        trace = trace.with_errors(schu_errors(delta, *r0));
    }
    let big_b = trace.errors.as_ref().map_or(0.0, |e| e.total);
    let fejer = trace.errors.is_none();
    let tol = spec.model.tolerance();
    let mut cache = ShadowCache::new(&spec.model, &spec.set, trace, tol);
    let gap = cache.gap(0)?.expect("x_0 exists");
    let b = (gap * 1.01).max(0.05);
    let mut reports = Vec::new();
    for &eps in &cfg.eps {
        for g in CounterFn::test_family(cfg.seed) {
            if fejer {
                reports.push(fejer_shadow_metastability(&mut cache, b, eps, &g)?);
            }
            reports.push(quasi_fejer_shadow_metastability(&mut cache, b, big_b, eps, &g)?);
        }
    }
    let tail_oscillation = cache.tail_oscillation(cfg.horizon, cfg.tail_window)?;
    cache.check_fejer()?;
    Ok(ScenarioOutcome {
        name: name.to_string(),
        kind: spec.model.kind(),
        model: spec.model.name(),
        set: spec.set.label.clone(),
        mapping: spec.mapping.name.clone(),
        scheme: spec.scheme,
        b,
        big_b,
        horizon: cfg.horizon,
        materialised: cache.trace().len(),
        tail_oscillation,
        reports,
    })
}

fn boxed<S: ModelSpace + Clone + 'static>(
    kind: ModelKind,
    name: &'static str,
    build: impl Fn() -> Trace<S> + Send + Sync + 'static,
) -> Entry {
    Entry { name, kind, run: Box::new(move |cfg| run(name, &build(), cfg)) }
}

fn e(dim: usize) -> Euclidean {
    Euclidean::new(dim, 4.0).expect("valid")
}

fn line(model: &Euclidean, dir: &[f64]) -> ConvexSet<Vec<f64>> {
    ConvexSet::affine(model, vec![0.0; model.dim()], &[dir.to_vec()], 10.0).expect("valid")
}

/// The segment `[−len e₁, len e₁]` of `ℝ³` with its closed-form projection.
fn axis_segment(model: &Euclidean, len: f64) -> ConvexSet<Vec<f64>> {
    ConvexSet::segment(model, vec![-len, 0.0, 0.0], vec![len, 0.0, 0.0])
        .with_closed_form(move |x| vec![x[0].clamp(-len, len), 0.0, 0.0])
}

fn shear_trace(x0: Vec<f64>, alpha: fn(u64) -> f64) -> Trace<Euclidean> {
    let model = e(3);
    let set = axis_segment(&model, 2.0);
    let r0 = [-2.0, 2.0].iter().map(|&a| model.dist(&x0, &vec![a, 0.0, 0.0])).fold(0.0, f64::max);
    // Σ_{i ≥ k} 2⁻ⁱ = 2^{1−k}
    let delta = ErrorSeq::new("2^-n", |n| 0.5f64.powi(n.min(2000) as i32), |e| ceil_count(1.0 + (1.0 / e).log2()), 2.0);
    Trace {
        mapping: euclidean_shear(&model).expect("dimension 3"),
        model,
        set,
        x0,
        scheme: Scheme::Schu,
        alpha,
        schu: Some((delta, r0)),
    }
}

fn lp(dim: usize, p: f64) -> LpSpace {
    LpSpace::new(dim, p, 1.0).expect("valid")
}

fn disk() -> PoincareDisk {
    PoincareDisk::new(0.9).expect("valid")
}

fn diameter(model: &PoincareDisk, a: f64, b: f64) -> ConvexSet<DiskPoint> {
    ConvexSet::segment(model, DiskPoint::new(a, 0.0), DiskPoint::new(b, 0.0))
}

fn tree() -> MetricTree {
    MetricTree::from_edges(&parse_edge_list(BUILTIN_TREE).expect("builtin"), 3.0).expect("builtin")
}

fn vertex(t: &MetricTree, name: &str) -> crate::models::TreePoint {
    t.vertex_point(t.vertex_id(name).expect("builtin vertex"))
}

fn library() -> Vec<Entry> {
    vec![
        boxed(ModelKind::Euclidean, "euclidean2: mann, projection onto a line", || {
            let model = e(2);
            let set = line(&model, &[1.0, 0.0]);
            Trace { mapping: relaxed_projection(&model, set.clone(), 1.0), model, set, x0: vec![3.0, 4.0], scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Euclidean, "euclidean2: mann, ball projection, segment target", || {
            let model = e(2);
            let ball = ConvexSet::ball(&model, vec![0.0, 0.0], 1.0).expect("valid");
            let set = ConvexSet::segment(&model, vec![-1.0, 0.0], vec![0.0, 0.0]);
            Trace { mapping: relaxed_projection(&model, ball, 1.0), model, set, x0: vec![-3.0, 3.0], scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Euclidean, "euclidean2: mann with harmonic weights, relaxed ball projection", || {
            let model = e(2);
            let set = ConvexSet::ball(&model, vec![0.0, 0.0], 1.0).expect("valid");
            Trace { mapping: relaxed_projection(&model, set.clone(), 0.5), model, set, x0: vec![2.0, -1.5], scheme: Scheme::Mann, alpha: harmonic, schu: None }
        }),
        boxed(ModelKind::Euclidean, "euclidean2: trace inside the target", || {
            let model = e(2);
            let set = line(&model, &[1.0, 1.0]);
            Trace { mapping: relaxed_projection(&model, set.clone(), 1.0), model, set, x0: vec![0.7, 0.7], scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Euclidean, "euclidean3: mann, rotation about an axis", || {
            let model = e(3);
            let set = line(&model, &[0.0, 0.0, 1.0]);
            Trace { mapping: euclidean_rotation(&model, 0.3).expect("dimension 3"), model, set, x0: vec![1.0, 1.0, 0.5], scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Euclidean, "euclidean3: pure iteration of a contraction", || {
            let model = e(3);
            let set = ConvexSet::ball(&model, vec![0.0; 3], 0.0).expect("valid");
            Trace { mapping: contraction_toward(&model, vec![0.0; 3], 0.5), model, set, x0: vec![1.0, -2.0, 0.5], scheme: Scheme::Mann, alpha: |_| 1.0, schu: None }
        }),
        boxed(ModelKind::Euclidean, "euclidean3: mann, plane projection, line target", || {
            let model = e(3);
            let plane = ConvexSet::affine(&model, vec![0.0; 3], &[vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]], 10.0).expect("valid");
            let set = line(&model, &[1.0, 1.0, 0.0]);
            Trace { mapping: relaxed_projection(&model, plane, 1.0), model, set, x0: vec![1.0, 2.0, 3.0], scheme: Scheme::Mann, alpha: |_| 0.3, schu: None }
        }),
        boxed(ModelKind::Euclidean, "euclidean3: schu, shear, weights 1/2", || shear_trace(vec![0.5, 1.0, 1.0], half)),
        boxed(ModelKind::Euclidean, "euclidean3: schu, shear, weights 9/10", || shear_trace(vec![-1.0, -0.5, 0.8], |_| 0.9)),
        boxed(ModelKind::Lp, "l4: mann, projection onto an axis", || {
            let model = lp(3, 4.0);
            let set = ConvexSet::coordinate_subspace(&model, &[1, 2], 2.0).expect("valid");
            Trace { mapping: relaxed_projection(&model, set.clone(), 1.0), model, set, x0: vec![0.5, 0.3, -0.4], scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Lp, "l4: mann, coordinate reflection", || {
            let model = lp(3, 4.0);
            let set = ConvexSet::coordinate_subspace(&model, &[2], 2.0).expect("valid");
            Trace { mapping: lp_reflection(&model, 2).expect("valid"), model, set, x0: vec![0.2, -0.6, 0.7], scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Lp, "l4: mann, relaxed axis projection", || {
            let model = lp(3, 4.0);
            let set = ConvexSet::coordinate_subspace(&model, &[1, 2], 2.0).expect("valid");
            Trace { mapping: relaxed_projection(&model, set.clone(), 0.5), model, set, x0: vec![-0.3, 0.8, 0.1], scheme: Scheme::Mann, alpha: |_| 0.3, schu: None }
        }),
        boxed(ModelKind::Lp, "l4: mann, contraction to the origin", || {
            let model = lp(3, 4.0);
            let set = ConvexSet::ball(&model, vec![0.0; 3], 0.0).expect("valid");
            Trace { mapping: contraction_toward(&model, vec![0.0; 3], 0.2), model, set, x0: vec![0.6, 0.4, -0.5], scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Lp, "l3: mann with harmonic weights, projection onto an axis", || {
            let model = lp(2, 3.0);
            let set = ConvexSet::coordinate_subspace(&model, &[1], 2.0).expect("valid");
            Trace { mapping: relaxed_projection(&model, set.clone(), 1.0), model, set, x0: vec![0.4, 0.9], scheme: Scheme::Mann, alpha: harmonic, schu: None }
        }),
        boxed(ModelKind::Poincare, "poincare: mann, reflection, diameter target", || {
            let model = disk();
            let set = diameter(&model, -0.8, 0.8);
            Trace { mapping: poincare_reflection(&model), model, set, x0: DiskPoint::new(0.3, 0.5), scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Poincare, "poincare: mann, relaxed projection onto a diameter", || {
            let model = disk();
            let set = diameter(&model, -0.5, 0.5);
            Trace { mapping: relaxed_projection(&model, set.clone(), 0.5), model, set, x0: DiskPoint::new(0.1, 0.6), scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Poincare, "poincare: mann, contraction to the origin", || {
            let model = disk();
            let set = ConvexSet::ball(&model, DiskPoint::ORIGIN, 0.0).expect("valid");
            Trace { mapping: contraction_toward(&model, DiskPoint::ORIGIN, 0.3), model, set, x0: DiskPoint::new(-0.4, 0.7), scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Poincare, "poincare: mann, ball projection, segment target", || {
            let model = disk();
            let ball = ConvexSet::ball(&model, DiskPoint::ORIGIN, 0.8).expect("valid");
            let set = diameter(&model, -0.4, 0.0);
            Trace { mapping: relaxed_projection(&model, ball, 1.0), model, set, x0: DiskPoint::new(-0.5, 0.6), scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Poincare, "poincare: mann, rotation", || {
            let model = disk();
            let set = ConvexSet::ball(&model, DiskPoint::ORIGIN, 0.0).expect("valid");
            Trace { mapping: poincare_rotation(0.3), model, set, x0: DiskPoint::new(0.6, 0.2), scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Tree, "tree: mann, projection onto an edge", || {
            let model = tree();
            let set = ConvexSet::subtree(&model, model.subtree(&["r", "a"]).expect("builtin"));
            Trace { mapping: relaxed_projection(&model, set.clone(), 1.0), x0: vertex(&model, "g"), model, set, scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Tree, "tree: mann, contraction to a vertex", || {
            let model = tree();
            let a = vertex(&model, "a");
            let set = ConvexSet::ball(&model, a, 0.0).expect("valid");
            Trace { mapping: contraction_toward(&model, a, 0.25), x0: vertex(&model, "f"), model, set, scheme: Scheme::Mann, alpha: half, schu: None }
        }),
        boxed(ModelKind::Tree, "tree: mann, relaxed projection by search", || {
            let model = tree();
            let set = ConvexSet::subtree(&model, model.subtree(&["r", "b"]).expect("builtin")).without_closed_form();
            Trace { mapping: relaxed_projection(&model, set.clone(), 0.5), x0: vertex(&model, "d"), model, set, scheme: Scheme::Mann, alpha: |_| 0.3, schu: None }
        }),
        boxed(ModelKind::Tree, "tree: mann, subtree projection, segment target", || {
            let model = tree();
            let sub = ConvexSet::subtree(&model, model.subtree(&["r", "a", "b"]).expect("builtin"));
            let set = ConvexSet::segment(&model, vertex(&model, "r"), vertex(&model, "b"));
            Trace { mapping: relaxed_projection(&model, sub, 1.0), x0: vertex(&model, "f"), model, set, scheme: Scheme::Mann, alpha: half, schu: None }
        }),
    ]
}

pub fn scenario_names() -> Vec<&'static str> {
    library().into_iter().map(|e| e.name).collect()
}

/// Runs the scenarios of the configured models; results are in library
/// order.
pub fn run_scenarios(cfg: &ScenarioConfig) -> Vec<(String, Result<ScenarioOutcome>)> {
    library()
        .into_par_iter()
        .filter(|e| cfg.models.is_empty() || cfg.models.contains(&e.kind))
        .map(|e| (e.name.to_string(), (e.run)(cfg)))
        .collect()
}
