//! The verification suites. Each returns report rows in a fixed order so
//! that reports depend only on the configuration.

use serde_json::json;
use ucw::check::AxiomReport;
use ucw::fixpoint::{afp_campaign, check_fixed_point_convexity, check_mapping, AfpProposition, MappingKind, ShippedMappings};
use ucw::models::{check_cat0, instantiate_model, ModelParams};
use ucw::moduli::{check_lambda_convexity, check_property_g, check_uniform_convexity, ConstraintSampling};
use ucw::proximal::{
    check_functional_convexity, check_prox_closed_form, check_prox_descent, check_prox_indicator,
    check_prox_order_lambda, check_prox_uniqueness, functional_library, minimizer_fixed_point_check, Functional,
};
use ucw::rates::{mono_metastability, monotone_family, quasi_monotone_family, summable_metastability, CounterFn, MetaStatus};
use ucw::sampling::{derive_seed, rng_from_seed};
use ucw::shadow::{run_scenarios, ScenarioConfig};
use ucw::{with_model, GeodesicSpace, PropertyGModulus};

use crate::config::{CampaignConfig, Suite};
use crate::report::{CheckRow, Counts, Status, SuiteReport, ViolationRow};

/// ε grid of the metastability suites.
pub const EPS_GRID: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Fraction of sampled instances that must satisfy a campaign's
/// preconditions for its verdict to count.
pub const MIN_ADMISSIBLE: f64 = 0.5;

/// Tolerance of the sequence checks inside the metastability verifiers.
pub const SEQ_TOL: f64 = 1e-12;

/// Samples per trial in the prox descent check.
pub const DESCENT_SAMPLES: usize = 500;

fn row(name: impl Into<String>, r: ucw::Result<AxiomReport>) -> CheckRow {
    let name = name.into();
    match r {
        Ok(r) => CheckRow::from_axiom(name, &r),
        Err(e) => CheckRow::error(name, e),
    }
}

fn rows(prefix: &str, r: ucw::Result<Vec<AxiomReport>>) -> Vec<CheckRow> {
    match r {
        Ok(rs) => rs.iter().map(|r| CheckRow::from_axiom(r.check.name(), r)).collect(),
        Err(e) => vec![CheckRow::error(prefix, e)],
    }
}

struct Ctx {
    seed: u64,
    trials: usize,
    tol: Option<f64>,
    prox_tol: f64,
}

impl Ctx {
    fn tol<S: GeodesicSpace>(&self, m: &S) -> f64 {
        self.tol.unwrap_or_else(|| m.tolerance())
    }

    fn seed(&self, k: u64) -> u64 {
        derive_seed(self.seed, k)
    }
}

fn axioms<S: ShippedMappings>(m: &S, c: &Ctx) -> Vec<CheckRow> {
    rows("axioms", ucw::check_axioms(m, c.seed(1), c.trials, c.tol(m)))
}

fn cat0<S: ShippedMappings>(m: &S, c: &Ctx) -> Vec<CheckRow> {
    if !m.is_cat0() {
        return vec![CheckRow::skipped("cat0", "not a CAT(0) space")];
    }
    vec![row("cat0", check_cat0(m, c.seed(2), c.trials, c.tol(m)))]
}

fn property_g<S: ShippedMappings>(m: &S, c: &Ctx) -> Vec<CheckRow> {
    let tol = c.tol(m);
    let mut out = vec![
        row("property_g", check_property_g(m, &PropertyGModulus::for_model(m), ConstraintSampling::Derived, c.seed(3), c.trials, tol)),
        row("uniform_convexity", check_uniform_convexity(m, c.seed(4), c.trials, tol)),
    ];
    if m.is_cat0() {
        out.push(row(
            "property_g_cat0_direct",
            check_property_g(m, &PropertyGModulus::Cat0Direct, ConstraintSampling::Derived, c.seed(5), c.trials, tol),
        ));
    }
    out
}

fn lambda_convexity<S: ShippedMappings>(m: &S, c: &Ctx) -> Vec<CheckRow> {
    rows("lambda_convexity", check_lambda_convexity(m, ConstraintSampling::Derived, c.seed(6), c.trials, c.tol(m)))
}

fn afp<S: ShippedMappings>(m: &S, c: &Ctx) -> Vec<CheckRow> {
    let tol = c.tol(m);
    let mut out = Vec::new();
    for (i, t) in m.mapping_library().iter().enumerate() {
        let salt = 100 + 10 * i as u64;
        out.push(row(format!("mapping[{}]", t.name), check_mapping(m, t, c.seed(salt), c.trials, tol)));
        out.push(row(
            format!("fixed_point_convexity[{}]", t.name),
            check_fixed_point_convexity(m, t, c.seed(salt + 1), c.trials, tol),
        ));
        let props: &[AfpProposition] = match t.kind {
            MappingKind::Nonexpansive => &[AfpProposition::Segment, AfpProposition::Power, AfpProposition::SingleStep],
            MappingKind::AsymptoticallyNonexpansive => &[AfpProposition::Power, AfpProposition::SingleStep],
        };
        for (k, &p) in props.iter().enumerate() {
            let salt = salt + 2 + k as u64;
            let name = |check: &str| format!("{check}[{}]", t.name);
            match afp_campaign(m, t, p, c.seed(salt), c.trials, tol) {
                Ok(camp) => {
                    let mut r = CheckRow::from_axiom(name(camp.report.check.name()), &camp.report).with_detail(json!({
                        "admissible": camp.admissible,
                        "admissible_fraction": camp.admissible_fraction(),
                        "cases": camp.cases,
                    }));
                    if r.status == Status::Pass && camp.admissible_fraction() < MIN_ADMISSIBLE {
                        r.status = Status::Inconclusive;
                        r.error = Some(format!(
                            "sampler health: only {:.1}% of instances admissible",
                            100.0 * camp.admissible_fraction()
                        ));
                    }
                    out.push(r);
                }
                Err(e) => out.push(CheckRow::error(name("afp"), e)),
            }
        }
    }
    out
}

fn prox<S: ShippedMappings>(m: &S, c: &Ctx) -> Vec<CheckRow> {
    let tol = c.tol(m);
    let pt = c.prox_tol;
    let mut out = vec![row("prox_closed_form", check_prox_closed_form(m, c.seed(200), c.trials, pt))];
    let mut rng = rng_from_seed(c.seed(201));
    for (i, lf) in functional_library(m, c.seed(202)).iter().enumerate() {
        let salt = 210 + 10 * i as u64;
        let f = &lf.f;
        let name = |check: &str| format!("{check}[{}]", lf.name);
        out.push(row(name("prox_uniqueness"), check_prox_uniqueness(m, f, c.seed(salt), c.trials, pt)));
        out.push(row(name("prox_order_lambda"), check_prox_order_lambda(m, f, c.seed(salt + 1), c.trials, pt)));
        out.push(row(
            name("prox_descent"),
            check_prox_descent(m, f, c.seed(salt + 2), c.trials, DESCENT_SAMPLES, tol),
        ));
        out.push(row(
            name("functional_convexity"),
            check_functional_convexity(m, f, c.seed(salt + 3), c.trials.max(100), tol),
        ));
        if let Functional::Indicator(set) = f {
            out.push(row(name("prox_indicator"), check_prox_indicator(m, set, c.seed(salt + 4), c.trials, pt)));
        }
        let mut candidates = lf.minimizers.clone();
        for _ in 0..6 {
            candidates.push(m.sample(&mut rng));
        }
        out.push(match minimizer_fixed_point_check(m, f, &candidates, pt) {
            Ok(r) => {
                let bad = r.entries.iter().filter(|e| !e.consistent).count();
                CheckRow {
                    name: name("minimizer_fixed_point"),
                    status: if r.passed() { Status::Pass } else { Status::Fail },
                    counts: Counts { pass: r.entries.len() - bad, fail: bad, inconclusive: 0, skipped: 0 },
                    tolerance: Some(r.tolerance),
                    max_gap: None,
                    detail: json!({
                        "infimum": r.infimum,
                        "fixed": r.entries.iter().filter(|e| e.is_fixed).count(),
                        "minimizers": r.entries.iter().filter(|e| e.is_minimizer).count(),
                    }),
                    violations: r
                        .entries
                        .iter()
                        .enumerate()
                        .filter(|(_, e)| !e.consistent)
                        .map(|(k, e)| ViolationRow {
                            index: k as u64,
                            lhs: Some(e.fix_residual),
                            rhs: Some(e.min_gap),
                            gap: None,
                            inputs: serde_json::to_value(e).unwrap_or_default(),
                        })
                        .collect(),
                    error: None,
                }
            }
            Err(e) => CheckRow::error(name("minimizer_fixed_point"), e),
        });
    }
    out
}

/// Metastability of the monotone and quasi-monotone test families over
/// the `g` family and [`EPS_GRID`], and agreement of the two verifiers on
/// monotone sequences.
pub fn rates_rows(seed: u64) -> Vec<CheckRow> {
    let gs = CounterFn::test_family(seed);
    let mut mono = Vec::new();
    let mut degenerate = Vec::new();
    let mut errors = Vec::new();
    let mut disagreements = Vec::new();
    for seq in monotone_family(seed) {
        for g in &gs {
            for eps in EPS_GRID {
                match (mono_metastability(&seq, eps, g, SEQ_TOL), summable_metastability(&seq, eps, g, SEQ_TOL)) {
                    (Ok(a), Ok(b)) => {
                        if a.status != b.status || a.found_n != b.found_n {
                            disagreements.push(json!({ "mono": a, "summable": b }));
                        }
                        mono.push(a);
                        degenerate.push(b);
                    }
                    (Err(e), _) | (_, Err(e)) => errors.push(format!("{} eps={eps} g={}: {e}", seq.descriptor, g.name())),
                }
            }
        }
    }
    let mut quasi = Vec::new();
    for seq in quasi_monotone_family(seed) {
        for g in &gs {
            for eps in EPS_GRID {
                match summable_metastability(&seq, eps, g, SEQ_TOL) {
                    Ok(r) => quasi.push(r),
                    Err(e) => errors.push(format!("{} eps={eps} g={}: {e}", seq.descriptor, g.name())),
                }
            }
        }
    }
    let compliance = |rs: &[ucw::MetastabilityReport]| {
        rs.iter()
            .filter(|r| r.status == MetaStatus::Pass)
            .all(|r| r.found_n.is_some_and(|n| r.theoretical_bound.saturated || n <= r.theoretical_bound.value))
    };
    let mut out = Vec::new();
    for (name, rs) in [("mono_metastability", &mono), ("quasi_metastability", &quasi), ("quasi_metastability_zero_errors", &degenerate)] {
        let mut r = CheckRow::from_metastability(name, rs);
        if !compliance(rs) {
            r.status = Status::Fail;
        }
        out.push(r);
    }
    let agree = mono.len() - disagreements.len();
    out.push(CheckRow {
        name: "zero_error_agreement".into(),
        status: if disagreements.is_empty() { Status::Pass } else { Status::Fail },
        counts: Counts { pass: agree, fail: disagreements.len(), inconclusive: 0, skipped: 0 },
        tolerance: None,
        max_gap: None,
        detail: serde_json::Value::Null,
        violations: disagreements
            .into_iter()
            .enumerate()
            .map(|(i, inputs)| ViolationRow { index: i as u64, lhs: None, rhs: None, gap: None, inputs })
            .collect(),
        error: None,
    });
    for e in errors {
        out.push(CheckRow::error("rates", e));
    }
    out
}

/// Shadow metastability over the scenario library of the given models.
pub fn shadow_rows(models: &[ModelParams], seed: u64) -> Vec<CheckRow> {
    let mut kinds: Vec<_> = models.iter().map(|m| m.kind).collect();
    kinds.dedup();
    let cfg = ScenarioConfig { seed, models: kinds, ..ScenarioConfig::default() };
    run_scenarios(&cfg)
        .into_iter()
        .map(|(name, outcome)| match outcome {
            Ok(o) => CheckRow::from_metastability(name, &o.reports).with_detail(json!({
                "model": o.model,
                "set": o.set,
                "mapping": o.mapping,
                "scheme": o.scheme,
                "b": o.b,
                "big_b": o.big_b,
                "horizon": o.horizon,
                "materialised": o.materialised,
                "tail_oscillation": o.tail_oscillation,
            })),
            Err(e) => CheckRow::error(name, e),
        })
        .collect()
}

fn model_suite(suite: Suite, params: &ModelParams, cfg: &CampaignConfig) -> SuiteReport {
    let model = match instantiate_model(params) {
        Ok(m) => m,
        Err(e) => return SuiteReport::new(suite.name(), Some(params.kind.to_string()), vec![CheckRow::error(suite.name(), e)]),
    };
    let c = Ctx {
        seed: derive_seed(cfg.seed, suite as u64),
        trials: cfg.trials_for(suite),
        tol: cfg.tolerances.inequality,
        prox_tol: cfg.tolerances.prox,
    };
    let checks = with_model!(&model, m => match suite {
        Suite::Axioms => axioms(m, &c),
        Suite::Cat0 => cat0(m, &c),
        Suite::PropertyG => property_g(m, &c),
        Suite::LambdaConvexity => lambda_convexity(m, &c),
        Suite::Afp => afp(m, &c),
        Suite::Prox => prox(m, &c),
        Suite::Rates | Suite::Shadow | Suite::All => unreachable!("not a per-model suite"),
    });
    SuiteReport::new(suite.name(), Some(model.name()), checks)
}

/// Runs the configured suites in report order.
pub fn run_suites(cfg: &CampaignConfig) -> Vec<SuiteReport> {
    let suites: Vec<Suite> = if cfg.suite == Suite::All { Suite::EACH.to_vec() } else { vec![cfg.suite] };
    let mut out = Vec::new();
    for suite in suites {
        match suite {
            Suite::Rates => out.push(SuiteReport::new("rates", None, rates_rows(derive_seed(cfg.seed, suite as u64)))),
            Suite::Shadow => {
                out.push(SuiteReport::new("shadow", None, shadow_rows(&cfg.models, derive_seed(cfg.seed, suite as u64))))
            }
            _ => {
                for params in &cfg.models {
                    out.push(model_suite(suite, params, cfg));
                }
            }
        }
    }
    out
}
