//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the output; exits 1 if any fails.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::Instant;

use ucw::models::Euclidean;
use ucw::rates::{mono_metastability, RealSeq};
use ucw::CounterFn;
use ucw_cli::report::{CheckRow, SuiteReport};
use ucw_cli::{run, Overrides, RunReport, Status};

fn campaign(suite: &str, model: &str, trials: Option<usize>, seed: u64) -> RunReport {
    let cfg = Overrides {
        suite: Some(suite.into()),
        model: Some(model.into()),
        trials: trials.map(|t| t.to_string()),
        seed: Some(seed.to_string()),
        ..Overrides::default()
    }
    .resolve()
    .expect("valid configuration");
    run(cfg)
}

fn rows(r: &RunReport) -> impl Iterator<Item = (&SuiteReport, &CheckRow)> {
    r.body.suites.iter().flat_map(|s| s.checks.iter().map(move |c| (s, c)))
}

fn evaluated(c: &CheckRow) -> usize {
    c.counts.pass + c.counts.fail
}

/// Names of rows that did not pass.
fn bad(r: &RunReport, keep: impl Fn(&SuiteReport, &CheckRow) -> bool) -> Vec<String> {
    rows(r)
        .filter(|(s, c)| keep(s, c) && c.status != Status::Pass)
        .map(|(s, c)| format!("{}/{}: {:?}", s.model.as_deref().unwrap_or("-"), c.name, c.status))
        .collect()
}

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(problems: Vec<String>, summary: String) -> Verdict {
    if problems.is_empty() {
        Verdict { ok: true, detail: summary }
    } else {
        Verdict { ok: false, detail: format!("{summary}; {}", problems.join("; ")) }
    }
}

fn axioms() -> Verdict {
    let start = Instant::now();
    let r = campaign("axioms", "all", Some(10_000), 1);
    let secs = start.elapsed().as_secs_f64();
    let mut problems = bad(&r, |_, _| true);
    for (s, c) in rows(&r) {
        let want = if s.model.as_deref() == Some("poincare") { 1e-7 } else { 1e-9 };
        if c.tolerance != Some(want) {
            problems.push(format!("{}/{}: tolerance {:?}", s.model.as_deref().unwrap_or("-"), c.name, c.tolerance));
        }
        if evaluated(c) < 10_000 {
            problems.push(format!("{}/{}: {} trials", s.model.as_deref().unwrap_or("-"), c.name, evaluated(c)));
        }
    }
    for s in &r.body.suites {
        for name in ["metric", "W1", "W2", "W3", "W4", "W5"] {
            if !s.checks.iter().any(|c| c.name == name) {
                problems.push(format!("{}: {name} missing", s.model.as_deref().unwrap_or("-")));
            }
        }
    }
    if r.body.suites.len() != 4 {
        problems.push(format!("{} models", r.body.suites.len()));
    }
    if secs >= 60.0 {
        problems.push(format!("took {secs:.1}s"));
    }
    verdict(problems, format!("4 models, {} checks, {secs:.1}s", rows(&r).count()))
}

fn cat0() -> Verdict {
    let mut problems = Vec::new();
    let mut gap = f64::NAN;
    for model in ["euclidean", "poincare", "tree"] {
        let r = campaign("cat0", model, Some(10_000), 2);
        problems.extend(bad(&r, |_, _| true));
        for (_, c) in rows(&r) {
            if evaluated(c) < 10_000 {
                problems.push(format!("{model}: {} trials", evaluated(c)));
            }
            if model == "euclidean" {
                gap = c.max_gap.unwrap_or(f64::INFINITY).abs();
            }
        }
    }
    if !(gap < 1e-12) {
        problems.push(format!("euclidean gap {gap:e}"));
    }
    verdict(problems, format!("euclidean gap {gap:e}"))
}

fn property_g() -> Verdict {
    let r = campaign("property_g", "all", Some(100_000), 3);
    let mut problems = bad(&r, |_, _| true);
    let mut direct = 0;
    for s in &r.body.suites {
        let model = s.model.as_deref().unwrap_or("-");
        match s.checks.iter().find(|c| c.name == "property_g") {
            Some(c) if evaluated(c) >= 100_000 => {}
            _ => problems.push(format!("{model}: property_g missing or short")),
        }
        let cat0 = !model.starts_with("lp");
        let has_direct = s.checks.iter().any(|c| c.name == "property_g_cat0_direct");
        direct += has_direct as usize;
        if cat0 != has_direct {
            problems.push(format!("{model}: direct modulus row {has_direct}"));
        }
    }
    verdict(problems, format!("{} models, direct modulus on {direct}", r.body.suites.len()))
}

fn lambda_convexity() -> Verdict {
    let r = campaign("lambda_convexity", "all", Some(100_000), 4);
    let mut problems = bad(&r, |_, _| true);
    for s in &r.body.suites {
        for name in ["lambda_convexity", "lambda_convexity_weak"] {
            match s.checks.iter().find(|c| c.name == name) {
                Some(c) if evaluated(c) >= 100_000 => {}
                _ => problems.push(format!("{}: {name} missing or short", s.model.as_deref().unwrap_or("-"))),
            }
        }
    }
    verdict(problems, format!("{} models", r.body.suites.len()))
}

fn afp() -> Verdict {
    let r = campaign("afp", "all", Some(10_000), 5);
    let mut problems = bad(&r, |_, _| true);
    let mut admissible: BTreeMap<String, u64> = BTreeMap::new();
    for (s, c) in rows(&r) {
        let Some(frac) = c.detail.get("admissible_fraction").and_then(|v| v.as_f64()) else { continue };
        let prop = c.name.split('[').next().unwrap_or_default().to_string();
        *admissible.entry(prop).or_default() += c.detail["admissible"].as_u64().unwrap_or(0);
        if frac < 0.5 {
            problems.push(format!("{}/{}: admissible {frac:.2}", s.model.as_deref().unwrap_or("-"), c.name));
        }
    }
    for prop in ["afp_segment", "afp_power", "afp_single_step"] {
        match admissible.get(prop) {
            Some(&n) if n >= 10_000 => {}
            n => problems.push(format!("{prop}: {n:?} admissible")),
        }
    }
    verdict(problems, format!("admissible {admissible:?}"))
}

fn rates_row<'a>(r: &'a RunReport, name: &str) -> Option<&'a CheckRow> {
    rows(r).map(|(_, c)| c).find(|c| c.name == name)
}

fn monotone() -> Verdict {
    let r = campaign("rates", "all", None, 6);
    let mut problems = bad(&r, |_, c| c.name == "mono_metastability" || c.name == "rates");
    let n = rates_row(&r, "mono_metastability").map(|c| c.counts.pass).unwrap_or(0);
    let seq = RealSeq::new("2^-n", 1.0, |n| 0.5f64.powi(n as i32));
    match mono_metastability(&seq, 0.1, &CounterFn::constant(1), 1e-12) {
        Ok(m) if m.found_n == Some(3) && m.theoretical_bound.value == 10 => {}
        other => problems.push(format!("2^-n instance: {other:?}")),
    }
    verdict(problems, format!("{n} instances, 2^-n found N = 3 <= 10"))
}

fn quasi_monotone() -> Verdict {
    let r = campaign("rates", "all", None, 7);
    let problems = bad(&r, |_, _| true);
    let q = rates_row(&r, "quasi_metastability").map(|c| c.counts.pass).unwrap_or(0);
    let a = rates_row(&r, "zero_error_agreement").map(|c| c.counts.pass).unwrap_or(0);
    verdict(problems, format!("{q} quasi-monotone instances, {a} zero-error agreements"))
}

fn shadow() -> Verdict {
    let start = Instant::now();
    let r = campaign("shadow", "all", None, 8);
    let secs = start.elapsed().as_secs_f64();
    let mut problems = bad(&r, |_, _| true);
    let mut models = std::collections::BTreeSet::new();
    let mut worst: f64 = 0.0;
    let scenarios = rows(&r).count();
    for (_, c) in rows(&r) {
        if let Some(m) = c.detail.get("model").and_then(|v| v.as_str()) {
            models.insert(m.split('(').next().unwrap_or(m).to_string());
        }
        if c.detail.get("horizon").and_then(|v| v.as_u64()) != Some(10_000) {
            problems.push(format!("{}: horizon {:?}", c.name, c.detail.get("horizon")));
        }
        let osc = c.detail.get("tail_oscillation").and_then(|v| v.as_f64()).unwrap_or(f64::INFINITY);
        worst = worst.max(osc);
        if !(osc < 1e-6) {
            problems.push(format!("{}: tail oscillation {osc:e}", c.name));
        }
    }
    if scenarios < 20 {
        problems.push(format!("{scenarios} scenarios"));
    }
    if models.len() != 4 {
        problems.push(format!("models {models:?}"));
    }
    if secs >= 600.0 {
        problems.push(format!("took {secs:.1}s"));
    }
    verdict(problems, format!("{scenarios} scenarios on {} models, worst tail oscillation {worst:e}, {secs:.1}s", models.len()))
}

/// Five independent 100-instance campaigns: a single draw passes or fails
/// on ℓ4 depending on the seed.
fn prox() -> Verdict {
    let relevant = |s: &SuiteReport, c: &CheckRow| {
        let check = c.name.split('[').next().unwrap_or_default();
        (check == "prox_closed_form" && s.model.as_deref().is_some_and(|m| m.starts_with("euclidean")))
            || matches!(check, "prox_indicator" | "prox_uniqueness" | "minimizer_fixed_point")
    };
    let mut problems = Vec::new();
    let mut worst: BTreeMap<String, f64> = BTreeMap::new();
    for seed in 1..=5 {
        let r = campaign("prox", "all", Some(100), seed);
        problems.extend(bad(&r, relevant).into_iter().map(|p| format!("seed {seed} {p}")));
        for (s, c) in rows(&r).filter(|(s, c)| relevant(s, c)) {
            let check = c.name.split('[').next().unwrap_or_default();
            if let Some(g) = c.max_gap {
                let w = worst.entry(check.to_string()).or_insert(0.0);
                *w = w.max(g);
            }
            if check != "minimizer_fixed_point" && evaluated(c) < 100 {
                problems.push(format!("{}/{}: {} instances", s.model.as_deref().unwrap_or("-"), c.name, evaluated(c)));
            }
        }
        let euclid = rows(&r).any(|(s, c)| c.name == "prox_closed_form" && s.model.as_deref().is_some_and(|m| m.starts_with("euclidean")));
        if !euclid {
            problems.push("euclidean closed form missing".into());
        }
    }
    // the closed form is a + λ/(1+λ)(p − a)
    let e = Euclidean::new(2, 1.0).expect("model");
    let prob = ucw::ProxProblem::new(ucw::Functional::half_sq_dist_to(vec![1.0, 2.0]), 3.0, vec![-1.0, 0.0]).expect("problem");
    let x = ucw::prox(&e, &prob, 1e-6).expect("prox");
    if (x[0] - 0.5).abs() > 1e-12 || (x[1] - 1.5).abs() > 1e-12 {
        problems.push(format!("closed form gave {x:?}"));
    }
    verdict(problems, format!("worst gaps {worst:?}"))
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("ucw-acceptance-{}", std::process::id()));
    let mut bodies = Vec::new();
    let mut problems = Vec::new();
    for k in 0..2 {
        let out = dir.join(format!("run{k}.json"));
        let status = Command::new(env!("CARGO_BIN_EXE_ucw"))
            .args(["verify", "--suite", "all", "--seed", "7", "--out"])
            .arg(&out)
            .env_remove("UCW_OUT_DIR")
            .status()
            .expect("binary runs");
        if status.code() != Some(0) {
            problems.push(format!("run {k} exited {:?}", status.code()));
        }
        let text = std::fs::read_to_string(&out).unwrap_or_default();
        let body: String = text.lines().filter(|l| !l.trim_start().starts_with("\"wall_clock_seconds\"")).map(|l| format!("{l}\n")).collect();
        bodies.push(body);
    }
    let _ = std::fs::remove_dir_all(&dir);
    if bodies[0].is_empty() || bodies[0] != bodies[1] {
        problems.push("report bodies differ".into());
    }
    verdict(problems, format!("{} body bytes", bodies[0].len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("axioms", axioms),
        ("cat0 midpoint inequality", cat0),
        ("property (G)", property_g),
        ("lambda-weighted convexity", lambda_convexity),
        ("approximate fixed points", afp),
        ("monotone metastability", monotone),
        ("quasi-monotone metastability", quasi_monotone),
        ("shadow metastability", shadow),
        ("proximal mappings", prox),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let v = f();
        println!("criterion {:>2} {:<30} {}  {}", i + 1, name, if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += !v.ok as usize;
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
