//! Run reports. The body is a pure function of the configuration; the
//! wall-clock time sits outside it.

use serde::Serialize;
use serde_json::Value;
use ucw::check::AxiomReport;
use ucw::rates::{MetaStatus, MetastabilityReport};

use crate::config::CampaignConfig;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
    Error,
    /// Not applicable to the model.
    Skipped,
}

/// Instance counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub skipped: usize,
}

impl Counts {
    pub fn add(&mut self, o: Counts) {
        self.pass += o.pass;
        self.fail += o.fail;
        self.inconclusive += o.inconclusive;
        self.skipped += o.skipped;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationRow {
    pub index: u64,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub gap: Option<f64>,
    pub inputs: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub name: String,
    pub status: Status,
    pub counts: Counts,
    pub tolerance: Option<f64>,
    pub max_gap: Option<f64>,
    pub detail: Value,
    pub violations: Vec<ViolationRow>,
    pub error: Option<String>,
}

impl CheckRow {
    pub fn from_axiom(name: impl Into<String>, r: &AxiomReport) -> Self {
        Self {
            name: name.into(),
            status: if r.passed() { Status::Pass } else { Status::Fail },
            counts: Counts { pass: r.evaluated() - r.violation_count, fail: r.violation_count, inconclusive: 0, skipped: r.skipped },
            tolerance: Some(r.tolerance),
            max_gap: Some(r.max_gap),
            detail: Value::Null,
            violations: r
                .violations
                .iter()
                .map(|v| ViolationRow { index: v.trial, lhs: Some(v.lhs), rhs: Some(v.rhs), gap: Some(v.gap), inputs: v.inputs.clone() })
                .collect(),
            error: None,
        }
    }

    /// Folds metastability verdicts; failures and inconclusive verdicts are
    /// listed with their index in `reports`.
    pub fn from_metastability(name: impl Into<String>, reports: &[MetastabilityReport]) -> Self {
        let mut counts = Counts::default();
        let mut violations = Vec::new();
        for (i, r) in reports.iter().enumerate() {
            match r.status {
                MetaStatus::Pass => counts.pass += 1,
                MetaStatus::Fail => counts.fail += 1,
                MetaStatus::Inconclusive => counts.inconclusive += 1,
            }
            if r.status != MetaStatus::Pass {
                violations.push(ViolationRow {
                    index: i as u64,
                    lhs: r.found_n.map(|n| n as f64),
                    rhs: Some(r.theoretical_bound.value as f64),
                    gap: r.max_oscillation,
                    inputs: serde_json::to_value(r).unwrap_or(Value::Null),
                });
            }
        }
        let status = if counts.fail > 0 {
            Status::Fail
        } else if counts.inconclusive > 0 {
            Status::Inconclusive
        } else {
            Status::Pass
        };
        Self { name: name.into(), status, counts, tolerance: None, max_gap: None, detail: Value::Null, violations, error: None }
    }

    pub fn error(name: impl Into<String>, err: impl ToString) -> Self {
        Self {
            name: name.into(),
            status: Status::Error,
            counts: Counts::default(),
            tolerance: None,
            max_gap: None,
            detail: Value::Null,
            violations: Vec::new(),
            error: Some(err.to_string()),
        }
    }

    pub fn skipped(name: impl Into<String>, reason: &str) -> Self {
        Self { status: Status::Skipped, error: None, detail: Value::String(reason.into()), ..Self::error(name, "") }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    /// `None` for suites that do not sample a model.
    pub model: Option<String>,
    pub counts: Counts,
    pub errors: usize,
    pub checks: Vec<CheckRow>,
}

impl SuiteReport {
    pub fn new(suite: &str, model: Option<String>, checks: Vec<CheckRow>) -> Self {
        let mut counts = Counts::default();
        for c in &checks {
            counts.add(c.counts);
        }
        let errors = checks.iter().filter(|c| c.status == Status::Error).count();
        Self { suite: suite.into(), model, counts, errors, checks }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Artifact {
    pub name: &'static str,
    pub version: &'static str,
}

pub const ARTIFACT: Artifact = Artifact { name: env!("CARGO_PKG_NAME"), version: env!("CARGO_PKG_VERSION") };

#[derive(Debug, Clone, Serialize)]
pub struct ReportBody {
    pub artifact: Artifact,
    pub config: CampaignConfig,
    pub exit_code: i32,
    pub counts: Counts,
    pub errors: usize,
    pub suites: Vec<SuiteReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub body: ReportBody,
    pub wall_clock_seconds: f64,
}

/// Exit code of a run: 1 on any violation, else 3 on any error or
/// inconclusive verdict, else 0.
pub fn exit_code(suites: &[SuiteReport]) -> i32 {
    let rows = || suites.iter().flat_map(|s| &s.checks);
    if rows().any(|c| c.status == Status::Fail || c.counts.fail > 0) {
        1
    } else if rows().any(|c| matches!(c.status, Status::Error | Status::Inconclusive) || c.counts.inconclusive > 0) {
        3
    } else {
        0
    }
}

impl RunReport {
    pub fn new(config: CampaignConfig, suites: Vec<SuiteReport>, wall_clock_seconds: f64) -> Self {
        let mut counts = Counts::default();
        for s in &suites {
            counts.add(s.counts);
        }
        let errors = suites.iter().map(|s| s.errors).sum();
        let body = ReportBody { artifact: ARTIFACT, config, exit_code: exit_code(&suites), counts, errors, suites };
        Self { body, wall_clock_seconds }
    }

    pub fn exit_code(&self) -> i32 {
        self.body.exit_code
    }

    /// The body alone, as written inside [`RunReport::to_json`].
    pub fn body_json(&self) -> String {
        serde_json::to_string_pretty(&self.body).expect("report serialises")
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    /// One row per recorded violation, failed check or errored check.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(["suite", "model", "check", "status", "index", "lhs", "rhs", "gap", "inputs"]).map_err(io)?;
        let num = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for s in &self.body.suites {
            let model = s.model.clone().unwrap_or_default();
            for c in &s.checks {
                let status = serde_json::to_value(c.status).expect("status serialises");
                let status = status.as_str().unwrap_or_default();
                if c.status == Status::Error {
                    let msg = c.error.clone().unwrap_or_default();
                    w.write_record([s.suite.as_str(), &model, &c.name, status, "", "", "", "", &msg]).map_err(io)?;
                }
                for v in &c.violations {
                    w.write_record([
                        s.suite.as_str(),
                        &model,
                        &c.name,
                        status,
                        &v.index.to_string(),
                        &num(v.lhs),
                        &num(v.rhs),
                        &num(v.gap),
                        &v.inputs.to_string(),
                    ])
                    .map_err(io)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
    }
}
