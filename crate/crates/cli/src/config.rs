//! Campaign configuration: `key=value` files overridden by flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;
use ucw::models::{parse_edge_list, ModelKind, ModelParams, BUILTIN_TREE};
use ucw::proximal::PROX_TOL;

use crate::CliError;

/// Environment variable that redirects report files to another directory.
pub const OUT_DIR_ENV: &str = "UCW_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Axioms,
    Cat0,
    PropertyG,
    LambdaConvexity,
    Afp,
    Rates,
    Shadow,
    Prox,
    All,
}

impl Suite {
    /// Suites run by `all`, in report order.
    pub const EACH: [Suite; 8] = [
        Suite::Axioms,
        Suite::Cat0,
        Suite::PropertyG,
        Suite::LambdaConvexity,
        Suite::Afp,
        Suite::Rates,
        Suite::Shadow,
        Suite::Prox,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Cat0 => "cat0",
            Suite::PropertyG => "property_g",
            Suite::LambdaConvexity => "lambda_convexity",
            Suite::Afp => "afp",
            Suite::Rates => "rates",
            Suite::Shadow => "shadow",
            Suite::Prox => "prox",
            Suite::All => "all",
        }
    }

    /// Trials per sampled check when none are given: the acceptance scale
    /// for a single suite, a tenth of it (or less) under `all`.
    pub fn default_trials(self, reduced: bool) -> usize {
        let (full, small) = match self {
            Suite::Axioms | Suite::Cat0 => (10_000, 2_000),
            Suite::PropertyG | Suite::LambdaConvexity => (100_000, 10_000),
            Suite::Afp => (10_000, 1_000),
            Suite::Prox => (100, 10),
            Suite::Rates | Suite::Shadow | Suite::All => (0, 0),
        };
        if reduced { small } else { full }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                CliError::Usage(format!(
                    "unknown suite {s:?}; expected one of axioms, cat0, property_g, lambda_convexity, afp, rates, shadow, prox, all"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(CliError::Usage(format!("unknown format {s:?}; expected json or csv"))),
        }
    }
}

/// Parses a model spec:
///
/// ```text
/// all | euclidean[:n=2,r=1] | lp[:n=2,p=4,r=1] | poincare[:r=0.9] | tree[:file=PATH,r=3]
/// ```
///
/// `all` stands for the four models with their defaults.
pub fn parse_model_spec(spec: &str) -> Result<Vec<ModelParams>, CliError> {
    let spec = spec.trim();
    if spec == "all" {
        return ["euclidean", "lp", "poincare", "tree"].iter().map(|s| parse_one(s)).collect();
    }
    Ok(vec![parse_one(spec)?])
}

fn parse_one(spec: &str) -> Result<ModelParams, CliError> {
    let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut fields = Vec::new();
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("model option {item:?} is not key=value")))?;
        fields.push((k.trim(), v.trim()));
    }
    let allowed: &[&str] = match kind {
        "euclidean" => &["n", "r"],
        "lp" => &["n", "p", "r"],
        "poincare" => &["r"],
        "tree" => &["file", "r"],
        _ => {
            return Err(CliError::Usage(format!(
                "unknown model {kind:?}; expected euclidean, lp, poincare, tree or all"
            )))
        }
    };
    if let Some((k, _)) = fields.iter().find(|(k, _)| !allowed.contains(k)) {
        return Err(CliError::Usage(format!("model {kind} has no option {k:?}; options are {}", allowed.join(", "))));
    }
    let get = |key: &str| fields.iter().rev().find(|(k, _)| *k == key).map(|(_, v)| *v);
    let num = |key: &str| -> Result<Option<f64>, CliError> {
        get(key)
            .map(|v| v.parse::<f64>().map_err(|_| CliError::Usage(format!("model option {key}={v} is not a number"))))
            .transpose()
    };
    let dim = || -> Result<usize, CliError> {
        get("n")
            .map(|v| v.parse::<usize>().map_err(|_| CliError::Usage(format!("model option n={v} is not a count"))))
            .transpose()
            .map(|n| n.unwrap_or(2))
    };
    let mut params = match kind {
        "euclidean" => ModelParams::euclidean(dim()?),
        "lp" => ModelParams::lp(dim()?, num("p")?.unwrap_or(4.0)),
        "poincare" => ModelParams::poincare(0.9),
        _ => {
            let text = match get("file") {
                Some(path) => std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read tree file {path}: {e}")))?,
                None => BUILTIN_TREE.to_string(),
            };
            let edges = parse_edge_list(&text).map_err(|e| CliError::Usage(e.to_string()))?;
            ModelParams::tree(edges).with_sampling_radius(3.0)
        }
    };
    if let Some(r) = num("r")? {
        params = params.with_sampling_radius(r);
    }
    params.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(params)
}

#[derive(Debug, Clone, Serialize)]
pub struct Tolerances {
    /// Tolerance of inequality checks; each model's own when absent.
    pub inequality: Option<f64>,
    /// Point accuracy of proxes.
    pub prox: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CampaignConfig {
    pub seed: u64,
    pub suite: Suite,
    pub model: String,
    #[serde(skip)]
    pub models: Vec<ModelParams>,
    /// Trials per sampled check; per-suite defaults when absent.
    pub trials: Option<usize>,
    pub tolerances: Tolerances,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            suite: Suite::All,
            model: "all".into(),
            models: Vec::new(),
            trials: None,
            tolerances: Tolerances { inequality: None, prox: PROX_TOL },
            out: None,
            format: Format::Json,
        }
    }
}

/// Settings as given, before validation. `None` leaves a setting alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<String>,
    pub suite: Option<String>,
    pub model: Option<String>,
    pub trials: Option<String>,
    pub tol: Option<String>,
    pub prox_tol: Option<String>,
    pub out: Option<String>,
    pub format: Option<String>,
}

impl Overrides {
    /// Reads `key=value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", lineno + 1)))?;
            let v = Some(v.trim().to_string());
            match k.trim() {
                "seed" => o.seed = v,
                "suite" => o.suite = v,
                "model" => o.model = v,
                "trials" => o.trials = v,
                "tol" => o.tol = v,
                "prox_tol" => o.prox_tol = v,
                "out" => o.out = v,
                "format" => o.format = v,
                other => return Err(CliError::Usage(format!("config line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        Ok(o)
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `self` with every setting of `other` taking precedence.
    pub fn then(self, other: Overrides) -> Overrides {
        Overrides {
            seed: other.seed.or(self.seed),
            suite: other.suite.or(self.suite),
            model: other.model.or(self.model),
            trials: other.trials.or(self.trials),
            tol: other.tol.or(self.tol),
            prox_tol: other.prox_tol.or(self.prox_tol),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
        }
    }

    pub fn resolve(self) -> Result<CampaignConfig, CliError> {
        let mut c = CampaignConfig::default();
        if let Some(s) = self.seed {
            c.seed = s.parse().map_err(|_| CliError::Usage(format!("seed {s:?} is not a 64-bit unsigned integer")))?;
        }
        if let Some(s) = self.suite {
            c.suite = s.parse()?;
        }
        if let Some(m) = self.model {
            c.model = m;
        }
        c.models = parse_model_spec(&c.model)?;
        if let Some(t) = self.trials {
            let n: usize = t.parse().map_err(|_| CliError::Usage(format!("trials {t:?} is not a count")))?;
            if n < 1 {
                return Err(CliError::Usage("trials must be at least 1".into()));
            }
            c.trials = Some(n);
        }
        if let Some(t) = self.tol {
            c.tolerances.inequality = Some(positive("tol", &t)?);
        }
        if let Some(t) = self.prox_tol {
            c.tolerances.prox = positive("prox_tol", &t)?;
        }
        c.out = self.out.map(PathBuf::from);
        if let Some(f) = self.format {
            c.format = f.parse()?;
        }
        if c.suite == Suite::Cat0 {
            if let Some(m) = c.models.iter().find(|m| !matches!(m.kind, ModelKind::Euclidean | ModelKind::Poincare | ModelKind::Tree)) {
                return Err(CliError::Usage(format!("suite cat0 needs a CAT(0) model; {} is not one", m.kind)));
            }
        }
        Ok(c)
    }
}

fn positive(key: &str, v: &str) -> Result<f64, CliError> {
    match v.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(CliError::Usage(format!("{key} must be a positive number, got {v:?}"))),
    }
}

impl CampaignConfig {
    /// Where the report goes: `None` for standard output. The directory
    /// named by [`OUT_DIR_ENV`] replaces the directory part of `out`.
    pub fn output_path(&self) -> Option<PathBuf> {
        let dir = std::env::var_os(OUT_DIR_ENV).filter(|d| !d.is_empty());
        match (&self.out, dir) {
            (Some(out), Some(dir)) => Some(Path::new(&dir).join(out.file_name().unwrap_or(out.as_os_str()))),
            (Some(out), None) => Some(out.clone()),
            (None, Some(dir)) => {
                let ext = match self.format {
                    Format::Json => "json",
                    Format::Csv => "csv",
                };
                Some(Path::new(&dir).join(format!("report.{ext}")))
            }
            (None, None) => None,
        }
    }

    pub fn trials_for(&self, suite: Suite) -> usize {
        self.trials.unwrap_or_else(|| suite.default_trials(self.suite == Suite::All))
    }
}
