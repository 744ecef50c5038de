//! Concrete uniformly convex W-hyperbolic spaces.
//!
//! | model      | metric                         | `W`                          | η                         |
//! |------------|--------------------------------|------------------------------|---------------------------|
//! | euclidean  | ‖x − y‖₂                       | linear interpolation         | ε²/8                      |
//! | lp (p ≥ 2) | ‖x − y‖_p                      | linear interpolation         | 1 − (1 − (ε/2)^p)^(1/p)   |
//! | poincare   | arccosh(1 + 2‖u−v‖²/((1−‖u‖²)(1−‖v‖²))) | radial geodesic after a Möbius shift | ε²/8 |
//! | tree       | path length                    | walk along the unique arc    | ε²/8                      |

mod euclidean;
mod lp;
mod poincare;
mod tree;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::json;

pub use euclidean::Euclidean;
pub use lp::LpSpace;
pub use poincare::{DiskPoint, PoincareDisk, DISK_MARGIN};
pub use tree::{parse_edge_list, MetricTree, Subtree, TreePoint};

use crate::check::{run_check, AxiomReport, CheckId, Measurement};
use crate::error::{usage, Error, Result};
use crate::moduli::UcModulus;
use crate::search::SearchRegion;
use crate::space::{sample_partner, to_json, GeodesicSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Euclidean,
    Lp,
    Poincare,
    Tree,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Euclidean => "euclidean",
            ModelKind::Lp => "lp",
            ModelKind::Poincare => "poincare",
            ModelKind::Tree => "tree",
        })
    }
}

/// A model space: a geodesic space together with a monotone modulus of
/// uniform convexity and charts for searching it.
pub trait ModelSpace: GeodesicSpace {
    fn kind(&self) -> ModelKind;

    fn modulus(&self) -> UcModulus;

    fn is_cat0(&self) -> bool;

    /// Radius of the region [`GeodesicSpace::sample`] draws from.
    fn sampling_radius(&self) -> f64;

    /// Charts covering the closed ball of radius `radius` around `center`,
    /// with geodesics appearing as straight segments in chart coordinates.
    fn ball_region(&self, center: &Self::Point, radius: f64) -> SearchRegion<Self::Point>;
}

/// Parameters of a model space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kind: ModelKind,
    /// Dimension of euclidean and lp models.
    pub dimension: usize,
    /// Exponent of lp models.
    pub exponent: f64,
    /// `(vertex, vertex, length)` triples of tree models.
    pub edges: Vec<(String, String, f64)>,
    pub r_sample: f64,
}

impl ModelParams {
    pub fn euclidean(dimension: usize) -> Self {
        Self { kind: ModelKind::Euclidean, dimension, exponent: 2.0, edges: Vec::new(), r_sample: 1.0 }
    }

    pub fn lp(dimension: usize, exponent: f64) -> Self {
        Self { kind: ModelKind::Lp, dimension, exponent, edges: Vec::new(), r_sample: 1.0 }
    }

    pub fn poincare(r_sample: f64) -> Self {
        Self { kind: ModelKind::Poincare, dimension: 2, exponent: 2.0, edges: Vec::new(), r_sample }
    }

    pub fn tree(edges: Vec<(String, String, f64)>) -> Self {
        let r_sample = edges.iter().map(|e| e.2).sum::<f64>().max(1.0);
        Self { kind: ModelKind::Tree, dimension: 1, exponent: 2.0, edges, r_sample }
    }

    pub fn with_sampling_radius(mut self, r_sample: f64) -> Self {
        self.r_sample = r_sample;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r_sample > 0.0) || !self.r_sample.is_finite() {
            return Err(Error::InvalidModel(format!("sampling radius must be positive, got {}", self.r_sample)));
        }
        match self.kind {
            ModelKind::Euclidean | ModelKind::Lp if self.dimension < 1 => {
                Err(Error::InvalidModel("dimension n must be at least 1".into()))
            }
            ModelKind::Lp if !(self.exponent >= 2.0) || !self.exponent.is_finite() => Err(Error::InvalidModel(
                format!("lp exponent must satisfy p >= 2, got p = {}", self.exponent),
            )),
            ModelKind::Poincare if self.r_sample >= 1.0 => {
                Err(Error::InvalidModel(format!("poincare sampling radius must be < 1, got {}", self.r_sample)))
            }
            _ => Ok(()),
        }
    }
}

/// Edge list of the tree used when no file is given.
pub const BUILTIN_TREE: &str = "r a 1.0
r b 2.0
r c 1.5
a d 0.5
a e 1.2
b f 0.8
c g 1.0
";

/// A model chosen at run time.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Euclidean(Euclidean),
    Lp(LpSpace),
    Poincare(PoincareDisk),
    Tree(MetricTree),
}

/// Builds the model described by `params`.
pub fn instantiate_model(params: &ModelParams) -> Result<AnyModel> {
    params.validate()?;
    Ok(match params.kind {
        ModelKind::Euclidean => AnyModel::Euclidean(Euclidean::new(params.dimension, params.r_sample)?),
        ModelKind::Lp => AnyModel::Lp(LpSpace::new(params.dimension, params.exponent, params.r_sample)?),
        ModelKind::Poincare => AnyModel::Poincare(PoincareDisk::new(params.r_sample)?),
        ModelKind::Tree => AnyModel::Tree(MetricTree::from_edges(&params.edges, params.r_sample)?),
    })
}

/// Evaluates `$body` with `$space` bound to the concrete model inside an
/// [`AnyModel`].
#[macro_export]
macro_rules! with_model {
    ($model:expr, $space:ident => $body:expr) => {
        match $model {
            $crate::models::AnyModel::Euclidean($space) => $body,
            $crate::models::AnyModel::Lp($space) => $body,
            $crate::models::AnyModel::Poincare($space) => $body,
            $crate::models::AnyModel::Tree($space) => $body,
        }
    };
}

impl AnyModel {
    pub fn kind(&self) -> ModelKind {
        with_model!(self, m => m.kind())
    }

    pub fn name(&self) -> String {
        with_model!(self, m => m.name())
    }

    pub fn tolerance(&self) -> f64 {
        with_model!(self, m => m.tolerance())
    }

    pub fn is_cat0(&self) -> bool {
        with_model!(self, m => m.is_cat0())
    }
}

/// Samples the CAT(0) midpoint inequality
/// `d²(m, a) ≤ ½d²(x,a) + ½d²(y,a) − ¼d²(x,y)`.
pub fn check_cat0<S: ModelSpace>(model: &S, seed: u64, trials: usize, tol: f64) -> Result<AxiomReport> {
    if !model.is_cat0() {
        return usage(format!("{} is not a CAT(0) space", model.name()));
    }
    if trials == 0 {
        return usage("trials must be at least 1");
    }
    Ok(run_check(CheckId::Cat0, seed, trials, tol, |rng| {
        let x = model.sample(rng);
        let y = sample_partner(model, &x, rng);
        let a = model.sample(rng);
        let m = model.midpoint(&x, &y);
        let lhs = model.dist2(&m, &a);
        let rhs = 0.5 * model.dist2(&x, &a) + 0.5 * model.dist2(&y, &a) - 0.25 * model.dist2(&x, &y);
        Some(Measurement::le(lhs, rhs, json!({ "x": to_json(&x), "y": to_json(&y), "a": to_json(&a) })))
    }))
}
