//! Uniformly convex W-hyperbolic spaces.
//!
//! Model geometries with their moduli of uniform convexity, the derived
//! property-(G) modulus, approximate fixed points of nonexpansive maps,
//! metastability rates for monotone and quasi-monotone sequences, metric
//! projections with shadow-sequence verifiers, and proximal mappings. Every
//! quantitative inequality comes with a seeded sampling check that reports
//! violations instead of panicking.

pub mod check;
pub mod error;
pub mod fixpoint;
pub mod models;
pub mod moduli;
pub mod proximal;
pub mod rates;
pub mod sampling;
pub mod search;
pub mod sets;
pub mod shadow;
pub mod space;

pub use check::{AxiomReport, CheckId, Measurement, Violation};
pub use error::{Error, Result};
pub use models::{instantiate_model, AnyModel, ModelKind, ModelParams, ModelSpace};
pub use moduli::{psi_cat0_direct, psi_eta, PropertyGModulus, UcModulus};
pub use proximal::{parse_functional, prox, ExtReal, Functional, ProxProblem};
pub use rates::{CounterFn, MetaStatus, MetastabilityReport};
pub use sets::{project, ConvexSet};
pub use shadow::{run_scenarios, IterationTrace, ScenarioConfig, ShadowCache};
pub use space::{check_axioms, GeodesicSpace};
