//! Violation bookkeeping shared by every sampled inequality check.

use serde::Serialize;
use serde_json::Value;

use crate::sampling::run_trials;
use crate::sampling::SimRng;

/// How many violating tuples are kept verbatim in a report.
pub const MAX_RECORDED_VIOLATIONS: usize = 16;

/// Identifies which inequality a report is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckId {
    Metric,
    W1,
    W2,
    W3,
    W4,
    W5,
    /// Convexity of `d²(·, a)` along geodesics.
    SquaredConvexity,
    /// `d(x, W(x,y,λ)) = λ d(x,y)`.
    GeodesicConsistency,
    Cat0,
    UniformConvexity,
    PropertyG,
    LambdaConvexity,
    LambdaConvexityWeak,
    /// `d²(W(x,y,λ),a) ≤ (1-2λ)d²(x,a) + 2λ d²(m,a)` for `λ ≤ 1/2`.
    MidpointChain,
    Nonexpansive,
    AsymptoticNonexpansive,
    FixedPointConvexity,
    ProjectionOptimality,
    ProjectionIdempotence,
    SetConvexity,
    FunctionalConvexity,
    /// Approximate fixed points along a segment, nonexpansive maps.
    AfpSegment,
    /// Approximate fixed points of `Tⁿ`, asymptotically nonexpansive maps.
    AfpPower,
    /// Approximate fixed points of `T` from small single-step displacement.
    AfpSingleStep,
    Fejer,
    QuasiFejer,
    ProxClosedForm,
    ProxIndicator,
    ProxUniqueness,
    ProxOrderLambda,
    ProxDescent,
    MinimizerFixedPoint,
}

impl CheckId {
    pub fn name(self) -> &'static str {
        match self {
            CheckId::Metric => "metric",
            CheckId::W1 => "W1",
            CheckId::W2 => "W2",
            CheckId::W3 => "W3",
            CheckId::W4 => "W4",
            CheckId::W5 => "W5",
            CheckId::SquaredConvexity => "squared_convexity",
            CheckId::GeodesicConsistency => "geodesic_consistency",
            CheckId::Cat0 => "cat0",
            CheckId::UniformConvexity => "uniform_convexity",
            CheckId::PropertyG => "property_g",
            CheckId::LambdaConvexity => "lambda_convexity",
            CheckId::LambdaConvexityWeak => "lambda_convexity_weak",
            CheckId::MidpointChain => "midpoint_chain",
            CheckId::Nonexpansive => "nonexpansive",
            CheckId::AsymptoticNonexpansive => "asymptotic_nonexpansive",
            CheckId::FixedPointConvexity => "fixed_point_convexity",
            CheckId::ProjectionOptimality => "projection_optimality",
            CheckId::ProjectionIdempotence => "projection_idempotence",
            CheckId::SetConvexity => "set_convexity",
            CheckId::FunctionalConvexity => "functional_convexity",
            CheckId::AfpSegment => "afp_segment",
            CheckId::AfpPower => "afp_power",
            CheckId::AfpSingleStep => "afp_single_step",
            CheckId::Fejer => "fejer",
            CheckId::QuasiFejer => "quasi_fejer",
            CheckId::ProxClosedForm => "prox_closed_form",
            CheckId::ProxIndicator => "prox_indicator",
            CheckId::ProxUniqueness => "prox_uniqueness",
            CheckId::ProxOrderLambda => "prox_order_lambda",
            CheckId::ProxDescent => "prox_descent",
            CheckId::MinimizerFixedPoint => "minimizer_fixed_point",
        }
    }
}

/// One evaluated instance of a (possibly multi-part) relation.
///
/// `gap` is `lhs - rhs` for inequalities `lhs ≤ rhs` and `|lhs - rhs|` for
/// equalities; a trial violates the relation when `gap > tolerance`.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub inputs: Value,
}

impl Measurement {
    pub fn le(lhs: f64, rhs: f64, inputs: Value) -> Self {
        Self { lhs, rhs, gap: lhs - rhs, inputs }
    }

    pub fn eq(lhs: f64, rhs: f64, inputs: Value) -> Self {
        Self { lhs, rhs, gap: (lhs - rhs).abs(), inputs }
    }

    /// Keeps whichever of the two measurements is closer to violation.
    pub fn worst(self, other: Self) -> Self {
        if other.gap > self.gap || other.gap.is_nan() {
            other
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub trial: u64,
    pub inputs: Value,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
}

/// Outcome of a sampled check.
///
/// `violations` holds at most [`MAX_RECORDED_VIOLATIONS`] entries;
/// `violation_count` is the full count. `violations` is nonempty exactly when
/// `max_gap > tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxiomReport {
    pub check: CheckId,
    pub trials: usize,
    pub skipped: usize,
    pub tolerance: f64,
    pub max_gap: f64,
    pub max_abs_gap: f64,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    pub fn evaluated(&self) -> usize {
        self.trials - self.skipped
    }

    /// Folds trial outcomes (in trial order) into a report. `None` marks a
    /// skipped trial.
    pub fn from_measurements(
        check: CheckId,
        tolerance: f64,
        outcomes: Vec<Option<Measurement>>,
    ) -> Self {
        let trials = outcomes.len();
        let mut skipped = 0;
        let mut max_gap = f64::NEG_INFINITY;
        let mut max_abs_gap: f64 = 0.0;
        let mut violation_count = 0;
        let mut violations = Vec::new();
        for (trial, outcome) in outcomes.into_iter().enumerate() {
            let Some(m) = outcome else {
                skipped += 1;
                continue;
            };
            // NaN gaps count as violations: they mean the check itself broke.
            let gap = if m.gap.is_nan() { f64::INFINITY } else { m.gap };
            max_gap = max_gap.max(gap);
            max_abs_gap = max_abs_gap.max(gap.abs());
            if gap > tolerance {
                violation_count += 1;
                if violations.len() < MAX_RECORDED_VIOLATIONS {
                    violations.push(Violation {
                        trial: trial as u64,
                        inputs: m.inputs,
                        lhs: m.lhs,
                        rhs: m.rhs,
                        gap,
                    });
                }
            }
        }
        if max_gap == f64::NEG_INFINITY {
            max_gap = 0.0;
        }
        Self {
            check,
            trials,
            skipped,
            tolerance,
            max_gap,
            max_abs_gap,
            violation_count,
            violations,
        }
    }
}

/// Runs `trials` seeded trials of `trial` in parallel and folds them into a
/// report.
pub fn run_check<F>(check: CheckId, seed: u64, trials: usize, tolerance: f64, trial: F) -> AxiomReport
where
    F: Fn(&mut SimRng) -> Option<Measurement> + Sync,
{
    let outcomes = run_trials(seed, trials, |_, rng| trial(rng));
    AxiomReport::from_measurements(check, tolerance, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn violations_nonempty_iff_gap_exceeds_tolerance() {
        let ok = AxiomReport::from_measurements(
            CheckId::W1,
            1e-9,
            vec![Some(Measurement::le(1.0, 1.0, json!(null))), None],
        );
        assert!(ok.passed());
        assert!(ok.violations.is_empty());
        assert_eq!(ok.skipped, 1);

        let bad = AxiomReport::from_measurements(
            CheckId::W1,
            1e-9,
            vec![Some(Measurement::le(1.0 + 1e-6, 1.0, json!([1]))), Some(Measurement::eq(2.0, 1.0, json!(null)))],
        );
        assert_eq!(bad.violation_count, 2);
        assert!(bad.max_gap > bad.tolerance);
        assert_eq!(bad.violations[0].trial, 0);
    }

    #[test]
    fn nan_gap_is_a_violation() {
        let r = AxiomReport::from_measurements(
            CheckId::W2,
            1e-9,
            vec![Some(Measurement::le(f64::NAN, 0.0, json!(null)))],
        );
        assert!(!r.passed());
    }
}
