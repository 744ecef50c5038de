use crate::error::{Error, Result};
use crate::moduli::UcModulus;
use crate::sampling::SimRng;
use crate::search::SearchRegion;
use crate::space::{GeodesicSpace, TOL_EXACT};

use super::euclidean::{box_region, check_vector, lerp, vector_within};
use super::{ModelKind, ModelSpace};

/// `ℝⁿ` with the `p`-norm, `p ≥ 2`.
///
/// Not CAT(0) for `p > 2`; uniformly convex with Clarkson's modulus, which
/// does not depend on `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSpace {
    dim: usize,
    p: f64,
    r_sample: f64,
}

impl LpSpace {
    pub fn new(dim: usize, p: f64, r_sample: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("dimension n must be at least 1".into()));
        }
        if !(p >= 2.0) || !p.is_finite() {
            return Err(Error::InvalidModel(format!("lp exponent must satisfy p >= 2, got p = {p}")));
        }
        Ok(Self { dim, p, r_sample })
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn norm(&self, v: &[f64]) -> f64 {
        let m = v.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        if m == 0.0 {
            return 0.0;
        }
        // scaled to keep |c/m|^p in range
        m * v.iter().map(|c| (c.abs() / m).powf(self.p)).sum::<f64>().powf(1.0 / self.p)
    }
}

impl GeodesicSpace for LpSpace {
    type Point = Vec<f64>;

    fn name(&self) -> String {
        format!("lp(n={}, p={})", self.dim, self.p)
    }

    fn dist(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm(&diff)
    }

    fn geodesic(&self, x: &Vec<f64>, y: &Vec<f64>, lam: f64) -> Vec<f64> {
        lerp(x, y, lam)
    }

    fn validate(&self, p: &Vec<f64>) -> Result<()> {
        check_vector(p, self.dim)
    }

    fn sample(&self, rng: &mut SimRng) -> Vec<f64> {
        vector_within(&vec![0.0; self.dim], self.r_sample, |v| self.norm(v), rng)
    }

    fn sample_within(&self, center: &Vec<f64>, radius: f64, rng: &mut SimRng) -> Vec<f64> {
        vector_within(center, radius, |v| self.norm(v), rng)
    }

    fn tolerance(&self) -> f64 {
        TOL_EXACT
    }
}

impl ModelSpace for LpSpace {
    fn kind(&self) -> ModelKind {
        ModelKind::Lp
    }

    fn modulus(&self) -> UcModulus {
        UcModulus::Clarkson { p: self.p }
    }

    fn is_cat0(&self) -> bool {
        self.p == 2.0
    }

    fn sampling_radius(&self) -> f64 {
        self.r_sample
    }

    fn ball_region(&self, center: &Vec<f64>, radius: f64) -> SearchRegion<Vec<f64>> {
        // the sup-norm box contains the p-norm ball
        box_region(center, radius)
    }
}
