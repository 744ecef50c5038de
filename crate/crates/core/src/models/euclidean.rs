use crate::error::{usage, Error, Result};
use crate::moduli::UcModulus;
use crate::sampling::{gaussian, unit, SimRng};
use crate::search::{Chart, SearchRegion};
use crate::space::{GeodesicSpace, TOL_EXACT};

use super::{ModelKind, ModelSpace};

/// `ℝⁿ` with the Euclidean norm.
#[derive(Debug, Clone, PartialEq)]
pub struct Euclidean {
    dim: usize,
    r_sample: f64,
}

impl Euclidean {
    pub fn new(dim: usize, r_sample: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidModel("dimension n must be at least 1".into()));
        }
        Ok(Self { dim, r_sample })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

pub(crate) fn lerp(x: &[f64], y: &[f64], lam: f64) -> Vec<f64> {
    if lam == 0.0 {
        return x.to_vec();
    }
    if lam == 1.0 {
        return y.to_vec();
    }
    x.iter().zip(y).map(|(a, b)| a + lam * (b - a)).collect()
}

pub(crate) fn check_vector(p: &[f64], dim: usize) -> Result<()> {
    if p.len() != dim {
        return usage(format!("point has {} coordinates, space has dimension {dim}", p.len()));
    }
    if p.iter().any(|c| !c.is_finite()) {
        return usage("point has non-finite coordinates");
    }
    Ok(())
}

/// Point at norm-distance `radius * U^(1/n)` from `center` in a uniformly
/// random direction, where `norm` measures vectors.
pub(crate) fn vector_within(
    center: &[f64],
    radius: f64,
    norm: impl Fn(&[f64]) -> f64,
    rng: &mut SimRng,
) -> Vec<f64> {
    let dim = center.len();
    let mut dir = gaussian(rng, dim);
    let n = norm(&dir);
    if n == 0.0 {
        return center.to_vec();
    }
    let scale = radius * unit(rng).powf(1.0 / dim as f64) / n;
    dir.iter_mut().zip(center).for_each(|(d, c)| *d = c + *d * scale);
    dir
}

pub(crate) fn box_region(center: &[f64], radius: f64) -> SearchRegion<Vec<f64>> {
    let lower = center.iter().map(|c| c - radius).collect();
    let upper = center.iter().map(|c| c + radius).collect();
    SearchRegion::single(Chart::new(lower, upper, |c: &[f64]| Some(c.to_vec())).expect("finite box"))
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|c| c * c).sum::<f64>().sqrt()
}

impl GeodesicSpace for Euclidean {
    type Point = Vec<f64>;

    fn name(&self) -> String {
        format!("euclidean(n={})", self.dim)
    }

    fn dist(&self, x: &Vec<f64>, y: &Vec<f64>) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }

    fn geodesic(&self, x: &Vec<f64>, y: &Vec<f64>, lam: f64) -> Vec<f64> {
        lerp(x, y, lam)
    }

    fn validate(&self, p: &Vec<f64>) -> Result<()> {
        check_vector(p, self.dim)
    }

    fn sample(&self, rng: &mut SimRng) -> Vec<f64> {
        vector_within(&vec![0.0; self.dim], self.r_sample, norm2, rng)
    }

    fn sample_within(&self, center: &Vec<f64>, radius: f64, rng: &mut SimRng) -> Vec<f64> {
        vector_within(center, radius, norm2, rng)
    }

    fn tolerance(&self) -> f64 {
        TOL_EXACT
    }
}

impl ModelSpace for Euclidean {
    fn kind(&self) -> ModelKind {
        ModelKind::Euclidean
    }

    fn modulus(&self) -> UcModulus {
        UcModulus::Cat0
    }

    fn is_cat0(&self) -> bool {
        true
    }

    fn sampling_radius(&self) -> f64 {
        self.r_sample
    }

    fn ball_region(&self, center: &Vec<f64>, radius: f64) -> SearchRegion<Vec<f64>> {
        box_region(center, radius)
    }
}
