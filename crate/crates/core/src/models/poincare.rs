use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::moduli::UcModulus;
use crate::sampling::{unit, SimRng};
use crate::search::{Chart, SearchRegion};
use crate::space::{GeodesicSpace, TOL_TRANSCENDENTAL};

use super::{ModelKind, ModelSpace};

/// Points must satisfy `x² + y² < 1 − DISK_MARGIN`.
pub const DISK_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    fn z(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }

    fn from_z(z: Complex64) -> Self {
        let p = Self { x: z.re, y: z.im };
        let n = p.norm_sqr();
        if n < 1.0 - DISK_MARGIN {
            return p;
        }
        // round-off pushed the point onto the boundary; pull it back radially
        let s = ((1.0 - 2.0 * DISK_MARGIN) / n).sqrt();
        Self { x: p.x * s, y: p.y * s }
    }
}

/// Möbius isometry sending `c` to the origin.
fn to_origin(c: Complex64, z: Complex64) -> Complex64 {
    (z - c) / (Complex64::new(1.0, 0.0) - c.conj() * z)
}

/// Inverse of [`to_origin`].
fn from_origin(c: Complex64, w: Complex64) -> Complex64 {
    (w + c) / (Complex64::new(1.0, 0.0) + c.conj() * w)
}

/// The Poincaré model of the hyperbolic plane, a CAT(0) space.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareDisk {
    r_sample: f64,
}

impl PoincareDisk {
    /// `r_sample` is the Euclidean radius of the sub-disk points are drawn from.
    pub fn new(r_sample: f64) -> Result<Self> {
        if !(r_sample > 0.0 && r_sample < 1.0) {
            return Err(Error::InvalidModel(format!("poincare sampling radius must lie in (0, 1), got {r_sample}")));
        }
        Ok(Self { r_sample })
    }

    /// Moves `p` by the isometry taking `from` to the origin.
    pub fn recenter(&self, from: &DiskPoint, p: &DiskPoint) -> DiskPoint {
        DiskPoint::from_z(to_origin(from.z(), p.z()))
    }

    /// Inverse of [`PoincareDisk::recenter`].
    pub fn uncenter(&self, to: &DiskPoint, p: &DiskPoint) -> DiskPoint {
        DiskPoint::from_z(from_origin(to.z(), p.z()))
    }

    /// Point on the ray from the origin in direction `angle` at hyperbolic
    /// distance `h`.
    pub fn polar(&self, h: f64, angle: f64) -> DiskPoint {
        let rho = (0.5 * h).tanh();
        DiskPoint::from_z(Complex64::from_polar(rho, angle))
    }

    /// Maps a Klein-model point to the disk, `None` outside the unit disk.
    fn from_klein(k: Complex64) -> Option<Complex64> {
        let n = k.norm_sqr();
        if n >= 1.0 {
            return None;
        }
        Some(k / (1.0 + (1.0 - n).sqrt()))
    }
}

impl GeodesicSpace for PoincareDisk {
    type Point = DiskPoint;

    fn name(&self) -> String {
        "poincare".into()
    }

    fn dist(&self, u: &DiskPoint, v: &DiskPoint) -> f64 {
        let du = (u.x - v.x).powi(2) + (u.y - v.y).powi(2);
        if du == 0.0 {
            return 0.0;
        }
        let t = 2.0 * du / ((1.0 - u.norm_sqr()) * (1.0 - v.norm_sqr()));
        // acosh(1 + t) without cancellation for small t
        (t + (t * (t + 2.0)).sqrt()).ln_1p()
    }

    fn geodesic(&self, x: &DiskPoint, y: &DiskPoint, lam: f64) -> DiskPoint {
        if lam == 0.0 || x == y {
            return *x;
        }
        if lam == 1.0 {
            return *y;
        }
        let c = x.z();
        let w = to_origin(c, y.z());
        let r = w.norm();
        if r == 0.0 {
            return *x;
        }
        let rho = (lam * r.min(1.0 - DISK_MARGIN).atanh()).tanh();
        DiskPoint::from_z(from_origin(c, w * (rho / r)))
    }

    fn validate(&self, p: &DiskPoint) -> Result<()> {
        if !p.x.is_finite() || !p.y.is_finite() {
            return usage("point has non-finite coordinates");
        }
        if p.norm_sqr() >= 1.0 - DISK_MARGIN {
            return usage(format!("point ({}, {}) lies outside the open disk", p.x, p.y));
        }
        Ok(())
    }

    fn sample(&self, rng: &mut SimRng) -> DiskPoint {
        let rho = self.r_sample * unit(rng).sqrt();
        let theta = TAU * unit(rng);
        DiskPoint::from_z(Complex64::from_polar(rho, theta))
    }

    fn sample_within(&self, center: &DiskPoint, radius: f64, rng: &mut SimRng) -> DiskPoint {
        let h = radius * unit(rng).sqrt();
        let theta = TAU * unit(rng);
        let w = Complex64::from_polar((0.5 * h).tanh(), theta);
        DiskPoint::from_z(from_origin(center.z(), w))
    }

    fn tolerance(&self) -> f64 {
        TOL_TRANSCENDENTAL
    }
}

impl ModelSpace for PoincareDisk {
    fn kind(&self) -> ModelKind {
        ModelKind::Poincare
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

    /// Klein chart recentred at `center`; Klein geodesics are straight lines.
    fn ball_region(&self, center: &DiskPoint, radius: f64) -> SearchRegion<DiskPoint> {
        let half = radius.tanh();
        let c = center.z();
        let chart = Chart::new(vec![-half, -half], vec![half, half], move |k: &[f64]| {
            let u = PoincareDisk::from_klein(Complex64::new(k[0], k[1]))?;
            let p = DiskPoint::from_z(from_origin(c, u));
            (p.norm_sqr() < 1.0 - DISK_MARGIN).then_some(p)
        })
        .expect("finite Klein box");
        SearchRegion::single(chart)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::rng_from_seed;

    #[test]
    fn distance_from_origin_is_ln3() {
        let d = PoincareDisk::new(0.9).unwrap();
        let v = d.dist(&DiskPoint::ORIGIN, &DiskPoint::new(0.5, 0.0));
        assert!((v - 3f64.ln()).abs() < 1e-14, "{v}");
    }

    #[test]
    fn radial_midpoint() {
        // d(0, ρ) = 2 atanh ρ, so the midpoint of 0 and 0.5 sits at tanh(atanh(0.5) / 2)
        let d = PoincareDisk::new(0.9).unwrap();
        let y = DiskPoint::new(0.5, 0.0);
        let m = d.combine(&DiskPoint::ORIGIN, &y, 0.5).unwrap();
        assert!((m.x - (0.5f64.atanh() / 2.0).tanh()).abs() < 1e-15);
        assert_eq!(m.y, 0.0);
        assert!((d.dist(&DiskPoint::ORIGIN, &m) - 0.5 * d.dist(&DiskPoint::ORIGIN, &y)).abs() < 1e-9);
    }

    #[test]
    fn recentering_is_an_isometry() {
        let d = PoincareDisk::new(0.9).unwrap();
        let mut rng = rng_from_seed(3);
        for _ in 0..1000 {
            let (c, p, q) = (d.sample(&mut rng), d.sample(&mut rng), d.sample(&mut rng));
            let before = d.dist(&p, &q);
            let after = d.dist(&d.recenter(&c, &p), &d.recenter(&c, &q));
            assert!((before - after).abs() < 1e-9, "{before} vs {after}");
            let back = d.uncenter(&c, &d.recenter(&c, &p));
            assert!(d.dist(&back, &p) < 1e-9);
        }
    }

    #[test]
    fn rejects_points_outside_the_disk() {
        let d = PoincareDisk::new(0.9).unwrap();
        assert!(d.validate(&DiskPoint::new(1.0, 0.0)).is_err());
        assert!(d.validate(&DiskPoint::new(0.6, 0.8)).is_err());
        assert!(PoincareDisk::new(1.0).is_err());
    }

    #[test]
    fn sample_within_respects_radius() {
        let d = PoincareDisk::new(0.9).unwrap();
        let mut rng = rng_from_seed(4);
        for _ in 0..1000 {
            let c = d.sample(&mut rng);
            let p = d.sample_within(&c, 0.7, &mut rng);
            assert!(d.dist(&c, &p) <= 0.7 + 1e-9);
        }
    }

    #[test]
    fn klein_chart_covers_the_ball() {
        let d = PoincareDisk::new(0.9).unwrap();
        let c = DiskPoint::new(0.3, -0.2);
        let region = d.ball_region(&c, 1.0);
        let chart = &region.charts[0];
        let mid = chart.point(&chart.center()).unwrap();
        assert!(d.dist(&mid, &c) < 1e-12);
        // a corner of the box along an axis lies at hyperbolic distance exactly 1
        let edge = chart.point(&[1f64.tanh(), 0.0]).unwrap();
        assert!((d.dist(&edge, &c) - 1.0).abs() < 1e-9);
    }
}
