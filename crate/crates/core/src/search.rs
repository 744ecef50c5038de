//! Derivative-free minimisation over bounded charts of a space.
//!
//! A [`Chart`] maps a coordinate box into the space so that straight segments
//! in coordinates trace geodesics. Geodesically convex functions are then
//! quasi-convex in chart coordinates, and nested golden-section search on
//! every coordinate is exact up to the parameter tolerance. Points outside the
//! space (the chart returns `None`) or outside a functional's domain evaluate
//! to `+∞`; the line search treats `+∞` as larger than every finite value.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ChartMap<P> = Arc<dyn Fn(&[f64]) -> Option<P> + Send + Sync>;

#[derive(Clone)]
pub struct Chart<P> {
    lower: Vec<f64>,
    upper: Vec<f64>,
    map: ChartMap<P>,
}

impl<P> fmt::Debug for Chart<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart").field("lower", &self.lower).field("upper", &self.upper).finish()
    }
}

impl<P> Chart<P> {
    pub fn new(
        lower: Vec<f64>,
        upper: Vec<f64>,
        map: impl Fn(&[f64]) -> Option<P> + Send + Sync + 'static,
    ) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::Usage("chart bounds must be nonempty and of equal length".into()));
        }
        if lower.iter().chain(&upper).any(|v| !v.is_finite()) {
            return Err(Error::Usage("unbounded parameterization".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::Usage("chart lower bound exceeds upper bound".into()));
        }
        Ok(Self { lower, upper, map: Arc::new(map) })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn point(&self, coords: &[f64]) -> Option<P> {
        (self.map)(coords)
    }

    pub fn center(&self) -> Vec<f64> {
        self.lower.iter().zip(&self.upper).map(|(l, u)| 0.5 * (l + u)).collect()
    }
}

/// A finite union of charts; the minimum over a region is the best minimum
/// over its charts.
#[derive(Clone, Debug)]
pub struct SearchRegion<P> {
    pub charts: Vec<Chart<P>>,
}

impl<P> SearchRegion<P> {
    pub fn single(chart: Chart<P>) -> Self {
        Self { charts: vec![chart] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Coarse grid points per coordinate before golden-section refinement.
    pub grid: usize,
    /// Stop refining once the bracket is narrower than this.
    pub param_tol: f64,
    /// Cap on golden-section iterations per line search.
    pub max_iter: usize,
    /// Cap on coordinate-descent sweeps for charts of dimension above
    /// [`NESTED_MAX_DIM`].
    pub max_sweeps: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { grid: 33, param_tol: 1e-10, max_iter: 500, max_sweeps: 50 }
    }
}

/// Charts up to this dimension are searched by exact nested line searches.
pub const NESTED_MAX_DIM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<P> {
    pub point: P,
    pub value: f64,
    pub chart: usize,
    pub coords: Vec<f64>,
}

/// Largest grid tried by [`minimize_1d`] on a line with no finite value.
pub const MAX_GRID: usize = 4096;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Minimises a quasi-convex extended-real function on `[lo, hi]`.
///
/// Returns the best evaluated `(t, f(t))`; the value is `+∞` when no grid
/// point is finite.
pub fn minimize_1d(mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64, opts: &SearchOptions) -> (f64, f64) {
    let mut best = (lo, f64::INFINITY);
    let mut eval = |t: f64, best: &mut (f64, f64)| {
        let v = f(t);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < best.1 {
            *best = (t, v);
        }
        v
    };
    if hi - lo <= opts.param_tol {
        eval(0.5 * (lo + hi), &mut best);
        return best;
    }

    // A short feasible interval can hide between grid points; refine the
    // grid before declaring the line infeasible.
    let mut n = opts.grid.max(3);
    let (mut step, mut k_best, mut v_best);
    loop {
        step = (hi - lo) / (n - 1) as f64;
        k_best = 0;
        v_best = f64::INFINITY;
        for k in 0..n {
            let t = if k == n - 1 { hi } else { lo + step * k as f64 };
            let v = eval(t, &mut best);
            if v < v_best {
                v_best = v;
                k_best = k;
            }
        }
        if v_best.is_finite() || n > MAX_GRID {
            break;
        }
        n = 4 * (n - 1) + 1;
    }
    if !v_best.is_finite() {
        return best;
    }

    let mut a = lo + step * k_best.saturating_sub(1) as f64;
    let mut b = (lo + step * (k_best + 1) as f64).min(hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = eval(c, &mut best);
    let mut fd = eval(d, &mut best);
    let mut iter = 0;
    while b - a > opts.param_tol && iter < opts.max_iter {
        iter += 1;
        if fc == fd && fc.is_finite() {
            // For a convex function the minimiser lies between equal probes;
            // keeping both sides stops rounding plateaus from biasing the
            // bracket towards one end.
            a = c;
            b = d;
            c = b - INV_PHI * (b - a);
            d = a + INV_PHI * (b - a);
            fc = eval(c, &mut best);
            fd = eval(d, &mut best);
        } else if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c, &mut best);
        } else if fc > fd {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d, &mut best);
        } else {
            // Both probes outside the domain: the feasible interval contains
            // the best point seen so far.
            let t = best.0;
            if t < c {
                b = c;
            } else if t > d {
                a = d;
            } else {
                a = c;
                b = d;
            }
            c = b - INV_PHI * (b - a);
            d = a + INV_PHI * (b - a);
            fc = eval(c, &mut best);
            fd = eval(d, &mut best);
        }
    }
    // On a plateau of equal values the bracket centre is the better estimate.
    let mid = 0.5 * (a + b);
    let v = f(mid);
    if v <= best.1 {
        best = (mid, v);
    }
    best
}

fn nested_min<P>(
    chart: &Chart<P>,
    objective: &dyn Fn(&P) -> f64,
    coords: &mut Vec<f64>,
    level: usize,
    opts: &SearchOptions,
) -> f64 {
    if level == chart.dim() {
        return match chart.point(coords) {
            Some(p) => objective(&p),
            None => f64::INFINITY,
        };
    }
    let (lo, hi) = (chart.lower[level], chart.upper[level]);
    let (t, v) = minimize_1d(
        |t| {
            coords[level] = t;
            nested_min(chart, objective, coords, level + 1, opts)
        },
        lo,
        hi,
        opts,
    );
    coords[level] = t;
    v
}

/// Recovers the inner minimisers for a fixed outer coordinate prefix.
fn nested_argmin<P>(chart: &Chart<P>, objective: &dyn Fn(&P) -> f64, coords: &mut Vec<f64>, opts: &SearchOptions) {
    for level in 1..=chart.dim() {
        nested_min(chart, objective, coords, level, opts);
    }
}

fn coordinate_descent<P>(chart: &Chart<P>, objective: &dyn Fn(&P) -> f64, opts: &SearchOptions) -> (Vec<f64>, f64) {
    let mut coords = chart.center();
    let eval = |c: &[f64]| chart.point(c).map_or(f64::INFINITY, |p| objective(&p));
    let mut value = eval(&coords);
    for _ in 0..opts.max_sweeps {
        let before = value;
        for k in 0..chart.dim() {
            let (t, v) = minimize_1d(
                |t| {
                    let mut c = coords.clone();
                    c[k] = t;
                    eval(&c)
                },
                chart.lower[k],
                chart.upper[k],
                opts,
            );
            if v <= value {
                coords[k] = t;
                value = v;
            }
        }
        if before.is_finite() && before - value <= f64::EPSILON * before.abs().max(1.0) {
            break;
        }
    }
    (coords, value)
}

/// Minimises `objective` over `region`.
pub fn minimize<P>(region: &SearchRegion<P>, objective: &dyn Fn(&P) -> f64, opts: &SearchOptions) -> Result<Minimum<P>> {
    let mut best: Option<Minimum<P>> = None;
    for (idx, chart) in region.charts.iter().enumerate() {
        let (coords, value) = if chart.dim() <= NESTED_MAX_DIM {
            let mut coords = chart.center();
            let v = nested_min(chart, objective, &mut coords, 0, opts);
            nested_argmin(chart, objective, &mut coords, opts);
            (coords, v)
        } else {
            coordinate_descent(chart, objective, opts)
        };
        if !value.is_finite() {
            continue;
        }
        if best.as_ref().is_none_or(|b| value < b.value) {
            if let Some(point) = chart.point(&coords) {
                let value = objective(&point).min(value);
                best = Some(Minimum { point, value, chart: idx, coords });
            }
        }
    }
    best.ok_or(Error::Solver {
        message: "search region exhausted without a finite value".into(),
        residual: f64::INFINITY,
    })
}
