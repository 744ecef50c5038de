//! Functionals with known minimisers, built on any model from two sampled
//! points `p`, `q`.

use crate::models::ModelSpace;
use crate::sampling::rng_from_seed;
use crate::sets::ConvexSet;

use super::Functional;

#[derive(Clone, Debug)]
pub struct LibraryFunctional<P> {
    pub name: &'static str,
    pub f: Functional<P>,
    /// Points known to minimise `f`.
    pub minimizers: Vec<P>,
}

pub fn functional_library<S: ModelSpace + Clone + 'static>(model: &S, seed: u64) -> Vec<LibraryFunctional<S::Point>> {
    let mut rng = rng_from_seed(seed);
    let r = model.sampling_radius();
    let p = model.sample(&mut rng);
    let mut q = model.sample(&mut rng);
    while model.dist(&p, &q) < 0.25 * r {
        q = model.sample(&mut rng);
    }
    let d = model.dist(&p, &q);
    let rho = d / 3.0;
    let mid = model.midpoint(&p, &q);
    let ball = ConvexSet::ball(model, p.clone(), rho).expect("positive radius");
    let half = |x: &S::Point| Functional::half_sq_dist_to(x.clone());
    vec![
        LibraryFunctional { name: "half squared distance", f: half(&p), minimizers: vec![p.clone()] },
        LibraryFunctional { name: "distance", f: Functional::dist_to(p.clone()), minimizers: vec![p.clone()] },
        LibraryFunctional { name: "max of half squared distances", f: Functional::max(half(&p), half(&q)), minimizers: vec![mid.clone()] },
        LibraryFunctional {
            name: "ball indicator",
            f: Functional::indicator_of(ball.clone()),
            minimizers: vec![p.clone(), model.geodesic(&p, &q, 0.5 * rho / d)],
        },
        LibraryFunctional {
            name: "constrained half squared distance",
            f: Functional::sum(half(&q), Functional::indicator_of(ball)),
            minimizers: vec![model.geodesic(&p, &q, rho / d)],
        },
        LibraryFunctional {
            name: "sum of distances",
            f: Functional::sum(Functional::dist_to(p.clone()), Functional::dist_to(q.clone())),
            minimizers: vec![p.clone(), mid.clone(), q.clone()],
        },
        LibraryFunctional {
            name: "segment indicator",
            f: Functional::indicator_of(ConvexSet::segment(model, p.clone(), q.clone())),
            minimizers: vec![p, mid, q],
        },
    ]
}
