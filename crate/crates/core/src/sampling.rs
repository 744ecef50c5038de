//! Deterministic randomness.
//!
//! Every campaign is driven by one 64-bit seed. Trial `i` draws from its own
//! ChaCha stream `(seed, i)`, so results do not depend on thread scheduling
//! and any single trial can be replayed in isolation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

pub type SimRng = ChaCha8Rng;

/// Probability with which tuple samplers force `y = x`.
pub const DEGENERATE_RATE: f64 = 0.01;

pub fn rng_from_seed(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// Independent stream for trial `trial` of the campaign seeded by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Derives a sub-seed for a named sub-campaign.
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    // splitmix64 finaliser
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform draw from `[0, 1)`.
pub fn unit(rng: &mut SimRng) -> f64 {
    rng.random::<f64>()
}

pub fn uniform(rng: &mut SimRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

pub fn coin(rng: &mut SimRng, p: f64) -> bool {
    unit(rng) < p
}

pub fn index(rng: &mut SimRng, n: usize) -> usize {
    rng.random_range(0..n)
}

/// Standard normal vector of length `dim`.
pub fn gaussian(rng: &mut SimRng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Runs `trials` independent trials in parallel and returns their outputs in
/// trial order.
pub fn run_trials<T, F>(seed: u64, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, &mut SimRng) -> T + Sync,
{
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            f(i, &mut rng)
        })
        .collect()
}
