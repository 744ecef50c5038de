//! Counter functions and rates of metastability for real sequences.
//!
//! A sequence is metastable at `(ε, g)` from `N` when it oscillates by at
//! most `ε` on the window `[N, N + g(N)]`. For nonincreasing sequences in
//! `[0, b]` such an `N` exists below `g̃^(⌈b/ε⌉)(0)`; for sequences with
//! `a_{n+1} ≤ a_n + δ_n` and summable `δ_n` it exists in
//! `[γ(ε/4), (g^M)~^(⌈2b/ε⌉)(γ(ε/4))]`. The verifiers here search for the
//! least such `N` and compare it with the bound.

use std::fmt;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::error::{usage, Error, Result};
use crate::sampling::{derive_seed, rng_from_seed, uniform, unit};

/// Indices beyond this are never evaluated; bounds above it are saturated.
pub const INDEX_CAP: u64 = 1 << 24;

/// Cap applied by the exponential test counter function.
pub const EXP_COUNTER_CAP: u64 = 1 << 20;

type CounterMap = Arc<dyn Fn(u64) -> u64 + Send + Sync>;

/// Prefix maxima stored at their change points.
#[derive(Default)]
struct MaxCache {
    scanned: u64,
    current: u64,
    records: Vec<(u64, u64)>,
}

/// A counter function `g: ℕ → ℕ`.
#[derive(Clone)]
pub struct CounterFn {
    name: String,
    map: CounterMap,
    /// Known supremum, used to stop scanning prefix maxima early.
    sup: Option<u64>,
    nondecreasing: bool,
}

impl fmt::Debug for CounterFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl CounterFn {
    pub fn new(name: impl Into<String>, f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), map: Arc::new(f), sup: None, nondecreasing: false }
    }

    pub fn constant(c: u64) -> Self {
        Self { name: format!("const {c}"), map: Arc::new(move |_| c), sup: Some(c), nondecreasing: true }
    }

    pub fn linear() -> Self {
        Self { name: "n".into(), map: Arc::new(|n| n), sup: None, nondecreasing: true }
    }

    /// `n ↦ min(2ⁿ, 2²⁰)`.
    pub fn exp_capped() -> Self {
        Self {
            name: "2^n capped 2^20".into(),
            map: Arc::new(|n| if n >= 20 { EXP_COUNTER_CAP } else { 1 << n }),
            sup: Some(EXP_COUNTER_CAP),
            nondecreasing: true,
        }
    }

    /// Pseudo-random values in `0..=max`, a pure function of `(seed, n)`.
    pub fn random(seed: u64, max: u64) -> Self {
        Self {
            name: format!("random(seed={seed}) <= {max}"),
            map: Arc::new(move |n| derive_seed(seed, n) % (max + 1)),
            sup: Some(max),
            nondecreasing: false,
        }
    }

    /// The test family: constants 1 and 10, `n`, capped `2ⁿ` and a seeded
    /// random function bounded by 100.
    pub fn test_family(seed: u64) -> Vec<CounterFn> {
        vec![
            CounterFn::constant(1),
            CounterFn::constant(10),
            CounterFn::linear(),
            CounterFn::exp_capped(),
            CounterFn::random(seed, 100),
        ]
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, n: u64) -> u64 {
        (self.map)(n)
    }

    /// `g̃(n) = n + g(n)`, saturating.
    pub fn tilde(&self) -> CounterFn {
        let g = self.map.clone();
        CounterFn {
            name: format!("tilde({})", self.name),
            map: Arc::new(move |n| n.saturating_add(g(n))),
            sup: None,
            nondecreasing: self.nondecreasing,
        }
    }

    /// `g^M(n) = max_{i ≤ n} g(i)`.
    pub fn running_max(&self) -> CounterFn {
        if self.nondecreasing {
            return CounterFn { name: format!("max({})", self.name), ..self.clone() };
        }
        let g = self.map.clone();
        let sup = self.sup;
        let cache = Arc::new(Mutex::new(MaxCache::default()));
        CounterFn {
            name: format!("max({})", self.name),
            map: Arc::new(move |n| {
                let mut c = cache.lock().expect("running max cache");
                if c.records.is_empty() {
                    let v = g(0);
                    c.records.push((0, v));
                    c.current = v;
                }
                while c.scanned < n && sup.is_none_or(|s| c.current < s) {
                    c.scanned += 1;
                    let i = c.scanned;
                    let v = g(i);
                    if v > c.current {
                        c.current = v;
                        c.records.push((i, v));
                    }
                }
                if n >= c.scanned {
                    return c.current;
                }
                let k = c.records.partition_point(|&(i, _)| i <= n);
                c.records[k - 1].1
            }),
            sup: self.sup,
            nondecreasing: true,
        }
    }
}

/// Result of iterating a counter function, saturated at [`INDEX_CAP`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bound {
    pub value: u64,
    /// The true value exceeds [`INDEX_CAP`]; `value` is then a lower bound.
    pub saturated: bool,
}

/// `f^(k)(n0)`, stopping at a fixed point or once the value passes the cap.
pub fn iterate(f: &CounterFn, k: u64, n0: u64) -> Bound {
    let mut v = n0;
    if v > INDEX_CAP {
        return Bound { value: v, saturated: true };
    }
    for _ in 0..k {
        let next = f.eval(v);
        if next == v {
            break;
        }
        v = next;
        if v > INDEX_CAP {
            return Bound { value: v, saturated: true };
        }
    }
    Bound { value: v, saturated: false }
}

/// `⌈x⌉` as an iteration count; values beyond `u64` saturate.
pub fn ceil_count(x: f64) -> u64 {
    if x.is_nan() || x <= 0.0 {
        0
    } else if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil() as u64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaStatus {
    Pass,
    /// No admissible `N` up to a bound below the cap: the theorem instance is
    /// falsified.
    Fail,
    /// The bound passed the cap, or windows could not be evaluated, before a
    /// metastable `N` was found.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetastabilityReport {
    pub subject: String,
    pub eps: f64,
    pub g: String,
    pub lower: u64,
    pub theoretical_bound: Bound,
    pub found_n: Option<u64>,
    pub window: Option<[u64; 2]>,
    pub max_oscillation: Option<f64>,
    pub status: MetaStatus,
}

impl MetastabilityReport {
    pub fn passed(&self) -> bool {
        self.status == MetaStatus::Pass
    }
}

/// Outcome of measuring the oscillation on one window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WindowVerdict {
    Within(f64),
    Exceeds(f64),
    /// The window reaches past the evaluable range or its oscillation could
    /// not be decided.
    Unknown,
}

/// Scans `N = lower, lower+1, …` up to the bound for the first window
/// `[N, N + g(N)]` on which `window` reports oscillation within tolerance.
pub fn metastable_search(
    subject: &str,
    eps: f64,
    g: &CounterFn,
    lower: u64,
    bound: Bound,
    mut window: impl FnMut(u64, u64) -> Result<WindowVerdict>,
) -> Result<MetastabilityReport> {
    let last = if bound.saturated { INDEX_CAP } else { bound.value };
    let mut undecided = bound.saturated;
    let mut report = MetastabilityReport {
        subject: subject.to_string(),
        eps,
        g: g.name().to_string(),
        lower,
        theoretical_bound: bound,
        found_n: None,
        window: None,
        max_oscillation: None,
        status: MetaStatus::Fail,
    };
    let mut n = lower;
    while n <= last {
        let end = n.saturating_add(g.eval(n));
        match window(n, end)? {
            WindowVerdict::Within(osc) => {
                report.found_n = Some(n);
                report.window = Some([n, end]);
                report.max_oscillation = Some(osc);
                report.status = MetaStatus::Pass;
                return Ok(report);
            }
            WindowVerdict::Exceeds(_) => {}
            WindowVerdict::Unknown => {
                undecided = true;
                // nothing further is evaluable once windows start to overflow
                if end > INDEX_CAP {
                    break;
                }
            }
        }
        n += 1;
    }
    if undecided {
        report.status = MetaStatus::Inconclusive;
    }
    Ok(report)
}

type RealMap = Arc<dyn Fn(u64) -> f64 + Send + Sync>;
type TailModulus = Arc<dyn Fn(f64) -> u64 + Send + Sync>;

/// A summable error sequence `(δ_n)` with its tail modulus `γ` and total `B`.
#[derive(Clone)]
pub struct ErrorSeq {
    pub descriptor: String,
    delta: RealMap,
    gamma_tail: TailModulus,
    /// `Σ δ_n ≤ total`.
    pub total: f64,
}

impl fmt::Debug for ErrorSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ErrorSeq({}, total={})", self.descriptor, self.total)
    }
}

impl ErrorSeq {
    pub fn new(
        descriptor: impl Into<String>,
        delta: impl Fn(u64) -> f64 + Send + Sync + 'static,
        gamma_tail: impl Fn(f64) -> u64 + Send + Sync + 'static,
        total: f64,
    ) -> Self {
        Self { descriptor: descriptor.into(), delta: Arc::new(delta), gamma_tail: Arc::new(gamma_tail), total }
    }

    pub fn zero() -> Self {
        Self::new("0", |_| 0.0, |_| 0, 0.0)
    }

    /// `δ_n = 4⁻ⁿ` with `γ(ε) = ⌈½ log₂(2/ε)⌉`.
    pub fn quarter_powers() -> Self {
        Self::new(
            "4^-n",
            |n| 0.25f64.powi(n.min(2000) as i32),
            |e| ceil_count(0.5 * (2.0 / e).log2()),
            4.0 / 3.0,
        )
    }

    /// `δ_n = 1/(n+1)²` with `γ(ε) = ⌈1/ε⌉`.
    pub fn inverse_squares() -> Self {
        Self::new("1/(n+1)^2", |n| 1.0 / ((n + 1) as f64).powi(2), |e| ceil_count(1.0 / e), 2.0)
    }

    pub fn delta(&self, n: u64) -> f64 {
        (self.delta)(n)
    }

    pub fn gamma_tail(&self, eps: f64) -> u64 {
        (self.gamma_tail)(eps)
    }

    /// Checks `Σ_{i ∈ [γ(ε), m)} δ_i ≤ ε` for every `m < len`.
    pub fn check_tail(&self, eps: f64, len: u64, tol: f64) -> Result<()> {
        let start = self.gamma_tail(eps);
        let mut sum = 0.0;
        for i in start..len {
            let d = self.delta(i);
            if !(d >= 0.0) {
                return Err(Error::Input(format!("error sequence {} is negative at {i}", self.descriptor)));
            }
            sum += d;
            if sum > eps + tol {
                return Err(Error::Input(format!(
                    "tail modulus of {} fails: sum over [{start}, {}) is {sum} > {eps}",
                    self.descriptor,
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// A real sequence in `[0, b]`, optionally with an error sequence bounding
/// its increases.
#[derive(Clone)]
pub struct RealSeq {
    pub descriptor: String,
    eval: RealMap,
    pub b: f64,
    pub errors: Option<ErrorSeq>,
}

impl fmt::Debug for RealSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealSeq({}, b={})", self.descriptor, self.b)
    }
}

impl RealSeq {
    pub fn new(descriptor: impl Into<String>, b: f64, eval: impl Fn(u64) -> f64 + Send + Sync + 'static) -> Self {
        Self { descriptor: descriptor.into(), eval: Arc::new(eval), b, errors: None }
    }

    pub fn with_errors(mut self, errors: ErrorSeq) -> Self {
        self.errors = Some(errors);
        self
    }

    /// Sequence given by its first values, constant afterwards.
    pub fn from_values(descriptor: impl Into<String>, b: f64, values: Vec<f64>) -> Self {
        let values = Arc::new(values);
        Self::new(descriptor, b, move |n| values[(n as usize).min(values.len() - 1)])
    }

    pub fn eval(&self, n: u64) -> f64 {
        (self.eval)(n)
    }
}

/// Lazily evaluated prefix of a sequence with block summaries for window
/// minima and maxima.
struct Prefix<'a> {
    seq: &'a RealSeq,
    values: Vec<f64>,
    block_min: Vec<f64>,
    block_max: Vec<f64>,
}

const BLOCK: usize = 1024;

impl<'a> Prefix<'a> {
    fn new(seq: &'a RealSeq) -> Self {
        Self { seq, values: Vec::new(), block_min: Vec::new(), block_max: Vec::new() }
    }

    fn extend_to(&mut self, n: u64) {
        while (self.values.len() as u64) <= n {
            let i = self.values.len();
            let v = self.seq.eval(i as u64);
            if i % BLOCK == 0 {
                self.block_min.push(v);
                self.block_max.push(v);
            } else {
                let b = i / BLOCK;
                self.block_min[b] = self.block_min[b].min(v);
                self.block_max[b] = self.block_max[b].max(v);
            }
            self.values.push(v);
        }
    }

    /// `max − min` of the values with indices in `[lo, hi]`.
    fn oscillation(&mut self, lo: u64, hi: u64) -> f64 {
        self.extend_to(hi);
        let (lo, hi) = (lo as usize, hi as usize);
        let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut i = lo;
        while i <= hi {
            if i % BLOCK == 0 && i + BLOCK - 1 <= hi {
                let b = i / BLOCK;
                mn = mn.min(self.block_min[b]);
                mx = mx.max(self.block_max[b]);
                i += BLOCK;
            } else {
                mn = mn.min(self.values[i]);
                mx = mx.max(self.values[i]);
                i += 1;
            }
        }
        mx - mn
    }
}

fn check_inputs(eps: f64, tol: f64) -> Result<()> {
    if !(eps > 0.0) {
        return usage(format!("eps must be positive, got {eps}"));
    }
    if !(tol >= 0.0) {
        return usage(format!("tolerance must be nonnegative, got {tol}"));
    }
    Ok(())
}

/// Verifies the metastability bound for a nonincreasing sequence in `[0, b]`.
///
/// The visited prefix is checked for monotonicity and range; a violation is
/// an input error, not a failed bound.
pub fn mono_metastability(seq: &RealSeq, eps: f64, g: &CounterFn, tol: f64) -> Result<MetastabilityReport> {
    check_inputs(eps, tol)?;
    let bound = iterate(&g.tilde(), ceil_count(seq.b / eps), 0);
    let mut prefix = Prefix::new(seq);
    let mut checked = 0usize;
    let report = metastable_search(&seq.descriptor, eps, g, 0, bound, |n, end| {
        if end > INDEX_CAP {
            return Ok(WindowVerdict::Unknown);
        }
        let osc = prefix.oscillation(n, end);
        for i in checked..prefix.values.len() {
            let v = prefix.values[i];
            if !(v >= -tol && v <= seq.b + tol) {
                return Err(Error::Input(format!("{} leaves [0, {}] at index {i}: {v}", seq.descriptor, seq.b)));
            }
            if i > 0 && v > prefix.values[i - 1] + tol {
                return Err(Error::Input(format!("{} increases at index {i}", seq.descriptor)));
            }
        }
        checked = prefix.values.len();
        Ok(if osc <= eps + tol { WindowVerdict::Within(osc) } else { WindowVerdict::Exceeds(osc) })
    })?;
    Ok(report)
}

/// Verifies the metastability bound for a sequence in `[0, b]` with
/// `a_{n+1} ≤ a_n + δ_n`.
pub fn summable_metastability(seq: &RealSeq, eps: f64, g: &CounterFn, tol: f64) -> Result<MetastabilityReport> {
    check_inputs(eps, tol)?;
    let errors = seq.errors.clone().unwrap_or_else(ErrorSeq::zero);
    let lower = errors.gamma_tail(eps / 4.0);
    let bound = iterate(&g.running_max().tilde(), ceil_count(2.0 * seq.b / eps), lower);
    let mut prefix = Prefix::new(seq);
    let mut checked = 0usize;
    let report = metastable_search(&seq.descriptor, eps, g, lower, bound, |n, end| {
        if end > INDEX_CAP {
            return Ok(WindowVerdict::Unknown);
        }
        let osc = prefix.oscillation(n, end);
        for i in checked..prefix.values.len() {
            let v = prefix.values[i];
            if !(v >= -tol && v <= seq.b + tol) {
                return Err(Error::Input(format!("{} leaves [0, {}] at index {i}: {v}", seq.descriptor, seq.b)));
            }
            if i > 0 && v > prefix.values[i - 1] + errors.delta(i as u64 - 1) + tol {
                return Err(Error::Input(format!("{} violates a_(n+1) <= a_n + delta_n at n = {}", seq.descriptor, i - 1)));
            }
        }
        checked = prefix.values.len();
        Ok(if osc <= eps + tol { WindowVerdict::Within(osc) } else { WindowVerdict::Exceeds(osc) })
    })?;
    errors.check_tail(eps / 4.0, checked as u64, tol)?;
    Ok(report)
}

/// `g*(n)`: the first `q ∈ [0, g(n)]` maximising `|a_n − a_{n+q}|`.
pub fn argmax_counter(seq: &RealSeq, g: &CounterFn) -> CounterFn {
    let seq = seq.clone();
    let g = g.clone();
    CounterFn::new(format!("argmax({})", g.name()), move |n| {
        let a = seq.eval(n);
        let mut best = (0, 0.0);
        for q in 0..=g.eval(n) {
            let d = (a - seq.eval(n + q)).abs();
            if d > best.1 {
                best = (q, d);
            }
        }
        best.0
    })
}

/// Nonincreasing test sequences in `[0, 1]`.
pub fn monotone_family(seed: u64) -> Vec<RealSeq> {
    let mut out = vec![
        RealSeq::new("2^-n", 1.0, |n| 0.5f64.powi(n.min(2000) as i32)),
        RealSeq::new("1/(n+1)", 1.0, |n| 1.0 / (n + 1) as f64),
        RealSeq::new("const 0.5", 1.0, |_| 0.5),
        RealSeq::new("staircase", 1.0, |n| (1.0 - 0.1 * (n / 7) as f64).max(0.0)),
    ];
    for k in [1u64, 2, 5, 17, 50] {
        out.push(step_drop(k));
    }
    out.push(random_nonincreasing(seed, 4096));
    out
}

/// `1` before index `k`, `0` from `k` on.
pub fn step_drop(k: u64) -> RealSeq {
    RealSeq::new(format!("step drop at {k}"), 1.0, move |n| if n < k { 1.0 } else { 0.0 })
}

/// Random nonincreasing sequence of length `len`, constant afterwards.
pub fn random_nonincreasing(seed: u64, len: usize) -> RealSeq {
    let mut rng = rng_from_seed(seed);
    let mut v = 1.0;
    let mut values = Vec::with_capacity(len);
    for _ in 0..len {
        values.push(v);
        if unit(&mut rng) < 0.3 {
            v *= uniform(&mut rng, 0.5, 1.0);
        }
    }
    RealSeq::from_values(format!("random nonincreasing(seed={seed})"), 1.0, values)
}

/// Quasi-monotone test sequences in `[0, 1]` with summable errors.
pub fn quasi_monotone_family(seed: u64) -> Vec<RealSeq> {
    let alt4 = {
        // partial sums of Σ (−1)^i 4^{-i}: rises by exactly δ_n at even n
        let mut values = Vec::with_capacity(64);
        let mut s = 0.0;
        for i in 0..64 {
            values.push(s);
            s += if i % 2 == 0 { 1.0 } else { -1.0 } * 0.25f64.powi(i);
        }
        RealSeq::from_values("alternating 4^-n sums", 1.0, values).with_errors(ErrorSeq::quarter_powers())
    };
    let alt_sq = {
        let mut values = Vec::with_capacity(1 << 16);
        let mut s = 0.0;
        for i in 0..1u64 << 16 {
            values.push(s);
            s += if i % 2 == 0 { 1.0 } else { -1.0 } / ((i + 1) as f64).powi(2);
        }
        RealSeq::from_values("alternating 1/(n+1)^2 sums", 1.0, values).with_errors(ErrorSeq::inverse_squares())
    };
    // rises by δ_n/8 from each odd n to n + 1
    let spikes = RealSeq::new("0.3 + 4^-n/2 at even n", 1.0, |n| {
        if n % 2 == 0 { 0.3 + 0.5 * 0.25f64.powi(n.min(2000) as i32) } else { 0.3 }
    })
    .with_errors(ErrorSeq::quarter_powers());
    // 2^-n + Σ_{i ≥ n} 4^-i, scaled into [0, 1]
    let perturbed = RealSeq::new("2^-n + tail of 4^-i", 1.0, |n| {
        let n = n.min(2000) as i32;
        (0.5f64.powi(n) + 0.25f64.powi(n) * 4.0 / 3.0) * 3.0 / 7.0
    })
    .with_errors(ErrorSeq::quarter_powers());
    vec![alt4, alt_sq, perturbed, spikes, dip_and_recover(seed, 4096)]
}

/// Random sequence that dips and partially recovers, with recoveries bounded
/// by `δ_n = 1/(n+1)²`.
pub fn dip_and_recover(seed: u64, len: usize) -> RealSeq {
    let mut rng = rng_from_seed(seed);
    let mut v = 0.8;
    let mut values = Vec::with_capacity(len);
    for n in 0..len {
        values.push(v);
        let delta = 1.0 / ((n + 1) as f64).powi(2);
        if unit(&mut rng) < 0.5 {
            v = (v + unit(&mut rng) * delta).min(1.0);
        } else {
            v -= unit(&mut rng) * 0.3 * v;
        }
    }
    RealSeq::from_values(format!("dip and recover(seed={seed})"), 1.0, values).with_errors(ErrorSeq::inverse_squares())
}
