//! Seeded random batches over parameters and composite systems.
//!
//! Inputs are drawn up front from a ChaCha stream, then each item is checked
//! independently; with the `parallel` feature and [`Execution::Parallel`] the
//! items fan out over rayon. Summaries only use order-independent
//! reductions (counts and maxima), so both execution modes give identical
//! results for the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::composite::{com_rep_direct, effective_params, CompositeSystem, Particle};
use crate::par::{IntoParallelRefIterator, ParallelIterator};
use crate::representation::{
    build_branch_rep, check_branch_transform, primed_params, unprimed_params, verify_nc_algebra, Branch,
    MassConditions, NCParams,
};

/// Environment variable holding the seed of random batches.
pub const SEED_ENV: &str = "NCPS_SEED";
pub const DEFAULT_SEED: u64 = 0x6e63_7073;

/// `NCPS_SEED` if set and parseable, else [`DEFAULT_SEED`].
pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV).ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_SEED)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// `Parallel` degrades to `Sequential` when built without the feature.
    pub fn effective(self) -> Execution {
        if crate::par::PARALLEL_ENABLED {
            self
        } else {
            Execution::Sequential
        }
    }
}

/// Order-preserving map over a batch.
pub fn map_batch<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec.effective() {
        Execution::Parallel => items.par_iter().map(f).collect(),
        Execution::Sequential => items.iter().map(f).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMode {
    /// Any signs consistent with the sampled product.
    Any,
    /// `θ > 0` and `η > 0`.
    Positive,
}

/// Random `(θ, η)` with `θη` uniform in `product_range` (zero excluded) and
/// `θ/η` log-uniform over `[1e-2, 1e2]`.
pub fn random_params(seed: u64, n: usize, product_range: (f64, f64), signs: SignMode) -> Vec<NCParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = product_range;
    let lo = if signs == SignMode::Positive { lo.max(0.0) } else { lo };
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let product: f64 = rng.random_range(lo..hi);
        if product.abs() < 1e-12 {
            continue;
        }
        let ratio = 10f64.powf(rng.random_range(-2.0..2.0));
        let mut theta = (product.abs() * ratio).sqrt();
        if signs == SignMode::Any && rng.random_bool(0.5) {
            theta = -theta;
        }
        out.push(NCParams::new(theta, product / theta));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub trials: usize,
    /// Cases that were evaluated (some cases have no plus branch).
    pub evaluated: usize,
    pub failures: usize,
    /// Largest error observed; its meaning depends on the sweep.
    pub max_error: f64,
}

fn summarize(trials: usize, results: Vec<Vec<f64>>, limit: f64) -> SweepSummary {
    let errors: Vec<f64> = results.into_iter().flatten().collect();
    SweepSummary {
        trials,
        evaluated: errors.len(),
        failures: errors.iter().filter(|e| !(**e <= limit)).count(),
        max_error: errors.iter().copied().fold(0.0, f64::max),
    }
}

fn branches_for(p: &NCParams) -> Vec<Branch> {
    if p.product() > 0.0 {
        vec![Branch::Minus, Branch::Plus]
    } else {
        vec![Branch::Minus]
    }
}

/// Commutator tables of both branches against `(θ, η, 1, 1, 0, 0)`; the
/// error is the largest absolute deviation over the six scalars. The plus
/// branch is evaluated only where it is real (`θη > 0`).
pub fn closure_sweep(params: &[NCParams], exec: Execution, tol: f64) -> SweepSummary {
    let results = map_batch(exec, params, |p| {
        branches_for(p)
            .into_iter()
            .map(|b| match build_branch_rep(p, b, 0) {
                Ok(rep) => verify_nc_algebra(&rep, p.theta, p.eta, 1.0, tol)
                    .checks
                    .iter()
                    .map(|c| (c.measured - c.expected).abs())
                    .fold(0.0, f64::max),
                Err(_) => f64::INFINITY,
            })
            .collect()
    });
    summarize(params.len(), results, tol)
}

/// `(θ, η) -> (θ′, η′) -> (θ, η)`; the error is the larger relative error.
pub fn round_trip_sweep(params: &[NCParams], exec: Execution, rel_tol: f64) -> SweepSummary {
    let results = map_batch(exec, params, |p| {
        branches_for(p)
            .into_iter()
            .map(|b| match primed_params(p, b) {
                Ok((tp, ep)) => {
                    let (t, e) = unprimed_params(tp, ep);
                    ((t - p.theta) / p.theta).abs().max(((e - p.eta) / p.eta).abs())
                }
                Err(_) => f64::INFINITY,
            })
            .collect()
    });
    summarize(params.len(), results, rel_tol)
}

/// Branch transform residuals; expects `θ/η > 0`.
pub fn transform_sweep(params: &[NCParams], exec: Execution, tol: f64) -> SweepSummary {
    let results = map_batch(exec, params, |p| {
        vec![check_branch_transform(p, tol).map_or(f64::INFINITY, |r| r.max_residual)]
    });
    summarize(params.len(), results, tol)
}

/// Systems of 2–5 particles with masses in `[0.1, 10]` and arbitrary
/// per-particle `(θ_a, η_a)` with `θ_aη_a ∈ (−5, 1)`.
pub fn random_systems(seed: u64, n: usize) -> Vec<CompositeSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let count = rng.random_range(2..=5usize);
            let sub_seed: u64 = rng.random();
            let params = random_params(sub_seed, count, (-5.0, 1.0), SignMode::Any);
            let particles = params
                .into_iter()
                .enumerate()
                .map(|(id, p)| Particle::new(id, p.with_mass(rng.random_range(0.1..10.0))))
                .collect();
            CompositeSystem::new(particles).expect("generated systems are valid")
        })
        .collect()
}

/// Direct-route commutator table against the effective parameters.
pub fn composite_closure_sweep(systems: &[CompositeSystem], exec: Execution, tol: f64) -> SweepSummary {
    let results = map_batch(exec, systems, |sys| {
        let (theta, eta) = effective_params(sys);
        let err = match com_rep_direct(sys, Branch::Minus) {
            Ok(rep) => verify_nc_algebra(&rep, theta, eta, 1.0, tol)
                .checks
                .iter()
                .map(|c| (c.measured - c.expected).abs())
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        };
        vec![err]
    });
    summarize(systems.len(), results, tol)
}

/// Random totals `M = k/64`, `k ∈ [64, 6400)`, split into 2–5 parts that are
/// also multiples of 1/64, so every partition sums to `M` exactly.
pub fn random_partitions(seed: u64, n: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let total_units: u64 = rng.random_range(64..6400);
            let parts = rng.random_range(2..=5usize);
            let mut cuts: Vec<u64> = (1..parts).map(|_| rng.random_range(1..total_units)).collect();
            cuts.push(0);
            cuts.push(total_units);
            cuts.sort_unstable();
            cuts.dedup();
            cuts.windows(2).map(|w| (w[1] - w[0]) as f64 / 64.0).collect()
        })
        .collect()
}

/// Distance in units in the last place between two finite doubles.
pub fn ulp_distance(a: f64, b: f64) -> u64 {
    fn ordered(x: f64) -> i64 {
        let bits = x.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    }
    ordered(a).abs_diff(ordered(b))
}

/// Largest ulp distance of `θ̃` from `γ/M` and of `η̃` from `αM` over the
/// partitions.
pub fn effective_params_ulp_sweep(
    c: &MassConditions,
    partitions: &[Vec<f64>],
    exec: Execution,
) -> (u64, u64) {
    let results = map_batch(exec, partitions, |masses| {
        let sys = CompositeSystem::from_conditions(c, masses).expect("valid partition");
        let (theta, eta) = effective_params(&sys);
        let m = sys.total_mass();
        (ulp_distance(theta, c.gamma / m), ulp_distance(eta, c.alpha * m))
    });
    results.into_iter().fold((0, 0), |(a, b), (x, y)| (a.max(x), b.max(y)))
}
