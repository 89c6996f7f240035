//! Event-driven Monte Carlo oracle for the analytic modules.
//!
//! Every estimator here is a pure function of `(parameters, master_seed,
//! replicas)`: replica seeds are derived from the master seed by a
//! splittable hash, replicas are simulated independently (in parallel via
//! rayon), and accumulation runs in replica order with pairwise summation,
//! so results are identical across runs and across any number of worker
//! threads.

mod coupling;
mod estimate;
mod path;
pub mod stats;

pub use coupling::{simulate_coupled, CoupledTriple};
pub use estimate::{
    estimate_mgf, estimate_tv_curve, estimate_tv_lower_at_zero, TvPointEstimate,
    MGF_BOUNDARY_CAP, MIN_MGF_REPLICAS,
};
pub use path::{
    sample_hitting_time, simulate_queue_path, simulate_workload_path, TrajectoryPath,
    WorkloadPath, EVENT_CAP,
};

/// A Monte Carlo point estimate with its standard error and provenance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EstimateWithError {
    pub estimate: f64,
    pub std_error: f64,
    pub replicas: u64,
    pub master_seed: u64,
}

/// How a replica's initial state is drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    /// Start from this queue length.
    Fixed(u32),
    /// Inverse-CDF draw from the stationary law with arrival rate
    /// `lambda0` (service rate taken from the operating parameters).
    Stationary { lambda0: f64 },
}

/// Named RNG streams so that replicas, bootstrap resampling, and initial
/// draws never share seeds.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Stream {
    Replica = 1,
    Bootstrap = 2,
    Coupling = 3,
}

/// Splittable seed derivation: a SplitMix64-style finalizer over
/// (master, stream, index). Deterministic regardless of scheduling.
pub(crate) fn derive_seed(master: u64, stream: Stream, index: u64) -> u64 {
    let mut z = master
        .wrapping_add((stream as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-insensitive pairwise summation, reproducible to the last bit for a
/// fixed input order.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 32 {
        let mut s = 0.0;
        for v in values {
            s += v;
        }
        return s;
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Sample mean and standard error of the mean (pairwise sums, n-1 divisor).
pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = pairwise_sum(values) / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1.0);
    (mean, (var / n).sqrt())
}
