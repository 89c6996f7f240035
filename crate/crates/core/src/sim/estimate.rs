//! Monte Carlo estimators: empirical hitting-time MGFs, plug-in TV curves,
//! and the single-event TV lower bound at state 0.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::error::Error;
use crate::mgf;
use crate::model::QueueParams;
use crate::sim::path::{sample_hitting_time_with_rng, states_at_times};
use crate::sim::{derive_seed, mean_and_se, EstimateWithError, InitialCondition, Stream};
use crate::Result;

/// MGF estimation is refused above this fraction of the admissible-alpha
/// boundary: the MGF is finite at the boundary but the estimator variance
/// is not, so no meaningful standard error exists there.
pub const MGF_BOUNDARY_CAP: f64 = 0.98;

/// Minimum replica count for MGF estimation.
pub const MIN_MGF_REPLICAS: u64 = 1_000;

/// Bootstrap resamples used for TV standard errors.
const BOOTSTRAP_RESAMPLES: usize = 200;

/// Sample mean and standard error of `exp(alpha * tau0)` over independent
/// replicas with derived per-replica seeds.
///
/// `alpha` must sit strictly inside the admissible domain: at most
/// [`MGF_BOUNDARY_CAP`] times the boundary, which is `alpha_max` for fixed
/// starts and `min(alpha_max, series boundary)` for stationary starts.
pub fn estimate_mgf(
    params: &QueueParams,
    x0_spec: InitialCondition,
    alpha: f64,
    replicas: u64,
    master_seed: u64,
) -> Result<EstimateWithError> {
    if replicas < MIN_MGF_REPLICAS {
        return Err(Error::TooFewReplicas {
            got: replicas,
            min: MIN_MGF_REPLICAS,
        });
    }
    let boundary = match x0_spec {
        InitialCondition::Fixed(_) => mgf::alpha_max(params),
        InitialCondition::Stationary { lambda0 } => {
            let domain = mgf::mgf_domain_with_initial(lambda0, params)?;
            domain
                .stationary_alpha_sup
                .map_or(domain.alpha_max, |s| s.min(domain.alpha_max))
        }
    };
    if alpha.is_nan() || alpha < 0.0 {
        return Err(Error::AlphaOutOfDomain {
            alpha,
            alpha_max: boundary,
        });
    }
    let cap = MGF_BOUNDARY_CAP * boundary;
    if alpha > cap {
        return Err(Error::AlphaNearBoundary {
            alpha,
            boundary,
            cap,
        });
    }
    let initial = match x0_spec {
        InitialCondition::Stationary { lambda0 } => {
            Some(QueueParams::new_named(lambda0, params.mu(), "initial")?)
        }
        InitialCondition::Fixed(_) => None,
    };
    let values: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, Stream::Replica, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0 = match x0_spec {
                InitialCondition::Fixed(x) => x,
                InitialCondition::Stationary { .. } => {
                    initial.as_ref().unwrap().sample_stationary(rng.random())
                }
            };
            let tau = sample_hitting_time_with_rng(params, x0, &mut rng)
                .expect("event cap unreachable for stable parameters");
            (alpha * tau).exp()
        })
        .collect();
    let (estimate, std_error) = mean_and_se(&values);
    Ok(EstimateWithError {
        estimate,
        std_error,
        replicas,
        master_seed,
    })
}

/// One point of an estimated TV curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvPointEstimate {
    pub t: f64,
    pub estimate: EstimateWithError,
    /// Number of distinct states observed at this time.
    pub support_size: usize,
    /// Positive-bias allowance `sqrt(support_size / replicas)` of the
    /// plug-in estimator.
    pub bias_allowance: f64,
}

/// Plug-in TV of empirical counts against the exact geometric stationary
/// law, including the analytic tail of `pi` beyond the observed support.
fn tv_from_counts(counts: &[u64], n: u64, operating: &QueueParams) -> f64 {
    let max_state = counts.iter().rposition(|&c| c > 0);
    let k = match max_state {
        Some(k) => k,
        None => return 0.0,
    };
    let mut sum = 0.0;
    for (x, &c) in counts.iter().enumerate().take(k + 1) {
        let p_hat = c as f64 / n as f64;
        sum += (p_hat - operating.stationary_pmf(x as u32)).abs();
    }
    // pi's mass beyond the observed support, where p_hat is 0
    sum += operating.rho().powi(k as i32 + 1);
    0.5 * sum
}

/// Empirical TV curve: `replicas` independent copies start from the
/// stationary law of `lambda0` (inverse CDF) and evolve under the operating
/// parameters; at each requested time the plug-in TV against the exact
/// stationary pmf is computed, with a bootstrap standard error
/// (multinomial resampling of the empirical counts, 200 resamples).
pub fn estimate_tv_curve(
    lambda0: f64,
    params: &QueueParams,
    times: &[f64],
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<TvPointEstimate>> {
    validate_times(times)?;
    let initial = QueueParams::new_named(lambda0, params.mu(), "initial")?;
    if replicas == 0 {
        return Err(Error::TooFewReplicas { got: 0, min: 1 });
    }

    // replica-major state matrix, deterministic order
    let per_replica: Vec<Vec<u32>> = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, Stream::Replica, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0 = initial.sample_stationary(rng.random());
            states_at_times(params, x0, times, &mut rng)
        })
        .collect();

    let mut out = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let mut counts: Vec<u64> = Vec::new();
        for states in &per_replica {
            let s = states[k] as usize;
            if s >= counts.len() {
                counts.resize(s + 1, 0);
            }
            counts[s] += 1;
        }
        let estimate = tv_from_counts(&counts, replicas, params);
        let support_size = counts.iter().filter(|&&c| c > 0).count();
        let std_error = bootstrap_se(&counts, replicas, params, master_seed, k as u64);
        out.push(TvPointEstimate {
            t,
            estimate: EstimateWithError {
                estimate,
                std_error,
                replicas,
                master_seed,
            },
            support_size,
            bias_allowance: (support_size as f64 / replicas as f64).sqrt(),
        });
    }
    Ok(out)
}

/// Bootstrap standard error of the plug-in TV: multinomial resamples of the
/// empirical counts via conditional binomials, deterministic per
/// (master_seed, time index).
fn bootstrap_se(
    counts: &[u64],
    n: u64,
    operating: &QueueParams,
    master_seed: u64,
    time_index: u64,
) -> f64 {
    let mut rng =
        ChaCha8Rng::seed_from_u64(derive_seed(master_seed, Stream::Bootstrap, time_index));
    let mut tv_values = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    let mut resampled = vec![0u64; counts.len()];
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let mut remaining = n;
        let mut mass_left = 1.0f64;
        for (x, &c) in counts.iter().enumerate() {
            if remaining == 0 {
                resampled[x] = 0;
                continue;
            }
            let p = (c as f64 / n as f64 / mass_left).clamp(0.0, 1.0);
            let draw = if p >= 1.0 {
                remaining
            } else {
                Binomial::new(remaining, p).expect("p in [0,1]").sample(&mut rng)
            };
            resampled[x] = draw;
            remaining -= draw;
            mass_left -= c as f64 / n as f64;
        }
        tv_values.push(tv_from_counts(&resampled, n, operating));
    }
    // bootstrap SE of the statistic = standard deviation over resamples
    let k = tv_values.len() as f64;
    let mean = crate::sim::pairwise_sum(&tv_values) / k;
    let sq: Vec<f64> = tv_values.iter().map(|v| (v - mean) * (v - mean)).collect();
    (crate::sim::pairwise_sum(&sq) / (k - 1.0)).sqrt()
}

/// `|P_hat(X_t = 0) - (1 - rho)|` with a delta-method standard error — a
/// statistical lower bound on the true TV built from the single event
/// `{X_t = 0}` (equivalently `{W_t = 0}`).
///
/// Shares the replica seed stream with [`estimate_tv_curve`], so for equal
/// `(replicas, master_seed)` the underlying paths coincide and the
/// lower/upper sandwich holds pathwise.
pub fn estimate_tv_lower_at_zero(
    lambda0: f64,
    params: &QueueParams,
    t: f64,
    replicas: u64,
    master_seed: u64,
) -> Result<EstimateWithError> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "t must be finite and >= 0, got {t}"
        )));
    }
    let initial = QueueParams::new_named(lambda0, params.mu(), "initial")?;
    if replicas == 0 {
        return Err(Error::TooFewReplicas { got: 0, min: 1 });
    }
    let times = [t];
    let zeros: u64 = (0..replicas)
        .into_par_iter()
        .map(|i| {
            let seed = derive_seed(master_seed, Stream::Replica, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x0 = initial.sample_stationary(rng.random());
            let s = states_at_times(params, x0, &times, &mut rng);
            u64::from(s[0] == 0)
        })
        .sum();
    let p_hat = zeros as f64 / replicas as f64;
    let estimate = (p_hat - params.stationary_pmf(0)).abs();
    let std_error = (p_hat * (1.0 - p_hat) / replicas as f64).sqrt();
    Ok(EstimateWithError {
        estimate,
        std_error,
        replicas,
        master_seed,
    })
}

fn validate_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidConfig("empty time grid".into()));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidConfig(
            "times must be finite and nonnegative".into(),
        ));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "times must be strictly increasing".into(),
        ));
    }
    Ok(())
}
