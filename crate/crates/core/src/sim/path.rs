//! Sample paths of the queue-length and workload processes.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::model::QueueParams;
use crate::sim::InitialCondition;
use crate::Result;

/// Hard cap on events while waiting for a hitting time. Unreachable for any
/// stable queue at desk scale; trips with a diagnostic instead of spinning.
pub const EVENT_CAP: u64 = 1_000_000_000;

/// Exponential variate with the given rate, from a uniform in (0, 1].
fn exp_variate<R: Rng>(rng: &mut R, rate: f64) -> f64 {
    let u = 1.0 - rng.random::<f64>();
    -u.ln() / rate
}

/// Piecewise-constant sample path of the queue-length process: event times
/// and the state after each event.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPath {
    pub event_times: Vec<f64>,
    pub states: Vec<u32>,
    pub initial_state: u32,
    pub horizon: f64,
}

impl TrajectoryPath {
    /// State at time `t` (last event at or before `t`).
    pub fn state_at(&self, t: f64) -> u32 {
        let idx = self.event_times.partition_point(|&et| et <= t);
        if idx == 0 {
            self.initial_state
        } else {
            self.states[idx - 1]
        }
    }

    /// First time the path reaches 0 within the horizon; 0 when it starts
    /// there.
    pub fn first_zero_time(&self) -> Option<f64> {
        if self.initial_state == 0 {
            return Some(0.0);
        }
        self.states
            .iter()
            .position(|&s| s == 0)
            .map(|i| self.event_times[i])
    }
}

/// Competing-clock M/M/1 dynamics: from state 0 the next event is an
/// arrival after exp(lambda); from `x >= 1` the next event comes after
/// exp(lambda + mu) and is an arrival with probability
/// `lambda / (lambda + mu)`. Deterministic given the seed.
pub fn simulate_queue_path(
    params: &QueueParams,
    x0: u32,
    horizon: f64,
    seed: u64,
) -> TrajectoryPath {
    let (l, m) = (params.lambda(), params.mu());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = 0.0;
    let mut x = x0;
    let mut event_times = Vec::new();
    let mut states = Vec::new();
    loop {
        let rate = if x == 0 { l } else { l + m };
        t += exp_variate(&mut rng, rate);
        if t > horizon {
            break;
        }
        let arrival = if x == 0 {
            true
        } else {
            rng.random::<f64>() < l / (l + m)
        };
        x = if arrival { x + 1 } else { x - 1 };
        event_times.push(t);
        states.push(x);
    }
    TrajectoryPath {
        event_times,
        states,
        initial_state: x0,
        horizon,
    }
}

/// States of one replica sampled at an ascending list of times, without
/// materializing the whole path. Continues from the caller's RNG so that
/// initial-state draws and dynamics share one replica stream.
pub(crate) fn states_at_times<R: Rng>(
    params: &QueueParams,
    x0: u32,
    times: &[f64],
    rng: &mut R,
) -> Vec<u32> {
    debug_assert!(times.windows(2).all(|w| w[0] <= w[1]));
    let (l, m) = (params.lambda(), params.mu());
    let mut out = Vec::with_capacity(times.len());
    let mut t = 0.0;
    let mut x = x0;
    let mut k = 0;
    while k < times.len() {
        let rate = if x == 0 { l } else { l + m };
        let next = t + exp_variate(rng, rate);
        while k < times.len() && times[k] < next {
            out.push(x);
            k += 1;
        }
        if k == times.len() {
            break;
        }
        let arrival = if x == 0 {
            true
        } else {
            rng.random::<f64>() < l / (l + m)
        };
        x = if arrival { x + 1 } else { x - 1 };
        t = next;
    }
    out
}

/// First passage time to 0 from `x0` under the competing-clock dynamics;
/// `x0 = 0` returns 0.
pub fn sample_hitting_time(params: &QueueParams, x0: u32, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_hitting_time_with_rng(params, x0, &mut rng)
}

/// [`sample_hitting_time`] continuing from the caller's RNG.
pub(crate) fn sample_hitting_time_with_rng<R: Rng>(
    params: &QueueParams,
    x0: u32,
    rng: &mut R,
) -> Result<f64> {
    let (l, m) = (params.lambda(), params.mu());
    let mut t = 0.0;
    let mut x = x0;
    let mut events = 0u64;
    while x > 0 {
        t += exp_variate(rng, l + m);
        x = if rng.random::<f64>() < l / (l + m) {
            x + 1
        } else {
            x - 1
        };
        events += 1;
        if events >= EVENT_CAP {
            return Err(Error::EventCapExceeded {
                cap: EVENT_CAP,
                lambda: l,
                mu: m,
            });
        }
    }
    Ok(t)
}

/// Workload (virtual waiting time) path: jumps by a service requirement at
/// each arrival, drains at unit rate, reflected at 0. Levels are recorded
/// right after each jump; between jumps the value is
/// `max(level - elapsed, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadPath {
    /// Arrival epochs within the horizon.
    pub jump_times: Vec<f64>,
    /// Service requirement brought by each arrival (exp(mu) variates).
    pub jump_sizes: Vec<f64>,
    /// Workload immediately after each jump.
    pub levels_after: Vec<f64>,
    /// Workload at time 0 (total requirement of initial customers).
    pub initial_workload: f64,
    pub horizon: f64,
}

impl WorkloadPath {
    /// Workload at time `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.jump_times.partition_point(|&jt| jt <= t);
        let (t0, level) = if idx == 0 {
            (0.0, self.initial_workload)
        } else {
            (self.jump_times[idx - 1], self.levels_after[idx - 1])
        };
        (level - (t - t0)).max(0.0)
    }

    /// First time the workload drains to 0 within the horizon.
    pub fn first_zero_time(&self) -> Option<f64> {
        if self.initial_workload == 0.0 {
            return Some(0.0);
        }
        let mut t0 = 0.0;
        let mut level = self.initial_workload;
        for (k, &jt) in self.jump_times.iter().enumerate() {
            let drain = t0 + level;
            if drain < jt {
                return (drain <= self.horizon).then_some(drain);
            }
            t0 = jt;
            level = self.levels_after[k];
        }
        let drain = t0 + level;
        (drain <= self.horizon).then_some(drain)
    }
}

/// Queue-length and workload paths generated from one event realization:
/// shared arrival epochs, workload jumps equal to the realized service
/// durations (FIFO departure recursion `D_i = max(D_{i-1}, A_i) + S_i`).
/// The two zero-sets coincide pathwise.
pub fn simulate_workload_path(
    params: &QueueParams,
    x0_spec: InitialCondition,
    horizon: f64,
    seed: u64,
) -> Result<(TrajectoryPath, WorkloadPath)> {
    let (l, m) = (params.lambda(), params.mu());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x0 = match x0_spec {
        InitialCondition::Fixed(x) => x,
        InitialCondition::Stationary { lambda0 } => {
            let initial = QueueParams::new_named(lambda0, m, "initial")?;
            initial.sample_stationary(rng.random::<f64>())
        }
    };

    // Initial customers: service requirements drawn up front; their
    // departures stack from time 0.
    let mut departures: Vec<f64> = Vec::new();
    let mut last_departure = 0.0;
    for _ in 0..x0 {
        last_departure += exp_variate(&mut rng, m);
        departures.push(last_departure);
    }
    let initial_workload = last_departure;

    // Poisson arrivals over the horizon, each with its requirement.
    let mut jump_times = Vec::new();
    let mut jump_sizes = Vec::new();
    let mut levels_after = Vec::new();
    let mut t = 0.0;
    loop {
        t += exp_variate(&mut rng, l);
        if t > horizon {
            break;
        }
        let s = exp_variate(&mut rng, m);
        last_departure = last_departure.max(t) + s;
        departures.push(last_departure);
        jump_times.push(t);
        jump_sizes.push(s);
        // workload right after this arrival equals its time to departure
        levels_after.push(last_departure - t);
    }

    // Merge arrivals (+1) and departures (-1) into the queue path.
    // Simultaneous times cannot occur (requirements are strictly positive);
    // departures sort first if they ever did.
    let mut event_times = Vec::new();
    let mut states = Vec::new();
    let mut x = x0;
    let (mut ai, mut di) = (0usize, 0usize);
    loop {
        let next_arrival = jump_times.get(ai).copied().unwrap_or(f64::INFINITY);
        let next_departure = departures.get(di).copied().unwrap_or(f64::INFINITY);
        let (time, is_arrival) = if next_departure <= next_arrival {
            (next_departure, false)
        } else {
            (next_arrival, true)
        };
        if time > horizon || time == f64::INFINITY {
            break;
        }
        if is_arrival {
            x += 1;
            ai += 1;
        } else {
            debug_assert!(x > 0, "departure at empty queue");
            x -= 1;
            di += 1;
        }
        event_times.push(time);
        states.push(x);
    }

    Ok((
        TrajectoryPath {
            event_times,
            states,
            initial_state: x0,
            horizon,
        },
        WorkloadPath {
            jump_times,
            jump_sizes,
            levels_after,
            initial_workload,
            horizon,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{derive_seed, Stream};

    fn q(lambda: f64, mu: f64) -> QueueParams {
        QueueParams::new(lambda, mu).unwrap()
    }

    #[test]
    fn pure_death_limit_has_exactly_x0_departures() {
        // with a vanishing arrival rate the chain can only step down
        let p = q(1e-12, 4.0);
        let path = simulate_queue_path(&p, 3, 50.0, 7);
        assert_eq!(path.states, vec![2, 1, 0]);
        assert_eq!(path.event_times.len(), 3);
    }

    #[test]
    fn same_seed_gives_identical_paths() {
        let p = q(1.0, 4.0);
        let a = simulate_queue_path(&p, 2, 10.0, 42);
        let b = simulate_queue_path(&p, 2, 10.0, 42);
        assert_eq!(a, b);
        let c = simulate_queue_path(&p, 2, 10.0, 43);
        assert_ne!(a, c);
    }

    #[test]
    fn path_invariants_hold() {
        let p = q(1.0, 4.0);
        for seed in 0..50 {
            let path = simulate_queue_path(&p, 3, 20.0, seed);
            let mut prev_t = 0.0;
            let mut prev_x = path.initial_state as i64;
            for (&t, &s) in path.event_times.iter().zip(&path.states) {
                assert!(t > prev_t);
                assert_eq!(((s as i64) - prev_x).abs(), 1, "steps must be +-1");
                prev_t = t;
                prev_x = s as i64;
            }
        }
    }

    #[test]
    fn long_run_fraction_at_zero_approaches_stationary_atom() {
        // ergodic average of 1{X_t = 0} over a long horizon vs 1 - rho
        let p = q(1.0, 4.0);
        let horizon = 20_000.0;
        let path = simulate_queue_path(&p, 0, horizon, 42);
        let mut at_zero = 0.0;
        let mut t_prev = 0.0;
        let mut x_prev = 0u32;
        for (&t, &s) in path.event_times.iter().zip(&path.states) {
            if x_prev == 0 {
                at_zero += t - t_prev;
            }
            t_prev = t;
            x_prev = s;
        }
        if x_prev == 0 {
            at_zero += horizon - t_prev;
        }
        let frac = at_zero / horizon;
        // regenerative CLT scale ~ sqrt(1/horizon); 3 sigma with margin
        assert!((frac - 0.75).abs() < 0.02, "fraction {frac}");
    }

    #[test]
    fn state_at_reads_piecewise_constant_path() {
        let path = TrajectoryPath {
            event_times: vec![1.0, 2.0, 3.0],
            states: vec![1, 2, 1],
            initial_state: 0,
            horizon: 5.0,
        };
        assert_eq!(path.state_at(0.5), 0);
        assert_eq!(path.state_at(1.0), 1);
        assert_eq!(path.state_at(2.5), 2);
        assert_eq!(path.state_at(4.9), 1);
        assert_eq!(path.first_zero_time(), Some(0.0));
    }

    #[test]
    fn hitting_time_from_zero_is_zero() {
        assert_eq!(sample_hitting_time(&q(1.0, 4.0), 0, 5).unwrap(), 0.0);
    }

    #[test]
    fn hitting_time_mean_matches_formula() {
        // E[tau0(1)] = 1/(mu - lambda) = 1/3 at (1, 4)
        let p = q(1.0, 4.0);
        let n = 100_000u64;
        let vals: Vec<f64> = (0..n)
            .map(|i| sample_hitting_time(&p, 1, derive_seed(42, Stream::Replica, i)).unwrap())
            .collect();
        let (mean, se) = crate::sim::mean_and_se(&vals);
        assert!(
            (mean - 1.0 / 3.0).abs() < 3.0 * se,
            "mean {mean} se {se}"
        );
        // from x0 = 2 the mean doubles
        let vals2: Vec<f64> = (0..n)
            .map(|i| sample_hitting_time(&p, 2, derive_seed(43, Stream::Replica, i)).unwrap())
            .collect();
        let (mean2, se2) = crate::sim::mean_and_se(&vals2);
        assert!((mean2 - 2.0 / 3.0).abs() < 3.0 * se2);
    }

    #[test]
    fn hitting_time_additivity() {
        // tau0 from x0 = 2 is distributed as the sum of two independent
        // tau0-from-1 draws (independent, stationary descent increments);
        // two-sample Kolmogorov-Smirnov at level 0.01 on 1e4 samples
        let p = q(1.0, 4.0);
        let n = 10_000u64;
        let direct: Vec<f64> = (0..n)
            .map(|i| sample_hitting_time(&p, 2, derive_seed(11, Stream::Replica, i)).unwrap())
            .collect();
        let summed: Vec<f64> = (0..n)
            .map(|i| {
                sample_hitting_time(&p, 1, derive_seed(12, Stream::Replica, i)).unwrap()
                    + sample_hitting_time(&p, 1, derive_seed(13, Stream::Replica, i)).unwrap()
            })
            .collect();
        let d = crate::sim::stats::ks_two_sample(&direct, &summed);
        let crit = crate::sim::stats::ks_critical(0.01, n as usize, n as usize);
        assert!(d <= crit, "KS statistic {d} above critical {crit}");
    }

    #[test]
    fn workload_and_queue_share_their_zero_set() {
        let p = q(1.0, 4.0);
        for seed in 0..200 {
            let (queue, work) =
                simulate_workload_path(&p, InitialCondition::Fixed(2), 30.0, seed).unwrap();
            match (queue.first_zero_time(), work.first_zero_time()) {
                (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12, "{a} vs {b}"),
                (None, None) => {}
                other => panic!("zero-hit mismatch: {other:?}"),
            }
            // spot-check the zero sets agree at grid times
            for k in 0..30 {
                let t = k as f64;
                assert_eq!(
                    queue.state_at(t) == 0,
                    work.value_at(t) == 0.0,
                    "seed {seed} t {t}"
                );
            }
        }
    }

    #[test]
    fn workload_stationary_atom_at_large_time() {
        let p = q(1.0, 4.0);
        let n = 20_000;
        let t = 12.0;
        let mut at_zero = 0u32;
        for i in 0..n {
            let (_, work) = simulate_workload_path(
                &p,
                InitialCondition::Stationary { lambda0: 1.0 },
                t + 0.5,
                derive_seed(7, Stream::Replica, i),
            )
            .unwrap();
            if work.value_at(t) == 0.0 {
                at_zero += 1;
            }
        }
        let frac = at_zero as f64 / n as f64;
        let se = (0.75 * 0.25 / n as f64).sqrt();
        assert!((frac - 0.75).abs() < 3.0 * se, "frac {frac}");
    }
}
