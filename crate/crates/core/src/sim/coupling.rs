//! Ordered coupling of the perturbed and equilibrium copies.
//!
//! Both copies evolve under the operating kernel and share one marked
//! potential-event stream at rate `lambda + mu`: an arrival mark increments
//! every copy, a departure mark decrements every positive copy and is
//! ignored at 0 (uniformization, so each marginal is an exact M/M/1).
//! Initial states come from one shared uniform through the two inverse
//! CDFs, which orders them pathwise; the copy started from the larger
//! arrival rate `lambda_m = max(lambda0, lambda)` dominates the other at
//! every instant and is the bounding process: once it hits 0 both copies
//! sit at 0 and have merged.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::model::QueueParams;
use crate::sim::path::TrajectoryPath;
use crate::Result;

/// Coupled paths over a shared event structure.
///
/// `path_bound` is the `lambda_m`-initialized copy; for an arrival-rate
/// perturbation it coincides with `path_hi` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledTriple {
    pub path_lo: TrajectoryPath,
    pub path_hi: TrajectoryPath,
    pub path_bound: TrajectoryPath,
    /// First time all copies coincide (they stay merged afterwards);
    /// `None` if they have not merged within the horizon.
    pub coupling_time: Option<f64>,
}

impl CoupledTriple {
    /// Dominance of the bounding copy over both coupled copies, checked at
    /// every transition time of either path.
    pub fn dominance_holds(&self) -> bool {
        let mut ok = self.path_bound.initial_state >= self.path_lo.initial_state
            && self.path_bound.initial_state >= self.path_hi.initial_state;
        for t in self
            .path_lo
            .event_times
            .iter()
            .chain(&self.path_hi.event_times)
        {
            ok &= self.path_bound.state_at(*t) >= self.path_lo.state_at(*t)
                && self.path_bound.state_at(*t) >= self.path_hi.state_at(*t);
        }
        ok
    }

    /// The merge happens no later than the bounding copy's first visit
    /// to 0 (vacuously true when neither event falls inside the horizon).
    pub fn coupled_by_bound_zero_hit(&self) -> bool {
        match (self.coupling_time, self.path_bound.first_zero_time()) {
            (Some(tc), Some(tz)) => tc <= tz,
            (None, Some(_)) => false,
            (_, None) => true,
        }
    }
}

/// Runs the shared-stream coupling of `X(lambda0, lambda)` and
/// `X(lambda, lambda)` up to `horizon`. Requires `lambda0 != lambda`
/// (otherwise the triple degenerates to a single path).
pub fn simulate_coupled(
    lambda0: f64,
    params: &QueueParams,
    horizon: f64,
    seed: u64,
) -> Result<CoupledTriple> {
    let (l, m) = (params.lambda(), params.mu());
    let initial = QueueParams::new_named(lambda0, m, "initial")?;
    if lambda0 == l {
        return Err(Error::NotApplicable {
            op: "simulate_coupled",
            requirement: "lambda0 != lambda (equal rates degenerate to one path)",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // One uniform drives both inverse-CDF draws; geometric CDFs are
    // pointwise ordered in rho, so the draws are ordered.
    let u = rng.random::<f64>();
    let x_initial_law = initial.sample_stationary(u);
    let x_operating_law = params.sample_stationary(u);
    let (mut x_lo, mut x_hi) = (
        x_initial_law.min(x_operating_law),
        x_initial_law.max(x_operating_law),
    );
    debug_assert!(if lambda0 > l {
        x_hi == x_initial_law
    } else {
        x_hi == x_operating_law
    });

    let mut lo = PathBuilder::new(x_lo, horizon);
    let mut hi = PathBuilder::new(x_hi, horizon);
    let mut coupling_time = (x_lo == x_hi).then_some(0.0);

    let total = l + m;
    let mut t = 0.0;
    loop {
        t += -(1.0 - rng.random::<f64>()).ln() / total;
        if t > horizon {
            break;
        }
        let arrival = rng.random::<f64>() < l / total;
        if arrival {
            x_lo += 1;
            x_hi += 1;
            lo.push(t, x_lo);
            hi.push(t, x_hi);
        } else {
            // departure mark: decrements any positive copy, ignored at 0
            if x_lo > 0 {
                x_lo -= 1;
                lo.push(t, x_lo);
            }
            if x_hi > 0 {
                x_hi -= 1;
                hi.push(t, x_hi);
            }
        }
        if coupling_time.is_none() && x_lo == x_hi {
            coupling_time = Some(t);
        }
    }

    let path_lo = lo.finish();
    let path_hi = hi.finish();
    let path_bound = path_hi.clone();
    Ok(CoupledTriple {
        path_lo,
        path_hi,
        path_bound,
        coupling_time,
    })
}

struct PathBuilder {
    event_times: Vec<f64>,
    states: Vec<u32>,
    initial_state: u32,
    horizon: f64,
}

impl PathBuilder {
    fn new(x0: u32, horizon: f64) -> Self {
        PathBuilder {
            event_times: Vec::new(),
            states: Vec::new(),
            initial_state: x0,
            horizon,
        }
    }

    fn push(&mut self, t: f64, x: u32) {
        self.event_times.push(t);
        self.states.push(x);
    }

    fn finish(self) -> TrajectoryPath {
        TrajectoryPath {
            event_times: self.event_times,
            states: self.states,
            initial_state: self.initial_state,
            horizon: self.horizon,
        }
    }
}
