//! Parameter validation and stationary laws of the M/M/1 queue.
//!
//! The queue-length process with arrival rate `lambda` and service rate `mu`
//! (with `lambda < mu`) has the geometric stationary law
//! `pi(x) = (1 - rho) rho^x`, `rho = lambda / mu`. The workload process
//! shares its zero-set with the queue length, so its stationary atom at 0 is
//! `1 - rho`.

use crate::error::Error;
use crate::Result;

/// Tail cutoff for the exact TV summation between two stationary laws.
const TV_TAIL_TOL: f64 = 1e-12;

/// Arrival and service rates of a stable M/M/1 queue.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QueueParams {
    lambda: f64,
    mu: f64,
}

impl QueueParams {
    /// Validates `lambda > 0`, `mu > 0`, `lambda < mu` (stability).
    ///
    /// `role` names the parameter pair in error messages (`"operating"`,
    /// `"initial"`).
    pub fn new_named(lambda: f64, mu: f64, role: &'static str) -> Result<Self> {
        let lname: &'static str = if role == "initial" { "lambda0" } else { "lambda" };
        let mname: &'static str = if role == "initial" { "mu0" } else { "mu" };
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidRate {
                name: lname,
                value: lambda,
            });
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidRate {
                name: mname,
                value: mu,
            });
        }
        if lambda >= mu {
            return Err(Error::Unstable { role, lambda, mu });
        }
        Ok(Self { lambda, mu })
    }

    /// Validates an operating parameter pair.
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        Self::new_named(lambda, mu, "operating")
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Traffic intensity `rho = lambda / mu`, in (0, 1) by construction.
    pub fn rho(&self) -> f64 {
        self.lambda / self.mu
    }

    /// Stationary queue-length pmf `(1 - rho) rho^x`.
    pub fn stationary_pmf(&self, x: u32) -> f64 {
        let rho = self.rho();
        (1.0 - rho) * rho.powi(x as i32)
    }

    /// Stationary cumulative mass `P(X <= x) = 1 - rho^(x+1)`.
    pub fn stationary_cdf(&self, x: u32) -> f64 {
        1.0 - self.rho().powi(x as i32 + 1)
    }

    /// Mass of the stationary workload distribution at 0. Equals the
    /// queue-length stationary pmf at 0 because the workload is zero
    /// exactly when the queue is empty.
    pub fn stationary_workload_atom(&self) -> f64 {
        self.stationary_pmf(0)
    }

    /// Inverse-CDF draw from the stationary law: the smallest `x` with
    /// cumulative mass `> u`.
    ///
    /// Monotone nondecreasing in `u`, and (for fixed `u`) nondecreasing in
    /// `lambda`; common-`u` draws across parameter settings are therefore
    /// stochastically ordered, which the coupled simulator relies on.
    pub fn sample_stationary(&self, u: f64) -> u32 {
        debug_assert!((0.0..1.0).contains(&u));
        let mut x = 0u32;
        while self.stationary_cdf(x) <= u {
            x += 1;
        }
        x
    }
}

/// Exact total variation distance between the stationary laws of `p0` and
/// `p1`: half the L1 distance of the two geometric pmfs, summed until the
/// remaining tail mass is below `1e-12`.
pub fn tv_between_stationaries(p0: &QueueParams, p1: &QueueParams) -> f64 {
    let (r0, r1) = (p0.rho(), p1.rho());
    let mut sum = 0.0;
    let mut x = 0i32;
    // After summing x = 0..n-1, the remaining |difference| mass is at most
    // r0^n + r1^n.
    while 0.5 * (r0.powi(x) + r1.powi(x)) > TV_TAIL_TOL {
        let d = (1.0 - r0) * r0.powi(x) - (1.0 - r1) * r1.powi(x);
        sum += d.abs();
        x += 1;
    }
    0.5 * sum
}

/// A perturbation scenario: the process starts in the equilibrium of
/// `initial` and evolves under `operating`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct PerturbationSpec {
    initial: QueueParams,
    operating: QueueParams,
}

impl PerturbationSpec {
    /// Validates all four rates. The identity perturbation is allowed and
    /// reported by [`PerturbationSpec::is_perturbed`].
    pub fn new(lambda0: f64, mu0: f64, lambda: f64, mu: f64) -> Result<Self> {
        let initial = QueueParams::new_named(lambda0, mu0, "initial")?;
        let operating = QueueParams::new_named(lambda, mu, "operating")?;
        Ok(Self { initial, operating })
    }

    pub fn initial(&self) -> QueueParams {
        self.initial
    }

    pub fn operating(&self) -> QueueParams {
        self.operating
    }

    /// True when the parameter setting actually changes at t = 0.
    /// When false the process is in equilibrium for all time.
    pub fn is_perturbed(&self) -> bool {
        self.initial != self.operating
    }
}

/// Validates a perturbation scenario from its four rates.
pub fn validate_spec(lambda0: f64, mu0: f64, lambda: f64, mu: f64) -> Result<PerturbationSpec> {
    PerturbationSpec::new(lambda0, mu0, lambda, mu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Tail-mass cutoff for truncating geometric sums, far below every
    /// acceptance tolerance.
    const GEOM_TAIL_TOL: f64 = 1e-14;

    fn q(lambda: f64, mu: f64) -> QueueParams {
        QueueParams::new(lambda, mu).unwrap()
    }

    #[test]
    fn validate_spec_accepts_perturbed() {
        let spec = validate_spec(0.5, 4.0, 1.0, 4.0).unwrap();
        assert!(spec.is_perturbed());
    }

    #[test]
    fn validate_spec_rejects_operating_instability() {
        let err = validate_spec(1.0, 4.0, 4.0, 4.0).unwrap_err();
        assert!(matches!(err, Error::Unstable { role: "operating", .. }));
    }

    #[test]
    fn validate_spec_rejects_initial_instability() {
        let err = validate_spec(5.0, 4.0, 1.0, 4.0).unwrap_err();
        assert!(matches!(err, Error::Unstable { role: "initial", .. }));
    }

    #[test]
    fn validate_spec_flags_identity_as_unperturbed() {
        let spec = validate_spec(1.0, 4.0, 1.0, 4.0).unwrap();
        assert!(!spec.is_perturbed());
    }

    #[test]
    fn validate_spec_names_offending_rate() {
        let err = validate_spec(-1.0, 4.0, 1.0, 4.0).unwrap_err();
        assert_eq!(
            err,
            Error::InvalidRate {
                name: "lambda0",
                value: -1.0
            }
        );
        let err = validate_spec(1.0, 4.0, 1.0, f64::NAN).unwrap_err();
        assert!(matches!(err, Error::InvalidRate { name: "mu", .. }));
    }

    #[test]
    fn stationary_pmf_values() {
        let p = q(1.0, 4.0);
        assert_eq!(p.stationary_pmf(0), 0.75);
        assert_eq!(p.stationary_pmf(1), 0.1875);
    }

    #[test]
    fn stationary_pmf_partial_sums_are_geometric() {
        // sum over x = 0..=N equals 1 - rho^(N+1)
        let p = q(1.0, 4.0);
        for n in [0u32, 1, 5, 20] {
            let direct: f64 = (0..=n).map(|x| p.stationary_pmf(x)).sum();
            let closed = 1.0 - p.rho().powi(n as i32 + 1);
            assert!((direct - closed).abs() < 1e-14);
        }
    }

    #[test]
    fn stationary_pmf_sums_to_one_at_tail_cutoff() {
        for (l, m) in [(1.0, 4.0), (0.5, 2.0), (3.9, 4.0)] {
            let p = q(l, m);
            let mut total = 0.0;
            let mut x = 0u32;
            while p.rho().powi(x as i32) >= GEOM_TAIL_TOL {
                total += p.stationary_pmf(x);
                x += 1;
            }
            assert!((total - 1.0).abs() < 1e-12, "({l},{m}) sum {total}");
        }
    }

    #[test]
    fn workload_atom_equals_pmf_at_zero() {
        for (l, m) in [(1.0, 4.0), (0.5, 2.0), (3.0, 4.0)] {
            let p = q(l, m);
            assert_eq!(p.stationary_workload_atom(), p.stationary_pmf(0));
        }
        assert_eq!(q(1.0, 4.0).stationary_workload_atom(), 0.75);
        assert_eq!(q(0.5, 2.0).stationary_workload_atom(), 0.75);
    }

    #[test]
    fn sample_stationary_examples() {
        let p = q(1.0, 4.0);
        assert_eq!(p.sample_stationary(0.5), 0); // u < CDF(0) = 0.75
        assert_eq!(p.sample_stationary(0.9), 1); // 0.75 <= u < 0.9375
        assert_eq!(p.sample_stationary(0.0), 0);
    }

    #[test]
    fn sample_stationary_partition_matches_pmf() {
        // Deterministic partition check: on a fine u-grid, the frequency of
        // each output equals the pmf up to the grid resolution.
        let p = q(1.0, 4.0);
        let n = 200_000usize;
        let mut counts = std::collections::HashMap::new();
        for i in 0..n {
            let u = (i as f64 + 0.5) / n as f64;
            *counts.entry(p.sample_stationary(u)).or_insert(0usize) += 1;
        }
        for x in 0..10u32 {
            let freq = *counts.get(&x).unwrap_or(&0) as f64 / n as f64;
            // Grid quantization error is at most 1/n per interval endpoint.
            assert!(
                (freq - p.stationary_pmf(x)).abs() <= 2.0 / n as f64,
                "x={x} freq={freq}"
            );
        }
    }

    #[test]
    fn tv_is_zero_on_equal_laws_and_matches_crossing_formula() {
        let p0 = q(0.5, 4.0);
        let p1 = q(1.0, 4.0);
        assert_eq!(tv_between_stationaries(&p0, &p0), 0.0);

        // Independent route: for single-crossing geometric pmfs the TV equals
        // the largest CDF gap max_x |rho1^(x+1) - rho0^(x+1)|.
        let (r0, r1) = (p0.rho(), p1.rho());
        let mut cross: f64 = 0.0;
        for x in 1..200i32 {
            cross = cross.max((r1.powi(x) - r0.powi(x)).abs());
        }
        let tv = tv_between_stationaries(&p0, &p1);
        assert!((tv - cross).abs() < 1e-11, "tv={tv} cross={cross}");
        assert!((tv - 0.125).abs() < 1e-11);
        assert!(tv > 0.0 && tv <= 1.0);
        // Must sit below the Case 1 prefactor at t = 0.
        assert!(tv <= 1.5);
    }

    proptest! {
        #[test]
        fn tv_symmetric_and_bounded(
            l0 in 0.05f64..3.9, l1 in 0.05f64..3.9
        ) {
            let p0 = q(l0, 4.0);
            let p1 = q(l1, 4.0);
            let a = tv_between_stationaries(&p0, &p1);
            let b = tv_between_stationaries(&p1, &p0);
            prop_assert!((a - b).abs() < 1e-14);
            prop_assert!((0.0..=1.0).contains(&a));
            if (l0 - l1).abs() > 1e-9 {
                prop_assert!(a > 0.0);
            }
        }

        #[test]
        fn sample_stationary_monotone_in_u_and_lambda(
            lambda in 0.1f64..3.9,
            u1 in 0.0f64..1.0,
            u2 in 0.0f64..1.0
        ) {
            let p = q(lambda, 4.0);
            let (lo, hi) = if u1 <= u2 { (u1, u2) } else { (u2, u1) };
            prop_assert!(p.sample_stationary(lo) <= p.sample_stationary(hi));

            // Pointwise CDF ordering in lambda transfers to the draws.
            let bigger = q((lambda + 0.05).min(3.95), 4.0);
            prop_assert!(p.sample_stationary(u1) <= bigger.sample_stationary(u1));
        }
    }
}
