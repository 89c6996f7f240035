//! C ABI for the convergence-bound library.
//!
//! Other languages bind against three kinds of symbols:
//!
//! - pure functions over doubles (MGFs, stationary pmf, exact TV,
//!   truncation bound) returning a [`MixboundStatus`] and writing results
//!   through out-pointers;
//! - an opaque certificate handle created by [`mixbound_bound_new`],
//!   queried by accessors, evaluated by [`mixbound_bound_eval`], and
//!   released by [`mixbound_bound_free`];
//! - one Monte Carlo entry point, [`mixbound_estimate_tv`], for verifying
//!   a bound empirically from a foreign runtime.
//!
//! Every function is safe to call from multiple threads at once; handles
//! are immutable after construction. The header `include/mixbound.h` is
//! generated by cbindgen at build time.

use mixbound::bounds::{self, CertificateBundle};
use mixbound::model::{tv_between_stationaries, PerturbationSpec, QueueParams};
use mixbound::{mgf, sim, Error};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixboundStatus {
    MixboundOk = 0,
    /// A rate was nonpositive, NaN or infinite.
    MixboundInvalidRate = 1,
    /// A (lambda, mu) pair violates lambda < mu.
    MixboundUnstable = 2,
    /// alpha lies outside the MGF domain.
    MixboundAlphaOutOfDomain = 3,
    /// The stationary-mixture MGF series diverges (no finite prefactor).
    MixboundSeriesDiverges = 4,
    /// The operation does not apply to this parameter region.
    MixboundNotApplicable = 5,
    /// A non-rate argument was out of range (times, margins, replicas).
    MixboundBadArgument = 6,
    /// A required pointer was null.
    MixboundNullPointer = 7,
}

/// Which construction produced the certificate behind a handle.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixboundCase {
    MixboundCase1 = 0,
    MixboundCase2BelowThreshold = 1,
    MixboundCase2AboveThreshold = 2,
    MixboundTruncation = 3,
    MixboundDrift = 4,
    MixboundUnperturbed = 5,
}

impl From<bounds::CaseLabel> for MixboundCase {
    fn from(label: bounds::CaseLabel) -> Self {
        match label {
            bounds::CaseLabel::Case1 => MixboundCase::MixboundCase1,
            bounds::CaseLabel::Case2BelowThreshold => MixboundCase::MixboundCase2BelowThreshold,
            bounds::CaseLabel::Case2AboveThreshold => MixboundCase::MixboundCase2AboveThreshold,
            bounds::CaseLabel::Truncation => MixboundCase::MixboundTruncation,
            bounds::CaseLabel::Drift => MixboundCase::MixboundDrift,
            bounds::CaseLabel::Unperturbed => MixboundCase::MixboundUnperturbed,
        }
    }
}

fn status_of(err: &Error) -> MixboundStatus {
    match err {
        Error::InvalidRate { .. } => MixboundStatus::MixboundInvalidRate,
        Error::Unstable { .. } => MixboundStatus::MixboundUnstable,
        Error::AlphaOutOfDomain { .. } | Error::AlphaNearBoundary { .. } => {
            MixboundStatus::MixboundAlphaOutOfDomain
        }
        Error::SeriesDiverges { .. } => MixboundStatus::MixboundSeriesDiverges,
        Error::NotApplicable { .. } => MixboundStatus::MixboundNotApplicable,
        _ => MixboundStatus::MixboundBadArgument,
    }
}

/// Opaque certificate handle: the best bound for one perturbation,
/// including the data needed to evaluate truncation curves.
pub struct MixboundBound {
    bundle: CertificateBundle,
}

macro_rules! try_ffi {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return status_of(&e),
        }
    };
}

unsafe fn write_out<T>(ptr: *mut T, value: T) -> MixboundStatus {
    if ptr.is_null() {
        return MixboundStatus::MixboundNullPointer;
    }
    unsafe { ptr.write(value) };
    MixboundStatus::MixboundOk
}

/// Computes the best certificate for the perturbation
/// `(lambda0, mu0) -> (lambda, mu)` and returns an owned handle through
/// `out`. Pass `epsilon_margin <= 0` for the default policy (1% of the
/// Case-2 boundary rate). Free with [`mixbound_bound_free`].
/// # Safety
///
/// `out` must be null or valid for one pointer write; the returned handle
/// must be released exactly once with [`mixbound_bound_free`].
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_new(
    lambda0: f64,
    mu0: f64,
    lambda: f64,
    mu: f64,
    epsilon_margin: f64,
    out: *mut *mut MixboundBound,
) -> MixboundStatus {
    if out.is_null() {
        return MixboundStatus::MixboundNullPointer;
    }
    let spec = try_ffi!(PerturbationSpec::new(lambda0, mu0, lambda, mu));
    let margin = (epsilon_margin > 0.0).then_some(epsilon_margin);
    let bundle = try_ffi!(bounds::certificates_for_spec(&spec, margin));
    let handle = Box::new(MixboundBound { bundle });
    unsafe { write_out(out, Box::into_raw(handle)) }
}

/// Releases a handle created by [`mixbound_bound_new`]. A null pointer is
/// a no-op.
/// # Safety
///
/// `bound` must be null or an unreleased handle from
/// [`mixbound_bound_new`]; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_free(bound: *mut MixboundBound) {
    if !bound.is_null() {
        drop(unsafe { Box::from_raw(bound) });
    }
}

unsafe fn deref<'a>(bound: *const MixboundBound) -> Option<&'a MixboundBound> {
    unsafe { bound.as_ref() }
}

/// Certified decay rate (per unit of rescaled time).
/// # Safety
///
/// `bound` must be null or a live handle from [`mixbound_bound_new`].
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_alpha(bound: *const MixboundBound) -> f64 {
    unsafe { deref(bound) }.map_or(f64::NAN, |b| b.bundle.best.alpha)
}

/// Time-scale factor `b`; the bound decays as `exp(-alpha * b * t)`.
/// # Safety
///
/// `bound` must be null or a live handle from [`mixbound_bound_new`].
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_time_scale(bound: *const MixboundBound) -> f64 {
    unsafe { deref(bound) }.map_or(f64::NAN, |b| b.bundle.best.time_scale_b)
}

/// Epsilon backed off from the Case-2 boundary (0 when not applicable).
/// # Safety
///
/// `bound` must be null or a live handle from [`mixbound_bound_new`].
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_epsilon_margin(bound: *const MixboundBound) -> f64 {
    unsafe { deref(bound) }.map_or(f64::NAN, |b| b.bundle.best.epsilon_margin)
}

/// Construction behind the certificate.
/// # Safety
///
/// `bound` must be null or a live handle from [`mixbound_bound_new`].
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_case(bound: *const MixboundBound) -> MixboundCase {
    unsafe { deref(bound) }
        .map_or(MixboundCase::MixboundCase1, |b| b.bundle.best.case_label.into())
}

/// Exact total variation between the two equilibria (the `t = 0` anchor).
/// # Safety
///
/// `bound` must be null or a live handle from [`mixbound_bound_new`].
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_tv_t0(bound: *const MixboundBound) -> f64 {
    unsafe { deref(bound) }.map_or(f64::NAN, |b| b.bundle.tv_t0)
}

/// Gap between the ceiling rate `alpha_star` and the certified rate.
/// # Safety
///
/// `bound` must be null or a live handle from [`mixbound_bound_new`].
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_rate_gap(bound: *const MixboundBound) -> f64 {
    unsafe { deref(bound) }.map_or(f64::NAN, |b| b.bundle.rate_gap)
}

/// Constant prefactor `C` of an exponential certificate. Fails with
/// `MIXBOUND_NOT_APPLICABLE` for truncation certificates (their bound is a
/// curve; use [`mixbound_bound_eval`]) and with `MIXBOUND_SERIES_DIVERGES`
/// at the exact threshold `lambda0 = sqrt(lambda mu)` where no finite
/// constant exists.
/// # Safety
///
/// `bound` must be null or a live handle from [`mixbound_bound_new`];
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_prefactor(
    bound: *const MixboundBound,
    out: *mut f64,
) -> MixboundStatus {
    let Some(b) = (unsafe { deref(bound) }) else {
        return MixboundStatus::MixboundNullPointer;
    };
    match (b.bundle.best.prefactor, b.bundle.best.case_label) {
        (Some(c), _) => unsafe { write_out(out, c) },
        (None, bounds::CaseLabel::Truncation) => MixboundStatus::MixboundNotApplicable,
        (None, _) => MixboundStatus::MixboundSeriesDiverges,
    }
}

/// Bound value at original-time `t` (routes truncation certificates
/// through the three-term curve automatically).
/// # Safety
///
/// `bound` must be null or a live handle from [`mixbound_bound_new`];
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_bound_eval(
    bound: *const MixboundBound,
    t: f64,
    out: *mut f64,
) -> MixboundStatus {
    let Some(b) = (unsafe { deref(bound) }) else {
        return MixboundStatus::MixboundNullPointer;
    };
    if t.is_nan() || t < 0.0 {
        return MixboundStatus::MixboundBadArgument;
    }
    unsafe { write_out(out, b.bundle.best.bound_at(t)) }
}

/// `alpha_star = (sqrt(mu) - sqrt(lambda))^2`, the rate ceiling.
/// # Safety
///
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_alpha_star(
    lambda: f64,
    mu: f64,
    out: *mut f64,
) -> MixboundStatus {
    let p = try_ffi!(QueueParams::new(lambda, mu));
    unsafe { write_out(out, bounds::alpha_star(&p)) }
}

/// Closed-form `E[exp(alpha tau0)]` from state 1.
/// # Safety
///
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_mgf_tau0_from_1(
    lambda: f64,
    mu: f64,
    alpha: f64,
    out: *mut f64,
) -> MixboundStatus {
    let p = try_ffi!(QueueParams::new(lambda, mu));
    let g = try_ffi!(mgf::mgf_tau0_from_1(&p, alpha));
    unsafe { write_out(out, g) }
}

/// Closed-form hitting-time MGF from a stationary start with mixture rate
/// `lambda_m`.
/// # Safety
///
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_mgf_tau0_stationary(
    lambda_m: f64,
    lambda: f64,
    mu: f64,
    alpha: f64,
    out: *mut f64,
) -> MixboundStatus {
    let p = try_ffi!(QueueParams::new(lambda, mu));
    let g = try_ffi!(mgf::mgf_tau0_stationary(lambda_m, &p, alpha));
    unsafe { write_out(out, g) }
}

/// Mean hitting time `1 / (mu - lambda)` from state 1.
/// # Safety
///
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_mean_tau0_from_1(
    lambda: f64,
    mu: f64,
    out: *mut f64,
) -> MixboundStatus {
    let p = try_ffi!(QueueParams::new(lambda, mu));
    unsafe { write_out(out, mgf::mean_tau0_from_1(&p)) }
}

/// Stationary queue-length pmf `(1 - rho) rho^x`.
/// # Safety
///
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_stationary_pmf(
    lambda: f64,
    mu: f64,
    x: u32,
    out: *mut f64,
) -> MixboundStatus {
    let p = try_ffi!(QueueParams::new(lambda, mu));
    unsafe { write_out(out, p.stationary_pmf(x)) }
}

/// Exact total variation between two stationary laws.
/// # Safety
///
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_tv_between_stationaries(
    lambda0: f64,
    mu0: f64,
    lambda1: f64,
    mu1: f64,
    out: *mut f64,
) -> MixboundStatus {
    let p0 = try_ffi!(QueueParams::new(lambda0, mu0));
    let p1 = try_ffi!(QueueParams::new(lambda1, mu1));
    unsafe { write_out(out, tv_between_stationaries(&p0, &p1)) }
}

/// Three-term truncation bound at time `t` (regime
/// `lambda0 > sqrt(lambda mu)`).
/// # Safety
///
/// `out` must be null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_truncation_bound_at(
    lambda0: f64,
    lambda: f64,
    mu: f64,
    t: f64,
    out: *mut f64,
) -> MixboundStatus {
    let p = try_ffi!(QueueParams::new(lambda, mu));
    let v = try_ffi!(bounds::truncation_bound_at(lambda0, &p, t));
    unsafe { write_out(out, v) }
}

/// Monte Carlo plug-in TV at one time point: `replicas` seeded copies
/// start in the `(lambda0, mu0)` equilibrium and run under `(lambda, mu)`.
/// Deterministic in `seed`. Writes the estimate and its bootstrap standard
/// error.
/// # Safety
///
/// `out_estimate` and `out_std_error` must each be null or valid for one
/// write.
#[no_mangle]
pub unsafe extern "C" fn mixbound_estimate_tv(
    lambda0: f64,
    mu0: f64,
    lambda: f64,
    mu: f64,
    t: f64,
    replicas: u64,
    seed: u64,
    out_estimate: *mut f64,
    out_std_error: *mut f64,
) -> MixboundStatus {
    let spec = try_ffi!(PerturbationSpec::new(lambda0, mu0, lambda, mu));
    if t.is_nan() || t < 0.0 {
        return MixboundStatus::MixboundBadArgument;
    }
    let lambda0_eff = spec.operating().mu() * spec.initial().rho();
    let points = try_ffi!(sim::estimate_tv_curve(
        lambda0_eff,
        &spec.operating(),
        &[t],
        replicas,
        seed,
    ));
    let status = unsafe { write_out(out_estimate, points[0].estimate.estimate) };
    if status != MixboundStatus::MixboundOk {
        return status;
    }
    unsafe { write_out(out_std_error, points[0].estimate.std_error) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_handle_lifecycle() {
        let mut handle: *mut MixboundBound = std::ptr::null_mut();
        let status = unsafe { mixbound_bound_new(0.5, 4.0, 1.0, 4.0, -1.0, &mut handle) };
        assert_eq!(status, MixboundStatus::MixboundOk);
        assert!(!handle.is_null());
        unsafe {
            assert!((mixbound_bound_alpha(handle) - 1.0).abs() < 1e-12);
            assert_eq!(mixbound_bound_case(handle), MixboundCase::MixboundCase1);
            let mut c = 0.0;
            assert_eq!(
                mixbound_bound_prefactor(handle, &mut c),
                MixboundStatus::MixboundOk
            );
            assert!((c - 1.5).abs() < 1e-12);
            let mut v = 0.0;
            assert_eq!(mixbound_bound_eval(handle, 1.0, &mut v), MixboundStatus::MixboundOk);
            assert!((v - 1.5 * (-1.0f64).exp()).abs() < 1e-12);
            mixbound_bound_free(handle);
        }
    }

    #[test]
    fn status_codes_surface_validation_errors() {
        let mut handle: *mut MixboundBound = std::ptr::null_mut();
        let status = unsafe { mixbound_bound_new(1.0, 4.0, 4.0, 4.0, -1.0, &mut handle) };
        assert_eq!(status, MixboundStatus::MixboundUnstable);
        let status = unsafe { mixbound_bound_new(-1.0, 4.0, 1.0, 4.0, -1.0, &mut handle) };
        assert_eq!(status, MixboundStatus::MixboundInvalidRate);
        let mut g = 0.0;
        let status = unsafe { mixbound_mgf_tau0_from_1(1.0, 4.0, 1.5, &mut g) };
        assert_eq!(status, MixboundStatus::MixboundAlphaOutOfDomain);
        let status = unsafe { mixbound_mgf_tau0_stationary(3.0, 1.0, 4.0, 0.7, &mut g) };
        assert_eq!(status, MixboundStatus::MixboundSeriesDiverges);
        let status = unsafe { mixbound_mgf_tau0_from_1(1.0, 4.0, 0.5, std::ptr::null_mut()) };
        assert_eq!(status, MixboundStatus::MixboundNullPointer);
    }

    #[test]
    fn pure_functions_match_the_core_crate() {
        unsafe {
            let mut v = 0.0;
            assert_eq!(
                mixbound_mgf_tau0_from_1(1.0, 4.0, 0.5, &mut v),
                MixboundStatus::MixboundOk
            );
            assert!((v - 1.219_223_593_595_584_9).abs() < 1e-12);
            assert_eq!(
                mixbound_stationary_pmf(1.0, 4.0, 1, &mut v),
                MixboundStatus::MixboundOk
            );
            assert_eq!(v, 0.1875);
            assert_eq!(
                mixbound_tv_between_stationaries(0.5, 4.0, 1.0, 4.0, &mut v),
                MixboundStatus::MixboundOk
            );
            assert!((v - 0.125).abs() < 1e-11);
            assert_eq!(
                mixbound_truncation_bound_at(3.0, 1.0, 4.0, 0.0, &mut v),
                MixboundStatus::MixboundOk
            );
            assert!((v - 1.25).abs() < 1e-12);
            assert_eq!(
                mixbound_alpha_star(1.0, 4.0, &mut v),
                MixboundStatus::MixboundOk
            );
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn truncation_handle_reports_curve_semantics() {
        // pick a spec where truncation wins is impossible on this grid; use
        // the explicit truncation evaluation instead: a case-2 handle above
        // the threshold still evaluates and carries a finite prefactor
        let mut handle: *mut MixboundBound = std::ptr::null_mut();
        let status = unsafe { mixbound_bound_new(3.0, 4.0, 1.0, 4.0, -1.0, &mut handle) };
        assert_eq!(status, MixboundStatus::MixboundOk);
        unsafe {
            assert_eq!(
                mixbound_bound_case(handle),
                MixboundCase::MixboundCase2AboveThreshold
            );
            assert!(mixbound_bound_rate_gap(handle) > 0.0);
            mixbound_bound_free(handle);
        }
    }

    #[test]
    fn monte_carlo_entry_is_deterministic() {
        let mut e1 = 0.0;
        let mut s1 = 0.0;
        let mut e2 = 0.0;
        let mut s2 = 0.0;
        unsafe {
            assert_eq!(
                mixbound_estimate_tv(0.5, 4.0, 1.0, 4.0, 1.0, 20_000, 42, &mut e1, &mut s1),
                MixboundStatus::MixboundOk
            );
            assert_eq!(
                mixbound_estimate_tv(0.5, 4.0, 1.0, 4.0, 1.0, 20_000, 42, &mut e2, &mut s2),
                MixboundStatus::MixboundOk
            );
        }
        assert_eq!(e1, e2);
        assert_eq!(s1, s2);
        assert!(e1 > 0.0 && e1 < 1.0);
    }
}
