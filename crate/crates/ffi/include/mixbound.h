#ifndef MIXBOUND_H
#define MIXBOUND_H

/* Generated by cbindgen from mixbound-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum MixboundStatus {
  MIXBOUND_OK = 0,
  // A rate was nonpositive, NaN or infinite.
  MIXBOUND_INVALID_RATE = 1,
  // A (lambda, mu) pair violates lambda < mu.
  MIXBOUND_UNSTABLE = 2,
  // alpha lies outside the MGF domain.
  MIXBOUND_ALPHA_OUT_OF_DOMAIN = 3,
  // The stationary-mixture MGF series diverges (no finite prefactor).
  MIXBOUND_SERIES_DIVERGES = 4,
  // The operation does not apply to this parameter region.
  MIXBOUND_NOT_APPLICABLE = 5,
  // A non-rate argument was out of range (times, margins, replicas).
  MIXBOUND_BAD_ARGUMENT = 6,
  // A required pointer was null.
  MIXBOUND_NULL_POINTER = 7,
} MixboundStatus;

// Which construction produced the certificate behind a handle.
typedef enum MixboundCase {
  MIXBOUND_CASE1 = 0,
  MIXBOUND_CASE2_BELOW_THRESHOLD = 1,
  MIXBOUND_CASE2_ABOVE_THRESHOLD = 2,
  MIXBOUND_TRUNCATION = 3,
  MIXBOUND_DRIFT = 4,
  MIXBOUND_UNPERTURBED = 5,
} MixboundCase;

// Opaque certificate handle: the best bound for one perturbation,
// including the data needed to evaluate truncation curves.
typedef struct mixbound_bound mixbound_bound;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Computes the best certificate for the perturbation
// `(lambda0, mu0) -> (lambda, mu)` and returns an owned handle through
// `out`. Pass `epsilon_margin <= 0` for the default policy (1% of the
// Case-2 boundary rate). Free with [`mixbound_bound_free`].
// # Safety
//
// `out` must be null or valid for one pointer write; the returned handle
// must be released exactly once with [`mixbound_bound_free`].
enum MixboundStatus mixbound_bound_new(double lambda0,
                                       double mu0,
                                       double lambda,
                                       double mu,
                                       double epsilon_margin,
                                       struct mixbound_bound **out);

// Releases a handle created by [`mixbound_bound_new`]. A null pointer is
// a no-op.
// # Safety
//
// `bound` must be null or an unreleased handle from
// [`mixbound_bound_new`]; it must not be used afterwards.
void mixbound_bound_free(struct mixbound_bound *bound);

// Certified decay rate (per unit of rescaled time).
// # Safety
//
// `bound` must be null or a live handle from [`mixbound_bound_new`].
double mixbound_bound_alpha(const struct mixbound_bound *bound);

// Time-scale factor `b`; the bound decays as `exp(-alpha * b * t)`.
// # Safety
//
// `bound` must be null or a live handle from [`mixbound_bound_new`].
double mixbound_bound_time_scale(const struct mixbound_bound *bound);

// Epsilon backed off from the Case-2 boundary (0 when not applicable).
// # Safety
//
// `bound` must be null or a live handle from [`mixbound_bound_new`].
double mixbound_bound_epsilon_margin(const struct mixbound_bound *bound);

// Construction behind the certificate.
// # Safety
//
// `bound` must be null or a live handle from [`mixbound_bound_new`].
enum MixboundCase mixbound_bound_case(const struct mixbound_bound *bound);

// Exact total variation between the two equilibria (the `t = 0` anchor).
// # Safety
//
// `bound` must be null or a live handle from [`mixbound_bound_new`].
double mixbound_bound_tv_t0(const struct mixbound_bound *bound);

// Gap between the ceiling rate `alpha_star` and the certified rate.
// # Safety
//
// `bound` must be null or a live handle from [`mixbound_bound_new`].
double mixbound_bound_rate_gap(const struct mixbound_bound *bound);

// Constant prefactor `C` of an exponential certificate. Fails with
// `MIXBOUND_NOT_APPLICABLE` for truncation certificates (their bound is a
// curve; use [`mixbound_bound_eval`]) and with `MIXBOUND_SERIES_DIVERGES`
// at the exact threshold `lambda0 = sqrt(lambda mu)` where no finite
// constant exists.
// # Safety
//
// `bound` must be null or a live handle from [`mixbound_bound_new`];
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_bound_prefactor(const struct mixbound_bound *bound, double *out);

// Bound value at original-time `t` (routes truncation certificates
// through the three-term curve automatically).
// # Safety
//
// `bound` must be null or a live handle from [`mixbound_bound_new`];
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_bound_eval(const struct mixbound_bound *bound, double t, double *out);

// `alpha_star = (sqrt(mu) - sqrt(lambda))^2`, the rate ceiling.
// # Safety
//
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_alpha_star(double lambda, double mu, double *out);

// Closed-form `E[exp(alpha tau0)]` from state 1.
// # Safety
//
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_mgf_tau0_from_1(double lambda, double mu, double alpha, double *out);

// Closed-form hitting-time MGF from a stationary start with mixture rate
// `lambda_m`.
// # Safety
//
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_mgf_tau0_stationary(double lambda_m,
                                                 double lambda,
                                                 double mu,
                                                 double alpha,
                                                 double *out);

// Mean hitting time `1 / (mu - lambda)` from state 1.
// # Safety
//
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_mean_tau0_from_1(double lambda, double mu, double *out);

// Stationary queue-length pmf `(1 - rho) rho^x`.
// # Safety
//
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_stationary_pmf(double lambda, double mu, uint32_t x, double *out);

// Exact total variation between two stationary laws.
// # Safety
//
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_tv_between_stationaries(double lambda0,
                                                     double mu0,
                                                     double lambda1,
                                                     double mu1,
                                                     double *out);

// Three-term truncation bound at time `t` (regime
// `lambda0 > sqrt(lambda mu)`).
// # Safety
//
// `out` must be null or valid for one write.
enum MixboundStatus mixbound_truncation_bound_at(double lambda0,
                                                 double lambda,
                                                 double mu,
                                                 double t,
                                                 double *out);

// Monte Carlo plug-in TV at one time point: `replicas` seeded copies
// start in the `(lambda0, mu0)` equilibrium and run under `(lambda, mu)`.
// Deterministic in `seed`. Writes the estimate and its bootstrap standard
// error.
// # Safety
//
// `out_estimate` and `out_std_error` must each be null or valid for one
// write.
enum MixboundStatus mixbound_estimate_tv(double lambda0,
                                         double mu0,
                                         double lambda,
                                         double mu,
                                         double t,
                                         uint64_t replicas,
                                         uint64_t seed,
                                         double *out_estimate,
                                         double *out_std_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MIXBOUND_H */
