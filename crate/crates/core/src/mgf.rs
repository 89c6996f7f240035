//! Closed-form moment generating functions of hitting times to zero.
//!
//! For the stable M/M/1 queue-length process, let `tau0(x)` be the first
//! passage time to 0 from state `x`, and `G(alpha) = E[exp(alpha tau0(1))]`.
//! `G` is finite exactly for `alpha <= alpha_max = (sqrt(mu) - sqrt(lambda))^2`
//! and solves the quadratic
//!
//! ```text
//! lambda G^2 - (lambda + mu - alpha) G + mu = 0
//! ```
//!
//! with the root pinned by `G(0) = 1`. Hitting times from `x` decompose into
//! `x` i.i.d. single-step descents, so `E[exp(alpha tau0(x))] = G^x`, and a
//! geometric initial mixture with ratio `lambda_m / mu` sums to
//! `(1 - lambda_m/mu) / (1 - (lambda_m/mu) G)` while the series converges.

use crate::error::Error;
use crate::model::QueueParams;
use crate::Result;

/// Admissible-`alpha` summary for the hitting-time MGFs of one parameter
/// setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfDomain {
    /// Right endpoint `(sqrt(mu) - sqrt(lambda))^2` of the single-step MGF
    /// domain (inclusive).
    pub alpha_max: f64,
    /// Supremum of `alpha` for which the stationary-mixture series
    /// converges, given the mixture ratio `lambda_m / mu`. `None` means the
    /// condition holds on the whole domain (the `lambda_m <= sqrt(lambda mu)`
    /// case).
    pub stationary_alpha_sup: Option<f64>,
}

/// `(sqrt(mu) - sqrt(lambda))^2`, the largest admissible `alpha`.
pub fn alpha_max(params: &QueueParams) -> f64 {
    let d = params.mu().sqrt() - params.lambda().sqrt();
    d * d
}

/// MGF domain with the mixture ratio taken from the operating law itself
/// (`lambda_m = lambda`), for which the mixture condition always holds.
pub fn mgf_domain(params: &QueueParams) -> MgfDomain {
    MgfDomain {
        alpha_max: alpha_max(params),
        stationary_alpha_sup: None,
    }
}

/// MGF domain when the initial mixture is geometric with ratio
/// `lambda_m / mu`. Above the threshold `lambda_m > sqrt(lambda mu)` the
/// series condition caps `alpha` at `lambda + mu - lambda_m - lambda mu /
/// lambda_m`, solved in closed form.
pub fn mgf_domain_with_initial(lambda_m: f64, params: &QueueParams) -> Result<MgfDomain> {
    validate_lambda_m(lambda_m, params)?;
    let (l, m) = (params.lambda(), params.mu());
    let sup = if lambda_m > (l * m).sqrt() {
        Some(l + m - lambda_m - l * m / lambda_m)
    } else {
        None
    };
    Ok(MgfDomain {
        alpha_max: alpha_max(params),
        stationary_alpha_sup: sup,
    })
}

fn validate_lambda_m(lambda_m: f64, params: &QueueParams) -> Result<()> {
    if !(lambda_m.is_finite() && lambda_m > 0.0) {
        return Err(Error::InvalidRate {
            name: "lambda_m",
            value: lambda_m,
        });
    }
    if lambda_m >= params.mu() {
        return Err(Error::Unstable {
            role: "stationary mixture",
            lambda: lambda_m,
            mu: params.mu(),
        });
    }
    Ok(())
}

/// `E[exp(alpha tau0(1))]` in closed form.
///
/// Defined for every `alpha <= alpha_max` (negative `alpha` is the Laplace
/// side and always finite). Evaluated in the conjugate form
/// `2 mu / (s + sqrt(disc))`, `s = lambda + mu - alpha`, with the
/// discriminant in its factored form
/// `disc = (alpha_max - alpha)((sqrt(mu) + sqrt(lambda))^2 - alpha)`:
/// both avoid the subtractive cancellation of the textbook expressions, and
/// the factored discriminant is exactly 0 at `alpha = alpha_max` instead of
/// a rounding residue. `alpha = 0` returns exactly 1.
pub fn mgf_tau0_from_1(params: &QueueParams, alpha: f64) -> Result<f64> {
    let amax = alpha_max(params);
    if !alpha.is_finite() || alpha > amax {
        return Err(Error::AlphaOutOfDomain {
            alpha,
            alpha_max: amax,
        });
    }
    if alpha == 0.0 {
        return Ok(1.0);
    }
    let (l, m) = (params.lambda(), params.mu());
    let s = l + m - alpha;
    let sum_root = m.sqrt() + l.sqrt();
    let disc = (amax - alpha) * (sum_root * sum_root - alpha);
    Ok(2.0 * m / (s + disc.sqrt()))
}

/// `E[exp(alpha tau0(x))] = G(alpha)^x`; `x = 0` returns 1.
pub fn mgf_tau0_from_x(params: &QueueParams, alpha: f64, x: u32) -> Result<f64> {
    if x == 0 {
        return Ok(1.0);
    }
    Ok(mgf_tau0_from_1(params, alpha)?.powi(x as i32))
}

/// MGF of the hitting time started from the geometric stationary mixture
/// with ratio `lambda_m / mu`:
/// `(1 - lambda_m/mu) / (1 - (lambda_m/mu) G(alpha))`.
///
/// Errors with the offending product when the series diverges,
/// `(lambda_m/mu) G(alpha) >= 1`.
pub fn mgf_tau0_stationary(lambda_m: f64, params: &QueueParams, alpha: f64) -> Result<f64> {
    validate_lambda_m(lambda_m, params)?;
    let g = mgf_tau0_from_1(params, alpha)?;
    let ratio = lambda_m / params.mu();
    let product = ratio * g;
    if product >= 1.0 {
        return Err(Error::SeriesDiverges { product });
    }
    Ok((1.0 - ratio) / (1.0 - product))
}

/// `E[tau0(1)] = 1 / (mu - lambda)`.
pub fn mean_tau0_from_1(params: &QueueParams) -> f64 {
    1.0 / (params.mu() - params.lambda())
}
