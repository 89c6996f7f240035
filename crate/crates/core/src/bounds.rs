//! Certificate construction for perturbed M/M/1 queues.
//!
//! Fixing the service rate and perturbing the arrival rate from `lambda0`
//! to `lambda`, the total-variation distance from the new equilibrium obeys
//! `TV(t) <= C exp(-alpha t)` where `C` is a stationary-mixture hitting-time
//! MGF. Two regimes:
//!
//! - **Case 1** (`lambda0 <= lambda`): the mixture ratio is `lambda / mu`,
//!   the full rate `alpha_star = (sqrt(mu) - sqrt(lambda))^2` is admissible,
//!   and `C = 1 + sqrt(lambda / mu)`.
//! - **Case 2** (`lambda0 > lambda`): the mixture ratio is `lambda0 / mu`.
//!   Below the threshold `lambda0 <= sqrt(lambda mu)` the full rate is still
//!   admissible; above it the series condition caps the rate at
//!   `lambda + mu - lambda0 - lambda mu / lambda0`, approached from below by
//!   an explicit epsilon margin.
//!
//! Above the threshold a truncation argument gives a second, independent
//! rate `alpha_bar = (log(mu/lambda0) / log sqrt(mu/lambda)) alpha_star`
//! whose bound is a three-term curve rather than a single `C exp(-alpha t)`.
//! A general perturbation `(lambda0, mu0) -> (lambda, mu)` reduces to the
//! fixed-service case by rescaling time by `b = mu / mu0`.

use crate::error::Error;
use crate::mgf;
use crate::model::{tv_between_stationaries, PerturbationSpec, QueueParams};
use crate::Result;

/// Default epsilon backoff applied to the Case-2 boundary rate: 1% of the
/// boundary. Keeps the prefactor finite while giving up 1% of the rate.
pub const DEFAULT_MARGIN_FRACTION: f64 = 0.01;

/// Which construction produced a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum CaseLabel {
    #[serde(rename = "CASE1")]
    Case1,
    #[serde(rename = "CASE2_BELOW_THRESHOLD")]
    Case2BelowThreshold,
    #[serde(rename = "CASE2_ABOVE_THRESHOLD")]
    Case2AboveThreshold,
    #[serde(rename = "TRUNCATION")]
    Truncation,
    #[serde(rename = "DRIFT")]
    Drift,
    #[serde(rename = "UNPERTURBED")]
    Unperturbed,
}

impl std::fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CaseLabel::Case1 => "CASE1",
            CaseLabel::Case2BelowThreshold => "CASE2_BELOW_THRESHOLD",
            CaseLabel::Case2AboveThreshold => "CASE2_ABOVE_THRESHOLD",
            CaseLabel::Truncation => "TRUNCATION",
            CaseLabel::Drift => "DRIFT",
            CaseLabel::Unperturbed => "UNPERTURBED",
        };
        f.write_str(s)
    }
}

/// A validated convergence certificate: `TV(t) <= prefactor *
/// exp(-alpha * time_scale_b * t)` in original time units.
///
/// `prefactor` is `None` in exactly two situations: a `Truncation`
/// certificate, whose bound is the three-term curve evaluated by
/// [`truncation_bound_at`], and the measure-zero threshold
/// `lambda0 = sqrt(lambda mu)`, where the stationary-mixture MGF diverges
/// and no finite constant exists at the full rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCertificate {
    pub alpha: f64,
    pub prefactor: Option<f64>,
    pub time_scale_b: f64,
    pub case_label: CaseLabel,
    /// Epsilon backed off from a strict-inequality boundary; 0 when the
    /// construction needs none.
    pub epsilon_margin: f64,
    /// Parameters of the normalized (fixed-service) problem the certificate
    /// was built on, kept for bound evaluation.
    pub(crate) lambda0: f64,
    pub(crate) operating: QueueParams,
}

impl BoundCertificate {
    /// Bound value at original-time `t`. Exponential certificates evaluate
    /// `C exp(-alpha b t)`; truncation certificates route through
    /// [`truncation_bound_at`]; a threshold certificate with no finite
    /// prefactor evaluates to infinity (the rate claim is a limit there).
    pub fn bound_at(&self, t: f64) -> f64 {
        let tau = self.time_scale_b * t;
        match (self.case_label, self.prefactor) {
            (CaseLabel::Truncation, _) => {
                truncation_bound_at(self.lambda0, &self.operating, tau)
                    .expect("truncation certificate implies the regime precondition")
            }
            (_, Some(c)) => c * (-self.alpha * tau).exp(),
            (_, None) => f64::INFINITY,
        }
    }

    /// Initial arrival rate of the (normalized) problem this certificate
    /// covers.
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Operating parameters of the (normalized) problem.
    pub fn operating(&self) -> QueueParams {
        self.operating
    }
}

/// Bound values tabulated over a time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCurve {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub source: CaseLabel,
}

impl BoundCurve {
    pub fn from_certificate(cert: &BoundCertificate, times: &[f64]) -> Self {
        BoundCurve {
            times: times.to_vec(),
            values: times.iter().map(|&t| cert.bound_at(t)).collect(),
            source: cert.case_label,
        }
    }
}

/// `alpha_star = (sqrt(mu) - sqrt(lambda))^2`, the best rate for the
/// queue-length process and the hard ceiling for every certificate.
pub fn alpha_star(params: &QueueParams) -> f64 {
    mgf::alpha_max(params)
}

/// The Case-2 rate function `f(lambda0)` at its epsilon -> 0 supremum:
/// `alpha_star` below the threshold `sqrt(lambda mu)`, the boundary rate
/// `lambda + mu - lambda0 - lambda mu / lambda0` above it. Continuous in
/// `lambda0`.
pub fn case2_rate_function(lambda0: f64, params: &QueueParams) -> f64 {
    let (l, m) = (params.lambda(), params.mu());
    if lambda0 <= (l * m).sqrt() {
        alpha_star(params)
    } else {
        l + m - lambda0 - l * m / lambda0
    }
}

/// The truncation rate function `g(lambda0)`: `alpha_star` below the
/// threshold, `alpha_bar` above it. Continuous in `lambda0`.
pub fn truncation_rate_function(lambda0: f64, params: &QueueParams) -> f64 {
    let (l, m) = (params.lambda(), params.mu());
    if lambda0 <= (l * m).sqrt() {
        alpha_star(params)
    } else {
        (m / lambda0).ln() / (m / l).sqrt().ln() * alpha_star(params)
    }
}

/// Case 1 (`lambda0 <= lambda`): full rate `alpha_star`, prefactor
/// `1 + sqrt(lambda / mu)`. Independent of `lambda0`.
pub fn rate_case1(lambda0: f64, params: &QueueParams) -> Result<BoundCertificate> {
    if lambda0 > params.lambda() {
        return Err(Error::NotApplicable {
            op: "rate_case1",
            requirement: "lambda0 <= lambda (larger lambda0 routes to case 2)",
        });
    }
    let alpha = alpha_star(params);
    let prefactor = 1.0 + (params.lambda() / params.mu()).sqrt();
    Ok(BoundCertificate {
        alpha,
        prefactor: Some(prefactor),
        time_scale_b: 1.0,
        case_label: CaseLabel::Case1,
        epsilon_margin: 0.0,
        lambda0,
        operating: *params,
    })
}

/// Case 2 (`lambda0 > lambda`). Below the threshold the full rate holds with
/// no margin; above it the rate is the boundary minus `epsilon_margin`
/// (`None` selects the default 1% of the boundary). The prefactor is the
/// stationary-mixture MGF at the chosen rate, finite whenever the margin is
/// strictly positive above the threshold.
pub fn rate_case2(
    lambda0: f64,
    params: &QueueParams,
    epsilon_margin: Option<f64>,
) -> Result<BoundCertificate> {
    let (l, m) = (params.lambda(), params.mu());
    if lambda0 <= l {
        return Err(Error::NotApplicable {
            op: "rate_case2",
            requirement: "lambda0 > lambda (smaller lambda0 is case 1)",
        });
    }
    if lambda0 >= m {
        return Err(Error::Unstable {
            role: "initial",
            lambda: lambda0,
            mu: m,
        });
    }
    let threshold = (l * m).sqrt();
    if lambda0 <= threshold {
        let alpha = alpha_star(params);
        // At lambda0 == threshold exactly, the mixture series diverges at the
        // full rate; the rate is still attained as a limit, recorded with no
        // finite prefactor.
        let prefactor = match mgf::mgf_tau0_stationary(lambda0, params, alpha) {
            Ok(c) => Some(c),
            Err(Error::SeriesDiverges { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(BoundCertificate {
            alpha,
            prefactor,
            time_scale_b: 1.0,
            case_label: CaseLabel::Case2BelowThreshold,
            epsilon_margin: 0.0,
            lambda0,
            operating: *params,
        })
    } else {
        let boundary = l + m - lambda0 - l * m / lambda0;
        let margin = epsilon_margin.unwrap_or(DEFAULT_MARGIN_FRACTION * boundary);
        if !(margin > 0.0 && margin < boundary) {
            return Err(Error::BadMargin { margin, boundary });
        }
        let alpha = boundary - margin;
        let prefactor = mgf::mgf_tau0_stationary(lambda0, params, alpha)?;
        Ok(BoundCertificate {
            alpha,
            prefactor: Some(prefactor),
            time_scale_b: 1.0,
            case_label: CaseLabel::Case2AboveThreshold,
            epsilon_margin: margin,
            lambda0,
            operating: *params,
        })
    }
}

/// Truncation certificate for the regime `lambda0 > sqrt(lambda mu)`:
/// rate `alpha_bar`, no single prefactor — the bound is the curve of
/// [`truncation_bound_at`].
pub fn rate_truncation(lambda0: f64, params: &QueueParams) -> Result<BoundCertificate> {
    require_truncation_regime("rate_truncation", lambda0, params)?;
    Ok(BoundCertificate {
        alpha: truncation_rate_function(lambda0, params),
        prefactor: None,
        time_scale_b: 1.0,
        case_label: CaseLabel::Truncation,
        epsilon_margin: 0.0,
        lambda0,
        operating: *params,
    })
}

fn require_truncation_regime(op: &'static str, lambda0: f64, params: &QueueParams) -> Result<()> {
    let (l, m) = (params.lambda(), params.mu());
    if lambda0 >= m {
        return Err(Error::Unstable {
            role: "initial",
            lambda: lambda0,
            mu: m,
        });
    }
    if lambda0 <= (l * m).sqrt() {
        return Err(Error::NotApplicable {
            op,
            requirement: "lambda0 > sqrt(lambda mu)",
        });
    }
    Ok(())
}

/// The three-term truncation bound at time `t`, evaluated with the
/// real-valued truncation level `N = alpha_bar t / log(mu / lambda0)` and
/// `eps = exp(-alpha_bar t)`:
///
/// ```text
/// (1 - eps)(1 + sqrt(lambda/mu)) e^{-alpha_star t}
///   + eps
///   + (1 - lambda0/mu) (R^{N+1} - 1)/(R - 1) e^{-alpha_star t},
///       R = lambda0 / sqrt(lambda mu)
/// ```
///
/// Both the `eps` term and the truncation term decay at exactly
/// `alpha_bar`, so the curve's asymptotic log-slope is `alpha_bar`. The
/// curve is *not* monotone near `t = 0` (it rises above its `t = 0` value
/// before decaying), which is harmless: it still dominates the TV, which
/// never exceeds 1.
pub fn truncation_bound_at(lambda0: f64, params: &QueueParams, t: f64) -> Result<f64> {
    require_truncation_regime("truncation_bound_at", lambda0, params)?;
    if !t.is_finite() || t < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "t must be finite and >= 0, got {t}"
        )));
    }
    let (l, m) = (params.lambda(), params.mu());
    let a_star = alpha_star(params);
    let a_bar = truncation_rate_function(lambda0, params);
    let eps = (-a_bar * t).exp();
    let n = a_bar * t / (m / lambda0).ln();
    let r = lambda0 / (l * m).sqrt();
    let decay = (-a_star * t).exp();
    let term1 = (1.0 - eps) * (1.0 + (l / m).sqrt()) * decay;
    let term2 = eps;
    let term3 = (1.0 - lambda0 / m) * (r.powf(n + 1.0) - 1.0) / (r - 1.0) * decay;
    Ok(term1 + term2 + term3)
}

/// Best certificate for a fixed-service perturbation. Dispatches on
/// `lambda0`; above the threshold the Case-2 supremum rate is compared
/// against `alpha_bar` and the winner is returned (Case 2 backed off by the
/// margin only after winning the comparison).
pub fn best_rate(lambda0: f64, params: &QueueParams) -> Result<BoundCertificate> {
    best_rate_with_margin(lambda0, params, None)
}

/// [`best_rate`] with an explicit Case-2 epsilon margin.
pub fn best_rate_with_margin(
    lambda0: f64,
    params: &QueueParams,
    epsilon_margin: Option<f64>,
) -> Result<BoundCertificate> {
    let (l, m) = (params.lambda(), params.mu());
    if !(lambda0.is_finite() && lambda0 > 0.0) {
        return Err(Error::InvalidRate {
            name: "lambda0",
            value: lambda0,
        });
    }
    if lambda0 >= m {
        return Err(Error::Unstable {
            role: "initial",
            lambda: lambda0,
            mu: m,
        });
    }
    if lambda0 <= l {
        return rate_case1(lambda0, params);
    }
    if lambda0 <= (l * m).sqrt() {
        return rate_case2(lambda0, params, epsilon_margin);
    }
    // lambda0 > sqrt(lambda mu): compare the two known rates at their suprema.
    let case2_sup = case2_rate_function(lambda0, params);
    let trunc = truncation_rate_function(lambda0, params);
    if case2_sup >= trunc {
        rate_case2(lambda0, params, epsilon_margin)
    } else {
        rate_truncation(lambda0, params)
    }
}

/// A general perturbation reduced to the fixed-service case by rescaling
/// time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledProblem {
    /// Time-scale factor `b = mu / mu0`; the bound reads
    /// `C exp(-alpha b t)` in original time.
    pub b: f64,
    /// Arrival-rate factor `a = lambda mu0 / (lambda0 mu)`.
    pub a: f64,
    /// Normalized problem: initial `(lambda0, mu0)`, operating
    /// `(a lambda0, mu0)`.
    pub normalized: PerturbationSpec,
    /// Mixture rate `max(lambda0, a lambda0)` of the normalized problem.
    pub lambda_m: f64,
    /// Certificate of the normalized problem carrying `time_scale_b = b`.
    pub certificate: BoundCertificate,
}

/// Reduces `(lambda0, mu0) -> (lambda, mu)` to a fixed-service problem via
/// `b = mu / mu0`, `a = lambda mu0 / (lambda0 mu)`, and certifies the
/// normalized problem with [`best_rate`]. When `mu0 = mu` this degenerates
/// to the identity and reproduces `best_rate` exactly.
pub fn rescale_general(spec: &PerturbationSpec) -> Result<RescaledProblem> {
    rescale_general_with_margin(spec, None)
}

/// [`rescale_general`] with an explicit Case-2 epsilon margin.
pub fn rescale_general_with_margin(
    spec: &PerturbationSpec,
    epsilon_margin: Option<f64>,
) -> Result<RescaledProblem> {
    let (l0, m0) = (spec.initial().lambda(), spec.initial().mu());
    let (l, m) = (spec.operating().lambda(), spec.operating().mu());
    let b = m / m0;
    let a = l * m0 / (l0 * m);
    // normalized arrival rate a*lambda0 computed as lambda/b so that
    // mu0 == mu reduces to the identity bitwise
    let norm_operating = QueueParams::new_named(l / b, m0, "operating")?;
    let normalized = PerturbationSpec::new(l0, m0, norm_operating.lambda(), m0)?;
    let lambda_m = l0.max(a * l0);
    let mut certificate = best_rate_with_margin(l0, &norm_operating, epsilon_margin)?;
    certificate.time_scale_b = b;
    Ok(RescaledProblem {
        b,
        a,
        normalized,
        lambda_m,
        certificate,
    })
}

/// Trivial certificate for the identity perturbation: the process is in
/// equilibrium for all time, so `TV = 0` and any rate certifies with
/// prefactor 0. `alpha_star` is recorded as the rate.
pub fn unperturbed_certificate(params: &QueueParams) -> BoundCertificate {
    BoundCertificate {
        alpha: alpha_star(params),
        prefactor: Some(0.0),
        time_scale_b: 1.0,
        case_label: CaseLabel::Unperturbed,
        epsilon_margin: 0.0,
        lambda0: params.lambda(),
        operating: *params,
    }
}

/// Exponential drift parameters for `V(x) = z^x` on the birth-death
/// generator: `z_star` maximizing the drift rate, the maximal rate
/// `c_star`, and the smallest compensation constant `b_star` making
/// `AV <= -c V + b 1_{0}` hold at the boundary state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftOptimum {
    pub z_star: f64,
    pub c_star: f64,
    pub b_star: f64,
}

/// Drift rate `c(z) = lambda + mu - lambda z - mu / z` produced by
/// `V(x) = z^x` away from 0. `c(1) = 0`.
pub fn drift_rate(params: &QueueParams, z: f64) -> f64 {
    params.lambda() + params.mu() - params.lambda() * z - params.mu() / z
}

/// Optimal exponential drift: `z_star = sqrt(mu / lambda)` maximizes
/// `c(z)` with `c_star = (sqrt(mu) - sqrt(lambda))^2 = alpha_star`, and
/// `b_star = lambda (z_star - 1) + c_star`.
pub fn drift_optimal_exponential(params: &QueueParams) -> DriftOptimum {
    let z_star = (params.mu() / params.lambda()).sqrt();
    let c_star = alpha_star(params);
    let b_star = params.lambda() * (z_star - 1.0) + c_star;
    DriftOptimum {
        z_star,
        c_star,
        b_star,
    }
}

/// Drift-route certificate (applicable when the bounding parameter is the
/// operating one, `lambda0 <= lambda`): same rate and prefactor as Case 1,
/// labelled as coming through the drift condition.
pub fn rate_drift(lambda0: f64, params: &QueueParams) -> Result<BoundCertificate> {
    if lambda0 > params.lambda() {
        return Err(Error::NotApplicable {
            op: "rate_drift",
            requirement: "lambda0 <= lambda (the drift route needs the operating law to dominate)",
        });
    }
    let opt = drift_optimal_exponential(params);
    let prefactor = mgf::mgf_tau0_stationary(params.lambda(), params, opt.c_star)?;
    Ok(BoundCertificate {
        alpha: opt.c_star,
        prefactor: Some(prefactor),
        time_scale_b: 1.0,
        case_label: CaseLabel::Drift,
        epsilon_margin: 0.0,
        lambda0,
        operating: *params,
    })
}

/// Everything `cmd_bound` reports for one spec: the best certificate plus
/// the side-by-side alternatives in the gap regime.
#[derive(Debug, Clone)]
pub struct CertificateBundle {
    pub best: BoundCertificate,
    /// Case-2 certificate when `lambda0_norm > sqrt(lambda_norm mu_norm)`.
    pub case2: Option<BoundCertificate>,
    /// Truncation certificate in the same regime.
    pub truncation: Option<BoundCertificate>,
    /// Drift-route certificate when applicable (`lambda0 <= lambda`).
    pub drift: Option<BoundCertificate>,
    /// Ceiling rate `alpha_star` of the normalized problem.
    pub alpha_star: f64,
    /// `alpha_star - best.alpha`: how far the certified rate sits below the
    /// known ceiling (the open gap in the above-threshold regime).
    pub rate_gap: f64,
    /// Exact TV between the two equilibria (the `t = 0` anchor).
    pub tv_t0: f64,
    /// The rescaling reduction, when one was needed (`mu0 != mu`).
    pub rescaled: Option<RescaledProblem>,
}

/// Certificates for an arbitrary validated spec: short-circuits the
/// identity perturbation, rescales when `mu0 != mu`, and attaches the
/// alternative certificates in the above-threshold regime.
pub fn certificates_for_spec(
    spec: &PerturbationSpec,
    epsilon_margin: Option<f64>,
) -> Result<CertificateBundle> {
    let tv_t0 = tv_between_stationaries(&spec.initial(), &spec.operating());
    if !spec.is_perturbed() {
        let best = unperturbed_certificate(&spec.operating());
        return Ok(CertificateBundle {
            alpha_star: best.alpha,
            rate_gap: 0.0,
            best,
            case2: None,
            truncation: None,
            drift: None,
            tv_t0,
            rescaled: None,
        });
    }
    let rescaled = rescale_general_with_margin(spec, epsilon_margin)?;
    let norm_op = rescaled.normalized.operating();
    let l0 = rescaled.normalized.initial().lambda();
    let best = rescaled.certificate;
    let a_star = alpha_star(&norm_op);
    let above_threshold = l0 > (norm_op.lambda() * norm_op.mu()).sqrt();
    let case2 = if above_threshold {
        let mut c = rate_case2(l0, &norm_op, epsilon_margin)?;
        c.time_scale_b = rescaled.b;
        Some(c)
    } else {
        None
    };
    let truncation = if above_threshold {
        let mut c = rate_truncation(l0, &norm_op)?;
        c.time_scale_b = rescaled.b;
        Some(c)
    } else {
        None
    };
    let drift = if l0 <= norm_op.lambda() {
        let mut c = rate_drift(l0, &norm_op)?;
        c.time_scale_b = rescaled.b;
        Some(c)
    } else {
        None
    };
    Ok(CertificateBundle {
        alpha_star: a_star,
        rate_gap: a_star - best.alpha,
        best,
        case2,
        truncation,
        drift,
        tv_t0,
        rescaled: Some(rescaled),
    })
}
