//! Command-line front end.
//!
//! Subcommands:
//!
//! - `bound` — certificates as JSON (or flat CSV), with the Case-2 and
//!   truncation alternatives side by side in the gap regime.
//! - `curve` — CSV of the bound curves over a time grid, with the exact
//!   `t = 0` TV as a constant anchor column.
//! - `simulate` — CSV of the empirical plug-in TV against the certificate
//!   bound with a pass flag per time point.
//! - `mgf` — CSV table comparing analytic hitting-time MGFs with their
//!   Monte Carlo estimates (z-scores).
//! - `couple-check` — runs the coupled-path property suite and prints one
//!   pass/fail line per check.
//!
//! All floating-point output is printed with 12 significant digits; logs go
//! to standard error only. Exit code 0 iff every requested check passed.

use std::io::Write;

use clap::{Args, Parser, Subcommand};

use crate::bounds::{self, CertificateBundle};
use crate::error::Error;
use crate::mgf;
use crate::model::{PerturbationSpec, QueueParams};
use crate::sim::{self, stats, InitialCondition};
use crate::Result;

/// Parsed command line.
#[derive(Debug, Parser)]
#[command(
    name = "mixbound",
    about = "Certified exponential convergence bounds for perturbed M/M/1 queues",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute convergence-rate certificates for a perturbation
    Bound(BoundArgs),
    /// Tabulate certificate and truncation bound curves as CSV
    Curve(CurveArgs),
    /// Estimate the TV curve by Monte Carlo and check it against the bound
    Simulate(SimulateArgs),
    /// Compare analytic MGF values against Monte Carlo estimates
    Mgf(MgfArgs),
    /// Run the coupled-path property suite
    CoupleCheck(CoupleCheckArgs),
}

/// The perturbation quadruple shared by every subcommand.
#[derive(Debug, Args, Clone, Copy)]
pub struct ParamArgs {
    /// Initial-equilibrium arrival rate
    #[arg(long)]
    pub lambda0: f64,
    /// Initial-equilibrium service rate
    #[arg(long)]
    pub mu0: f64,
    /// Operating arrival rate
    #[arg(long)]
    pub lambda: f64,
    /// Operating service rate
    #[arg(long)]
    pub mu: f64,
    /// Case-2 epsilon margin (default: 1% of the boundary rate)
    #[arg(long)]
    pub epsilon_margin: Option<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct OutputArgs {
    /// Output file (standard output when omitted)
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    /// Output format
    #[arg(long)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Time grid: an explicit list, or a uniform grid from 0 to t-max.
#[derive(Debug, Args, Clone)]
pub struct TimeArgs {
    /// Comma-separated strictly increasing times (e.g. 0,0.5,1,2,3)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub times: Option<Vec<f64>>,
    /// Right endpoint of a uniform time grid starting at 0
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Step of the uniform grid
    #[arg(long)]
    pub t_step: Option<f64>,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct MonteCarloArgs {
    /// Independent replicas per estimate
    #[arg(long, default_value_t = 100_000)]
    pub replicas: u64,
    /// Master seed; every estimator is a pure function of it
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub times: TimeArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub times: TimeArgs,
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct MgfArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Single alpha to test (default: a battery of variance-safe fractions
    /// of the admissible boundary)
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CoupleCheckArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub mc: MonteCarloArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    /// Horizon of each coupled run
    #[arg(long, default_value_t = 8.0)]
    pub horizon: f64,
}

/// Entry point for the binary: parse, dispatch, map errors to exit codes.
/// Exit code 0 iff all requested checks passed, 1 on failed checks, 2 on
/// configuration or validation errors.
pub fn main_with_args<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints its own help/version through this path
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Dispatch a parsed command, writing to `--out` or standard output.
/// Returns whether all requested checks passed.
pub fn run(command: Command) -> Result<bool> {
    let output = match &command {
        Command::Bound(a) => a.output.clone(),
        Command::Curve(a) => a.output.clone(),
        Command::Simulate(a) => a.output.clone(),
        Command::Mgf(a) => a.output.clone(),
        Command::CoupleCheck(a) => a.output.clone(),
    };
    let mut sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout().lock()),
    };
    let ok = match command {
        Command::Bound(a) => cmd_bound(&a, &mut sink)?,
        Command::Curve(a) => cmd_curve(&a, &mut sink)?,
        Command::Simulate(a) => cmd_simulate(&a, &mut sink)?,
        Command::Mgf(a) => cmd_mgf(&a, &mut sink)?,
        Command::CoupleCheck(a) => cmd_couple_check(&a, &mut sink)?,
    };
    sink.flush()?;
    Ok(ok)
}

fn validated_spec(p: &ParamArgs) -> Result<PerturbationSpec> {
    PerturbationSpec::new(p.lambda0, p.mu0, p.lambda, p.mu)
}

/// Initial arrival rate expressed against the operating service rate:
/// the stationary law of (lambda0, mu0) is geometric with ratio
/// lambda0/mu0, identical to the stationary law of (lambda0 mu / mu0, mu).
/// Lets the fixed-service estimators cover general perturbations.
fn effective_lambda0(spec: &PerturbationSpec) -> f64 {
    spec.operating().mu() * spec.initial().rho()
}

/// Format with 12 significant digits, printf-%g style (fixed notation for
/// moderate magnitudes, scientific otherwise, trailing zeros trimmed).
pub(crate) fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-4..12).contains(&exp) {
        let s = format!("{:.11e}", x);
        // trim trailing zeros in the mantissa: "1.50000000000e-5" -> "1.5e-5"
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        format!("{mantissa}e{exponent}")
    } else {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{:.*}", decimals, x);
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    }
}

/// Flat certificate document with the frozen field names.
#[derive(Debug, serde::Serialize)]
struct CertificateDoc {
    alpha: f64,
    prefactor: Option<f64>,
    time_scale_b: f64,
    case_label: String,
    epsilon_margin: f64,
    lambda0: f64,
    mu0: f64,
    lambda: f64,
    mu: f64,
    tv_t0: f64,
}

impl CertificateDoc {
    fn new(cert: &bounds::BoundCertificate, spec: &PerturbationSpec, tv_t0: f64) -> Self {
        CertificateDoc {
            alpha: cert.alpha,
            prefactor: cert.prefactor,
            time_scale_b: cert.time_scale_b,
            case_label: cert.case_label.to_string(),
            epsilon_margin: cert.epsilon_margin,
            lambda0: spec.initial().lambda(),
            mu0: spec.initial().mu(),
            lambda: spec.operating().lambda(),
            mu: spec.operating().mu(),
            tv_t0,
        }
    }
}

#[derive(Debug, serde::Serialize)]
struct RescaleDoc {
    b: f64,
    a: f64,
    lambda_normalized: f64,
    mu_normalized: f64,
    lambda_m: f64,
}

#[derive(Debug, serde::Serialize)]
struct BoundReport {
    best: CertificateDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    case2: Option<CertificateDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    truncation: Option<CertificateDoc>,
    #[serde(skip_serializing_if = "Option::is_none")]
    drift: Option<CertificateDoc>,
    alpha_star: f64,
    rate_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rescale: Option<RescaleDoc>,
}

fn bound_report(spec: &PerturbationSpec, bundle: &CertificateBundle) -> BoundReport {
    let doc = |c: &bounds::BoundCertificate| CertificateDoc::new(c, spec, bundle.tv_t0);
    BoundReport {
        best: doc(&bundle.best),
        case2: bundle.case2.as_ref().map(doc),
        truncation: bundle.truncation.as_ref().map(doc),
        drift: bundle.drift.as_ref().map(doc),
        alpha_star: bundle.alpha_star,
        rate_gap: bundle.rate_gap,
        rescale: bundle.rescaled.as_ref().map(|r| RescaleDoc {
            b: r.b,
            a: r.a,
            lambda_normalized: r.normalized.operating().lambda(),
            mu_normalized: r.normalized.operating().mu(),
            lambda_m: r.lambda_m,
        }),
    }
}

/// `bound`: certificates as JSON (default) or flat CSV rows.
pub fn cmd_bound(args: &BoundArgs, out: &mut dyn Write) -> Result<bool> {
    let spec = validated_spec(&args.params)?;
    let bundle = bounds::certificates_for_spec(&spec, args.params.epsilon_margin)?;
    let report = bound_report(&spec, &bundle);
    if bundle.rate_gap > 0.0 {
        eprintln!(
            "note: certified rate {} sits below the alpha_star ceiling {} (open gap {})",
            fmt_sig(bundle.best.alpha),
            fmt_sig(bundle.alpha_star),
            fmt_sig(bundle.rate_gap)
        );
    }
    match args.output.format.unwrap_or(Format::Json) {
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, &report)
                .map_err(|e| Error::Io(e.to_string()))?;
            writeln!(out)?;
        }
        Format::Csv => {
            writeln!(
                out,
                "certificate,alpha,prefactor,time_scale_b,case_label,epsilon_margin,\
                 lambda0,mu0,lambda,mu,tv_t0"
            )?;
            let row = |name: &str, d: &CertificateDoc, out: &mut dyn Write| -> Result<()> {
                writeln!(
                    out,
                    "{name},{},{},{},{},{},{},{},{},{},{}",
                    fmt_sig(d.alpha),
                    d.prefactor.map(fmt_sig).unwrap_or_default(),
                    fmt_sig(d.time_scale_b),
                    d.case_label,
                    fmt_sig(d.epsilon_margin),
                    fmt_sig(d.lambda0),
                    fmt_sig(d.mu0),
                    fmt_sig(d.lambda),
                    fmt_sig(d.mu),
                    fmt_sig(d.tv_t0),
                )?;
                Ok(())
            };
            row("best", &report.best, out)?;
            if let Some(d) = &report.case2 {
                row("case2", d, out)?;
            }
            if let Some(d) = &report.truncation {
                row("truncation", d, out)?;
            }
            if let Some(d) = &report.drift {
                row("drift", d, out)?;
            }
        }
    }
    Ok(true)
}

fn resolve_times(t: &TimeArgs) -> Result<Vec<f64>> {
    let times = match (&t.times, t.t_max, t.t_step) {
        (Some(list), None, None) => list.clone(),
        (None, Some(t_max), Some(step)) => {
            if !(t_max > 0.0 && step > 0.0) {
                return Err(Error::InvalidConfig(
                    "t-max and t-step must be positive".into(),
                ));
            }
            let n = (t_max / step).round() as usize;
            (0..=n).map(|k| k as f64 * step).collect()
        }
        _ => {
            return Err(Error::InvalidConfig(
                "provide either --times or both --t-max and --t-step".into(),
            ))
        }
    };
    if times.is_empty() || times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(Error::InvalidConfig(
            "times must be nonempty, finite and nonnegative".into(),
        ));
    }
    if times.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidConfig(
            "times must be strictly increasing".into(),
        ));
    }
    Ok(times)
}

fn require_csv(format: Option<Format>, op: &'static str) -> Result<()> {
    if format == Some(Format::Json) {
        return Err(Error::InvalidConfig(format!(
            "{op} emits the frozen CSV schema; --format json is not supported"
        )));
    }
    Ok(())
}

/// The exponential `C exp(-alpha b t)` certificate a bound column can be
/// evaluated from (the truncation curve is reported separately).
fn exponential_certificate(bundle: &CertificateBundle) -> bounds::BoundCertificate {
    match (bundle.best.case_label, bundle.best.prefactor) {
        (bounds::CaseLabel::Truncation, _) => bundle
            .case2
            .expect("truncation regime always has a case-2 companion"),
        _ => bundle.best,
    }
}

/// `curve`: frozen CSV schema
/// `t,bound_certificate,bound_truncation,tv_stationary_t0_anchor`.
pub fn cmd_curve(args: &CurveArgs, out: &mut dyn Write) -> Result<bool> {
    require_csv(args.output.format, "curve")?;
    let spec = validated_spec(&args.params)?;
    let times = resolve_times(&args.times)?;
    let bundle = bounds::certificates_for_spec(&spec, args.params.epsilon_margin)?;
    let exp_cert = exponential_certificate(&bundle);
    writeln!(
        out,
        "t,bound_certificate,bound_truncation,tv_stationary_t0_anchor"
    )?;
    for &t in &times {
        let bound = exp_cert.bound_at(t);
        let trunc = bundle
            .truncation
            .as_ref()
            .map(|c| fmt_sig(c.bound_at(t)))
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            fmt_sig(t),
            fmt_sig(bound),
            trunc,
            fmt_sig(bundle.tv_t0)
        )?;
    }
    Ok(true)
}

/// `simulate`: frozen CSV schema
/// `t,tv_hat,std_error,bias_allowance,bound,pass` with
/// `pass = 1` iff `tv_hat <= bound + 3 std_error + bias_allowance`.
pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<bool> {
    require_csv(args.output.format, "simulate")?;
    let spec = validated_spec(&args.params)?;
    let times = resolve_times(&args.times)?;
    let bundle = bounds::certificates_for_spec(&spec, args.params.epsilon_margin)?;
    let exp_cert = exponential_certificate(&bundle);
    let points = sim::estimate_tv_curve(
        effective_lambda0(&spec),
        &spec.operating(),
        &times,
        args.mc.replicas,
        args.mc.seed,
    )?;
    writeln!(out, "t,tv_hat,std_error,bias_allowance,bound,pass")?;
    let mut all_pass = true;
    for p in &points {
        let bound = exp_cert.bound_at(p.t);
        let pass = p.estimate.estimate <= bound + 3.0 * p.estimate.std_error + p.bias_allowance;
        all_pass &= pass;
        writeln!(
            out,
            "{},{},{},{},{},{}",
            fmt_sig(p.t),
            fmt_sig(p.estimate.estimate),
            fmt_sig(p.estimate.std_error),
            fmt_sig(p.bias_allowance),
            fmt_sig(bound),
            u8::from(pass)
        )?;
    }
    Ok(all_pass)
}

/// Variance-safe battery fractions of the admissible boundary: the
/// estimator's second moment needs `2 alpha` inside the domain, so stay
/// below half.
const MGF_BATTERY_FRACTIONS: [f64; 4] = [0.0, 0.15, 0.3, 0.45];

/// `mgf`: CSV table `start,alpha,analytic,estimate,std_error,z,pass`
/// comparing closed forms against Monte Carlo for fixed starts (x0 = 1, 2)
/// and the stationary mixture start.
pub fn cmd_mgf(args: &MgfArgs, out: &mut dyn Write) -> Result<bool> {
    require_csv(args.output.format, "mgf")?;
    let spec = validated_spec(&args.params)?;
    let operating = spec.operating();
    let lambda0_eff = effective_lambda0(&spec);
    let lambda_m = lambda0_eff.max(operating.lambda());
    let fixed_boundary = mgf::alpha_max(&operating);
    let stationary_domain = mgf::mgf_domain_with_initial(lambda_m, &operating)?;
    let stationary_boundary = stationary_domain
        .stationary_alpha_sup
        .map_or(stationary_domain.alpha_max, |s| {
            s.min(stationary_domain.alpha_max)
        });

    let alphas_for = |boundary: f64| -> Vec<f64> {
        match args.alpha {
            Some(a) => vec![a],
            None => MGF_BATTERY_FRACTIONS.iter().map(|f| f * boundary).collect(),
        }
    };

    writeln!(out, "start,alpha,analytic,estimate,std_error,z,pass")?;
    let mut all_pass = true;
    let emit = |start: &str,
                    alpha: f64,
                    analytic: f64,
                    est: sim::EstimateWithError,
                    out: &mut dyn Write|
     -> Result<bool> {
        let z = if est.std_error > 0.0 {
            (est.estimate - analytic) / est.std_error
        } else {
            0.0
        };
        let pass = if est.std_error > 0.0 {
            z.abs() <= 3.0
        } else {
            est.estimate == analytic
        };
        writeln!(
            out,
            "{start},{},{},{},{},{},{}",
            fmt_sig(alpha),
            fmt_sig(analytic),
            fmt_sig(est.estimate),
            fmt_sig(est.std_error),
            fmt_sig(z),
            u8::from(pass)
        )?;
        Ok(pass)
    };

    for x0 in [1u32, 2] {
        for alpha in alphas_for(fixed_boundary) {
            let analytic = mgf::mgf_tau0_from_x(&operating, alpha, x0)?;
            let est = sim::estimate_mgf(
                &operating,
                InitialCondition::Fixed(x0),
                alpha,
                args.mc.replicas,
                args.mc.seed,
            )?;
            all_pass &= emit(&format!("x0={x0}"), alpha, analytic, est, out)?;
        }
    }
    for alpha in alphas_for(stationary_boundary) {
        let analytic = mgf::mgf_tau0_stationary(lambda_m, &operating, alpha)?;
        let est = sim::estimate_mgf(
            &operating,
            InitialCondition::Stationary { lambda0: lambda_m },
            alpha,
            args.mc.replicas,
            args.mc.seed,
        )?;
        all_pass &= emit("stationary", alpha, analytic, est, out)?;
    }
    Ok(all_pass)
}

/// `couple-check`: seeded coupled runs checking pathwise dominance, the
/// zero-hit merge implication, marginal-law agreement with uncoupled
/// simulations (two-sample chi-square at level 0.01), and the MGF tail
/// bound on the coupling time. One pass/fail line per check.
pub fn cmd_couple_check(args: &CoupleCheckArgs, out: &mut dyn Write) -> Result<bool> {
    let spec = validated_spec(&args.params)?;
    let operating = spec.operating();
    let lambda0_eff = effective_lambda0(&spec);
    if lambda0_eff == operating.lambda() {
        return Err(Error::NotApplicable {
            op: "couple-check",
            requirement: "a perturbed spec (the identity coupling is a single path)",
        });
    }
    let runs = args.mc.replicas;
    let horizon = args.horizon;
    let t_check = horizon / 2.0;
    let lambda_m = lambda0_eff.max(operating.lambda());

    use rayon::prelude::*;
    struct RunOutcome {
        dominance: bool,
        merge_by_zero_hit: bool,
        state_lo: u32,
        state_hi: u32,
        coupled_by_t: bool,
    }
    let outcomes: Vec<RunOutcome> = (0..runs)
        .into_par_iter()
        .map(|i| {
            let seed = sim::derive_seed(args.mc.seed, sim::Stream::Coupling, i);
            let triple = sim::simulate_coupled(lambda0_eff, &operating, horizon, seed)
                .expect("validated spec");
            RunOutcome {
                dominance: triple.dominance_holds(),
                merge_by_zero_hit: triple.coupled_by_bound_zero_hit(),
                state_lo: triple.path_lo.state_at(t_check),
                state_hi: triple.path_hi.state_at(t_check),
                coupled_by_t: triple.coupling_time.is_some_and(|tc| tc <= t_check),
            }
        })
        .collect();

    let mut all_pass = true;
    let report = |name: &str, pass: bool, detail: String, out: &mut dyn Write| -> Result<()> {
        writeln!(
            out,
            "couple-check {name}: {} ({detail})",
            if pass { "PASS" } else { "FAIL" }
        )?;
        Ok(())
    };

    let dominance = outcomes.iter().all(|o| o.dominance);
    all_pass &= dominance;
    report("dominance", dominance, format!("{runs} runs"), out)?;

    let merge = outcomes.iter().all(|o| o.merge_by_zero_hit);
    all_pass &= merge;
    report("zero-hit merge", merge, format!("{runs} runs"), out)?;

    // marginal laws at t_check vs uncoupled replicas (fresh seed stream)
    let lo_lambda0 = lambda0_eff.min(operating.lambda());
    let hi_lambda0 = lambda_m;
    for (name, lambda0_role, coupled_states) in [
        (
            "lo marginal",
            lo_lambda0,
            outcomes.iter().map(|o| o.state_lo).collect::<Vec<_>>(),
        ),
        (
            "hi marginal",
            hi_lambda0,
            outcomes.iter().map(|o| o.state_hi).collect::<Vec<_>>(),
        ),
    ] {
        let reference: Vec<u32> = (0..runs)
            .into_par_iter()
            .map(|i| {
                use rand::{Rng, SeedableRng};
                let seed = sim::derive_seed(args.mc.seed ^ 0x5EED, sim::Stream::Replica, i);
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let initial = QueueParams::new_named(lambda0_role, operating.mu(), "initial")
                    .expect("validated");
                let x0 = initial.sample_stationary(rng.random());
                sim::simulate_queue_path(&operating, x0, t_check + 1e-9, seed ^ 0xF00D)
                    .state_at(t_check)
            })
            .collect();
        let mut counts_a = Vec::new();
        let mut counts_b = Vec::new();
        for &s in &coupled_states {
            let s = s as usize;
            if s >= counts_a.len() {
                counts_a.resize(s + 1, 0u64);
            }
            counts_a[s] += 1;
        }
        for &s in &reference {
            let s = s as usize;
            if s >= counts_b.len() {
                counts_b.resize(s + 1, 0u64);
            }
            counts_b[s] += 1;
        }
        let (stat, dof) = stats::chi_square_two_sample(&counts_a, &counts_b, 10);
        let crit = stats::chi_square_critical(0.01, dof);
        let pass = stat <= crit;
        all_pass &= pass;
        report(
            name,
            pass,
            format!(
                "chi2 = {} vs critical {} at dof {dof}",
                fmt_sig(stat),
                fmt_sig(crit)
            ),
            out,
        )?;
    }

    // Markov tail bound: P(coupling_time > t) <= G_stationary(alpha) e^{-alpha t}
    let domain = mgf::mgf_domain_with_initial(lambda_m, &operating)?;
    let boundary = domain
        .stationary_alpha_sup
        .map_or(domain.alpha_max, |s| s.min(domain.alpha_max));
    let alpha = 0.45 * boundary;
    let g = mgf::mgf_tau0_stationary(lambda_m, &operating, alpha)?;
    let tail_bound = g * (-alpha * t_check).exp();
    let not_coupled = outcomes.iter().filter(|o| !o.coupled_by_t).count() as f64;
    let frac = not_coupled / runs as f64;
    let se = (frac * (1.0 - frac) / runs as f64).sqrt();
    let pass = frac <= tail_bound + 3.0 * se;
    all_pass &= pass;
    report(
        "coupling-time tail",
        pass,
        format!(
            "P(T > {}) = {} vs bound {}",
            fmt_sig(t_check),
            fmt_sig(frac),
            fmt_sig(tail_bound)
        ),
        out,
    )?;

    Ok(all_pass)
}
