//! Acceptance suite: every analytic formula and simulator contract checked
//! end to end at its stated tolerance. Each test prints one pass line.
//!
//! Numbered tests are independent; tolerances and runtime ceilings are
//! pinned in the asserts.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mixbound::bounds::{
    alpha_star, best_rate, case2_rate_function, drift_optimal_exponential, drift_rate,
    rate_case2, rescale_general, truncation_bound_at, truncation_rate_function,
};
use mixbound::mgf::{alpha_max, mean_tau0_from_1, mgf_tau0_from_1, mgf_tau0_stationary};
use mixbound::model::tv_between_stationaries;
use mixbound::sim::{
    estimate_tv_curve, estimate_tv_lower_at_zero, sample_hitting_time, simulate_coupled,
    simulate_queue_path, simulate_workload_path, stats,
};
use mixbound::{InitialCondition, QueueParams};

fn q(lambda: f64, mu: f64) -> QueueParams {
    QueueParams::new(lambda, mu).unwrap()
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn criterion_01_closed_form_mgf_identity() {
    let started = Instant::now();
    for i in 1..=20 {
        let lambda = 0.25 * i as f64;
        for j in 1..=20 {
            let mu = lambda + 0.3 * j as f64;
            let p = q(lambda, mu);
            let amax = alpha_max(&p);
            for k in 0..10 {
                let alpha = amax * (k as f64 / 9.0);
                let g = mgf_tau0_from_1(&p, alpha).unwrap();
                let resid = lambda * g * g - (lambda + mu - alpha) * g + mu;
                assert!(
                    resid.abs() < 1e-10,
                    "residual {resid} at ({lambda},{mu},{alpha})"
                );
            }
            assert_eq!(mgf_tau0_from_1(&p, 0.0).unwrap(), 1.0, "G(0) must be exactly 1");
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "acceptance 01 (closed-form MGF identity): PASS — 400 parameter pairs x 10 alphas, \
         residual < 1e-10, G(0) = 1 exactly, {elapsed:?}"
    );
}

#[test]
fn criterion_02_case1_boundary_values() {
    let p = q(1.0, 4.0);
    let g = mgf_tau0_from_1(&p, 1.0).unwrap();
    assert!((g - 2.0).abs() < 1e-9, "G(1,4,1) = {g}");
    let c = mgf_tau0_stationary(1.0, &p, 1.0).unwrap();
    assert!((c - 1.5).abs() < 1e-9, "stationary MGF = {c}");
    println!(
        "acceptance 02 (case-1 boundary values): PASS — G(1,4,1) = {g}, \
         stationary mixture = {c}, both within 1e-9"
    );
}

#[test]
fn criterion_03_mean_hitting_time() {
    let started = Instant::now();
    let p = q(1.0, 4.0);
    let n = 100_000u64;
    let taus: Vec<f64> = (0..n)
        .map(|i| sample_hitting_time(&p, 1, 0x03_0000 + i).unwrap())
        .collect();
    let (mean, se) = mean_and_se(&taus);
    assert!(
        (mean - 1.0 / 3.0).abs() < 3.0 * se,
        "MC mean {mean} vs 1/3, se {se}"
    );

    let h = 1e-6;
    let fd = (mgf_tau0_from_1(&p, h).unwrap() - mgf_tau0_from_1(&p, -h).unwrap()) / (2.0 * h);
    let exact = mean_tau0_from_1(&p);
    let rel = ((fd - exact) / exact).abs();
    assert!(rel < 1e-4, "finite difference {fd} vs {exact}, rel {rel}");

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "acceptance 03 (mean hitting time): PASS — MC mean {mean:.6} (se {se:.6}) vs 1/3, \
         FD derivative rel err {rel:.2e}, {elapsed:?}"
    );
}

#[test]
fn criterion_04_headline_case1_tv_bound() {
    let started = Instant::now();
    let p = q(1.0, 4.0);
    let times = [0.0, 0.5, 1.0, 2.0, 3.0];
    let points = estimate_tv_curve(0.5, &p, &times, 100_000, 42).unwrap();
    let cert = best_rate(0.5, &p).unwrap();
    assert!((cert.alpha - 1.0).abs() < 1e-12);
    assert!((cert.prefactor.unwrap() - 1.5).abs() < 1e-12);
    for pt in &points {
        let bound = 1.5 * (-pt.t).exp();
        let allowance = 3.0 * pt.estimate.std_error + pt.bias_allowance;
        assert!(
            pt.estimate.estimate <= bound + allowance,
            "t = {}: tv_hat {} vs bound {bound} + allowance {allowance}",
            pt.t,
            pt.estimate.estimate
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "acceptance 04 (headline case-1 TV bound): PASS — 1e5 replicas, empirical TV under \
         1.5 exp(-t) at all 5 times, {elapsed:?}"
    );
}

#[test]
fn criterion_05_case2_tv_bound() {
    let started = Instant::now();
    let p = q(1.0, 4.0);
    // alpha = 0.5 sits inside the 2/3 boundary via the margin 1/6
    let cert = rate_case2(3.0, &p, Some(1.0 / 6.0)).unwrap();
    assert!((cert.alpha - 0.5).abs() < 1e-12);
    let c = cert.prefactor.unwrap();
    assert!((c - 2.92117).abs() < 1e-4, "prefactor {c}");
    let times = [0.0, 0.5, 1.0, 2.0, 3.0];
    let points = estimate_tv_curve(3.0, &p, &times, 100_000, 42).unwrap();
    for pt in &points {
        let bound = c * (-0.5 * pt.t).exp();
        let allowance = 3.0 * pt.estimate.std_error + pt.bias_allowance;
        assert!(
            pt.estimate.estimate <= bound + allowance,
            "t = {}: tv_hat {} vs bound {bound}",
            pt.t,
            pt.estimate.estimate
        );
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "acceptance 05 (case-2 TV bound): PASS — bound {c:.5} exp(-0.5 t) holds at all 5 \
         times with 1e5 replicas, {elapsed:?}"
    );
}

#[test]
fn criterion_06_rate_continuity_at_threshold() {
    let p = q(1.0, 4.0);
    let thr = 2.0; // sqrt(lambda mu)
    let f_lo = case2_rate_function(thr * (1.0 - 1e-7), &p);
    let f_hi = case2_rate_function(thr * (1.0 + 1e-7), &p);
    let g_lo = truncation_rate_function(thr * (1.0 - 1e-7), &p);
    let g_hi = truncation_rate_function(thr * (1.0 + 1e-7), &p);
    assert!((f_lo - f_hi).abs() < 1e-5, "f: {f_lo} vs {f_hi}");
    assert!((g_lo - g_hi).abs() < 1e-5, "g: {g_lo} vs {g_hi}");
    for v in [f_lo, f_hi, g_lo, g_hi] {
        assert!((v - 1.0).abs() < 1e-5, "limit {v} differs from alpha_star");
    }
    println!(
        "acceptance 06 (rate continuity): PASS — f and g continuous at sqrt(lambda mu) \
         within 1e-5, both limits 1"
    );
}

#[test]
fn criterion_07_truncation_rate_and_slope() {
    let p = q(1.0, 4.0);
    let a_bar = truncation_rate_function(3.0, &p);
    let expected = (4.0f64 / 3.0).ln() / 2.0f64.ln();
    assert!((a_bar - expected).abs() < 1e-12, "alpha_bar {a_bar}");
    assert!((a_bar - 0.415_037_499_2).abs() < 1e-9);

    let b40 = truncation_bound_at(3.0, &p, 40.0).unwrap();
    let b80 = truncation_bound_at(3.0, &p, 80.0).unwrap();
    let slope = (b40.ln() - b80.ln()) / 40.0;
    assert!((slope - a_bar).abs() < 0.01, "log-slope {slope} vs {a_bar}");

    // optimal-c admissibility: log(mu/l0)/log sqrt(mu/lambda) <
    // log(mu/l0)/log(l0/sqrt(lambda mu)) on a 50-point grid of l0 in (2, 4)
    for k in 1..=50 {
        let l0 = 2.0 + 2.0 * k as f64 / 51.0;
        let c = (4.0 / l0).ln() / (4.0f64 / 1.0).sqrt().ln();
        let cap = (4.0 / l0).ln() / (l0 / 2.0).ln();
        assert!(c < cap, "admissibility fails at l0 = {l0}: {c} vs {cap}");
    }
    println!(
        "acceptance 07 (truncation rate): PASS — alpha_bar = {a_bar:.12} within 1e-12, \
         log-slope {slope:.6} within 0.01, admissibility on the 50-point grid"
    );
}

#[test]
fn criterion_08_drift_consistency() {
    // independent oracle: golden-section maximization of the drift rate
    fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
        let gr = (5.0f64.sqrt() - 1.0) / 2.0;
        while b - a > 1e-10 {
            let c = b - gr * (b - a);
            let d = a + gr * (b - a);
            if f(c) > f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let z = 0.5 * (a + b);
        (z, f(z))
    }

    for i in 0..20 {
        let lambda = 0.2 + 0.15 * i as f64;
        let mu = lambda + 0.5 + 0.2 * i as f64;
        let p = q(lambda, mu);
        let (z_num, c_num) = golden_max(|z| drift_rate(&p, z), 1.0, 100.0);
        let opt = drift_optimal_exponential(&p);
        assert!(
            (c_num - alpha_star(&p)).abs() < 1e-9,
            "({lambda},{mu}): c {c_num} vs {}",
            alpha_star(&p)
        );
        assert!(
            (z_num - (mu / lambda).sqrt()).abs() < 1e-6,
            "({lambda},{mu}): z {z_num}"
        );
        assert!((opt.c_star - c_num).abs() < 1e-9);
    }
    println!(
        "acceptance 08 (drift consistency): PASS — numerical maximization matches \
         (sqrt(mu)-sqrt(lambda))^2 within 1e-9 and z* within 1e-6 on 20 parameter pairs"
    );
}

#[test]
fn criterion_09_coupling_soundness() {
    let started = Instant::now();
    let p = q(1.0, 4.0);
    let horizon = 8.0;
    let t_marginal = 2.0;
    for &lambda0 in &[3.0, 0.5] {
        let runs = 10_000u64;
        let mut lo_counts: Vec<u64> = Vec::new();
        let mut hi_counts: Vec<u64> = Vec::new();
        for i in 0..runs {
            let triple = simulate_coupled(lambda0, &p, horizon, 0x09_0000 + i).unwrap();
            assert!(triple.dominance_holds(), "dominance broken at run {i}");
            assert!(
                triple.coupled_by_bound_zero_hit(),
                "merge after bound zero-hit at run {i}"
            );
            for (counts, state) in [
                (&mut lo_counts, triple.path_lo.state_at(t_marginal)),
                (&mut hi_counts, triple.path_hi.state_at(t_marginal)),
            ] {
                let s = state as usize;
                if s >= counts.len() {
                    counts.resize(s + 1, 0);
                }
                counts[s] += 1;
            }
        }
        // marginal laws must match independent, uncoupled simulations
        let (lo_l0, hi_l0) = (lambda0.min(1.0), lambda0.max(1.0));
        for (name, lambda0_role, counts) in
            [("lo", lo_l0, &lo_counts), ("hi", hi_l0, &hi_counts)]
        {
            let initial = q(lambda0_role, 4.0);
            let mut ref_counts: Vec<u64> = Vec::new();
            for i in 0..runs {
                let mut rng = ChaCha8Rng::seed_from_u64(0x09_5EED_0000 + i);
                let x0 = initial.sample_stationary(rng.random());
                let s = simulate_queue_path(&p, x0, t_marginal + 1e-9, 0x09_AAAA_0000 + i)
                    .state_at(t_marginal) as usize;
                if s >= ref_counts.len() {
                    ref_counts.resize(s + 1, 0);
                }
                ref_counts[s] += 1;
            }
            let (stat, dof) = stats::chi_square_two_sample(counts, &ref_counts, 10);
            let crit = stats::chi_square_critical(0.01, dof);
            assert!(
                stat <= crit,
                "lambda0 {lambda0} {name} marginal: chi2 {stat} > {crit} (dof {dof})"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "acceptance 09 (coupling soundness): PASS — dominance and zero-hit merge in all \
         2x10^4 runs, chi-square marginals at level 0.01, {elapsed:?}"
    );
}

#[test]
fn criterion_10_rescaling_consistency() {
    // 10 random fixed-service specs: rescaling must be the identity
    let mut rng = ChaCha8Rng::seed_from_u64(0x10);
    for _ in 0..10 {
        let mu = 1.0 + 4.0 * rng.random::<f64>();
        let lambda = mu * (0.05 + 0.9 * rng.random::<f64>());
        let lambda0 = mu * (0.05 + 0.9 * rng.random::<f64>());
        let spec = mixbound::PerturbationSpec::new(lambda0, mu, lambda, mu).unwrap();
        let r = rescale_general(&spec).unwrap();
        let direct = best_rate(lambda0, &q(lambda, mu)).unwrap();
        assert!((r.b - 1.0).abs() < 1e-12);
        assert!((r.certificate.alpha - direct.alpha).abs() < 1e-12);
        match (r.certificate.prefactor, direct.prefactor) {
            (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12),
            (a, b) => assert_eq!(a, b),
        }
    }

    // (0.5, 2) -> (1, 4): b = 2, normalized certificate (0.5, 1.5),
    // combined bound 1.5 exp(-t)
    let spec = mixbound::PerturbationSpec::new(0.5, 2.0, 1.0, 4.0).unwrap();
    let r = rescale_general(&spec).unwrap();
    assert!((r.b - 2.0).abs() < 1e-12);
    assert!((r.certificate.alpha - 0.5).abs() < 1e-12);
    assert!((r.certificate.prefactor.unwrap() - 1.5).abs() < 1e-12);
    for t in [0.0, 1.0, 2.5] {
        let combined = r.certificate.bound_at(t);
        assert!((combined - 1.5 * (-t).exp()).abs() < 1e-12);
    }
    println!(
        "acceptance 10 (rescaling consistency): PASS — identity on 10 random fixed-service \
         specs within 1e-12; (0.5,2)->(1,4) gives b = 2 and bound 1.5 exp(-t)"
    );
}

#[test]
fn criterion_11_workload_zero_set_and_atom() {
    let started = Instant::now();
    let p = q(1.0, 4.0);
    let horizon = 25.0;
    let runs = 10_000u64;
    let check_times = [0.5, 1.0, 2.0];
    let mut zero_counts = [0u64; 3];
    for i in 0..runs {
        let (queue, work) = simulate_workload_path(
            &p,
            InitialCondition::Stationary { lambda0: 0.5 },
            horizon,
            0x11_0000 + i,
        )
        .unwrap();
        match (queue.first_zero_time(), work.first_zero_time()) {
            (Some(a), Some(b)) => {
                assert!((a - b).abs() < 1e-12, "zero-hit mismatch {a} vs {b} at run {i}")
            }
            (None, None) => {}
            other => panic!("zero-hit disagreement {other:?} at run {i}"),
        }
        for (k, &t) in check_times.iter().enumerate() {
            if work.value_at(t) == 0.0 {
                zero_counts[k] += 1;
            }
        }
    }
    // the {0}-atom deviation is a TV component, so the case-1 certificate
    // bounds it: |P(W_t = 0) - (1 - rho)| <= 1.5 exp(-t) + 3 sigma
    for (k, &t) in check_times.iter().enumerate() {
        let p_hat = zero_counts[k] as f64 / runs as f64;
        let dev = (p_hat - 0.75).abs();
        let se = (p_hat * (1.0 - p_hat) / runs as f64).sqrt();
        let bound = 1.5 * (-t).exp();
        assert!(
            dev <= bound + 3.0 * se,
            "t = {t}: deviation {dev} vs bound {bound}"
        );
    }
    let elapsed = started.elapsed();
    println!(
        "acceptance 11 (workload): PASS — zero-hit times agree to 1e-12 over 1e4 runs, \
         atom deviation under the certificate at t in {{0.5, 1, 2}}, {elapsed:?}"
    );
}

#[test]
fn criterion_12_tv_sandwich() {
    let started = Instant::now();
    let p = q(1.0, 4.0);
    let times = [0.0, 0.5, 1.0, 2.0, 3.0];
    let replicas = 100_000;
    let points = estimate_tv_curve(0.5, &p, &times, replicas, 42).unwrap();
    let exact_t0 = tv_between_stationaries(&q(0.5, 4.0), &p);
    for pt in &points {
        let lower = estimate_tv_lower_at_zero(0.5, &p, pt.t, replicas, 42).unwrap();
        // shared replica stream makes the sandwich pathwise: the single-event
        // deviation never exceeds the plug-in half-L1
        assert!(
            lower.estimate <= pt.estimate.estimate + 1e-12,
            "t = {}: lower {} > plug-in {}",
            pt.t,
            lower.estimate,
            pt.estimate.estimate
        );
        let bound = 1.5 * (-pt.t).exp();
        assert!(
            pt.estimate.estimate <= bound + 3.0 * pt.estimate.std_error + pt.bias_allowance,
            "t = {}: plug-in above the certificate",
            pt.t
        );
    }
    // anchor: the t = 0 plug-in agrees with the exact starting TV
    assert!(
        (points[0].estimate.estimate - exact_t0).abs()
            <= 3.0 * points[0].estimate.std_error + points[0].bias_allowance
    );
    let elapsed = started.elapsed();
    println!(
        "acceptance 12 (TV sandwich): PASS — lower bound <= plug-in <= certificate at all \
         5 times, t = 0 anchor {exact_t0:.6}, {elapsed:?}"
    );
}
