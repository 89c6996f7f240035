//! Small statistical tests used by the coupling checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sample Kolmogorov-Smirnov statistic `sup |F1 - F2|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_by(|x, y| x.partial_cmp(y).unwrap());
    sb.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let (n, m) = (sa.len(), sb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let x = sa[i].min(sb[j]);
        while i < n && sa[i] <= x {
            i += 1;
        }
        while j < m && sb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at the given level:
/// `c(level) * sqrt((n + m) / (n m))`, `c(level) = sqrt(-ln(level/2) / 2)`.
pub fn ks_critical(level: f64, n: usize, m: usize) -> f64 {
    let c = (-(level / 2.0).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}

/// Two-sample chi-square homogeneity test on state counts.
///
/// Bins are pooled from the right until every pooled bin has at least
/// `min_pooled` observations combined. Returns `(statistic, dof)`;
/// `dof = pooled_bins - 1`.
pub fn chi_square_two_sample(
    counts_a: &[u64],
    counts_b: &[u64],
    min_pooled: u64,
) -> (f64, usize) {
    let len = counts_a.len().max(counts_b.len());
    let at = |c: &[u64], i: usize| c.get(i).copied().unwrap_or(0);

    // pool sparse high states into the preceding bin
    let mut bins: Vec<(u64, u64)> = Vec::new();
    let mut acc = (0u64, 0u64);
    for i in 0..len {
        acc.0 += at(counts_a, i);
        acc.1 += at(counts_b, i);
        if acc.0 + acc.1 >= min_pooled {
            bins.push(acc);
            acc = (0, 0);
        }
    }
    if acc.0 + acc.1 > 0 {
        if let Some(last) = bins.last_mut() {
            last.0 += acc.0;
            last.1 += acc.1;
        } else {
            bins.push(acc);
        }
    }

    let n1: u64 = bins.iter().map(|b| b.0).sum();
    let n2: u64 = bins.iter().map(|b| b.1).sum();
    let total = (n1 + n2) as f64;
    let mut stat = 0.0;
    for &(o1, o2) in &bins {
        let row = (o1 + o2) as f64;
        let e1 = n1 as f64 * row / total;
        let e2 = n2 as f64 * row / total;
        if e1 > 0.0 {
            stat += (o1 as f64 - e1).powi(2) / e1;
        }
        if e2 > 0.0 {
            stat += (o2 as f64 - e2).powi(2) / e2;
        }
    }
    (stat, bins.len().saturating_sub(1))
}

/// Upper critical value of the chi-square distribution.
pub fn chi_square_critical(level: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 0.0;
    }
    ChiSquared::new(dof as f64)
        .expect("dof > 0")
        .inverse_cdf(1.0 - level)
}
