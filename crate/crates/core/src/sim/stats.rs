//! Small estimators shared by the ensemble runner and the tests.

/// Sample mean and standard error of the mean.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Jackknife mean and standard error of `f` over leave-one-out subsets.
pub fn jackknife(xs: &[f64], f: impl Fn(&[f64]) -> f64) -> (f64, f64) {
    let n = xs.len();
    let full = f(xs);
    if n < 2 {
        return (full, f64::NAN);
    }
    let mut buf = Vec::with_capacity(n - 1);
    let loo: Vec<f64> = (0..n)
        .map(|i| {
            buf.clear();
            buf.extend(xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &x)| x));
            f(&buf)
        })
        .collect();
    let m = loo.iter().sum::<f64>() / n as f64;
    let var = loo.iter().map(|x| (x - m).powi(2)).sum::<f64>() * (n as f64 - 1.0) / n as f64;
    (full, var.sqrt())
}

/// Asymptotic Kolmogorov critical constant `c(α) = sqrt(-ln(α/2)/2)`.
pub fn ks_constant(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// One-sample KS distance between integer-valued data given as counts per
/// value (`counts[k]` = occurrences of `k + offset`) and a reference pmf on
/// the same support. Returns `(D, critical value at alpha)` for `n_eff`
/// independent draws.
pub fn ks_discrete(counts: &[u64], pmf: &[f64], n_eff: f64, alpha: f64) -> (f64, f64) {
    let total: u64 = counts.iter().sum();
    let mut fe = 0.0;
    let mut fr = 0.0;
    let mut d = 0.0f64;
    for k in 0..counts.len().max(pmf.len()) {
        fe += counts.get(k).copied().unwrap_or(0) as f64 / total as f64;
        fr += pmf.get(k).copied().unwrap_or(0.0);
        d = d.max((fe - fr).abs());
    }
    (d, ks_constant(alpha) / n_eff.sqrt())
}

/// Two-sample KS distance and critical value at `alpha`.
pub fn ks_two_sample(a: &[f64], b: &[f64], alpha: f64) -> (f64, f64) {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let x = a[i].min(b[j]);
        while i < n && a[i] <= x {
            i += 1;
        }
        while j < m && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let (nf, mf) = (n as f64, m as f64);
    (d, ks_constant(alpha) * ((nf + mf) / (nf * mf)).sqrt())
}

/// Normalizes integer counts into a histogram.
pub fn normalize(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return vec![0.0; counts.len()];
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}
