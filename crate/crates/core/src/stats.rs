//! Small descriptive-statistics helpers shared by the estimators.

/// Sample mean and standard error (`sd / sqrt(len)`, `sd` with the `len - 1`
/// denominator). Empty input gives `(NaN, NaN)`; a single value has stderr 0.
pub fn mean_stderr<I: IntoIterator<Item = f64>>(values: I) -> (f64, f64, usize) {
    // Welford keeps the variance accurate when the mean is large.
    let mut count = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        count += 1;
        let d = v - mean;
        mean += d / count as f64;
        m2 += d * (v - mean);
    }
    match count {
        0 => (f64::NAN, f64::NAN, 0),
        1 => (mean, 0.0, 1),
        _ => {
            let var = m2 / (count - 1) as f64;
            (mean, (var / count as f64).sqrt(), count)
        }
    }
}

/// Linear-interpolation quantile (Hyndman–Fan type 7) of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn sorted(values: &[f64]) -> Vec<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let a = sorted(a);
    let b = sorted(b);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Empirical CDF of sorted data at `x`: fraction of values `<= x`.
pub fn ecdf_sorted(sorted: &[f64], x: f64) -> f64 {
    sorted.partition_point(|&v| v <= x) as f64 / sorted.len() as f64
}

/// Standard normal quantile for a two-sided interval at `confidence`.
pub fn two_sided_z(confidence: f64) -> f64 {
    use statrs::distribution::{ContinuousCDF, Normal};
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + 0.5 * confidence)
}
