//! Summary statistics, goodness-of-fit tests and the experiment registry.

pub mod experiments;
pub mod report;

pub use experiments::{experiment_ids, run_all, run_experiment, RunOptions, DEFAULT_SEED};
pub use report::{ExperimentReport, Metric};

use crate::error::{Error, Result};




/// Two-sample Kolmogorov–Smirnov result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsResult {
    /// `sup_x |F_a(x) - F_b(x)|`.
    pub statistic: f64,
    /// Critical value at significance 0.01.
    pub critical_01: f64,
    pub n_a: usize,
    pub n_b: usize,
}

impl KsResult {
    pub fn rejects_at_01(&self) -> bool {
        self.statistic > self.critical_01
    }
}

/// Asymptotic KS constant `c(0.01)`.
pub const KS_C_01: f64 = 1.628;

/// Two-sample KS statistic. Ties are handled by advancing both samples past
/// every copy of the current value before comparing the ECDFs.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData("KS needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Domain("KS sample contains NaN".into()));
    }
    let mut xa = a.to_vec();
    let mut xb = b.to_vec();
    xa.sort_by(f64::total_cmp);
    xb.sort_by(f64::total_cmp);
    let (na, nb) = (xa.len(), xb.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < na && j < nb {
        let x = xa[i].min(xb[j]);
        while i < na && xa[i] <= x {
            i += 1;
        }
        while j < nb && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    let (n, m) = (na as f64, nb as f64);
    Ok(KsResult {
        statistic: d,
        critical_01: KS_C_01 * ((n + m) / (n * m)).sqrt(),
        n_a: na,
        n_b: nb,
    })
}

/// Which tail a Hill estimate looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Left,
    Right,
}

/// Hill estimate of the tail index from the `k` most extreme observations on
/// the given side. Returns the index itself, not its reciprocal.
pub fn hill_tail_index(sample: &[f64], k: usize, side: TailSide) -> Result<f64> {
    let mut mags: Vec<f64> = sample
        .iter()
        .map(|&x| match side {
            TailSide::Left => -x,
            TailSide::Right => x,
        })
        .filter(|&x| x > 0.0)
        .collect();
    if k < 2 || mags.len() <= k {
        return Err(Error::InsufficientData(format!(
            "Hill estimator needs more than k = {k} positive tail values, got {}",
            mags.len()
        )));
    }
    mags.sort_by(|x, y| y.total_cmp(x));
    let threshold = mags[k].ln();
    let mean_excess = mags[..k].iter().map(|x| x.ln() - threshold).sum::<f64>() / k as f64;
    if !(mean_excess > 0.0) {
        return Err(Error::InsufficientData("degenerate upper tail".into()));
    }
    Ok(1.0 / mean_excess)
}

/// Median of the means of `batches` contiguous, nearly equal batches. A
/// robust location summary for samples with infinite variance.
pub fn median_of_batches(sample: &[f64], batches: usize) -> f64 {
    assert!(batches >= 1 && sample.len() >= batches, "need at least one value per batch");
    let n = sample.len();
    let mut means: Vec<f64> = (0..batches)
        .map(|b| {
            let lo = b * n / batches;
            let hi = (b + 1) * n / batches;
            sample[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect();
    median(&mut means)
}

/// Median, averaging the two middle values for even lengths.
pub fn median(values: &mut [f64]) -> f64 {
    assert!(!values.is_empty());
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance.
pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (values.len() as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_identical_and_disjoint() {
        let a = [1.0, 2.0, 3.0];
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        let b = [10.0, 11.0];
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, 1.0);
    }

    #[test]
    fn ks_hand_computed() {
        // ECDF gaps: after 1 -> 1/2 - 0, after 2 -> 1 - 1/3, after 3,4 -> 0.
        let a = [1.0, 2.0];
        let b = [2.5, 3.0, 4.0];
        let r = ks_two_sample(&a, &b).unwrap();
        assert_eq!(r.statistic, 1.0);
        let a = [1.0, 3.0];
        let b = [2.0, 4.0];
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, 0.5);
    }

    #[test]
    fn ks_ties_across_samples() {
        let a = [1.0, 1.0, 2.0, 2.0];
        let b = [1.0, 2.0];
        assert_eq!(ks_two_sample(&a, &b).unwrap().statistic, 0.0);
    }

    #[test]
    fn ks_critical_value() {
        let a = vec![0.0; 1000];
        let r = ks_two_sample(&a, &a).unwrap();
        assert!((r.critical_01 - 1.628 * (2.0f64 / 1000.0).sqrt()).abs() < 1e-15);
        assert!(ks_two_sample(&[], &a).is_err());
        assert!(ks_two_sample(&[f64::NAN], &a).is_err());
    }

    #[test]
    fn hill_on_exact_pareto_quantiles() {
        // Deterministic Pareto(1.5) quantiles.
        let n = 100_000;
        let xs: Vec<f64> =
            (1..=n).map(|i| (1.0 - (i as f64 - 0.5) / n as f64).powf(-1.0 / 1.5)).collect();
        let h = hill_tail_index(&xs, 1000, TailSide::Right).unwrap();
        assert!((h - 1.5).abs() < 0.02, "{h}");
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        let h = hill_tail_index(&neg, 1000, TailSide::Left).unwrap();
        assert!((h - 1.5).abs() < 0.02, "{h}");
        assert!(hill_tail_index(&xs[..10], 20, TailSide::Right).is_err());
    }

    #[test]
    fn batch_median() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        // Batch means 0.5, 2.5, 4.5, 6.5, 8.5.
        assert_eq!(median_of_batches(&xs, 5), 4.5);
        assert_eq!(median(&mut [3.0, 1.0, 2.0, 4.0]), 2.5);
        assert!((variance(&[1.0, 2.0, 3.0, 4.0]) - 5.0 / 3.0).abs() < 1e-15);
    }
}
