//! Prediction metrics.

use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

fn same_len(truth: &[f64], pred: &[f64]) -> Result<()> {
    if truth.len() != pred.len() {
        return Err(Error::LengthMismatch {
            what: "truth and predictions",
            left: truth.len(),
            right: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::InvalidParameter("metrics need at least one site".into()));
    }
    Ok(())
}

/// Mean squared prediction error.
pub fn mse(truth: &[f64], pred: &[f64]) -> Result<f64> {
    same_len(truth, pred)?;
    Ok(truth.iter().zip(pred).map(|(t, p)| (t - p) * (t - p)).sum::<f64>() / truth.len() as f64)
}

/// Per-observation check loss `(γ − 1{Y < Ŷ})(Y − Ŷ)`, averaged.
pub fn mean_check_loss(truth: &[f64], pred: &[f64], gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "quantile level must lie in (0, 1), got {gamma}"
        )));
    }
    same_len(truth, pred)?;
    let total: f64 = truth
        .iter()
        .zip(pred)
        .map(|(t, p)| {
            let u = t - p;
            if u < 0.0 {
                (gamma - 1.0) * u
            } else {
                gamma * u
            }
        })
        .sum();
    Ok(total / truth.len() as f64)
}

/// Fraction of sites with `lower ≤ truth ≤ upper`.
pub fn interval_coverage(truth: &[f64], lower: &[f64], upper: &[f64]) -> Result<f64> {
    same_len(truth, lower)?;
    same_len(truth, upper)?;
    let hits = truth
        .iter()
        .zip(lower.iter().zip(upper))
        .filter(|(t, (l, u))| *l <= *t && *t <= *u)
        .count();
    Ok(hits as f64 / truth.len() as f64)
}

/// Empirical `γ`-quantile that minimizes the summed check loss: the
/// `⌈nγ⌉`-th order statistic.
pub fn empirical_quantile(values: &[f64], gamma: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::InvalidParameter("quantile of an empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = ((gamma * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Ok(v[k - 1])
}

/// Sample mean and standard error (sample standard deviation over `√n`).
/// The standard error of a single value is reported as 0.
pub fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
