//! Least-squares fit of `ln ratio` against `ln ln(e + y)`.

use serde::{Deserialize, Serialize};

use super::sweep::SweepRecord;
use crate::error::{Error, Result};
use crate::families::log_factor;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    /// Slope: the fitted power of `ln(e + y)`.
    pub exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Fits `ratio ~ C (ln(e + y))^r` on `(y, ratio)` pairs.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    let mut distinct: Vec<f64> = points.iter().map(|p| p.0).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::TooFewPoints(distinct.len()));
    }
    if let Some(&(_, r)) = points.iter().find(|p| !(p.1 > 0.0 && p.1.is_finite())) {
        return Err(Error::Parameter(format!("ratios must be positive and finite, got {r}")));
    }
    let xs: Vec<f64> = points.iter().map(|p| log_factor(p.0).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if !(sxx > 1e-300) {
        return Err(Error::DegenerateRegressor);
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    Ok(FitResult { exponent: slope, intercept, r_squared, points: xs.len() })
}

/// Fits the completed records of a sweep; skipped rows are left out.
pub fn fit_exponent(records: &[SweepRecord]) -> Result<FitResult> {
    let points: Vec<(f64, f64)> = records.iter().filter_map(|r| r.ratio().map(|q| (r.y, q))).collect();
    fit_power_law(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ys() -> Vec<f64> {
        (3..=8).map(|k| (k as f64).exp()).collect()
    }

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = ys().into_iter().map(|y| (y, log_factor(y).powf(0.5))).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.exponent - 0.5).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_ratio() {
        let pts: Vec<_> = ys().into_iter().map(|y| (y, 2.5)).collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!(fit.exponent.abs() < 1e-12);
        assert!((fit.intercept - 2.5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn refuses_few_points() {
        let y = 100.0;
        assert_eq!(fit_power_law(&[(y, 1.0), (y, 2.0), (y * 2.0, 1.0)]), Err(Error::TooFewPoints(2)));
    }
}
