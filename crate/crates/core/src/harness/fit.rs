//! Log-log least squares with a Student-t interval on the slope.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% interval for the slope.
    pub ci_halfwidth: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Ordinary least squares of `y` on `x`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<RateFit> {
    let k = x.len();
    if k != y.len() || k < 3 {
        return Err(Error::Fit(format!("need at least 3 paired points, got {k}")));
    }
    let kf = k as f64;
    let mx = x.iter().sum::<f64>() / kf;
    let my = y.iter().sum::<f64>() / kf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = (sse / (kf - 2.0) / sxx).sqrt();
    let t = StudentsT::new(0.0, 1.0, kf - 2.0).map_err(|e| Error::Fit(e.to_string()))?.inverse_cdf(0.975);
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(RateFit { slope, intercept, ci_halfwidth: t * se, r_squared, points: k })
}

/// Fit `log value = intercept + slope · log n`.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit> {
    if points.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 points, got {}", points.len())));
    }
    if let Some(p) = points.iter().find(|p| !(p.1 > 0.0) || !(p.0 > 0.0)) {
        return Err(Error::Fit(format!("nonpositive point ({}, {})", p.0, p.1)));
    }
    let x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    linear_fit(&x, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng;
    use rand::Rng as _;

    const NS: [f64; 7] = [128.0, 256.0, 512.0, 1024.0, 2048.0, 4096.0, 8192.0];

    #[test]
    fn exact_power_law() {
        let pts: Vec<_> = NS.iter().map(|&n| (n, 3.0 * n.powf(-1.0 / 3.0))).collect();
        let f = fit_rate(&pts).unwrap();
        assert!((f.slope + 1.0 / 3.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn constant_values() {
        let pts: Vec<_> = NS.iter().map(|&n| (n, 0.7)).collect();
        assert!(fit_rate(&pts).unwrap().slope.abs() < 1e-14);
    }

    #[test]
    fn noisy_coverage() {
        let mut g = rng(11);
        let mut hits = 0;
        for _ in 0..100 {
            let pts: Vec<_> = NS.iter().map(|&n| (n, n.powf(-0.5) * (1.0 + 0.01 * (2.0 * g.random::<f64>() - 1.0)))).collect();
            let f = fit_rate(&pts).unwrap();
            if (f.slope + 0.5).abs() <= f.ci_halfwidth {
                hits += 1;
            }
        }
        assert!(hits >= 90, "{hits}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)]).is_err());
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0), (4.0, 1.0)]).is_err());
    }
}
