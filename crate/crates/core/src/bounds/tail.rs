//! `∫₀^∞ min{A e^{-a t^b}, 1} dt` against `2 (log A / a)^{1/b}`.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailReport {
    pub bound: f64,
    pub numeric: f64,
    pub holds: bool,
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson quadrature on `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(&f, a, b, fa, fm, fb, whole, tol, 48)
}

pub fn tail_integral_bound(big_a: f64, a: f64, b: f64) -> Result<TailReport> {
    if !(big_a >= 3.0) || !(a > 0.0) || !(1.0..=2.0).contains(&b) {
        return Err(Error::param(format!("need A ≥ 3, a > 0, b ∈ [1,2], got ({big_a}, {a}, {b})")));
    }
    let la = big_a.ln();
    let bound = 2.0 * (la / a).powf(1.0 / b);
    // below t* the integrand is 1
    let t_star = (la / a).powf(1.0 / b);
    let t_end = ((la + 60.0) / a).powf(1.0 / b);
    let tail = adaptive_simpson(|t| big_a * (-a * t.powf(b)).exp(), t_star, t_end, 1e-13);
    let numeric = t_star + tail;
    Ok(TailReport { bound, numeric, holds: numeric <= bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_case() {
        let r = tail_integral_bound(3.0, 1.0, 1.0).unwrap();
        assert!((r.numeric - (3f64.ln() + 1.0)).abs() < 1e-9);
        assert!((r.bound - 2.0 * 3f64.ln()).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn gaussian_case_and_scaling() {
        let r = tail_integral_bound(3.0, 1.0, 2.0).unwrap();
        assert!((r.numeric - 1.415).abs() < 1e-3, "{}", r.numeric);
        assert!((r.bound - 2.0 * 3f64.ln().sqrt()).abs() < 1e-12);
        let s = tail_integral_bound(3.0, 4.0, 2.0).unwrap();
        assert!((s.numeric - r.numeric / 2.0).abs() < 1e-9);
        assert!((s.bound - r.bound / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(tail_integral_bound(2.0, 1.0, 1.0).is_err());
        assert!(tail_integral_bound(3.0, 1.0, 2.5).is_err());
    }
}
