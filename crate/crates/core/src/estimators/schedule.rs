//! Network budgets as functions of the sample size.

use crate::relunet::NetworkBudget;
use crate::{Error, Result};

/// `(n / log³n)^{d*/(d* + (s+2)β(1∧β)^q)}`; 1 when `s = ∞`.
pub fn width_scale(n: usize, beta: f64, q: usize, d_lower: usize, s: f64) -> f64 {
    if s.is_infinite() {
        return 1.0;
    }
    let ln = (n as f64).ln();
    let b = beta * beta.min(1.0).powi(q as i32);
    let e = d_lower as f64 / (d_lower as f64 + (s + 2.0) * b);
    (n as f64 / ln.powi(3)).powf(e)
}

/// For finite `s`: `G = ⌈a log n⌉`, `N = ⌈a X⌉`, `S = ⌈a log n · X⌉` with `X = width_scale`.
/// For `s = ∞`: `G = N = ⌈b⌉`, `S = ⌈a G N⌉`. Always `B = 1`, `F = ∞`.
pub fn hyperparam_schedule(n: usize, beta: f64, q: usize, d_lower: usize, s: f64, a: f64, b: f64) -> Result<NetworkBudget> {
    if n < 3 || !(a > 0.0 && b > 0.0) {
        return Err(Error::param(format!("schedule needs n ≥ 3 and a, b > 0, got n={n}, a={a}, b={b}")));
    }
    if s.is_infinite() {
        let g = b.ceil() as usize;
        return NetworkBudget::new(g, g, (a * (g * g) as f64).ceil() as usize, 1.0, None);
    }
    let ln = (n as f64).ln();
    let x = width_scale(n, beta, q, d_lower, s);
    NetworkBudget::new((a * ln).ceil() as usize, (a * x).ceil() as usize, (a * ln * x).ceil() as usize, 1.0, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_s_is_constant() {
        let a = hyperparam_schedule(100, 1.0, 0, 1, f64::INFINITY, 1.0, 4.0).unwrap();
        let b = hyperparam_schedule(1_000_000, 1.0, 0, 1, f64::INFINITY, 1.0, 4.0).unwrap();
        assert_eq!((a.g, a.n, a.s), (b.g, b.n, b.s));
    }

    #[test]
    fn width_exponent_one_third() {
        let n = 1e6 as usize;
        let r = width_scale(2 * n, 1.0, 0, 1, 0.0) / width_scale(n, 1.0, 0, 1, 0.0);
        let ln1 = (n as f64).ln();
        let ln2 = (2.0 * n as f64).ln();
        let want = (2.0 * (ln1 / ln2).powi(3)).powf(1.0 / 3.0);
        assert!((r - want).abs() < 1e-12);
        assert!((r - 2f64.powf(1.0 / 3.0)).abs() < 0.1);
    }

    #[test]
    fn sparsity_per_width_tracks_log_n() {
        for k in 0..=40 {
            let n = 10f64.powf(2.0 + 4.0 * k as f64 / 40.0) as usize;
            let b = hyperparam_schedule(n, 1.0, 0, 1, 0.0, 1.0, 1.0).unwrap();
            let ratio = b.s as f64 / (b.n as f64 * (n as f64).ln());
            assert!((0.5..=2.0).contains(&ratio), "n={n} ratio={ratio}");
        }
    }
}
