//! `J(x, y)` and the integrated excess-sum separation.

use crate::dist::{Marginal, QuadSpec};
use crate::funcspace::RealFn;

/// `min{x+y, 2-x-y} - min{x, 1-x} - min{y, 1-y}`.
pub fn j_function(x: f64, y: f64) -> f64 {
    (x + y).min(2.0 - (x + y)) - (x.min(1.0 - x) + y.min(1.0 - y))
}

/// `∫ J(η1, η2) dQ` by quadrature.
pub fn excess_sum_separation(eta1: &dyn RealFn, eta2: &dyn RealFn, marginal: &Marginal, spec: QuadSpec) -> f64 {
    marginal.quadrature(spec).integrate(|x| j_function(eta1.value(x), eta2.value(x)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert!((j_function(0.4, 0.6) - 0.2).abs() < 1e-15);
        assert_eq!(j_function(0.0, 0.0), 0.0);
        assert_eq!(j_function(1.0, 0.0), 1.0);
    }

    #[test]
    fn symmetric_nonnegative() {
        for i in 0..200 {
            for j in 0..200 {
                let (x, y) = (i as f64 / 199.0, j as f64 / 199.0);
                let a = j_function(x, y);
                assert!(a >= -1e-15);
                assert_eq!(a, j_function(y, x));
            }
        }
    }

    #[test]
    fn constant_integrand() {
        let m = Marginal::lebesgue(2);
        let s = excess_sum_separation(&|_: &[f64]| 0.4, &|_: &[f64]| 0.6, &m, QuadSpec::new(16, 2));
        assert!((s - 0.2).abs() < 1e-12);
        let z = excess_sum_separation(&|x: &[f64]| x[0], &|x: &[f64]| x[0], &m, QuadSpec::new(16, 2));
        assert!(z.abs() < 1e-15);
    }
}
