//! Grid probes for sup norms and Hoelder quotients on `[0,1]^dim`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ALL_PAIRS_LIMIT: usize = 2000;
const RANDOM_PAIRS: usize = 200_000;

/// Tensor grid with `res` equispaced points per axis including both endpoints.
pub fn grid_points(dim: usize, res: usize) -> impl Iterator<Item = Vec<f64>> {
    let res = res.max(2);
    let total = res.pow(dim as u32);
    let step = 1.0 / (res - 1) as f64;
    (0..total).map(move |mut flat| {
        let mut x = vec![0.0; dim];
        for k in (0..dim).rev() {
            x[k] = (flat % res) as f64 * step;
            flat /= res;
        }
        x
    })
}

/// Maximum of `|f|` on the grid and the point where it is attained.
pub fn sup_probe(f: &dyn Fn(&[f64]) -> f64, dim: usize, res: usize) -> (f64, Vec<f64>) {
    let mut best = (f64::NEG_INFINITY, vec![0.0; dim]);
    for x in grid_points(dim, res) {
        let v = f(&x).abs();
        if v > best.0 || v.is_nan() {
            best = (if v.is_nan() { f64::INFINITY } else { v }, x);
        }
    }
    best
}

fn quotient(fa: f64, fb: f64, a: &[f64], b: &[f64], expo: f64) -> f64 {
    let dist = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt();
    if dist == 0.0 {
        return 0.0;
    }
    (fa - fb).abs() / dist.powf(expo)
}

/// Largest observed `|f(a)-f(b)| / |a-b|_2^(min(beta,1))`.
///
/// All pairs for small grids, otherwise neighbour stencils plus seeded random pairs.
pub fn holder_quotient_probe(f: &dyn Fn(&[f64]) -> f64, dim: usize, beta: f64, res: usize) -> f64 {
    let expo = beta.min(1.0);
    let pts: Vec<Vec<f64>> = grid_points(dim, res).collect();
    let vals: Vec<f64> = pts.iter().map(|x| f(x)).collect();
    let n = pts.len();
    let mut best = 0.0f64;
    if n <= ALL_PAIRS_LIMIT {
        for i in 0..n {
            for j in i + 1..n {
                best = best.max(quotient(vals[i], vals[j], &pts[i], &pts[j], expo));
            }
        }
        return best;
    }
    let res = res.max(2);
    for i in 0..n {
        let mut stride = 1;
        for _ in 0..dim {
            let axis_pos = (i / stride) % res;
            if axis_pos + 1 < res {
                let j = i + stride;
                best = best.max(quotient(vals[i], vals[j], &pts[i], &pts[j], expo));
            }
            stride *= res;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for _ in 0..RANDOM_PAIRS {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        best = best.max(quotient(vals[i], vals[j], &pts[i], &pts[j], expo));
    }
    best
}

/// Sup plus quotient: a lower estimate of the Hoelder norm used for the ball radius.
pub fn holder_seminorm_probe(f: &dyn Fn(&[f64]) -> f64, dim: usize, beta: f64, res: usize) -> f64 {
    sup_probe(f, dim, res).0 + holder_quotient_probe(f, dim, beta, res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_covers_corners() {
        let pts: Vec<_> = grid_points(2, 3).collect();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], vec![0.0, 0.0]);
        assert_eq!(pts[8], vec![1.0, 1.0]);
        assert_eq!(pts[1], vec![0.0, 0.5]);
    }

    #[test]
    fn lipschitz_of_linear_map() {
        let q = holder_quotient_probe(&|z| 0.3 * z[0], 1, 1.0, 11);
        assert!((q - 0.3).abs() < 1e-12);
        let q2 = holder_quotient_probe(&|z| z[0] + z[1], 2, 1.0, 60);
        assert!((q2 - 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn sqrt_quotient_is_one() {
        let q = holder_quotient_probe(&|z| z[0].sqrt(), 1, 0.5, 101);
        assert!((q - 1.0).abs() < 1e-9);
        let (s, at) = sup_probe(&|z| z[0].sqrt(), 1, 101);
        assert_eq!(s, 1.0);
        assert_eq!(at, vec![1.0]);
    }
}
