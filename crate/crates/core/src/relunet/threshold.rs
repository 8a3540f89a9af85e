//! The threshold network `l̃` with unit-bounded parameters.

use super::network::{Layer, ReluNetwork};
use crate::{Error, Result};

/// Doubling count `k = ⌈-log2 δ⌉ + 1`.
pub fn threshold_k(delta: f64) -> usize {
    ((-delta.log2()).ceil() as i64 + 1).max(1) as usize
}

/// `l̃(t) = 2σ(2^k σ(2σ(t)-1)) - 2σ(2^k σ(2σ(t)-1) - 1) - 1` with every parameter in `[-1, 1]`.
///
/// Layout: two copies of `σ(t)`, two units `σ(a+b-1)`, `k` doubling layers with
/// all-ones 2x2 blocks, then `[σ(p), σ(p), σ(p-1), σ(p-1), 1]`.
/// Depth `k+3`, width 5, `20+4k` nonzeros.
pub fn build_threshold_net(delta: f64) -> Result<ReluNetwork<f64>> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::param(format!("threshold delta must lie in (0, 1/2], got {delta}")));
    }
    let k = threshold_k(delta);
    let mut layers = Vec::with_capacity(k + 4);
    layers.push(Layer { w: vec![vec![1.0], vec![1.0]], v: vec![0.0, 0.0] });
    layers.push(Layer { w: vec![vec![1.0, 1.0], vec![1.0, 1.0]], v: vec![1.0, 1.0] });
    for _ in 0..k {
        layers.push(Layer { w: vec![vec![1.0, 1.0], vec![1.0, 1.0]], v: vec![0.0, 0.0] });
    }
    layers.push(Layer {
        w: vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]],
        v: vec![0.0, 0.0, 1.0, 1.0, -1.0],
    });
    layers.push(Layer { w: vec![vec![1.0, 1.0, -1.0, -1.0, -1.0]], v: vec![] });
    ReluNetwork::new(1, layers)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_values() {
        assert_eq!(threshold_k(0.5), 2);
        assert_eq!(threshold_k(0.25), 3);
        assert_eq!(threshold_k(0.1), 5);
    }

    #[test]
    fn regions_and_bounds() {
        let net = build_threshold_net(0.25).unwrap();
        assert_eq!(net.forward(&[0.3]).unwrap(), -1.0);
        assert_eq!(net.forward(&[0.5 + 5.0 * 0.25 / 14.0]).unwrap(), 1.0);
        assert!(net.max_abs() <= 1.0);
        assert_eq!(net.depth(), 3 + 3);
        assert_eq!(net.width(), 5);
        assert_eq!(net.nnz(), 20 + 4 * 3);
        assert!(build_threshold_net(0.0).is_err());
        assert!(build_threshold_net(0.6).is_err());
    }
}
