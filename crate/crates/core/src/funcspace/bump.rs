//! Compactly supported plateau bumps and their grid sums.

use serde::{Deserialize, Serialize};

/// Radial bump on `R^dim` in the sup norm: 1 on the inner cube, 0 outside the outer one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub dim: usize,
    pub inner_radius: f64,
    pub outer_radius: f64,
    pub beta: f64,
}

impl BumpSpec {
    pub fn new(dim: usize, inner_radius: f64, outer_radius: f64, beta: f64) -> crate::Result<Self> {
        if dim == 0 {
            return Err(crate::Error::param("bump dimension must be positive"));
        }
        if !(0.0 < inner_radius && inner_radius < outer_radius && outer_radius <= 0.5) {
            return Err(crate::Error::param(format!(
                "bump radii need 0 < inner < outer <= 1/2, got {inner_radius}, {outer_radius}"
            )));
        }
        if !(beta > 0.0) {
            return Err(crate::Error::param("beta must be positive"));
        }
        Ok(Self { dim, inner_radius, outer_radius, beta })
    }

    /// Radii used by the lower-bound constructions; the transition band shrinks
    /// with `d*` when `s = 0`.
    pub fn family(dim: usize, s: f64, beta: f64) -> Self {
        let shrink = 1.0 + if s == 0.0 { dim as f64 } else { 0.0 };
        Self {
            dim,
            inner_radius: 0.5 - (1.0 / 3.0) / shrink,
            outer_radius: 0.5 - 0.25 / shrink,
            beta,
        }
    }

    /// Smoothstep order `N`; the profile is a degree `2N+1` polynomial of class `C^N`.
    pub fn order(&self) -> usize {
        smoothstep_order(self.beta)
    }

    pub fn degree(&self) -> usize {
        2 * self.order() + 1
    }

    /// Lipschitz constant of the bump with respect to the sup norm (and hence
    /// the Euclidean norm).
    pub fn lipschitz(&self) -> f64 {
        smoothstep_max_slope(self.order()) / (self.outer_radius - self.inner_radius)
    }

    /// Upper estimate of the Hoelder norm: sup norm plus the order-`1 ∧ β`
    /// seminorm bound `L^{1∧β}`. Exact as a bound for `β ≤ 1`.
    pub fn norm_estimate(&self) -> f64 {
        1.0 + self.lipschitz().powf(self.beta.min(1.0))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let r = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        self.eval_radius(r)
    }

    pub fn eval_radius(&self, r: f64) -> f64 {
        if r <= self.inner_radius {
            1.0
        } else if r >= self.outer_radius {
            0.0
        } else {
            let t = (r - self.inner_radius) / (self.outer_radius - self.inner_radius);
            1.0 - smoothstep(self.order(), t)
        }
    }
}

pub fn smoothstep_order(beta: f64) -> usize {
    let k = (beta - 1.0).ceil();
    if k.is_finite() && k > 1.0 {
        k as usize
    } else {
        1
    }
}

/// Generalized smoothstep `S_N` on `[0,1]`, clamped outside.
pub fn smoothstep(order: usize, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let n = order as i64;
    let mut acc = 0.0;
    for k in 0..=n {
        let c = binom((n + k) as u64, k as u64) * binom((2 * n + 1) as u64, (n - k) as u64);
        acc += c * (-t).powi(k as i32);
    }
    acc * t.powi((n + 1) as i32)
}

/// Maximum slope of `S_N`, attained at `t = 1/2`.
pub fn smoothstep_max_slope(order: usize) -> f64 {
    // (2N+1)! / (N!^2 4^N)
    let n = order as u64;
    let mut v = 1.0;
    for i in (n + 1)..=(2 * n + 1) {
        v *= i as f64;
    }
    for i in 1..=n {
        v /= i as f64;
    }
    v / 4f64.powi(order as i32)
}

fn binom(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut v = 1.0;
    for i in 0..k {
        v = v * (n - i) as f64 / (i + 1) as f64;
    }
    v
}

/// Binary code on the grid `G_{Q,d}` of cell centres `(2i+1)/(2Q)`, stored row-major
/// with the first coordinate slowest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridCode {
    pub q: usize,
    pub dim: usize,
    /// Flat indices of cells whose bit is 1.
    pub ones: Vec<usize>,
}

impl GridCode {
    pub fn zeros(q: usize, dim: usize) -> Self {
        Self { q, dim, ones: Vec::new() }
    }

    pub fn from_bits(q: usize, dim: usize, bits: &[bool]) -> Self {
        let ones = bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i).collect();
        Self { q, dim, ones }
    }

    pub fn cell_count(&self) -> usize {
        self.q.pow(self.dim as u32)
    }

    pub fn bit(&self, flat: usize) -> bool {
        self.ones.binary_search(&flat).is_ok()
    }

    pub fn normalize(&mut self) {
        self.ones.sort_unstable();
        self.ones.dedup();
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.q + i)
    }

    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for k in (0..self.dim).rev() {
            out[k] = flat % self.q;
            flat /= self.q;
        }
        out
    }

    pub fn centre(&self, flat: usize) -> Vec<f64> {
        self.multi_index(flat)
            .into_iter()
            .map(|i| (2 * i + 1) as f64 / (2 * self.q) as f64)
            .collect()
    }
}

/// `Σ_a (amplitude / Q^β) T(a) u(Q(x − a))`. Supports are disjoint, so only the
/// cell containing `x` is inspected.
pub fn bump_grid_sum(code: &GridCode, amplitude: f64, beta: f64, spec: &BumpSpec, x: &[f64]) -> f64 {
    let q = code.q;
    let qf = q as f64;
    let mut idx = Vec::with_capacity(code.dim);
    let mut local = Vec::with_capacity(code.dim);
    for &xi in x.iter().take(code.dim) {
        let i = (xi * qf).floor().clamp(0.0, (q - 1) as f64) as usize;
        let a = (2 * i + 1) as f64 / (2.0 * qf);
        idx.push(i);
        local.push(qf * (xi - a));
    }
    let flat = code.flat_index(&idx);
    if !code.bit(flat) {
        return 0.0;
    }
    amplitude / qf.powf(beta) * spec.eval(&local)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smoothstep_endpoints_and_symmetry() {
        for n in 1..5 {
            assert_eq!(smoothstep(n, 0.0), 0.0);
            assert!((smoothstep(n, 1.0) - 1.0).abs() < 1e-12);
            assert!((smoothstep(n, 0.5) - 0.5).abs() < 1e-12);
            let t = 0.3;
            assert!((smoothstep(n, t) + smoothstep(n, 1.0 - t) - 1.0).abs() < 1e-12);
        }
        // cubic
        assert!((smoothstep(1, 0.25) - (3.0 * 0.0625 - 2.0 * 0.015625)).abs() < 1e-15);
    }

    #[test]
    fn max_slope_matches_finite_difference() {
        for n in 1..5 {
            let h = 1e-6;
            let fd = (smoothstep(n, 0.5 + h) - smoothstep(n, 0.5 - h)) / (2.0 * h);
            assert!((fd - smoothstep_max_slope(n)).abs() < 1e-6);
        }
    }

    #[test]
    fn family_radii() {
        let b = BumpSpec::family(1, 0.0, 1.0);
        assert!((b.inner_radius - 1.0 / 3.0).abs() < 1e-15);
        assert!((b.outer_radius - 0.375).abs() < 1e-15);
        let b = BumpSpec::family(2, 1.0, 1.0);
        assert!((b.inner_radius - 1.0 / 6.0).abs() < 1e-15);
        assert!((b.outer_radius - 0.25).abs() < 1e-15);
    }

    #[test]
    fn grid_code_indexing() {
        let c = GridCode::from_bits(3, 2, &[false, true, false, false, false, false, false, false, true]);
        assert_eq!(c.ones, vec![1, 8]);
        assert_eq!(c.multi_index(5), vec![1, 2]);
        assert_eq!(c.flat_index(&[1, 2]), 5);
        assert_eq!(c.centre(8), vec![5.0 / 6.0, 5.0 / 6.0]);
    }
}
