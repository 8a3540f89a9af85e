//! Binary codes with large pairwise Hamming distance.

use crate::util::rng;
use crate::{Error, Result};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

/// Hard cap on the number of words a code may be asked to contain.
pub const VG_SIZE_CAP: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VgCode {
    pub m: usize,
    pub words: Vec<Vec<bool>>,
}

impl VgCode {
    pub fn min_distance(&self) -> usize {
        let packed: Vec<Vec<u64>> = self.words.iter().map(|w| pack(w)).collect();
        let mut best = usize::MAX;
        for i in 0..packed.len() {
            for j in i + 1..packed.len() {
                best = best.min(hamming(&packed[i], &packed[j]));
            }
        }
        best
    }

    /// Size at least `1 + 2^{m/8}` and pairwise distance at least `m/8`.
    pub fn certify(&self) -> bool {
        let need = 1.0 + 2f64.powf(self.m as f64 / 8.0);
        self.words.len() as f64 >= need && (self.words.len() < 2 || self.min_distance() as f64 >= self.m as f64 / 8.0)
    }
}

fn pack(w: &[bool]) -> Vec<u64> {
    let mut out = vec![0u64; w.len().div_ceil(64)];
    for (i, &b) in w.iter().enumerate() {
        if b {
            out[i / 64] |= 1 << (i % 64);
        }
    }
    out
}

fn hamming(a: &[u64], b: &[u64]) -> usize {
    a.iter().zip(b).map(|(x, y)| (x ^ y).count_ones() as usize).sum()
}

fn unpack(p: &[u64], m: usize) -> Vec<bool> {
    (0..m).map(|i| p[i / 64] >> (i % 64) & 1 == 1).collect()
}

/// Code on `m` symbols with the default size `1 + 2^{m/8}`.
pub fn vg_code(m: usize, seed: u64) -> Result<VgCode> {
    let need = (1.0 + 2f64.powf(m as f64 / 8.0)).ceil() as usize;
    vg_code_with_size(m, need, seed)
}

/// The full cube for `m ≤ 8`; otherwise a greedy random packing with minimum
/// distance `⌈m/8⌉` grown until it holds `min_size` words. The result is re-verified.
pub fn vg_code_with_size(m: usize, min_size: usize, seed: u64) -> Result<VgCode> {
    if m < 2 {
        return Err(Error::param("code length must exceed 1"));
    }
    if min_size > VG_SIZE_CAP {
        return Err(Error::Capacity { required: min_size.to_string(), cap: VG_SIZE_CAP });
    }
    if m <= 8 {
        let total = 1usize << m;
        if min_size > total {
            return Err(Error::Capacity { required: min_size.to_string(), cap: total });
        }
        let words = (0..total).map(|c| (0..m).map(|i| c >> i & 1 == 1).collect()).collect();
        return Ok(VgCode { m, words });
    }
    let dist = m.div_ceil(8);
    let words_len = m.div_ceil(64);
    let tail_mask = if m.is_multiple_of(64) { u64::MAX } else { (1u64 << (m % 64)) - 1 };
    for attempt in 0..8u64 {
        let mut r = rng(seed ^ attempt.wrapping_mul(0x9e37_79b9_7f4a_7c15));
        let mut code: Vec<Vec<u64>> = vec![vec![0u64; words_len]];
        let budget = 200 * min_size + 10_000;
        let mut tries = 0;
        while code.len() < min_size && tries < budget {
            tries += 1;
            let mut w: Vec<u64> = (0..words_len).map(|_| r.random::<u64>()).collect();
            if let Some(last) = w.last_mut() {
                *last &= tail_mask;
            }
            if code.iter().all(|c| hamming(c, &w) >= dist) {
                code.push(w);
            }
        }
        if code.len() >= min_size {
            let out = VgCode { m, words: code.iter().map(|p| unpack(p, m)).collect() };
            if out.min_distance() >= dist {
                return Ok(out);
            }
        }
    }
    Err(Error::Retry(format!("no code of size {min_size} with distance {dist} on {m} symbols")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_m_is_the_cube() {
        let c = vg_code(4, 0).unwrap();
        assert_eq!(c.words.len(), 16);
        assert_eq!(c.min_distance(), 1);
        assert!(c.certify());
    }

    #[test]
    fn m16_has_five_words() {
        let c = vg_code(16, 1).unwrap();
        assert!(c.words.len() >= 5);
        assert!(c.min_distance() >= 2);
        assert!(c.certify());
    }

    #[test]
    fn rejects_bad_requests() {
        assert!(vg_code(1, 0).is_err());
        assert!(matches!(vg_code_with_size(200, VG_SIZE_CAP + 1, 0), Err(Error::Capacity { .. })));
    }
}
