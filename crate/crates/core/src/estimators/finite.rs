//! Finite classifier sets, exact ERM over them, and greedy covering numbers.

use crate::dist::Dataset;
use crate::funcspace::RealFn;
use crate::risk::{pointwise_loss, Loss};
use crate::scalar::sgn;
use rayon::prelude::*;
use std::sync::Arc;

/// `x ↦ sgn(2f(x) - 1)`.
#[derive(Clone)]
pub struct SignClassifier<F>(pub F);

impl<F: RealFn> RealFn for SignClassifier<F> {
    fn value(&self, x: &[f64]) -> f64 {
        sgn(2.0 * self.0.value(x) - 1.0)
    }
}

/// ±1-valued classifiers evaluated in a fixed order.
#[derive(Clone, Default)]
pub struct FiniteClassifierSet {
    pub members: Vec<Arc<dyn RealFn>>,
}

impl FiniteClassifierSet {
    pub fn new(members: Vec<Arc<dyn RealFn>>) -> Self {
        Self { members }
    }

    /// Sign classifiers `sgn(2f-1)` of the given functions.
    pub fn from_functions<F: RealFn + Clone + 'static>(fs: &[F]) -> Self {
        Self { members: fs.iter().map(|f| Arc::new(SignClassifier(f.clone())) as Arc<dyn RealFn>).collect() }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Summed empirical loss of every member, in member order.
pub fn empirical_losses(data: &Dataset, set: &FiniteClassifierSet, loss: Loss) -> Vec<f64> {
    set.members
        .par_iter()
        .map(|m| data.points.iter().map(|p| pointwise_loss(loss, p.y, m.value(&p.x))).sum::<f64>())
        .collect()
}

/// Lowest-index minimizer of the empirical loss.
pub fn erm_finite(data: &Dataset, set: &FiniteClassifierSet, loss: Loss) -> usize {
    argmin_lowest(&empirical_losses(data, set, loss))
}

pub fn argmin_lowest(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}

/// Size of a greedy `γ`-cover under the sup distance on `probe`. Each round takes the
/// first uncovered member and centres on the neighbour of it that covers most
/// uncovered members, lowest index on ties.
pub fn covering_number_estimate(members: &[Arc<dyn RealFn>], gamma: f64, probe: &[Vec<f64>]) -> usize {
    let n = members.len();
    if n == 0 {
        return 0;
    }
    let vals: Vec<Vec<f64>> = members.par_iter().map(|m| probe.iter().map(|x| m.value(x)).collect()).collect();
    let close: Vec<Vec<bool>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| vals[i].iter().zip(&vals[j]).all(|(a, b)| (a - b).abs() <= gamma))
                .collect()
        })
        .collect();
    let mut covered = vec![false; n];
    let mut centres = 0;
    while let Some(u) = covered.iter().position(|c| !c) {
        let mut best = (u, 0usize);
        for i in (0..n).filter(|&i| close[i][u]) {
            let gain = (0..n).filter(|&j| !covered[j] && close[i][j]).count();
            if gain > best.1 {
                best = (i, gain);
            }
        }
        for j in 0..n {
            if close[best.0][j] {
                covered[j] = true;
            }
        }
        centres += 1;
    }
    centres
}

/// Lowest-index hinge ERM over the thresholds `x_axis ↦ sgn(x_axis - j/2^bits)`,
/// `j = 0..=2^bits`. Returns `(j, mistakes)`.
pub fn threshold_erm(data: &Dataset, axis: usize, bits: u32) -> (usize, usize) {
    let steps = 1usize << bits;
    let mut pts: Vec<(f64, i8)> = data.points.iter().map(|p| (p.x[axis], p.y)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    // at j = 0 every point with x ≥ 0 is classified +1
    let mut below = 0usize;
    let mut mistakes: usize = pts.iter().filter(|p| p.1 < 0).count();
    let mut best = (0usize, mistakes);
    for j in 1..=steps {
        let theta = j as f64 / steps as f64;
        while below < pts.len() && pts[below].0 < theta {
            if pts[below].1 < 0 {
                mistakes -= 1;
            } else {
                mistakes += 1;
            }
            below += 1;
        }
        if mistakes < best.1 {
            best = (j, mistakes);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Sample;

    fn constant(c: f64) -> Arc<dyn RealFn> {
        Arc::new(move |_: &[f64]| c)
    }

    #[test]
    fn erm_picks_positive_constant() {
        let data = Dataset { d: 1, points: (0..5).map(|i| Sample { x: vec![i as f64 / 5.0], y: 1 }).collect(), seed: 0 };
        let set = FiniteClassifierSet::new(vec![constant(-1.0), constant(1.0), constant(1.0)]);
        assert_eq!(erm_finite(&data, &set, Loss::Hinge), 1);
    }

    #[test]
    fn threshold_erm_matches_scan() {
        let pts: Vec<Sample> = [(0.1, -1), (0.2, 1), (0.3, -1), (0.55, 1), (0.8, 1), (0.9, -1)]
            .iter()
            .map(|&(x, y)| Sample { x: vec![x], y })
            .collect();
        let data = Dataset { d: 1, points: pts, seed: 0 };
        let bits = 6;
        let steps = 1usize << bits;
        let set = FiniteClassifierSet::new(
            (0..=steps)
                .map(|j| {
                    let t = j as f64 / steps as f64;
                    Arc::new(move |x: &[f64]| sgn(x[0] - t)) as Arc<dyn RealFn>
                })
                .collect(),
        );
        let (j, m) = threshold_erm(&data, 0, bits);
        assert_eq!(j, erm_finite(&data, &set, Loss::Hinge));
        assert_eq!(m, 2);
    }

    #[test]
    fn greedy_cover_counts() {
        let probe = vec![vec![0.5]];
        assert_eq!(covering_number_estimate(&[constant(0.3)], 0.1, &probe), 1);
        assert_eq!(covering_number_estimate(&[constant(0.0), constant(0.3)], 0.1, &probe), 2);
        let consts: Vec<_> = (0..=100).map(|i| constant(i as f64 / 100.0)).collect();
        let c = covering_number_estimate(&consts, 0.1, &probe);
        assert!(c <= (1.0f64 / 0.2).ceil() as usize + 1, "{c}");
    }
}
