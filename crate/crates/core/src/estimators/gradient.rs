//! Minibatch subgradient descent on the empirical surrogate risk of a budgeted ReLU network.

use crate::dist::Dataset;
use crate::relunet::{budget_of, default_sup_resolution, Layer, NetworkBudget, ReluNetwork};
use crate::risk::{pointwise_loss, Loss};
use crate::util::{derive_seed, rng, Rng};
use crate::{Error, Result};
use rand::Rng as _;
use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub step_size: f64,
    /// Step at iteration `t` is `step_size / (1 + decay t)`, further scaled by backtracking.
    #[serde(default)]
    pub decay: f64,
    pub iterations: usize,
    pub batch_size: usize,
    pub restarts: usize,
    /// Clip to `B` and prune to `S` after each step; the result is projected either way.
    pub projection: bool,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { step_size: 0.1, decay: 0.0, iterations: 500, batch_size: 64, restarts: 4, projection: true, seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.restarts == 0 || self.batch_size == 0 || !(self.step_size > 0.0) || self.decay < 0.0 {
            return Err(Error::param("need iterations, restarts, batch size ≥ 1, a positive step and decay ≥ 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainReport {
    pub net: ReluNetwork<f64>,
    pub empirical_loss: f64,
    /// Full-batch loss after each accepted step of the winning restart.
    pub history: Vec<f64>,
    pub restart_losses: Vec<f64>,
    pub used_zero_net: bool,
}

fn check_budget(d: usize, b: &NetworkBudget) -> Result<()> {
    if b.g == 0 || b.n == 0 || !(b.b > 0.0) {
        return Err(Error::param(format!("infeasible budget G={} N={} B={}", b.g, b.n, b.b)));
    }
    if b.s < d {
        return Err(Error::param(format!("sparsity S={} below input dimension d={d}", b.s)));
    }
    Ok(())
}

pub fn empirical_loss(net: &ReluNetwork<f64>, data: &Dataset, loss: Loss) -> f64 {
    data.points.iter().map(|p| pointwise_loss(loss, p.y, net.eval(&p.x))).sum::<f64>() / data.len() as f64
}

fn dloss(loss: Loss, y: i8, f: f64) -> f64 {
    let y = y as f64;
    let m = y * f;
    match loss {
        Loss::Hinge => {
            if m < 1.0 {
                -y
            } else {
                0.0
            }
        }
        Loss::Logistic => -y / (1.0 + m.exp()),
        Loss::ZeroOne => 0.0,
    }
}

fn init(d: usize, b: &NetworkBudget, g: &mut Rng) -> ReluNetwork<f64> {
    let dense = d * b.n + (b.g - 1) * b.n * (b.n + 1) + b.n + b.n;
    if dense > b.s {
        return init_paths(d, b, g);
    }
    let mut layers = Vec::with_capacity(b.g + 1);
    let mut fan_in = d;
    for i in 0..=b.g {
        let rows = if i == b.g { 1 } else { b.n };
        let scale = (2.0 / fan_in as f64).sqrt().min(b.b);
        let w = (0..rows).map(|_| (0..fan_in).map(|_| scale * (2.0 * g.random::<f64>() - 1.0)).collect()).collect();
        let v = if i == b.g { Vec::new() } else { (0..rows).map(|_| 0.1 * (2.0 * g.random::<f64>() - 1.0)).collect() };
        layers.push(Layer { w, v });
        fan_in = rows;
    }
    ReluNetwork { layers, input_dim: d }
}

/// Disjoint input-to-output chains: a random first layer, unit identities in between,
/// and a random output weight, as many as `S` allows (at least one).
fn init_paths(d: usize, b: &NetworkBudget, g: &mut Rng) -> ReluNetwork<f64> {
    let per_path = d + 1 + (b.g - 1) + 1;
    let paths = (b.s / per_path).clamp(1, b.n);
    let mut layers = Vec::with_capacity(b.g + 1);
    let mut fan_in = d;
    for i in 0..=b.g {
        let rows = if i == b.g { 1 } else { b.n };
        let mut w = vec![vec![0.0; fan_in]; rows];
        let mut v = if i == b.g { Vec::new() } else { vec![0.0; rows] };
        for p in 0..paths {
            if i == 0 {
                for x in w[p].iter_mut() {
                    *x = b.b.min(1.0) * (2.0 * g.random::<f64>() - 1.0);
                }
                v[p] = 0.5 * w[p].iter().sum::<f64>() + 0.1 * (2.0 * g.random::<f64>() - 1.0);
                v[p] = v[p].clamp(-b.b, b.b);
            } else if i < b.g {
                w[p][p] = b.b.min(1.0);
            } else {
                w[0][p] = b.b.min(1.0) * if g.random::<bool>() { 1.0 } else { -1.0 };
            }
        }
        layers.push(Layer { w, v });
        fan_in = rows;
    }
    ReluNetwork { layers, input_dim: d }
}

/// Clip every parameter to `[-B, B]` and keep the `S` largest magnitudes (lowest position on ties).
pub fn project(net: &mut ReluNetwork<f64>, b: &NetworkBudget) {
    let mut mags: Vec<(f64, usize)> = Vec::new();
    let mut pos = 0;
    for l in net.layers.iter_mut() {
        for x in l.w.iter_mut().flatten().chain(l.v.iter_mut()) {
            *x = x.clamp(-b.b, b.b);
            if *x != 0.0 {
                mags.push((x.abs(), pos));
            }
            pos += 1;
        }
    }
    if mags.len() <= b.s {
        return;
    }
    mags.sort_by(|a, c| c.0.total_cmp(&a.0).then(a.1.cmp(&c.1)));
    let mut keep = vec![false; pos];
    for &(_, p) in mags.iter().take(b.s) {
        keep[p] = true;
    }
    let mut pos = 0;
    for l in net.layers.iter_mut() {
        for x in l.w.iter_mut().flatten().chain(l.v.iter_mut()) {
            if !keep[pos] {
                *x = 0.0;
            }
            pos += 1;
        }
    }
}

/// Accumulates the subgradient of `Σ loss(y f(x))` over `batch` into `grad` (same shape as the net).
fn accumulate(net: &ReluNetwork<f64>, data: &Dataset, batch: &[usize], loss: Loss, grad: &mut ReluNetwork<f64>) {
    let nl = net.layers.len();
    let mut acts: Vec<Vec<f64>> = Vec::with_capacity(nl);
    for &i in batch {
        let p = &data.points[i];
        acts.clear();
        acts.push(p.x.clone());
        for (li, l) in net.layers.iter().enumerate() {
            let h = &acts[li];
            let mut z: Vec<f64> = l.w.iter().map(|row| row.iter().zip(h).map(|(a, b)| a * b).sum()).collect();
            if li + 1 < nl {
                for (zj, vj) in z.iter_mut().zip(&l.v) {
                    *zj = (*zj - vj).max(0.0);
                }
            }
            acts.push(z);
        }
        let f = acts[nl][0];
        let mut delta = vec![dloss(loss, p.y, f)];
        if delta[0] == 0.0 {
            continue;
        }
        for li in (0..nl).rev() {
            let l = &net.layers[li];
            let h = &acts[li];
            let gl = &mut grad.layers[li];
            for (r, &dr) in delta.iter().enumerate() {
                if dr == 0.0 {
                    continue;
                }
                for (c, &hc) in h.iter().enumerate() {
                    gl.w[r][c] += dr * hc;
                }
                if li + 1 < nl {
                    gl.v[r] -= dr;
                }
            }
            if li == 0 {
                break;
            }
            let below = &acts[li];
            let mut next = vec![0.0; below.len()];
            for (r, &dr) in delta.iter().enumerate() {
                if dr == 0.0 {
                    continue;
                }
                for (c, nc) in next.iter_mut().enumerate() {
                    *nc += l.w[r][c] * dr;
                }
            }
            for (nc, &a) in next.iter_mut().zip(below) {
                if a <= 0.0 {
                    *nc = 0.0;
                }
            }
            delta = next;
        }
    }
}

fn zeros_like(net: &ReluNetwork<f64>) -> ReluNetwork<f64> {
    let mut g = net.clone();
    for l in g.layers.iter_mut() {
        l.w.iter_mut().flatten().for_each(|x| *x = 0.0);
        l.v.iter_mut().for_each(|x| *x = 0.0);
    }
    g
}

fn train_once(data: &Dataset, budget: &NetworkBudget, loss: Loss, cfg: &TrainConfig, seed: u64) -> (ReluNetwork<f64>, f64, Vec<f64>) {
    let mut g = rng(seed);
    let mut net = init(data.d, budget, &mut g);
    project(&mut net, budget);
    let mut cur = empirical_loss(&net, data, loss);
    // orientation of the first layer and sign of the output, whichever fits best
    let base = net.clone();
    for mask in 1..4u8 {
        let mut cand = base.clone();
        if mask & 1 == 1 {
            cand.layers[0].w.iter_mut().flatten().for_each(|x| *x = -*x);
            cand.layers[0].v.iter_mut().for_each(|x| *x = -*x);
        }
        if mask & 2 == 2 {
            if let Some(last) = cand.layers.last_mut() {
                last.w.iter_mut().flatten().for_each(|x| *x = -*x);
            }
        }
        let l = empirical_loss(&cand, data, loss);
        if l < cur {
            net = cand;
            cur = l;
        }
    }
    let mut history = vec![cur];
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut cursor = order.len();
    let mut backtrack = 1.0;
    let bs = cfg.batch_size.min(data.len());
    for t in 0..cfg.iterations {
        if cursor + bs > order.len() {
            order.shuffle(&mut g);
            cursor = 0;
        }
        let batch = &order[cursor..cursor + bs];
        cursor += bs;
        let mut grad = zeros_like(&net);
        accumulate(&net, data, batch, loss, &mut grad);
        let lr = cfg.step_size / (1.0 + cfg.decay * t as f64) * backtrack / bs as f64;
        let mut cand = net.clone();
        for (cl, gl) in cand.layers.iter_mut().zip(&grad.layers) {
            for (x, dx) in cl.w.iter_mut().flatten().zip(gl.w.iter().flatten()) {
                *x -= lr * dx;
            }
            for (x, dx) in cl.v.iter_mut().zip(&gl.v) {
                *x -= lr * dx;
            }
        }
        if cfg.projection {
            project(&mut cand, budget);
        }
        let l = empirical_loss(&cand, data, loss);
        if l <= cur {
            net = cand;
            cur = l;
            history.push(cur);
            backtrack = (backtrack * 1.25).min(1.0);
            if cur == 0.0 {
                break;
            }
        } else {
            backtrack *= 0.5;
            if backtrack < 1e-6 {
                backtrack = 1.0;
            }
        }
    }
    if !cfg.projection {
        project(&mut net, budget);
        cur = empirical_loss(&net, data, loss);
        history.push(cur);
    }
    if let Some((cand, l)) = rescale_output(&net, data, loss, budget).filter(|c| c.1 < cur) {
        net = cand;
        cur = l;
        history.push(cur);
    }
    (net, cur, history)
}

/// When every sample is classified correctly, stretch the output map so the smallest
/// margin reaches 1, as far as the magnitude cap allows.
fn rescale_output(net: &ReluNetwork<f64>, data: &Dataset, loss: Loss, budget: &NetworkBudget) -> Option<(ReluNetwork<f64>, f64)> {
    let min_margin = data.points.iter().map(|p| p.y as f64 * net.eval(&p.x)).fold(f64::INFINITY, f64::min);
    if !(min_margin > 0.0 && min_margin < 1.0) {
        return None;
    }
    let last = net.layers.last()?;
    let top = last.w.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    let c = (1.0 / min_margin).min(budget.b / top);
    if !(c > 1.0) {
        return None;
    }
    let mut out = net.clone();
    out.layers.last_mut()?.w.iter_mut().flatten().for_each(|x| *x *= c);
    project(&mut out, budget);
    let l = empirical_loss(&out, data, loss);
    Some((out, l))
}

/// Best of `cfg.restarts` runs and the zero network, by empirical loss then restart index.
pub fn erm_gradient(data: &Dataset, budget: &NetworkBudget, loss: Loss, cfg: &TrainConfig) -> Result<TrainReport> {
    if data.is_empty() {
        return Err(Error::param("empty dataset"));
    }
    if loss == Loss::ZeroOne {
        return Err(Error::param("the 0-1 loss has no useful subgradient"));
    }
    cfg.validate()?;
    check_budget(data.d, budget)?;
    let runs: Vec<(ReluNetwork<f64>, f64, Vec<f64>)> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| train_once(data, budget, loss, cfg, derive_seed(cfg.seed, &[r as u64])))
        .collect();
    let restart_losses: Vec<f64> = runs.iter().map(|r| r.1).collect();
    let best = (0..runs.len()).fold(0, |b, i| if runs[i].1 < runs[b].1 { i } else { b });
    let zero = ReluNetwork::zero(data.d);
    let zero_loss = empirical_loss(&zero, data, loss);
    let (mut net, mut emp, history, used_zero_net) = if zero_loss < runs[best].1 {
        (zero, zero_loss, vec![zero_loss], true)
    } else {
        let (n, l, h) = runs.into_iter().nth(best).expect("restarts ≥ 1");
        (n, l, h, false)
    };
    if let Some(fcap) = budget.f {
        let sup = budget_of(&net, default_sup_resolution(data.d)).sup_estimate;
        if sup > fcap {
            let last = net.layers.last_mut().expect("output layer");
            last.w.iter_mut().flatten().for_each(|x| *x *= fcap / sup);
            emp = empirical_loss(&net, data, loss);
        }
    }
    Ok(TrainReport { net, empirical_loss: emp, history, restart_losses, used_zero_net })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Sample;

    fn data_1d(f: impl Fn(f64) -> i8, n: usize) -> Dataset {
        Dataset { d: 1, points: (0..n).map(|i| {
            let x = (i as f64 + 0.5) / n as f64;
            Sample { x: vec![x], y: f(x) }
        }).collect(), seed: 0 }
    }

    #[test]
    fn all_positive_reaches_zero() {
        let data = data_1d(|_| 1, 32);
        let b = NetworkBudget::new(2, 4, 20, 1.0, None).unwrap();
        let rep = erm_gradient(&data, &b, Loss::Hinge, &TrainConfig { iterations: 400, ..Default::default() }).unwrap();
        assert_eq!(rep.empirical_loss, 0.0);
    }

    #[test]
    fn separable_reaches_zero() {
        let data = Dataset {
            d: 1,
            points: (0..40).map(|i| {
                let x = (i as f64 + 0.5) / 40.0;
                Sample { x: vec![x], y: if x > 0.5 { 1 } else { -1 } }
            }).filter(|s| (s.x[0] - 0.5).abs() > 0.1).collect(),
            seed: 0,
        };
        let b = NetworkBudget::new(2, 8, 64, 20.0, None).unwrap();
        let cfg = TrainConfig { iterations: 3000, step_size: 0.5, batch_size: 32, restarts: 4, ..Default::default() };
        let rep = erm_gradient(&data, &b, Loss::Hinge, &cfg).unwrap();
        assert_eq!(rep.empirical_loss, 0.0);
    }

    #[test]
    fn history_monotone_and_budget_respected() {
        let data = data_1d(|x| if (x * 7.0).sin() > 0.0 { 1 } else { -1 }, 64);
        let b = NetworkBudget::new(3, 6, 30, 1.0, None).unwrap();
        let rep = erm_gradient(&data, &b, Loss::Hinge, &TrainConfig { iterations: 200, ..Default::default() }).unwrap();
        assert!(rep.history.windows(2).all(|w| w[1] <= w[0]));
        assert!(budget_of(&rep.net, 257).within(&b));
        let zero = empirical_loss(&ReluNetwork::zero(1), &data, Loss::Hinge);
        assert!(rep.empirical_loss <= zero);
    }

    #[test]
    fn infeasible_budget() {
        let data = Dataset { d: 3, points: vec![Sample { x: vec![0.1, 0.2, 0.3], y: 1 }], seed: 0 };
        let b = NetworkBudget::new(2, 4, 2, 1.0, None).unwrap();
        assert!(matches!(erm_gradient(&data, &b, Loss::Hinge, &TrainConfig::default()), Err(Error::Parameter(_))));
    }
}
