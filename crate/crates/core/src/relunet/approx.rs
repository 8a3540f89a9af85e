//! Constructive ReLU approximation of compositional functions by
//! piecewise-linear interpolation on the Kuhn triangulation.

use super::builder::{max_groups, Form, NetBuilder};
use super::network::ReluNetwork;
use super::threshold::build_threshold_net;
use crate::funcspace::{grid_points, Component, CompositionalFunction, Core};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ApproxConfig {
    /// Largest admissible node count `(m+1)^{d*}` per component.
    pub max_nodes: usize,
    /// Fraction of the tolerance spent on per-component targets.
    pub safety: f64,
    /// Cap on total points of the final validation grid.
    pub validation_points: usize,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        Self { max_nodes: 1 << 14, safety: 0.8, validation_points: 200_000 }
    }
}

#[derive(Debug, Clone)]
pub struct Approximation {
    pub net: ReluNetwork<f64>,
    /// Grid-measured sup error against the target.
    pub sup_error: f64,
    /// Interval counts per component, `0` for max components.
    pub intervals: Vec<Vec<usize>>,
}

/// Interpolant of node values `values` (row-major on `(m+1)^k` nodes) on the
/// Kuhn triangulation of the uniform grid with `m` intervals per axis.
pub fn kuhn_interp(values: &[f64], m: usize, z: &[f64]) -> f64 {
    let k = z.len();
    let n = m + 1;
    let mut base = vec![0usize; k];
    let mut frac = vec![(0.0f64, 0usize); k];
    for a in 0..k {
        let p = z[a].clamp(0.0, 1.0) * m as f64;
        let i = (p.floor() as usize).min(m - 1);
        base[a] = i;
        frac[a] = (p - i as f64, a);
    }
    frac.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal).then(x.1.cmp(&y.1)));
    let flat = |idx: &[usize]| idx.iter().fold(0usize, |acc, &i| acc * n + i);
    let mut idx = base.clone();
    let mut acc = (1.0 - frac.first().map_or(0.0, |f| f.0)) * values[flat(&idx)];
    for j in 0..k {
        idx[frac[j].1] += 1;
        let next = if j + 1 < k { frac[j + 1].0 } else { 0.0 };
        acc += (frac[j].0 - next) * values[flat(&idx)];
    }
    acc
}

fn node_values(core: &Core, k: usize, m: usize) -> Vec<f64> {
    let n = m + 1;
    let total = n.pow(k as u32);
    let mut z = vec![0.0; k];
    (0..total)
        .map(|mut flat| {
            for a in (0..k).rev() {
                z[a] = (flat % n) as f64 / m as f64;
                flat /= n;
            }
            core.eval(&z)
        })
        .collect()
}

fn interp_error(core: &Core, values: &[f64], k: usize, m: usize) -> f64 {
    let mut per_axis = 4 * m + 1;
    while per_axis > m + 1 && (per_axis as f64).powi(k as i32) > 2e5 {
        per_axis -= 1;
    }
    grid_points(k, per_axis)
        .map(|z| (core.eval(&z) - kuhn_interp(values, m, &z)).abs())
        .fold(0.0, f64::max)
}

fn next_m(m: usize) -> usize {
    if m < 16 { m + 1 } else { (m as f64 * 1.2).ceil() as usize }
}

/// Smallest scanned interval count whose interpolation error is at most `tol`.
pub fn choose_intervals(core: &Core, k: usize, tol: f64, max_nodes: usize) -> Result<(usize, Vec<f64>, f64)> {
    let mut m: usize = 1;
    let mut last = f64::INFINITY;
    loop {
        if (m + 1).checked_pow(k as u32).is_none_or(|c| c > max_nodes) {
            return Err(Error::Resolution { achieved: last, target: tol });
        }
        let values = node_values(core, k, m);
        let err = interp_error(core, &values, k, m);
        if err <= tol {
            return Ok((m, values, err));
        }
        last = err;
        m = next_m(m);
    }
}

/// Network computing the Kuhn interpolant of `values` on the coordinates `active`
/// (1-based) of an input of dimension `input_dim`. Depth `2 + ⌈log2 k⌉`.
pub fn interpolant_net(input_dim: usize, active: &[usize], m: usize, values: &[f64]) -> ReluNetwork<f64> {
    let k = active.len();
    let n = m + 1;
    let mut hats = Vec::new();
    let mut coefs = Vec::new();
    for (flat, &val) in values.iter().enumerate() {
        if val == 0.0 {
            continue;
        }
        let mut node = vec![0usize; k];
        let mut rem = flat;
        for a in (0..k).rev() {
            node[a] = rem % n;
            rem /= n;
        }
        let mut b = NetBuilder::new(input_dim);
        let mut units = Vec::with_capacity(2 * k);
        for a in 0..k {
            let u = Form { terms: vec![(active[a] - 1, m as f64)], c: -(node[a] as f64) };
            units.push(u.clone());
            units.push(u.scaled(-1.0));
        }
        let refs = b.push_layer(units);
        let pos: Vec<Form> = (0..k).map(|a| refs[2 * a].clone()).collect();
        let neg: Vec<Form> = (0..k).map(|a| refs[2 * a + 1].clone()).collect();
        let mx = max_groups(&mut b, vec![pos, neg]);
        let phi = b.push_layer(vec![Form::constant(1.0).minus(&mx[0]).minus(&mx[1])]);
        hats.push(b.finish(&phi));
        coefs.push(val);
    }
    if hats.is_empty() {
        return ReluNetwork::zero(input_dim);
    }
    let stacked = ReluNetwork::parallel(&hats).expect("same input");
    ReluNetwork::linear(vec![coefs], hats.len()).compose(&stacked).expect("dims match")
}

/// Exact `max` of nonnegative coordinates.
pub fn max_net(input_dim: usize, active: &[usize]) -> ReluNetwork<f64> {
    if active.len() == 1 {
        return ReluNetwork::select(input_dim, active);
    }
    let mut b = NetBuilder::new(input_dim);
    let first = b.push_layer(active.iter().map(|&i| Form::unit(i - 1)).collect());
    let m = max_groups(&mut b, vec![first]);
    b.finish(&m)
}

/// `y ↦ σ(y) - σ(y-1)`, the clamp to `[0,1]`.
pub fn clamp_net() -> ReluNetwork<f64> {
    let mut b = NetBuilder::new(1);
    let r = b.push_layer(vec![Form::unit(0), Form::unit(0).shifted(-1.0)]);
    b.finish(&[r[0].minus(&r[1])])
}

fn layer_tolerances(f: &CompositionalFunction, total: f64) -> Vec<f64> {
    let q = f.q;
    let expo = f.beta.min(1.0);
    let lip = f.radius.max(1.0) * (f.d_lower.max(1) as f64).sqrt().powf(expo);
    let mut tol = vec![0.0; q + 1];
    let mut rem = total;
    for i in (0..=q).rev() {
        if i == 0 {
            tol[0] = rem;
        } else {
            tol[i] = rem / 2.0;
            rem = (rem / (2.0 * lip)).powf(1.0 / expo);
        }
    }
    tol
}

fn validation_resolution(d: usize, cap: usize) -> usize {
    let mut r = if d == 1 { 4097 } else { 513 };
    while r > 2 && (r as f64).powi(d as i32) > cap as f64 {
        r -= 1;
    }
    r
}

/// `g̃` with grid-checked sup error at most `δ/7`, plus the knot choices.
pub fn approximate_chom_with(f: &CompositionalFunction, delta: f64, cfg: &ApproxConfig) -> Result<Approximation> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::param(format!("delta must lie in (0, 1/2], got {delta}")));
    }
    f.check_structure()?;
    let target = delta / 7.0;
    let tols = layer_tolerances(f, cfg.safety * target);
    let mut net: Option<ReluNetwork<f64>> = None;
    let mut intervals = Vec::with_capacity(f.q + 1);
    for (i, layer) in f.layers.iter().enumerate() {
        let din = f.layer_input_dim(i);
        let mut comps = Vec::with_capacity(layer.len());
        let mut ints = Vec::with_capacity(layer.len());
        for c in layer {
            let mut cn = match c {
                Component::Holder(h) => {
                    let k = h.active_indices.len();
                    let (m, values, _) = choose_intervals(&h.core, k, tols[i], cfg.max_nodes)?;
                    ints.push(m);
                    interpolant_net(din, &h.active_indices, m, &values)
                }
                Component::Max(mc) => {
                    ints.push(0);
                    max_net(din, &mc.active_indices)
                }
            };
            if i < f.q {
                cn = clamp_net().compose(&cn)?;
            }
            comps.push(cn);
        }
        let layer_net = ReluNetwork::parallel(&comps)?;
        net = Some(match net {
            None => layer_net,
            Some(prev) => layer_net.compose(&prev)?,
        });
        intervals.push(ints);
    }
    let net = net.expect("at least one layer");
    let res = validation_resolution(f.d, cfg.validation_points);
    let sup_error = grid_points(f.d, res)
        .map(|x| (net.eval(&x) - f.eval_clamped(&x)).abs())
        .fold(0.0, f64::max);
    if sup_error > target {
        return Err(Error::Resolution { achieved: sup_error, target });
    }
    Ok(Approximation { net, sup_error, intervals })
}

pub fn approximate_chom(f: &CompositionalFunction, delta: f64) -> Result<ReluNetwork<f64>> {
    Ok(approximate_chom_with(f, delta, &ApproxConfig::default())?.net)
}

/// `η̃ = l̃ ∘ g̃`, with the sign regions `2f-1 > δ ⇒ +1` and `2f-1 < -δ ⇒ -1`
/// checked on the validation grid.
pub fn build_classifier_net(f: &CompositionalFunction, delta: f64) -> Result<ReluNetwork<f64>> {
    let cfg = ApproxConfig::default();
    let g = approximate_chom_with(f, delta, &cfg)?.net;
    let thr = build_threshold_net(delta)?;
    let net = thr.compose(&g)?;
    let res = validation_resolution(f.d, cfg.validation_points);
    for x in grid_points(f.d, res) {
        let m = 2.0 * f.eval_clamped(&x) - 1.0;
        let out = net.eval(&x);
        if (m > delta && out != 1.0) || (m < -delta && out != -1.0) {
            return Err(Error::Resolution { achieved: out, target: if m > 0.0 { 1.0 } else { -1.0 } });
        }
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuhn_reproduces_affine_functions() {
        let m = 3;
        let core = Core::custom("affine", |z: &[f64]| 0.2 + 0.3 * z[0] - 0.1 * z[1] + 0.05 * z[2]);
        let vals = node_values(&core, 3, m);
        for z in [[0.1, 0.5, 0.9], [0.33, 0.66, 0.01], [1.0, 1.0, 0.0]] {
            assert!((kuhn_interp(&vals, m, &z) - core.eval(&z)).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolant_net_matches_kuhn() {
        let m = 4;
        let core = Core::custom("bowl", |z: &[f64]| z[0] * z[0] + 0.5 * z[1] * z[0]);
        let vals = node_values(&core, 2, m);
        let net = interpolant_net(3, &[3, 1], m, &vals);
        assert_eq!(net.depth(), 3);
        for x in grid_points(3, 7) {
            let z = [x[2], x[0]];
            assert!((net.eval(&x) - kuhn_interp(&vals, m, &z)).abs() < 1e-12);
        }
    }

    #[test]
    fn clamp_and_max() {
        let c = clamp_net();
        for (y, want) in [(-0.5, 0.0), (0.3, 0.3), (1.7, 1.0)] {
            assert!((c.eval(&[y]) - want).abs() < 1e-15);
        }
        let mx = max_net(3, &[1, 3]);
        assert_eq!(mx.eval(&[0.2, 0.9, 0.4]), 0.4);
    }
}
