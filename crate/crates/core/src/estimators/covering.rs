//! Constructive covering nets of compositional Hoelder classes and exact ERM over them.

use super::finite::{erm_finite, FiniteClassifierSet};
use crate::dist::Dataset;
use crate::funcspace::{Component, CompositionalFunction, Core};
use crate::risk::Loss;
use crate::scalar::sgn;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_MEMBER_CAP: usize = 200_000;
const COUNT_VISIT_LIMIT: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoveringParams {
    pub q: usize,
    #[serde(rename = "K")]
    pub k: usize,
    /// Largest index subset of a max component.
    pub d_star: usize,
    /// Arity of Hoelder components.
    pub d_lower: usize,
    pub beta: f64,
    pub r: f64,
    pub d: usize,
}

impl CoveringParams {
    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.d_lower == 0 || self.d_lower > self.d || self.d_star == 0 || self.k == 0 {
            return Err(Error::param("need 1 ≤ d* ≤ d, d⋆ ≥ 1 and K ≥ 1"));
        }
        if self.q > 0 && (self.d_lower > self.k || self.d_star > self.k) {
            return Err(Error::param("inner layers have K inputs; need d*, d⋆ ≤ K"));
        }
        if !(self.beta > 0.0 && self.r > 0.0) {
            return Err(Error::param("β and r must be positive"));
        }
        Ok(())
    }
}

/// Level tables on a knot grid: `(m+1)^dim` nodes with values `lo + ℓΔ`, `ℓ < levels`,
/// and adjacent nodes differing by at most `jump` levels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub dim: usize,
    pub intervals: usize,
    pub levels: usize,
    pub lo: f64,
    pub hi: f64,
    pub jump: usize,
    pub beta: f64,
}

impl Lattice {
    /// Lattice whose tables `xi`-cover the Hoelder-type functions with values in
    /// `[0, hi]` and `|g(x)-g(y)| ≤ r|x-y|^{β∧1}`.
    pub fn for_radius(dim: usize, xi: f64, r: f64, beta: f64, hi: f64) -> Self {
        let b = beta.min(1.0);
        let h = (xi / (2.0 * r)).powf(1.0 / b) / (dim as f64).sqrt();
        let intervals = ((1.0 / h).ceil() as usize).max(1);
        let levels = if hi > 0.0 { (hi / (xi / 2.0)).ceil() as usize + 1 } else { 1 };
        let mut lat = Lattice { dim, intervals, levels, lo: 0.0, hi, jump: 0, beta };
        let delta = lat.delta();
        lat.jump = if delta > 0.0 { (r * lat.spacing().powf(b) / delta + 1.0).floor() as usize } else { 0 };
        lat.jump = lat.jump.min(levels.saturating_sub(1));
        lat
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn delta(&self) -> f64 {
        if self.levels > 1 { (self.hi - self.lo) / (self.levels - 1) as f64 } else { 0.0 }
    }

    pub fn value(&self, level: u16) -> f64 {
        self.lo + level as f64 * self.delta()
    }

    pub fn nodes(&self) -> usize {
        (self.intervals + 1).pow(self.dim as u32)
    }

    /// Hoelder radius that every table satisfies.
    pub fn member_radius(&self) -> f64 {
        let slope = self.jump as f64 * self.delta() / self.spacing().powf(self.beta.min(1.0));
        self.hi.max((self.dim as f64).sqrt() * slope) * (1.0 + 1e-9) + 1e-12
    }

    pub fn core(&self, table: &[u16]) -> Core {
        Core::Table { shape: vec![self.intervals + 1; self.dim], values: table.iter().map(|&l| self.value(l)).collect() }
    }

    /// Natural log of the number of tables, and whether it is exact.
    pub fn log_count(&self) -> (f64, bool) {
        if self.dim == 1 {
            let l = self.levels;
            let mut cur = vec![1.0f64; l];
            let mut log_scale = 0.0;
            for _ in 0..self.intervals {
                let mut next = vec![0.0; l];
                for (a, na) in next.iter_mut().enumerate() {
                    let lo = a.saturating_sub(self.jump);
                    let hi = (a + self.jump).min(l - 1);
                    *na = cur[lo..=hi].iter().sum();
                }
                let top = next.iter().cloned().fold(0.0, f64::max);
                log_scale += top.ln();
                cur = next.into_iter().map(|v| v / top).collect();
            }
            return (log_scale + cur.iter().sum::<f64>().ln(), true);
        }
        match self.count_tables(COUNT_VISIT_LIMIT) {
            Some(c) => ((c as f64).ln(), true),
            None => ((self.levels as f64).ln() + (self.nodes() - 1) as f64 * ((2 * self.jump + 1) as f64).ln(), false),
        }
    }

    fn neighbours_before(&self, node: usize) -> Vec<usize> {
        let n = self.intervals + 1;
        let mut out = Vec::with_capacity(self.dim);
        let mut stride = 1;
        let mut rem = node;
        for _ in 0..self.dim {
            if !rem.is_multiple_of(n) {
                out.push(node - stride);
            }
            rem /= n;
            stride *= n;
        }
        out
    }

    fn allowed(&self, table: &[u16], node: usize, nb: &[Vec<usize>]) -> (u16, u16) {
        let mut lo = 0i64;
        let mut hi = self.levels as i64 - 1;
        for &p in &nb[node] {
            lo = lo.max(table[p] as i64 - self.jump as i64);
            hi = hi.min(table[p] as i64 + self.jump as i64);
        }
        (lo as u16, hi as u16)
    }

    /// Number of tables, or `None` once `limit` is exceeded.
    pub fn count_tables(&self, limit: u64) -> Option<u64> {
        if self.dim == 1 {
            let l = self.levels;
            let mut cur = vec![1u128; l];
            for _ in 0..self.intervals {
                let mut next = vec![0u128; l];
                for (a, na) in next.iter_mut().enumerate() {
                    for v in &cur[a.saturating_sub(self.jump)..=(a + self.jump).min(l - 1)] {
                        *na = na.checked_add(*v)?;
                    }
                }
                cur = next;
            }
            let total = cur.iter().try_fold(0u128, |acc, v| acc.checked_add(*v))?;
            return u64::try_from(total).ok().filter(|&t| t <= limit);
        }
        let nodes = self.nodes();
        let nb: Vec<Vec<usize>> = (0..nodes).map(|i| self.neighbours_before(i)).collect();
        let mut table = vec![0u16; nodes];
        let mut count = 0u64;
        fn go(lat: &Lattice, i: usize, table: &mut [u16], nb: &[Vec<usize>], count: &mut u64, limit: u64) -> bool {
            if i == table.len() {
                *count += 1;
                return *count <= limit;
            }
            let (lo, hi) = lat.allowed(table, i, nb);
            for l in lo..=hi {
                table[i] = l;
                if !go(lat, i + 1, table, nb, count, limit) {
                    return false;
                }
            }
            true
        }
        go(self, 0, &mut table, &nb, &mut count, limit).then_some(count)
    }

    /// All tables in lexicographic order (node 0 most significant).
    pub fn tables(&self, cap: usize) -> Result<Vec<Vec<u16>>> {
        let nodes = self.nodes();
        let nb: Vec<Vec<usize>> = (0..nodes).map(|i| self.neighbours_before(i)).collect();
        let mut out = Vec::new();
        let mut table = vec![0u16; nodes];
        fn go(lat: &Lattice, i: usize, table: &mut [u16], nb: &[Vec<usize>], out: &mut Vec<Vec<u16>>, cap: usize) -> bool {
            if i == table.len() {
                out.push(table.to_vec());
                return out.len() <= cap;
            }
            let (lo, hi) = lat.allowed(table, i, nb);
            for l in lo..=hi {
                table[i] = l;
                if !go(lat, i + 1, table, nb, out, cap) {
                    return false;
                }
            }
            true
        }
        if !go(self, 0, &mut table, &nb, &mut out, cap) {
            let (lc, _) = self.log_count();
            return Err(Error::Capacity { required: format!("e^{lc:.2} tables"), cap });
        }
        Ok(out)
    }
}

/// 1-based `k`-subsets of `1..=n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut c: Vec<usize> = (1..=k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        while i > 0 && c[i - 1] == n - k + i {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        c[i - 1] += 1;
        for j in i..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Choices available to one component slot of a layer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerNet {
    pub input_dim: usize,
    pub outputs: usize,
    pub radius: f64,
    pub lattice: Lattice,
    pub holder_sets: Vec<Vec<usize>>,
    pub max_sets: Vec<Vec<usize>>,
    pub log_tables: f64,
}

impl LayerNet {
    /// `ln` of the number of options per slot.
    pub fn log_options(&self) -> f64 {
        let h = self.holder_sets.len() as f64;
        let m = self.max_sets.len() as f64;
        if h == 0.0 {
            return m.ln();
        }
        // ln(h e^t + m)
        let a = h.ln() + self.log_tables;
        if m == 0.0 {
            a
        } else {
            a.max(m.ln()) + (1.0 + (-(a - m.ln()).abs()).exp()).ln()
        }
    }
}

/// A covering net, stored implicitly; members are enumerated in a fixed order:
/// layer 0 slot 0 is the most significant digit, and within a slot the Hoelder
/// options (index set major, table lexicographic) precede the max options.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringNet {
    pub params: CoveringParams,
    pub xi: f64,
    pub layers: Vec<LayerNet>,
    pub log_count: f64,
    pub log_count_exact: bool,
}

/// Per-layer radii `ξ_0, …, ξ_q` whose propagated sum stays below `xi`.
pub fn layer_radii(xi: f64, q: usize, beta: f64, r: f64) -> Vec<f64> {
    let b = beta.min(1.0);
    let lip = r.max(1.0);
    let mut rem = vec![0.0; q + 1];
    rem[q] = xi;
    for i in (1..=q).rev() {
        rem[i - 1] = (rem[i] / (2.0 * lip)).powf(1.0 / b);
    }
    (0..=q).map(|i| if i == 0 { rem[0] } else { rem[i] / 2.0 }).collect()
}

pub fn build_covering_net(params: CoveringParams, xi: f64) -> Result<CoveringNet> {
    params.validate()?;
    if !(xi > 0.0 && xi <= 1.0) {
        return Err(Error::param(format!("ξ must lie in (0, 1], got {xi}")));
    }
    let radii = layer_radii(xi, params.q, params.beta, params.r);
    let hi = params.r.min(1.0);
    let mut layers = Vec::with_capacity(params.q + 1);
    let mut log_count = 0.0;
    let mut exact = true;
    for (i, &rad) in radii.iter().enumerate() {
        let din = if i == 0 { params.d } else { params.k };
        let outputs = if i == params.q { 1 } else { params.k };
        let lattice = Lattice::for_radius(params.d_lower, rad, params.r, params.beta, hi);
        let (log_tables, ex) = lattice.log_count();
        exact &= ex;
        let holder_sets = combinations(din, params.d_lower);
        let max_sets: Vec<Vec<usize>> = (1..=params.d_star.min(din)).flat_map(|k| combinations(din, k)).collect();
        let layer = LayerNet { input_dim: din, outputs, radius: rad, lattice, holder_sets, max_sets, log_tables };
        log_count += outputs as f64 * layer.log_options();
        layers.push(layer);
    }
    Ok(CoveringNet { params, xi, layers, log_count, log_count_exact: exact })
}

/// One slot choice.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SlotChoice {
    Holder { set: usize, table: Vec<u16> },
    Max { set: usize },
}

impl CoveringNet {
    pub fn member_radius(&self) -> f64 {
        self.layers.iter().map(|l| l.lattice.member_radius()).fold(self.params.r, f64::max)
    }

    /// Member count if it fits in `u128`.
    pub fn count(&self) -> Option<u128> {
        let mut total: u128 = 1;
        for l in &self.layers {
            let t = l.lattice.count_tables(COUNT_VISIT_LIMIT)? as u128;
            let opts = l.holder_sets.len() as u128 * t + l.max_sets.len() as u128;
            for _ in 0..l.outputs {
                total = total.checked_mul(opts)?;
            }
        }
        Some(total)
    }

    /// The member assembled from per-slot choices, in layer-then-slot order.
    pub fn member(&self, choices: &[SlotChoice]) -> Result<CompositionalFunction> {
        let p = &self.params;
        let radius = self.member_radius();
        let mut it = choices.iter();
        let mut layers = Vec::with_capacity(self.layers.len());
        for l in &self.layers {
            let mut comps = Vec::with_capacity(l.outputs);
            for _ in 0..l.outputs {
                let c = it.next().ok_or_else(|| Error::param("too few slot choices"))?;
                comps.push(match c {
                    SlotChoice::Holder { set, table } => Component::holder(
                        l.input_dim,
                        l.holder_sets.get(*set).ok_or_else(|| Error::param("index set out of range"))?.clone(),
                        l.lattice.core(table),
                        p.beta,
                        radius,
                    ),
                    SlotChoice::Max { set } => {
                        Component::max(l.input_dim, l.max_sets.get(*set).ok_or_else(|| Error::param("index set out of range"))?.clone())
                    }
                });
            }
            layers.push(comps);
        }
        Ok(CompositionalFunction { d: p.d, q: p.q, k: p.k, d_star: p.d_star, d_lower: p.d_lower, beta: p.beta, radius, layers })
    }

    fn slot_options(&self, cap: usize) -> Result<Vec<Vec<SlotChoice>>> {
        let mut out = Vec::with_capacity(self.layers.len());
        for l in &self.layers {
            let tables = if l.holder_sets.is_empty() { Vec::new() } else { l.lattice.tables(cap)? };
            let mut opts = Vec::new();
            for set in 0..l.holder_sets.len() {
                for t in &tables {
                    opts.push(SlotChoice::Holder { set, table: t.clone() });
                }
            }
            for set in 0..l.max_sets.len() {
                opts.push(SlotChoice::Max { set });
            }
            out.push(opts);
        }
        Ok(out)
    }

    /// Every member in enumeration order; capacity error above `cap`.
    pub fn materialize(&self, cap: usize) -> Result<Vec<CompositionalFunction>> {
        let over = || Error::Capacity { required: format!("e^{:.2} members", self.log_count), cap };
        match self.count() {
            Some(c) if c <= cap as u128 => {}
            _ => return Err(over()),
        }
        let opts = self.slot_options(cap)?;
        let radix: Vec<&Vec<SlotChoice>> = self.layers.iter().zip(&opts).flat_map(|(l, o)| std::iter::repeat_n(o, l.outputs)).collect();
        let total: usize = radix.iter().map(|o| o.len()).product();
        let mut out = Vec::with_capacity(total);
        let mut digits = vec![0usize; radix.len()];
        for _ in 0..total {
            let choices: Vec<SlotChoice> = digits.iter().zip(&radix).map(|(&d, o)| o[d].clone()).collect();
            out.push(self.member(&choices)?);
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                if digits[pos] < radix[pos].len() {
                    break;
                }
                digits[pos] = 0;
            }
        }
        Ok(out)
    }

    /// Lowest-index hinge ERM over the sign classifiers of the members.
    pub fn erm(&self, data: &Dataset, cap: usize) -> Result<CoveringFit> {
        if data.is_empty() {
            return Err(Error::param("empty dataset"));
        }
        if self.params.q == 0 && self.params.d_lower == 1 {
            return self.erm_chain(data);
        }
        let members = self.materialize(cap)?;
        let set = FiniteClassifierSet::from_functions(&members);
        let idx = erm_finite(data, &set, Loss::Hinge);
        let mistakes = data.points.iter().filter(|p| set.members[idx].value(&p.x) as i8 != p.y).count();
        Ok(CoveringFit {
            member: members[idx].clone(),
            mistakes,
            empirical_hinge: 2.0 * mistakes as f64 / data.len() as f64,
            log_count: self.log_count,
            xi: self.xi,
        })
    }

    /// Viterbi search over the level paths of each one-dimensional slot choice.
    fn erm_chain(&self, data: &Dataset) -> Result<CoveringFit> {
        let l = &self.layers[0];
        let mut best: Option<(usize, SlotChoice)> = None;
        for (set, idx) in l.holder_sets.iter().enumerate() {
            let (cost, table) = chain_dp(&l.lattice, data, idx[0] - 1);
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, SlotChoice::Holder { set, table }));
            }
        }
        for (set, idx) in l.max_sets.iter().enumerate() {
            let cost = data
                .points
                .iter()
                .filter(|p| {
                    let m = idx.iter().map(|&i| p.x[i - 1]).fold(f64::NEG_INFINITY, f64::max);
                    sgn(2.0 * m - 1.0) as i8 != p.y
                })
                .count();
            if best.as_ref().is_none_or(|b| cost < b.0) {
                best = Some((cost, SlotChoice::Max { set }));
            }
        }
        let (mistakes, choice) = best.ok_or_else(|| Error::param("covering net has no options"))?;
        Ok(CoveringFit {
            member: self.member(&[choice])?,
            mistakes,
            empirical_hinge: 2.0 * mistakes as f64 / data.len() as f64,
            log_count: self.log_count,
            xi: self.xi,
        })
    }
}

/// Piecewise-linear value exactly as the table core evaluates it.
#[inline]
fn lerp(va: f64, vb: f64, frac: f64) -> f64 {
    let mut acc = 0.0;
    let w0 = 1.0 - frac;
    if w0 != 0.0 {
        acc += w0 * va;
    }
    if frac != 0.0 {
        acc += frac * vb;
    }
    acc
}

/// Fewest sign mistakes over the level paths on coordinate `axis`, with the
/// lexicographically smallest optimal path.
fn chain_dp(lat: &Lattice, data: &Dataset, axis: usize) -> (usize, Vec<u16>) {
    let m = lat.intervals;
    let nl = lat.levels;
    let w = lat.jump;
    let mut buckets: Vec<Vec<(f64, i8)>> = vec![Vec::new(); m];
    for p in &data.points {
        let pos = p.x[axis].clamp(0.0, 1.0) * m as f64;
        let i0 = (pos.floor() as usize).min(m - 1);
        buckets[i0].push((pos - i0 as f64, p.y));
    }
    let vals: Vec<f64> = (0..nl).map(|l| lat.value(l as u16)).collect();
    let width = 2 * w + 1;
    // cost[j][a * width + (b + w - a)]
    let cost: Vec<Vec<u32>> = buckets
        .iter()
        .map(|pts| {
            let mut c = vec![u32::MAX; nl * width];
            for a in 0..nl {
                for b in a.saturating_sub(w)..=(a + w).min(nl - 1) {
                    let mut k = 0u32;
                    for &(frac, y) in pts {
                        if sgn(2.0 * lerp(vals[a], vals[b], frac) - 1.0) as i8 != y {
                            k += 1;
                        }
                    }
                    c[a * width + b + w - a] = k;
                }
            }
            c
        })
        .collect();
    let mut togo = vec![vec![0u32; nl]; m + 1];
    for j in (0..m).rev() {
        for a in 0..nl {
            let mut best = u32::MAX;
            for b in a.saturating_sub(w)..=(a + w).min(nl - 1) {
                best = best.min(cost[j][a * width + b + w - a] + togo[j + 1][b]);
            }
            togo[j][a] = best;
        }
    }
    let total = *togo[0].iter().min().expect("levels ≥ 1");
    let mut path = Vec::with_capacity(m + 1);
    let mut a = togo[0].iter().position(|&c| c == total).expect("minimum exists");
    path.push(a as u16);
    for j in 0..m {
        let b = (a.saturating_sub(w)..=(a + w).min(nl - 1))
            .find(|&b| cost[j][a * width + b + w - a] + togo[j + 1][b] == togo[j][a])
            .expect("optimal successor exists");
        path.push(b as u16);
        a = b;
    }
    (total as usize, path)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoveringFit {
    /// `f`; the classifier is `sgn(2f - 1)`.
    pub member: CompositionalFunction,
    pub mistakes: usize,
    pub empirical_hinge: f64,
    pub log_count: f64,
    pub xi: f64,
}

/// `ξ(n) = ((τ∧1)/3) · n^{-1/(s + 2 + d*/(β(1∧β)^q))}`.
pub fn covering_radius(n: usize, params: &CoveringParams, s: f64, tau: f64) -> f64 {
    let b = params.beta * params.beta.min(1.0).powi(params.q as i32);
    let expo = if s.is_infinite() { 0.0 } else { 1.0 / (s + 2.0 + params.d_lower as f64 / b) };
    tau.min(1.0) / 3.0 * (n as f64).powf(-expo)
}

/// Covering net at `ξ(n)` followed by hinge ERM over its sign classifiers.
pub fn covering_net_estimator(data: &Dataset, params: CoveringParams, s: f64, tau: f64, cap: usize) -> Result<CoveringFit> {
    let xi = covering_radius(data.len(), &params, s, tau);
    build_covering_net(params, xi)?.erm(data, cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample, Sample};
    use crate::funcspace::validate_chom;
    use crate::RealFn;

    fn p1() -> CoveringParams {
        CoveringParams { q: 0, k: 1, d_star: 1, d_lower: 1, beta: 1.0, r: 1.0, d: 1 }
    }

    #[test]
    fn combos_in_order() {
        assert_eq!(combinations(4, 2), vec![vec![1, 2], vec![1, 3], vec![1, 4], vec![2, 3], vec![2, 4], vec![3, 4]]);
        assert_eq!(combinations(3, 3), vec![vec![1, 2, 3]]);
    }

    #[test]
    fn radius_formula() {
        let xi = covering_radius(128, &p1(), 0.0, 1.0);
        assert!((xi - 128f64.powf(-1.0 / 3.0) / 3.0).abs() < 1e-15);
        assert!((xi - 0.06615).abs() < 1e-5);
    }

    #[test]
    fn dp_count_matches_enumeration() {
        let net = build_covering_net(p1(), 0.5).unwrap();
        let lat = net.layers[0].lattice;
        let (lc, exact) = lat.log_count();
        assert!(exact);
        let n = lat.tables(1 << 20).unwrap().len();
        assert!((lc - (n as f64).ln()).abs() < 1e-9);
        assert_eq!(lat.count_tables(u64::MAX).unwrap(), n as u64);
    }

    #[test]
    fn coarse_net_covers_constants() {
        let net = build_covering_net(p1(), 1.0).unwrap();
        let members = net.materialize(DEFAULT_MEMBER_CAP).unwrap();
        for i in 0..=20 {
            let c = i as f64 / 20.0;
            let best = members
                .iter()
                .map(|m| (0..=50).map(|k| (m.value(&[k as f64 / 50.0]) - c).abs()).fold(0.0, f64::max))
                .fold(f64::INFINITY, f64::min);
            assert!(best <= 1.0, "{c}: {best}");
        }
    }

    #[test]
    fn members_validate() {
        let net = build_covering_net(p1(), 0.5).unwrap();
        let members = net.materialize(DEFAULT_MEMBER_CAP).unwrap();
        for m in members.iter().step_by(97) {
            assert!(validate_chom(m, 65).passed());
        }
    }

    #[test]
    fn dp_matches_brute_force() {
        let params = CoveringParams { d: 2, ..p1() };
        let net = build_covering_net(params, 0.5).unwrap();
        let dist = crate::dist::lebesgue_dist("t", 2, |x: &[f64]| 0.2 + 0.6 * x[1]);
        for seed in 0..4 {
            let data = sample(&dist, 60, seed);
            let fit = net.erm(&data, DEFAULT_MEMBER_CAP).unwrap();
            let members = net.materialize(DEFAULT_MEMBER_CAP).unwrap();
            let set = FiniteClassifierSet::from_functions(&members);
            let idx = erm_finite(&data, &set, Loss::Hinge);
            let want = serde_json::to_string(&members[idx]).unwrap();
            assert_eq!(serde_json::to_string(&fit.member).unwrap(), want);
        }
    }

    #[test]
    fn separable_data_fit_exactly() {
        let pts: Vec<Sample> = (0..40).map(|i| {
            let x = (i as f64 + 0.5) / 40.0;
            Sample { x: vec![x], y: if x > 0.6 { 1 } else { -1 } }
        }).collect();
        let data = Dataset { d: 1, points: pts, seed: 0 };
        let fit = build_covering_net(p1(), 0.125).unwrap().erm(&data, DEFAULT_MEMBER_CAP).unwrap();
        assert_eq!(fit.mistakes, 0);
    }

    #[test]
    fn capacity_is_reported() {
        let net = build_covering_net(p1(), 0.05).unwrap();
        assert!(matches!(net.materialize(1000), Err(Error::Capacity { .. })));
    }

    #[test]
    fn layered_radii_shrink() {
        let r = layer_radii(0.5, 2, 1.0, 1.0);
        assert_eq!(r.len(), 3);
        assert!(r[0] <= r[1] && r[1] < r[2]);
        assert_eq!(r[2], 0.25);
    }
}
