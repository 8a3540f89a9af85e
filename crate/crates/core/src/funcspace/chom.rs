//! Compositional Hoelder functions `h_q ∘ … ∘ h_0`.

use super::core::Core;
use super::holder::{grid_points, holder_quotient_probe, sup_probe};
use super::RealFn;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

const RANGE_TOL: f64 = 1e-12;
const MAX_GRID_POINTS: usize = 1_000_000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolderComponent {
    pub input_dim: usize,
    /// 1-based indices into the layer input.
    pub active_indices: Vec<usize>,
    pub core: Core,
    pub beta: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaxComponent {
    pub input_dim: usize,
    pub active_indices: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Component {
    Holder(HolderComponent),
    Max(MaxComponent),
}

impl Component {
    pub fn holder(input_dim: usize, active_indices: Vec<usize>, core: Core, beta: f64, radius: f64) -> Self {
        Component::Holder(HolderComponent { input_dim, active_indices, core, beta, radius })
    }

    pub fn max(input_dim: usize, active_indices: Vec<usize>) -> Self {
        Component::Max(MaxComponent { input_dim, active_indices })
    }

    pub fn input_dim(&self) -> usize {
        match self {
            Component::Holder(h) => h.input_dim,
            Component::Max(m) => m.input_dim,
        }
    }

    pub fn active_indices(&self) -> &[usize] {
        match self {
            Component::Holder(h) => &h.active_indices,
            Component::Max(m) => &m.active_indices,
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Component::Holder(h) => {
                let mut z = [0.0f64; 8];
                if h.active_indices.len() <= 8 {
                    for (k, &i) in h.active_indices.iter().enumerate() {
                        z[k] = x[i - 1];
                    }
                    h.core.eval(&z[..h.active_indices.len()])
                } else {
                    let z: Vec<f64> = h.active_indices.iter().map(|&i| x[i - 1]).collect();
                    h.core.eval(&z)
                }
            }
            Component::Max(m) => m.active_indices.iter().map(|&i| x[i - 1]).fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositionalFunction {
    pub d: usize,
    pub q: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub d_star: usize,
    pub d_lower: usize,
    pub beta: f64,
    pub radius: f64,
    pub layers: Vec<Vec<Component>>,
}

impl CompositionalFunction {
    /// Single-layer function `x ↦ core(x_I)`.
    pub fn single(d: usize, active: Vec<usize>, core: Core, beta: f64, radius: f64) -> Self {
        let d_lower = active.len();
        Self {
            d,
            q: 0,
            k: 1,
            d_star: d_lower,
            d_lower,
            beta,
            radius,
            layers: vec![vec![Component::holder(d, active, core, beta, radius)]],
        }
    }

    pub fn layer_input_dim(&self, i: usize) -> usize {
        if i == 0 { self.d } else { self.k }
    }

    pub fn layer_output_dim(&self, i: usize) -> usize {
        if i == self.q { 1 } else { self.k }
    }

    /// Shape checks needed for evaluation to be well defined.
    pub fn check_structure(&self) -> Result<()> {
        if self.layers.len() != self.q + 1 {
            return Err(Error::param(format!("expected {} layers, found {}", self.q + 1, self.layers.len())));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.len() != self.layer_output_dim(i) {
                return Err(Error::param(format!(
                    "layer {i} has {} components, expected {}",
                    layer.len(),
                    self.layer_output_dim(i)
                )));
            }
            let din = self.layer_input_dim(i);
            for (j, c) in layer.iter().enumerate() {
                if c.input_dim() != din {
                    return Err(Error::param(format!("layer {i} component {j} has input dim {}, expected {din}", c.input_dim())));
                }
                if c.active_indices().is_empty() || c.active_indices().iter().any(|&a| a == 0 || a > din) {
                    return Err(Error::param(format!("layer {i} component {j} has out-of-range active indices")));
                }
            }
        }
        Ok(())
    }

    /// All layer outputs; errors on domain or range violations.
    pub fn eval_layers(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        if x.len() != self.d {
            return Err(Error::Dimension { expected: self.d, got: x.len() });
        }
        if x.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Domain { point: x.to_vec() });
        }
        let mut outs = Vec::with_capacity(self.q + 1);
        let mut cur = x.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut next: Vec<f64> = layer.iter().map(|c| c.eval(&cur)).collect();
            if i < self.q {
                for (j, v) in next.iter_mut().enumerate() {
                    if !(-RANGE_TOL..=1.0 + RANGE_TOL).contains(v) || v.is_nan() {
                        return Err(Error::Range { layer: i, component: j, value: *v });
                    }
                    *v = v.clamp(0.0, 1.0);
                }
            }
            outs.push(next.clone());
            cur = next;
        }
        Ok(outs)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.eval_layers(x)?.pop().map(|v| v[0]).unwrap_or(f64::NAN))
    }

    /// Evaluation without domain or range errors: intermediate values are clamped.
    pub fn eval_clamped(&self, x: &[f64]) -> f64 {
        let mut cur: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut next: Vec<f64> = layer.iter().map(|c| c.eval(&cur)).collect();
            if i < self.q {
                for v in next.iter_mut() {
                    *v = v.clamp(0.0, 1.0);
                }
            }
            cur = next;
        }
        cur[0]
    }

    pub fn is_serializable(&self) -> bool {
        self.layers.iter().flatten().all(|c| match c {
            Component::Holder(h) => h.core.is_serializable(),
            Component::Max(_) => true,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        if !self.is_serializable() {
            return Err(Error::Serde("closure-backed cores cannot be serialized".into()));
        }
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(s)?;
        f.check_structure()?;
        Ok(f)
    }
}

impl RealFn for CompositionalFunction {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval_clamped(x)
    }
}

/// `h_q(…h_0(x)…)` with domain and range checks.
pub fn eval_chom(f: &CompositionalFunction, x: &[f64]) -> Result<f64> {
    f.eval(x)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<Vec<f64>>,
}

impl Check {
    fn new(name: &str, passed: bool, detail: impl Into<String>, witness: Option<Vec<f64>>) -> Self {
        Self { name: name.to_string(), passed, detail: detail.into(), witness }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Grid-based membership checks. Hoelder checks are necessary conditions only.
pub fn validate_chom(f: &CompositionalFunction, grid_resolution: usize) -> ValidationReport {
    let res = grid_resolution.max(2);
    let mut checks = Vec::new();

    let structure = f.check_structure();
    let structure_ok = structure.is_ok();
    checks.push(Check::new(
        "structure",
        structure_ok,
        structure.err().map(|e| e.to_string()).unwrap_or_else(|| "ok".into()),
        None,
    ));

    let dim_ok = f.d_lower <= f.d && f.d_lower * f.q <= f.k * f.q;
    checks.push(Check::new(
        "dimension_condition",
        dim_ok,
        format!("d*={} d={} q={} K={}", f.d_lower, f.d, f.q, f.k),
        None,
    ));

    let mut idx_ok = true;
    let mut idx_detail = String::from("ok");
    for (i, layer) in f.layers.iter().enumerate() {
        for (j, c) in layer.iter().enumerate() {
            let din = f.layer_input_dim(i);
            let act = c.active_indices();
            let mut sorted = act.to_vec();
            sorted.sort_unstable();
            sorted.dedup();
            let distinct = sorted.len() == act.len();
            let in_range = act.iter().all(|&a| a >= 1 && a <= din);
            let size_ok = match c {
                Component::Holder(_) => act.len() == f.d_lower,
                Component::Max(_) => !act.is_empty() && act.len() <= f.d_star,
            };
            if !(distinct && in_range && size_ok) {
                idx_ok = false;
                idx_detail = format!("layer {i} component {j}: indices {act:?}");
            }
        }
    }
    checks.push(Check::new("active_indices", idx_ok, idx_detail, None));

    let mut sup_ok = true;
    let mut sup_detail = String::from("ok");
    let mut sup_witness = None;
    let mut hq_ok = true;
    let mut hq_detail = String::from("ok");
    for (i, layer) in f.layers.iter().enumerate() {
        for (j, c) in layer.iter().enumerate() {
            if let Component::Holder(h) = c {
                let dim = h.active_indices.len();
                let r = res.min(per_axis_cap(dim, 40_000));
                let (sup, at) = sup_probe(&|z: &[f64]| h.core.eval(z), dim, r);
                if sup > h.radius.min(f.radius) + 1e-9 {
                    sup_ok = false;
                    sup_detail = format!("layer {i} component {j}: sup {sup} > r {}", h.radius.min(f.radius));
                    sup_witness = Some(at);
                }
                let quot = holder_quotient_probe(&|z: &[f64]| h.core.eval(z), dim, h.beta, r);
                if quot > h.radius.min(f.radius) + 1e-9 {
                    hq_ok = false;
                    hq_detail = format!("layer {i} component {j}: quotient {quot} > r {}", h.radius.min(f.radius));
                }
            }
        }
    }
    checks.push(Check::new("core_sup", sup_ok, sup_detail, sup_witness));
    checks.push(Check::new("core_holder_quotient", hq_ok, hq_detail, None));

    if structure_ok {
        let r = res.min(per_axis_cap(f.d, MAX_GRID_POINTS));
        let mut worst: Option<(f64, Vec<f64>, usize, usize)> = None;
        for x in grid_points(f.d, r) {
            let mut cur = x.clone();
            for (i, layer) in f.layers.iter().enumerate() {
                let next: Vec<f64> = layer.iter().map(|c| c.eval(&cur)).collect();
                if i < f.q {
                    for (j, &v) in next.iter().enumerate() {
                        let excess = if v.is_nan() { f64::INFINITY } else { (-v).max(v - 1.0) };
                        if excess > RANGE_TOL && worst.as_ref().is_none_or(|w| excess > w.0) {
                            worst = Some((excess, x.clone(), i, j));
                        }
                    }
                }
                cur = next.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
            }
        }
        match worst {
            None => checks.push(Check::new("range", true, format!("{}^{} grid", r, f.d), None)),
            Some((e, x, i, j)) => checks.push(Check::new(
                "range",
                false,
                format!("layer {i} component {j} leaves [0,1] by {e}"),
                Some(x),
            )),
        }
    } else {
        checks.push(Check::new("range", false, "skipped: malformed structure", None));
    }

    ValidationReport { checks }
}

fn per_axis_cap(dim: usize, total: usize) -> usize {
    let mut r = (total as f64).powf(1.0 / dim.max(1) as f64).floor() as usize;
    while r > 2 && r.pow(dim as u32) > total {
        r -= 1;
    }
    r.max(2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity_layer(d: usize) -> Vec<Component> {
        (1..=d).map(|i| Component::holder(d, vec![i], Core::identity(), 1.0, 2.0)).collect()
    }

    #[test]
    fn max_of_two_coordinates() {
        let f = CompositionalFunction {
            d: 2,
            q: 0,
            k: 1,
            d_star: 2,
            d_lower: 1,
            beta: 1.0,
            radius: 1.0,
            layers: vec![vec![Component::max(2, vec![1, 2])]],
        };
        assert_eq!(eval_chom(&f, &[0.3, 0.7]).unwrap(), 0.7);
    }

    #[test]
    fn composition_with_square() {
        let f = CompositionalFunction {
            d: 2,
            q: 1,
            k: 2,
            d_star: 1,
            d_lower: 1,
            beta: 1.0,
            radius: 2.0,
            layers: vec![
                identity_layer(2),
                vec![Component::holder(2, vec![1], Core::Power { offset: 0.0, scale: 1.0, exponent: 2.0 }, 1.0, 2.0)],
            ],
        };
        assert!((eval_chom(&f, &[0.5, 0.2]).unwrap() - 0.25).abs() < 1e-15);
        assert!(validate_chom(&f, 9).passed());
    }

    #[test]
    fn domain_and_range_errors() {
        let f = CompositionalFunction {
            d: 1,
            q: 1,
            k: 1,
            d_star: 1,
            d_lower: 1,
            beta: 1.0,
            radius: 2.0,
            layers: vec![
                vec![Component::holder(1, vec![1], Core::Constant { value: 1.5 }, 1.0, 2.0)],
                vec![Component::holder(1, vec![1], Core::identity(), 1.0, 2.0)],
            ],
        };
        assert!(matches!(eval_chom(&f, &[1.2]), Err(Error::Domain { .. })));
        assert!(matches!(eval_chom(&f, &[0.2]), Err(Error::Range { layer: 0, .. })));
        let rep = validate_chom(&f, 5);
        let range = rep.check("range").unwrap();
        assert!(!range.passed);
        assert!(range.witness.is_some());
    }

    #[test]
    fn dimension_condition_detected() {
        let f = CompositionalFunction {
            d: 1,
            q: 0,
            k: 1,
            d_star: 2,
            d_lower: 2,
            beta: 1.0,
            radius: 1.0,
            layers: vec![vec![Component::holder(1, vec![1], Core::Constant { value: 0.5 }, 1.0, 1.0)]],
        };
        let rep = validate_chom(&f, 5);
        assert!(!rep.check("dimension_condition").unwrap().passed);
    }

    #[test]
    fn json_round_trip() {
        let f = CompositionalFunction::single(3, vec![2], Core::tabulate(1, 5, |z| 0.5 * z[0]), 1.0, 1.0);
        let s = f.to_json().unwrap();
        assert!(s.contains("\"K\""));
        let g = CompositionalFunction::from_json(&s).unwrap();
        for x in [[0.1, 0.2, 0.3], [0.9, 0.55, 0.0]] {
            assert_eq!(f.eval(&x).unwrap(), g.eval(&x).unwrap());
        }
    }
}
