//! Dense ReLU networks `W_L σ_{v_L} W_{L-1} … σ_{v_1} W_0 x` and budget accounting.

use crate::scalar::Scalar;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

/// One affine map `W_i` together with the shift `v_{i+1}` of the hidden layer it feeds.
/// The output map carries an empty shift.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer<T> {
    pub w: Vec<Vec<T>>,
    pub v: Vec<T>,
}

impl<T: Scalar> Layer<T> {
    pub fn rows(&self) -> usize {
        self.w.len()
    }

    pub fn cols(&self) -> usize {
        self.w.first().map_or(0, |r| r.len())
    }

    pub fn nnz(&self) -> usize {
        let wn: usize = self.w.iter().map(|r| r.iter().filter(|x| !x.is_zero()).count()).sum();
        wn + self.v.iter().filter(|x| !x.is_zero()).count()
    }

    fn apply(&self, h: &[T], out: &mut Vec<T>) {
        out.clear();
        for row in &self.w {
            let mut acc = T::zero();
            for (a, b) in row.iter().zip(h) {
                if !a.is_zero() {
                    acc = acc + *a * *b;
                }
            }
            out.push(acc);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReluNetwork<T> {
    pub layers: Vec<Layer<T>>,
    pub input_dim: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkBudget {
    /// Depth cap `G`.
    pub g: usize,
    /// Width cap `N`.
    pub n: usize,
    /// Nonzero-parameter cap `S`.
    pub s: usize,
    /// Magnitude cap `B`.
    pub b: f64,
    /// Sup-norm cap `F`; `None` is unbounded.
    pub f: Option<f64>,
}

impl NetworkBudget {
    pub fn new(g: usize, n: usize, s: usize, b: f64, f: Option<f64>) -> Result<Self> {
        if g == 0 || n == 0 || s == 0 || !(b > 0.0) {
            return Err(Error::param(format!("invalid budget G={g} N={n} S={s} B={b}")));
        }
        Ok(Self { g, n, s, b, f })
    }

    pub fn f_cap(&self) -> f64 {
        self.f.unwrap_or(f64::INFINITY)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetAccount {
    pub depth: usize,
    pub width: usize,
    pub nnz: usize,
    pub max_abs: f64,
    pub sup_estimate: f64,
}

impl BudgetAccount {
    pub fn within(&self, b: &NetworkBudget) -> bool {
        self.depth <= b.g
            && self.width <= b.n
            && self.nnz <= b.s
            && self.max_abs <= b.b
            && self.sup_estimate <= b.f_cap()
    }
}

impl<T: Scalar> ReluNetwork<T> {
    /// Validated constructor: checks dimension chaining and finiteness.
    pub fn new(input_dim: usize, layers: Vec<Layer<T>>) -> Result<Self> {
        let net = Self { layers, input_dim };
        net.check()?;
        Ok(net)
    }

    pub fn check(&self) -> Result<()> {
        if self.layers.is_empty() {
            return Err(Error::param("network needs at least the output map"));
        }
        let mut m = self.input_dim;
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            if l.w.iter().any(|r| r.len() != m) {
                return Err(Error::Dimension { expected: m, got: l.cols() });
            }
            let want_v = if i == last { 0 } else { l.rows() };
            if l.v.len() != want_v {
                return Err(Error::Dimension { expected: want_v, got: l.v.len() });
            }
            if l.w.iter().flatten().chain(l.v.iter()).any(|x| !x.is_finite()) {
                return Err(Error::param(format!("non-finite parameter in layer {i}")));
            }
            m = l.rows();
        }
        Ok(())
    }

    /// The affine map `x ↦ W x` with no hidden layer.
    pub fn linear(w: Vec<Vec<T>>, input_dim: usize) -> Self {
        Self { layers: vec![Layer { w, v: Vec::new() }], input_dim }
    }

    pub fn zero(input_dim: usize) -> Self {
        Self::linear(vec![vec![T::zero(); input_dim]], input_dim)
    }

    /// Projection onto the given 1-based coordinates.
    pub fn select(input_dim: usize, indices: &[usize]) -> Self {
        let w = indices
            .iter()
            .map(|&i| (0..input_dim).map(|j| if j + 1 == i { T::one() } else { T::zero() }).collect())
            .collect();
        Self::linear(w, input_dim)
    }

    /// Number of hidden layers `L`.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.rows())
    }

    pub fn width(&self) -> usize {
        self.layers[..self.depth()].iter().map(|l| l.rows()).max().unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.layers.iter().map(|l| l.nnz()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.layers
            .iter()
            .flat_map(|l| l.w.iter().flatten().chain(l.v.iter()))
            .fold(0.0f64, |m, x| m.max(x.abs().to_f64_lossy()))
    }

    pub fn forward_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.input_dim {
            return Err(Error::Dimension { expected: self.input_dim, got: x.len() });
        }
        Ok(self.forward_unchecked(x))
    }

    fn forward_unchecked(&self, x: &[T]) -> Vec<T> {
        let mut h = x.to_vec();
        let mut z = Vec::new();
        let last = self.layers.len() - 1;
        for (i, l) in self.layers.iter().enumerate() {
            l.apply(&h, &mut z);
            if i < last {
                for (zj, vj) in z.iter_mut().zip(&l.v) {
                    let t = *zj - *vj;
                    *zj = if t > T::zero() { t } else { T::zero() };
                }
            }
            std::mem::swap(&mut h, &mut z);
        }
        h
    }

    /// Scalar output.
    pub fn forward(&self, x: &[T]) -> Result<T> {
        let out = self.forward_vec(x)?;
        if out.len() != 1 {
            return Err(Error::Dimension { expected: 1, got: out.len() });
        }
        Ok(out[0])
    }

    /// First output at an `f64` point, converting through `T`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let xt: Vec<T> = x.iter().map(|&v| T::from_f64_lossy(v)).collect();
        self.forward_unchecked(&xt).first().map_or(f64::NAN, |v| v.to_f64_lossy())
    }

    /// `self ∘ inner`, merging the output map of `inner` into the first map of `self`.
    /// Depths add; no extra hidden layer is created.
    pub fn compose(&self, inner: &ReluNetwork<T>) -> Result<Self> {
        if inner.output_dim() != self.input_dim {
            return Err(Error::Dimension { expected: self.input_dim, got: inner.output_dim() });
        }
        let li = inner.layers.last().expect("nonempty");
        let lo = &self.layers[0];
        let merged: Vec<Vec<T>> = lo
            .w
            .iter()
            .map(|row| {
                (0..li.cols())
                    .map(|c| {
                        row.iter().zip(&li.w).fold(T::zero(), |acc, (a, r)| {
                            if a.is_zero() || r[c].is_zero() { acc } else { acc + *a * r[c] }
                        })
                    })
                    .collect()
            })
            .collect();
        let mut layers: Vec<Layer<T>> = inner.layers[..inner.depth()].to_vec();
        layers.push(Layer { w: merged, v: lo.v.clone() });
        layers.extend(self.layers[1..].iter().cloned());
        Ok(Self { layers, input_dim: inner.input_dim })
    }

    /// Appends identity hidden layers `σ(y) - σ(-y)` until the depth is `depth`.
    pub fn pad_to_depth(&self, depth: usize) -> Self {
        let mut net = self.clone();
        while net.depth() < depth {
            let m = net.output_dim();
            let mut w = Vec::with_capacity(2 * m);
            for j in 0..m {
                let mut r = vec![T::zero(); m];
                r[j] = T::one();
                w.push(r);
                let mut r = vec![T::zero(); m];
                r[j] = -T::one();
                w.push(r);
            }
            let id = Self { layers: vec![Layer { w, v: vec![T::zero(); 2 * m] }, Layer { w: pair_sum(m), v: Vec::new() }], input_dim: m };
            net = id.compose(&net).expect("dims match");
        }
        net
    }

    /// Stacks networks reading the same input; outputs are concatenated.
    pub fn parallel(nets: &[ReluNetwork<T>]) -> Result<Self> {
        let first = nets.first().ok_or_else(|| Error::param("parallel of no networks"))?;
        let d = first.input_dim;
        if let Some(bad) = nets.iter().find(|n| n.input_dim != d) {
            return Err(Error::Dimension { expected: d, got: bad.input_dim });
        }
        let depth = nets.iter().map(|n| n.depth()).max().unwrap_or(0);
        let padded: Vec<Self> = nets.iter().map(|n| n.pad_to_depth(depth)).collect();
        let mut layers = Vec::with_capacity(depth + 1);
        for i in 0..=depth {
            let cols_total: usize = if i == 0 { d } else { padded.iter().map(|n| n.layers[i].cols()).sum() };
            let mut w = Vec::new();
            let mut v = Vec::new();
            let mut off = 0;
            for n in &padded {
                let l = &n.layers[i];
                for row in &l.w {
                    if i == 0 {
                        w.push(row.clone());
                    } else {
                        let mut r = vec![T::zero(); cols_total];
                        r[off..off + row.len()].copy_from_slice(row);
                        w.push(r);
                    }
                }
                v.extend(l.v.iter().copied());
                if i > 0 {
                    off += l.cols();
                }
            }
            layers.push(Layer { w, v });
        }
        Ok(Self { layers, input_dim: d })
    }

    pub fn cast<U: Scalar>(&self) -> ReluNetwork<U> {
        let conv = |x: &T| U::from_f64_lossy(x.to_f64_lossy());
        ReluNetwork {
            input_dim: self.input_dim,
            layers: self
                .layers
                .iter()
                .map(|l| Layer { w: l.w.iter().map(|r| r.iter().map(conv).collect()).collect(), v: l.v.iter().map(conv).collect() })
                .collect(),
        }
    }
}

impl<T: Scalar + Serialize + for<'de> Deserialize<'de>> ReluNetwork<T> {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let net: Self = serde_json::from_str(s)?;
        net.check()?;
        Ok(net)
    }
}

fn pair_sum<T: Scalar>(m: usize) -> Vec<Vec<T>> {
    (0..m)
        .map(|j| {
            let mut r = vec![T::zero(); 2 * m];
            r[2 * j] = T::one();
            r[2 * j + 1] = -T::one();
            r
        })
        .collect()
}

/// Largest `|f|` over a tensor grid on `[0,1]^d`: 4097 points for scalar input,
/// otherwise at most `10^6` points in total.
pub fn sup_on_grid<T: Scalar>(net: &ReluNetwork<T>, resolution: usize) -> f64 {
    let d = net.input_dim;
    if d == 0 {
        return net.eval(&[]).abs();
    }
    let mut res = resolution.max(2);
    while res > 2 && (res as f64).powi(d as i32) > 1e6 {
        res -= 1;
    }
    crate::funcspace::grid_points(d, res).map(|x| net.eval(&x).abs()).fold(0.0, f64::max)
}

pub fn budget_of<T: Scalar>(net: &ReluNetwork<T>, sup_grid_resolution: usize) -> BudgetAccount {
    BudgetAccount {
        depth: net.depth(),
        width: net.width(),
        nnz: net.nnz(),
        max_abs: net.max_abs(),
        sup_estimate: sup_on_grid(net, sup_grid_resolution),
    }
}

/// Default sup grid: 4097 points per axis for scalar input, 33 otherwise (subject to the total cap).
pub fn default_sup_resolution(input_dim: usize) -> usize {
    if input_dim <= 1 { 4097 } else { (1e6f64.powf(1.0 / input_dim as f64)).floor() as usize }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abs_net() -> ReluNetwork<f64> {
        ReluNetwork::new(
            1,
            vec![Layer { w: vec![vec![1.0], vec![-1.0]], v: vec![0.0, 0.0] }, Layer { w: vec![vec![1.0, 1.0]], v: vec![] }],
        )
        .unwrap()
    }

    #[test]
    fn identity_and_relu_trick() {
        let id = ReluNetwork::<f64>::linear(vec![vec![1.0]], 1);
        assert_eq!(id.forward(&[0.4]).unwrap(), 0.4);
        assert_eq!(id.depth(), 0);
        let lin = ReluNetwork::<f64>::linear(vec![vec![1.0]], 1).pad_to_depth(1);
        assert_eq!(lin.forward(&[-0.3]).unwrap(), -0.3);
        assert_eq!(lin.depth(), 1);
    }

    #[test]
    fn zero_network_budget() {
        let z = ReluNetwork::<f64>::zero(2);
        let b = budget_of(&z, 5);
        assert_eq!(b.nnz, 0);
        assert_eq!(b.sup_estimate, 0.0);
    }

    #[test]
    fn compose_adds_depth() {
        let a = abs_net();
        let c = a.compose(&a).unwrap();
        assert_eq!(c.depth(), 2);
        for x in [-1.5, -0.2, 0.0, 0.7] {
            assert_eq!(c.forward(&[x]).unwrap(), f64::abs(x));
        }
    }

    #[test]
    fn parallel_pads_and_stacks() {
        let a = abs_net();
        let id = ReluNetwork::<f64>::linear(vec![vec![2.0]], 1);
        let p = ReluNetwork::parallel(&[a, id]).unwrap();
        assert_eq!(p.depth(), 1);
        assert_eq!(p.forward_vec(&[-0.5]).unwrap(), vec![0.5, -1.0]);
    }

    #[test]
    fn dimension_errors() {
        let a = abs_net();
        assert!(matches!(a.forward(&[0.1, 0.2]), Err(Error::Dimension { .. })));
        let bad = ReluNetwork::<f64>::new(2, vec![Layer { w: vec![vec![1.0]], v: vec![] }]);
        assert!(bad.is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut a = abs_net();
        a.layers[0].w[0][0] = 0.1 + 0.2;
        a.layers[0].v[1] = -1.0 / 3.0;
        let s = a.to_json().unwrap();
        assert_eq!(ReluNetwork::<f64>::from_json(&s).unwrap(), a);
        let a32: ReluNetwork<f32> = a.cast();
        assert_eq!(ReluNetwork::<f32>::from_json(&a32.to_json().unwrap()).unwrap(), a32);
    }
}
