//! Scalar cores of Hoelder components.

use super::bump::{bump_grid_sum, smoothstep, BumpSpec, GridCode};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// Closure-backed core. Not serializable.
#[derive(Clone)]
pub struct CustomCore {
    pub name: String,
    pub f: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

impl fmt::Debug for CustomCore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CustomCore({})", self.name)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub coef: f64,
    pub core: Core,
}

/// A function `[0,1]^{d*} -> R` evaluated on the active coordinates of a component.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Core {
    Constant { value: f64 },
    /// Piecewise-multilinear interpolant of `values` on the uniform tensor grid
    /// with `shape[i]` knots along axis `i`. Row-major, first axis slowest.
    Table { shape: Vec<usize>, values: Vec<f64> },
    /// `offset + scale |z_1|^exponent`.
    Power { offset: f64, scale: f64, exponent: f64 },
    /// Smoothstep ramp in `z_1`: 0 below `lo`, 1 above `hi`.
    Ramp { lo: f64, hi: f64, order: usize },
    /// Bump grid sum over the active coordinates.
    BumpSum { code: GridCode, amplitude: f64, beta: f64, bump: BumpSpec },
    /// `bias + Σ coef · core`.
    Sum { terms: Vec<Term>, bias: f64 },
    #[serde(skip)]
    Custom(CustomCore),
}

impl Core {
    pub fn custom(name: impl Into<String>, f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Core::Custom(CustomCore { name: name.into(), f: Arc::new(f) })
    }

    pub fn identity() -> Self {
        Core::Power { offset: 0.0, scale: 1.0, exponent: 1.0 }
    }

    /// Table sampled from `f` on a uniform grid with `knots` points per axis.
    pub fn tabulate(dim: usize, knots: usize, f: impl Fn(&[f64]) -> f64) -> Self {
        let shape = vec![knots; dim];
        let total = knots.pow(dim as u32);
        let mut values = Vec::with_capacity(total);
        let mut z = vec![0.0; dim];
        for flat in 0..total {
            let mut rem = flat;
            for k in (0..dim).rev() {
                let i = rem % knots;
                rem /= knots;
                z[k] = if knots > 1 { i as f64 / (knots - 1) as f64 } else { 0.0 };
            }
            values.push(f(&z));
        }
        Core::Table { shape, values }
    }

    pub fn is_serializable(&self) -> bool {
        match self {
            Core::Custom(_) => false,
            Core::Sum { terms, .. } => terms.iter().all(|t| t.core.is_serializable()),
            _ => true,
        }
    }

    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            Core::Constant { value } => *value,
            Core::Table { shape, values } => multilinear(shape, values, z),
            Core::Power { offset, scale, exponent } => {
                let a = z.first().copied().unwrap_or(0.0).abs();
                offset + scale * a.powf(*exponent)
            }
            Core::Ramp { lo, hi, order } => {
                let t = (z.first().copied().unwrap_or(0.0) - lo) / (hi - lo);
                smoothstep(*order, t)
            }
            Core::BumpSum { code, amplitude, beta, bump } => bump_grid_sum(code, *amplitude, *beta, bump, z),
            Core::Sum { terms, bias } => bias + terms.iter().map(|t| t.coef * t.core.eval(z)).sum::<f64>(),
            Core::Custom(c) => (c.f)(z),
        }
    }
}

fn multilinear(shape: &[usize], values: &[f64], z: &[f64]) -> f64 {
    let k = shape.len();
    let mut base = vec![0usize; k];
    let mut frac = vec![0.0f64; k];
    for a in 0..k {
        let n = shape[a];
        if n <= 1 {
            continue;
        }
        let p = z.get(a).copied().unwrap_or(0.0).clamp(0.0, 1.0) * (n - 1) as f64;
        let i0 = (p.floor() as usize).min(n - 2);
        base[a] = i0;
        frac[a] = p - i0 as f64;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << k) {
        let mut w = 1.0;
        let mut flat = 0usize;
        for a in 0..k {
            let up = (corner >> a) & 1 == 1;
            let n = shape[a];
            let i = if up && n > 1 { base[a] + 1 } else { base[a] };
            w *= if n <= 1 {
                if up { 0.0 } else { 1.0 }
            } else if up {
                frac[a]
            } else {
                1.0 - frac[a]
            };
            flat = flat * n + i;
        }
        if w != 0.0 {
            acc += w * values[flat];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_reproduces_bilinear_functions() {
        let f = |z: &[f64]| 0.2 + 0.3 * z[0] - 0.1 * z[1] + 0.4 * z[0] * z[1];
        let t = Core::tabulate(2, 4, f);
        for &(a, b) in &[(0.1, 0.7), (0.5, 0.5), (1.0, 0.0), (0.33, 0.99)] {
            assert!((t.eval(&[a, b]) - f(&[a, b])).abs() < 1e-12);
        }
    }

    #[test]
    fn table_one_dim_interpolates() {
        let t = Core::Table { shape: vec![3], values: vec![0.0, 1.0, 0.0] };
        assert!((t.eval(&[0.25]) - 0.5).abs() < 1e-15);
        assert!((t.eval(&[0.75]) - 0.5).abs() < 1e-15);
        assert_eq!(t.eval(&[0.5]), 1.0);
    }

    #[test]
    fn json_round_trip_of_nested_core() {
        let c = Core::Sum {
            terms: vec![
                Term { coef: 0.25, core: Core::Ramp { lo: 0.25, hi: 0.5, order: 1 } },
                Term { coef: 1.0, core: Core::Power { offset: 0.0, scale: 1.0, exponent: 0.5 } },
            ],
            bias: 0.1,
        };
        let s = serde_json::to_string(&c).unwrap();
        let back: Core = serde_json::from_str(&s).unwrap();
        for z in [0.0, 0.3, 0.45, 0.9] {
            assert_eq!(c.eval(&[z]), back.eval(&[z]));
        }
        assert!(!Core::custom("x", |_| 0.0).is_serializable());
    }
}
