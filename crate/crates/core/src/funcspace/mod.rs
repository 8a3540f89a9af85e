//! Function spaces: Hoelder cores, bumps, and compositional functions.

pub mod bump;
pub mod chom;
pub mod core;
pub mod holder;

pub use self::bump::{bump_grid_sum, smoothstep, BumpSpec, GridCode};
pub use self::chom::{eval_chom, validate_chom, Check, Component, CompositionalFunction, HolderComponent, MaxComponent, ValidationReport};
pub use self::core::{Core, CustomCore, Term};
pub use self::holder::{grid_points, holder_quotient_probe, holder_seminorm_probe, sup_probe};

use crate::relunet::ReluNetwork;

/// A real function on a box, evaluated without error reporting.
pub trait RealFn: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> RealFn for F {
    fn value(&self, x: &[f64]) -> f64 {
        self(x)
    }
}

impl RealFn for ReluNetwork<f64> {
    fn value(&self, x: &[f64]) -> f64 {
        self.eval(x)
    }
}
