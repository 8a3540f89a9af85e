//! Compositional Hoelder classes, hinge-loss estimators, and minimax lower-bound tools.
//!
//! Networks and losses are generic over [`Scalar`]; distributions, quadrature and
//! experiments run in `f64`.

pub mod bounds;
pub mod dist;
pub mod error;
pub mod estimators;
pub mod funcspace;
pub mod harness;
pub mod relunet;
pub mod risk;
pub mod scalar;
pub mod util;

pub use error::{Error, Result};
pub use funcspace::{CompositionalFunction, RealFn};
pub use scalar::{sgn, Scalar};

/// Double-precision network.
pub type Network = relunet::ReluNetwork<f64>;
/// Single-precision network.
pub type Network32 = relunet::ReluNetwork<f32>;
