//! Explicit ReLU networks, budgets, and constructive approximants.

pub mod approx;
pub mod builder;
pub mod network;
pub mod threshold;

pub use approx::{approximate_chom, approximate_chom_with, build_classifier_net, ApproxConfig, Approximation};
pub use network::{budget_of, default_sup_resolution, sup_on_grid, BudgetAccount, Layer, NetworkBudget, ReluNetwork};
pub use threshold::{build_threshold_net, threshold_k};
