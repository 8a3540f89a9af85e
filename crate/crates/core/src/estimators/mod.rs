//! Hinge-loss ERM over network budgets and over finite covering nets.

pub mod covering;
pub mod finite;
pub mod gradient;
pub mod schedule;

pub use covering::{
    build_covering_net, covering_net_estimator, covering_radius, CoveringFit, CoveringNet, CoveringParams, Lattice, SlotChoice,
    DEFAULT_MEMBER_CAP,
};
pub use finite::{argmin_lowest, covering_number_estimate, empirical_losses, erm_finite, threshold_erm, FiniteClassifierSet, SignClassifier};
pub use gradient::{empirical_loss, erm_gradient, project, TrainConfig, TrainReport};
pub use schedule::{hyperparam_schedule, width_scale};
