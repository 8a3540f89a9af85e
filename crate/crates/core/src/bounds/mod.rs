//! Oracle inequality, tail integrals, separation, codes, and lower-bound calculators.

pub mod lower;
pub mod oracle;
pub mod separation;
pub mod tail;
pub mod vg;

pub use lower::{
    degenerate_class_check, exact_affinity, fano_lower_bound, fano_lower_bound_clamped, lecam_lower_bound, lecam_pipeline,
    lower_bound_pipeline, rate_exponent, write_lower_bound_csv, DegenerateReport, LeCamRow, LowerBoundRow,
};
pub use oracle::{oracle_rhs, oracle_verify, OracleParams, OracleReport};
pub use separation::{excess_sum_separation, j_function};
pub use tail::{adaptive_simpson, tail_integral_bound, TailReport};
pub use vg::{vg_code, vg_code_with_size, VgCode};
