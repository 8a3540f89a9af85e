//! Rate experiments: configuration, execution, fitting and reporting.

pub mod config;
pub mod fit;
pub mod report;
pub mod run;

pub use config::{DistConfig, EstimatorConfig, ExperimentConfig, OutputConfig, RiskConfig};
pub use fit::{fit_rate, linear_fit, RateFit};
pub use report::{emit_report, read_rows_csv, read_rows_file, read_summary, render_svg, summary_json, write_rows_csv, EmittedFiles};
pub use run::{
    run_rate_experiment, run_with_estimator, summarize, theory_exponent, workers_from_env, ConfiguredEstimator, NSummary,
    RateReport, RateRow, RowEstimator, RowOutcome, WORKERS_ENV,
};
