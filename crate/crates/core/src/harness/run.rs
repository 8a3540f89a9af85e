//! Sweeps over `n` and seeds, evaluating each fitted rule by quadrature.

use super::config::{EstimatorConfig, ExperimentConfig};
use super::fit::{fit_rate, RateFit};
use crate::bounds::rate_exponent;
use crate::dist::{sample, Dataset, DistributionSpec, EtaGrid, QuadSpec};
use crate::estimators::{covering_net_estimator, erm_gradient, hyperparam_schedule, threshold_erm};
use crate::risk::{excess_risk_values, Loss};
use crate::util::derive_seed;
use crate::{sgn, Error, RealFn, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

/// Environment variable overriding the worker count.
pub const WORKERS_ENV: &str = "HMLAB_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowOutcome {
    pub excess01: f64,
    pub excess_hinge: f64,
}

/// One estimator applied to one sample, scored against the known `η`.
pub trait RowEstimator: Sync {
    fn name(&self) -> String;
    fn estimate(&self, data: &Dataset, eg: &EtaGrid) -> Result<RowOutcome>;
}

fn score(values: &[f64], eg: &EtaGrid) -> RowOutcome {
    let signs: Vec<f64> = values.iter().map(|&v| sgn(v)).collect();
    RowOutcome {
        excess01: excess_risk_values(&signs, eg, Loss::ZeroOne).excess,
        excess_hinge: excess_risk_values(values, eg, Loss::Hinge).excess,
    }
}

/// Estimator built from an [`EstimatorConfig`].
pub struct ConfiguredEstimator(pub EstimatorConfig);

impl RowEstimator for ConfiguredEstimator {
    fn name(&self) -> String {
        self.0.name().to_string()
    }

    fn estimate(&self, data: &Dataset, eg: &EtaGrid) -> Result<RowOutcome> {
        match &self.0 {
            EstimatorConfig::CoveringNet { params, s, tau, cap } => {
                let fit = covering_net_estimator(data, *params, *s, *tau, *cap)?;
                let f = fit.member;
                Ok(score(&eg.grid.map(|x| sgn(2.0 * f.value(x) - 1.0)), eg))
            }
            EstimatorConfig::GradientErm { beta, q, d_lower, s, a, b, train } => {
                let budget = hyperparam_schedule(data.len(), *beta, *q, *d_lower, *s, *a, *b)?;
                let mut cfg = *train;
                cfg.seed = derive_seed(train.seed, &[data.seed]);
                let rep = erm_gradient(data, &budget, Loss::Hinge, &cfg)?;
                Ok(score(&eg.grid.map(|x| rep.net.value(x)), eg))
            }
            EstimatorConfig::ThresholdClass { axis, bits } => {
                if *axis >= data.d {
                    return Err(Error::Dimension { expected: data.d, got: axis + 1 });
                }
                let (j, _) = threshold_erm(data, *axis, *bits);
                let theta = j as f64 / (1u64 << bits) as f64;
                Ok(score(&eg.grid.map(|x| sgn(x[*axis] - theta)), eg))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub seed: u64,
    pub estimator: String,
    pub excess01: f64,
    pub excess_hinge: f64,
    pub wallclock_ms: f64,
    pub status: String,
}

impl RateRow {
    pub fn ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NSummary {
    pub n: usize,
    pub rows: usize,
    pub failed: usize,
    pub mean01: f64,
    pub median01: f64,
    pub mean_hinge: f64,
    pub median_hinge: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub name: String,
    pub estimator: String,
    pub master_seed: u64,
    #[serde(skip)]
    pub rows: Vec<RateRow>,
    pub per_n: Vec<NSummary>,
    /// Fit of the per-`n` median excess 0-1 risk.
    pub fit: Option<RateFit>,
    pub fit_error: Option<String>,
    /// Slope after dropping the largest `n`.
    pub slope_without_largest: Option<f64>,
    pub theory_exponent: f64,
    pub accept_band: Option<[f64; 2]>,
    /// Rows excluded from the fit.
    pub warnings: usize,
    pub passed: bool,
}

impl RateReport {
    pub fn theory_slope(&self) -> f64 {
        -self.theory_exponent
    }
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() { f64::NAN } else { v.iter().sum::<f64>() / v.len() as f64 }
}

/// Aggregates rows by `n`, fits the medians, and decides the pass flag.
pub fn summarize(
    name: &str,
    master_seed: u64,
    mut rows: Vec<RateRow>,
    theory_exponent: f64,
    accept_band: Option<[f64; 2]>,
) -> RateReport {
    rows.sort_by_key(|r| r.n);
    let estimator = rows.first().map(|r| r.estimator.clone()).unwrap_or_default();
    let mut per_n = Vec::new();
    let mut i = 0;
    while i < rows.len() {
        let n = rows[i].n;
        let group: Vec<&RateRow> = rows[i..].iter().take_while(|r| r.n == n).collect();
        i += group.len();
        let good: Vec<&RateRow> = group.iter().copied().filter(|r| r.ok()).collect();
        let mut e01: Vec<f64> = good.iter().map(|r| r.excess01).collect();
        let mut eh: Vec<f64> = good.iter().map(|r| r.excess_hinge).collect();
        per_n.push(NSummary {
            n,
            rows: group.len(),
            failed: group.len() - good.len(),
            mean01: mean(&e01),
            median01: median(&mut e01),
            mean_hinge: mean(&eh),
            median_hinge: median(&mut eh),
        });
    }
    let warnings = per_n.iter().map(|s| s.failed).sum();
    let points: Vec<(f64, f64)> =
        per_n.iter().filter(|s| s.failed < s.rows).map(|s| (s.n as f64, s.median01)).collect();
    let (fit, fit_error) = match fit_rate(&points) {
        Ok(f) => (Some(f), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let slope_without_largest =
        if points.len() > 4 { fit_rate(&points[..points.len() - 1]).ok().map(|f| f.slope) } else { None };
    let passed = match (&fit, accept_band) {
        (Some(f), Some([lo, hi])) => f.slope >= lo && f.slope <= hi,
        (Some(f), None) => (f.slope + theory_exponent).abs() <= f.ci_halfwidth,
        (None, _) => false,
    };
    RateReport {
        name: name.to_string(),
        estimator,
        master_seed,
        rows,
        per_n,
        fit,
        fit_error,
        slope_without_largest,
        theory_exponent,
        accept_band,
        warnings,
        passed,
    }
}

/// Exponent `e` in the predicted `n^{-e}` for the configured estimator.
pub fn theory_exponent(cfg: &ExperimentConfig, dist: &DistributionSpec) -> f64 {
    if let Some(e) = cfg.theory_exponent {
        return e;
    }
    match &cfg.estimator {
        EstimatorConfig::CoveringNet { params, s, .. } => rate_exponent(params.beta, params.q, params.d_lower, *s),
        EstimatorConfig::GradientErm { beta, q, d_lower, s, .. } => rate_exponent(*beta, *q, *d_lower, *s),
        EstimatorConfig::ThresholdClass { .. } => {
            let s = dist.noise.map_or(0.0, |p| p.s);
            rate_exponent(1.0, 0, 1, s)
        }
    }
}

/// Worker count from [`WORKERS_ENV`], if set to a positive integer.
pub fn workers_from_env() -> Option<usize> {
    std::env::var(WORKERS_ENV).ok()?.trim().parse().ok().filter(|&w| w > 0)
}

fn run_rows(
    cfg: &ExperimentConfig,
    dist: &DistributionSpec,
    est: &dyn RowEstimator,
    eg: &EtaGrid,
) -> Result<Vec<RateRow>> {
    let jobs: Vec<(usize, usize)> =
        cfg.n_grid.iter().flat_map(|&n| (0..cfg.seeds_per_n).map(move |i| (n, i))).collect();
    let name = est.name();
    jobs.par_iter()
        .map(|&(n, idx)| {
            let seed = derive_seed(cfg.master_seed, &[n as u64, idx as u64]);
            let start = Instant::now();
            let data = sample(dist, n, seed);
            let out = est.estimate(&data, eg);
            let ms = if cfg.record_wallclock { start.elapsed().as_secs_f64() * 1e3 } else { 0.0 };
            let mut row = RateRow {
                n,
                seed,
                estimator: name.clone(),
                excess01: f64::NAN,
                excess_hinge: f64::NAN,
                wallclock_ms: ms,
                status: "ok".into(),
            };
            match out {
                Ok(o) => {
                    row.excess01 = o.excess01;
                    row.excess_hinge = o.excess_hinge;
                }
                Err(Error::Capacity { required, cap }) => {
                    row.status = format!("capacity: {required} > {cap}");
                }
                Err(e) => return Err(e),
            }
            Ok(row)
        })
        .collect()
}

/// Runs `est` on every `(n, seed)` of `cfg` against `dist`.
pub fn run_with_estimator(
    cfg: &ExperimentConfig,
    dist: &DistributionSpec,
    est: &dyn RowEstimator,
    workers: Option<usize>,
) -> Result<RateReport> {
    cfg.validate()?;
    let spec = cfg.risk.map(|r| r.spec()).unwrap_or_else(|| QuadSpec::default_for(dist.dim()));
    let eg = dist.eta_grid(spec);
    let rows = match workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::param(format!("worker pool: {e}")))?
            .install(|| run_rows(cfg, dist, est, &eg))?,
        None => run_rows(cfg, dist, est, &eg)?,
    };
    Ok(summarize(&cfg.name, cfg.master_seed, rows, theory_exponent(cfg, dist), cfg.accept_band))
}

/// Builds the configured distribution and estimator and runs the sweep.
pub fn run_rate_experiment(cfg: &ExperimentConfig) -> Result<RateReport> {
    let dist = cfg.distribution.build(None)?;
    run_with_estimator(cfg, &dist, &ConfiguredEstimator(cfg.estimator.clone()), workers_from_env())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{DistConfig, OutputConfig, RiskConfig};

    struct Mock(f64);

    impl RowEstimator for Mock {
        fn name(&self) -> String {
            "mock".into()
        }
        fn estimate(&self, data: &Dataset, _: &EtaGrid) -> Result<RowOutcome> {
            let v = self.0 * (data.len() as f64).powf(-1.0 / 3.0);
            Ok(RowOutcome { excess01: v, excess_hinge: 2.0 * v })
        }
    }

    struct Failing;

    impl RowEstimator for Failing {
        fn name(&self) -> String {
            "failing".into()
        }
        fn estimate(&self, data: &Dataset, _: &EtaGrid) -> Result<RowOutcome> {
            if data.len() == 32 && data.seed.is_multiple_of(2) {
                return Err(Error::Capacity { required: "many".into(), cap: 1 });
            }
            Ok(RowOutcome { excess01: 1.0 / data.len() as f64, excess_hinge: 0.0 })
        }
    }

    fn cfg(estimator: EstimatorConfig) -> ExperimentConfig {
        ExperimentConfig {
            name: "t".into(),
            master_seed: 11,
            n_grid: vec![16, 32, 64, 128, 256],
            seeds_per_n: 5,
            distribution: DistConfig::GapMargin { d: 1, lo: 0.25, hi: 0.75, margin: 0.25 },
            estimator,
            risk: Some(RiskConfig { cells: 1 << 14, active_dims: 1 }),
            theory_exponent: None,
            accept_band: None,
            record_wallclock: false,
            output: OutputConfig::default(),
        }
    }

    fn threshold() -> EstimatorConfig {
        EstimatorConfig::ThresholdClass { axis: 0, bits: 12 }
    }

    #[test]
    fn mock_power_law_gives_exact_slope() {
        let c = cfg(threshold());
        let dist = c.distribution.build(None).unwrap();
        let rep = run_with_estimator(&c, &dist, &Mock(0.7), Some(2)).unwrap();
        let fit = rep.fit.unwrap();
        assert!((fit.slope + 1.0 / 3.0).abs() < 1e-6, "{}", fit.slope);
        assert!((fit.intercept - 0.7f64.ln()).abs() < 1e-9);
        assert_eq!(rep.rows.len(), 25);
        assert_eq!(rep.warnings, 0);
    }

    #[test]
    fn rows_do_not_depend_on_worker_count() {
        let c = cfg(threshold());
        let dist = c.distribution.build(None).unwrap();
        let est = ConfiguredEstimator(c.estimator.clone());
        let a = run_with_estimator(&c, &dist, &est, Some(1)).unwrap();
        let b = run_with_estimator(&c, &dist, &est, Some(4)).unwrap();
        assert_eq!(a.rows, b.rows);
        assert_eq!(a, b);
        assert!(a.rows.iter().all(|r| r.ok() && r.excess01 > 0.0));
        assert_eq!(a.theory_exponent, 1.0);
    }

    #[test]
    fn capacity_errors_are_excluded_and_counted() {
        let c = cfg(threshold());
        let dist = c.distribution.build(None).unwrap();
        let rep = run_with_estimator(&c, &dist, &Failing, Some(2)).unwrap();
        let failed = rep.rows.iter().filter(|r| !r.ok()).count();
        assert!(failed > 0 && failed < 5);
        assert_eq!(rep.warnings, failed);
        assert!(rep.rows.iter().filter(|r| !r.ok()).all(|r| r.excess01.is_nan() && r.status.starts_with("capacity")));
        assert!((rep.fit.unwrap().slope + 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_capacity_errors_propagate() {
        let c = cfg(EstimatorConfig::ThresholdClass { axis: 3, bits: 4 });
        assert!(run_rate_experiment(&c).is_err());
    }

    #[test]
    fn median_and_mean() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_eq!(mean(&[1.0, 2.0]), 1.5);
        assert!(median(&mut []).is_nan());
    }
}
