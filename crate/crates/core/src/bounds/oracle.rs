//! Oracle inequality calculator and Monte Carlo verifier.

use crate::dist::{sample, DistributionSpec, QuadSpec};
use crate::estimators::finite::{empirical_losses, argmin_lowest, FiniteClassifierSet};
use crate::risk::{excess_risk_on, Loss};
use crate::util::derive_seed;
use crate::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub n: usize,
    /// Cover cardinality `W ≥ 3`.
    pub w: f64,
    pub m: f64,
    /// Variance constant `Γ`.
    pub big_gamma: f64,
    pub theta: f64,
    /// Cover radius `γ`.
    pub gamma: f64,
    pub j: f64,
    pub h: f64,
    pub eps: f64,
    pub approx_term: f64,
}

impl OracleParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || !(self.w >= 3.0) {
            return Err(Error::param("need n ≥ 1 and W ≥ 3"));
        }
        if !(self.m > 0.0 && self.big_gamma > 0.0 && self.gamma >= 0.0 && self.j > 0.0) {
            return Err(Error::param("M, Γ, J must be positive and γ ≥ 0"));
        }
        if !(0.0..=1.0).contains(&self.theta) || !(self.eps >= 0.0) {
            return Err(Error::param("θ ∈ [0,1] and ε ≥ 0 required"));
        }
        Ok(())
    }
}

/// `0^0 = 1`.
fn pow0(b: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        b.powf(e)
    }
}

/// Right-hand side of the oracle inequality.
pub fn oracle_rhs(p: &OracleParams) -> f64 {
    let n = p.n as f64;
    let lw = p.w.ln();
    let cover = if p.gamma == 0.0 { 0.0 } else { (2.0 + p.eps).abs() * p.j * p.gamma };
    let linear = 8.0 * p.m * (1.0 + p.eps) * lw / n;
    let denom = n * pow0(p.eps, p.theta);
    let variance = if denom == 0.0 {
        f64::INFINITY
    } else {
        8.0 * (p.big_gamma * (1.0 + p.eps).powi(2) * lw / denom).powf(1.0 / (2.0 - p.theta))
    };
    let approx = if p.approx_term == 0.0 { 0.0 } else { (1.0 + p.eps) * p.approx_term };
    cover + linear + variance + approx
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReport {
    pub n: usize,
    pub replications: usize,
    pub class_size: usize,
    pub lhs_mean: f64,
    pub lhs_se: f64,
    pub approx_term: f64,
    pub rhs_by_eps: Vec<(f64, f64)>,
    pub rhs_min: f64,
    pub passed: bool,
}

/// Mean excess hinge risk of the finite-class hinge ERM against the oracle bound.
pub fn oracle_verify(
    classifiers: &FiniteClassifierSet,
    dist: &DistributionSpec,
    n: usize,
    replications: usize,
    seed: u64,
    quad: QuadSpec,
) -> Result<OracleReport> {
    if classifiers.is_empty() || n == 0 || replications < 2 {
        return Err(Error::param("need a nonempty class, n ≥ 1 and at least 2 replications"));
    }
    let profile = dist.noise.ok_or_else(|| Error::param("distribution has no noise profile"))?;
    let eg = dist.eta_grid(quad);
    let member_excess: Vec<f64> = classifiers
        .members
        .iter()
        .map(|m| excess_risk_on(&|x: &[f64]| m.value(x).clamp(-1.0, 1.0), &eg, Loss::Hinge).excess.max(0.0))
        .collect();
    let lhs: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|r| {
            let data = sample(dist, n, derive_seed(seed, &[n as u64, r as u64]));
            member_excess[argmin_lowest(&empirical_losses(&data, classifiers, Loss::Hinge))]
        })
        .collect();
    let reps = replications as f64;
    let mean = lhs.iter().sum::<f64>() / reps;
    let var = lhs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (reps - 1.0);
    let se = (var / reps).sqrt();
    let approx = member_excess.iter().cloned().fold(f64::INFINITY, f64::min);
    let theta = profile.theta();
    let big_gamma = 6.0 * profile.alpha.max(1.0 / profile.tau);
    let eps_grid = if theta > 0.0 { [1e-6, 0.5, 1.0] } else { [0.0, 0.5, 1.0] };
    let rhs_by_eps: Vec<(f64, f64)> = eps_grid
        .iter()
        .map(|&eps| {
            let p = OracleParams {
                n,
                w: (classifiers.len() as f64).max(3.0),
                m: 2.0,
                big_gamma,
                theta,
                gamma: 0.0,
                j: 1.0,
                h: 0.0,
                eps,
                approx_term: approx,
            };
            (eps, oracle_rhs(&p))
        })
        .collect();
    let rhs_min = rhs_by_eps.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    Ok(OracleReport {
        n,
        replications,
        class_size: classifiers.len(),
        lhs_mean: mean,
        lhs_se: se,
        approx_term: approx,
        rhs_by_eps,
        passed: mean <= rhs_min + 3.0 * se,
        rhs_min,
    })
}
