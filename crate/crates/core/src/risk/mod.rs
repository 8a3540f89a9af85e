//! Losses, truncation, and excess-risk functionals.

use crate::dist::{DistributionSpec, EtaGrid, NoiseProfile, QuadSpec};
use crate::funcspace::RealFn;
use crate::scalar::{sgn, Scalar};
use crate::util::rng;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Loss {
    ZeroOne,
    Hinge,
    Logistic,
}

/// `𝐓_F t`, the clamp to `[-F, F]`.
#[inline]
pub fn truncate<T: Scalar>(f: T, t: T) -> T {
    t.max(-f).min(f)
}

/// `φ(margin)`; the zero-one case counts `margin < 0` as an error.
pub fn loss_value<T: Scalar>(loss: Loss, margin: T) -> T {
    match loss {
        Loss::ZeroOne => {
            if margin < T::zero() {
                T::one()
            } else {
                T::zero()
            }
        }
        Loss::Hinge => (T::one() - margin).max(T::zero()),
        Loss::Logistic => {
            // log(1 + e^{-t}) without overflow
            if margin > T::zero() {
                (-margin).exp().ln_1p()
            } else {
                -margin + margin.exp().ln_1p()
            }
        }
    }
}

/// Loss of predicting `f` for label `y`; zero-one uses `sgn` with `sgn(0) = +1`.
pub fn pointwise_loss<T: Scalar>(loss: Loss, y: i8, f: T) -> T {
    let yt = if y >= 0 { T::one() } else { -T::one() };
    match loss {
        Loss::ZeroOne => {
            if sgn(f) == yt {
                T::zero()
            } else {
                T::one()
            }
        }
        _ => loss_value(loss, yt * f),
    }
}

/// `η φ(f) + (1-η) φ(-f)`.
pub fn conditional_risk(loss: Loss, eta: f64, f: f64) -> f64 {
    eta * pointwise_loss(loss, 1, f) + (1.0 - eta) * pointwise_loss(loss, -1, f)
}

/// Pointwise Bayes risk: `min{η,1-η}`, `1-|2η-1|`, or the binary entropy.
pub fn bayes_conditional(loss: Loss, eta: f64) -> f64 {
    match loss {
        Loss::ZeroOne => eta.min(1.0 - eta),
        Loss::Hinge => 1.0 - (2.0 * eta - 1.0).abs(),
        Loss::Logistic => {
            let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.ln() };
            h(eta) + h(1.0 - eta)
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum RiskMethod {
    Quadrature { spec: QuadSpec },
    MonteCarlo { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RiskReport {
    pub risk: f64,
    pub bayes_risk: f64,
    pub excess: f64,
    pub method: String,
    pub error_estimate: f64,
    pub warning: Option<String>,
}

pub const MC_MIN_SAMPLES: usize = 100;

/// Excess risk on precomputed `η` nodes.
pub fn excess_risk_on(f: &dyn RealFn, eg: &EtaGrid, loss: Loss) -> RiskReport {
    let fv = eg.grid.map(|x| f.value(x));
    excess_risk_values(&fv, eg, loss)
}

/// Excess risk given the values of `f` at the nodes of `eg`.
pub fn excess_risk_values(fv: &[f64], eg: &EtaGrid, loss: Loss) -> RiskReport {
    let mut risk = 0.0;
    let mut bayes = 0.0;
    for ((w, &e), &v) in eg.grid.weights.iter().zip(&eg.eta).zip(fv) {
        risk += w * conditional_risk(loss, e, v);
        bayes += w * bayes_conditional(loss, e);
    }
    RiskReport { risk, bayes_risk: bayes, excess: risk - bayes, method: "quadrature".into(), error_estimate: 0.0, warning: None }
}

pub fn excess_risk(f: &dyn RealFn, dist: &DistributionSpec, loss: Loss, method: RiskMethod) -> RiskReport {
    match method {
        RiskMethod::Quadrature { spec } => excess_risk_on(f, &dist.eta_grid(spec), loss),
        RiskMethod::MonteCarlo { samples, seed } => {
            let mut r = rng(seed);
            let xs = dist.marginal.sample_points(samples, &mut r);
            let mut risk = 0.0;
            let mut bayes = 0.0;
            let mut diffs = Vec::with_capacity(samples);
            for x in &xs {
                let e = dist.eta(x);
                let y: i8 = if r.random::<f64>() < e { 1 } else { -1 };
                let l = pointwise_loss(loss, y, f.value(x));
                let b = bayes_conditional(loss, e);
                risk += l;
                bayes += b;
                diffs.push(l - b);
            }
            let n = samples.max(1) as f64;
            let mean = diffs.iter().sum::<f64>() / n;
            let var = if samples > 1 { diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0) } else { f64::INFINITY };
            RiskReport {
                risk: risk / n,
                bayes_risk: bayes / n,
                excess: mean,
                method: "monte_carlo".into(),
                error_estimate: (var / n).sqrt(),
                warning: (samples < MC_MIN_SAMPLES).then(|| format!("only {samples} Monte Carlo samples")),
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PredicateReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub passed: bool,
}

pub const PREDICATE_TOL: f64 = 1e-9;

/// `∫|f-g|² dP_X ≤ 6 (ℰ^{φh}(f))^{s/(s+1)} max{1,α,1/τ}` with `g = sgn(2η-1)`.
pub fn variance_bound_check(f: &dyn RealFn, dist: &DistributionSpec, profile: &NoiseProfile, spec: QuadSpec) -> PredicateReport {
    let eg = dist.eta_grid(spec);
    let fv = eg.grid.map(|x| f.value(x));
    let lhs: f64 = eg
        .grid
        .weights
        .iter()
        .zip(&eg.eta)
        .zip(&fv)
        .map(|((w, &e), &v)| w * (v - sgn(2.0 * e - 1.0)).powi(2))
        .sum();
    let ex = excess_risk_values(&fv, &eg, Loss::Hinge).excess.max(0.0);
    let theta = profile.theta();
    let k = 1f64.max(profile.alpha).max(1.0 / profile.tau);
    let rhs = 6.0 * ex.powf(theta) * k;
    PredicateReport { lhs, rhs, slack: rhs - lhs, passed: rhs - lhs >= -PREDICATE_TOL }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub excess_01: f64,
    pub excess_hinge_truncated: f64,
    pub excess_logistic: f64,
    pub hinge_ok: bool,
    pub logistic_ok: bool,
    pub passed: bool,
}

/// `ℰ(f) ≤ ℰ^{φh}(𝐓₁f)` and `ℰ(f) ≤ √2 (ℰ^{φl}(f))^{1/2}`.
pub fn comparison_check(f: &dyn RealFn, dist: &DistributionSpec, spec: QuadSpec) -> ComparisonReport {
    let eg = dist.eta_grid(spec);
    let fv = eg.grid.map(|x| f.value(x));
    let tv: Vec<f64> = fv.iter().map(|&v| truncate(1.0, v)).collect();
    let e01 = excess_risk_values(&fv, &eg, Loss::ZeroOne).excess;
    let eh = excess_risk_values(&tv, &eg, Loss::Hinge).excess;
    let el = excess_risk_values(&fv, &eg, Loss::Logistic).excess;
    let hinge_ok = e01 <= eh + PREDICATE_TOL;
    let logistic_ok = e01 <= 2f64.sqrt() * el.max(0.0).sqrt() + PREDICATE_TOL;
    ComparisonReport { excess_01: e01, excess_hinge_truncated: eh, excess_logistic: el, hinge_ok, logistic_ok, passed: hinge_ok && logistic_ok }
}
