use clap::ValueEnum;
use hinge_minimax::bounds::{degenerate_class_check, lecam_pipeline, oracle_verify, tail_integral_bound, vg_code};
use hinge_minimax::dist::{gap_margin, kl_divergence, power_ramp, Marginal, QuadSpec};
use hinge_minimax::estimators::{build_covering_net, CoveringParams, FiniteClassifierSet};
use hinge_minimax::harness::linear_fit;
use hinge_minimax::relunet::build_threshold_net;
use hinge_minimax::util::{derive_seed, rng};
use hinge_minimax::{RealFn, Result};
use rand::Rng as _;
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oracle,
    Kl,
    Lecam,
    Threshold,
    Covering,
    Tail,
    Vg,
    Degenerate,
    All,
}

const SUITES: [Suite; 8] =
    [Suite::Oracle, Suite::Kl, Suite::Lecam, Suite::Threshold, Suite::Covering, Suite::Tail, Suite::Vg, Suite::Degenerate];

fn thresholds(m: usize) -> FiniteClassifierSet {
    FiniteClassifierSet::new(
        (0..=m)
            .map(|j| {
                let th = j as f64 / m as f64;
                Arc::new(move |x: &[f64]| if x[0] >= th { 1.0 } else { -1.0 }) as Arc<dyn RealFn>
            })
            .collect(),
    )
}

fn oracle(seed: u64) -> Result<(bool, String)> {
    let cases = [(power_ramp(1.0, 1)?, 16, 200), (power_ramp(2.0, 2)?, 32, 400), (gap_margin(1, 0.3, 0.6, 0.2)?, 16, 100)];
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, (dist, m, n)) in cases.into_iter().enumerate() {
        let rep = oracle_verify(&thresholds(m), &dist, n, 200, derive_seed(seed, &[i as u64]), QuadSpec::default_for(dist.dim()))?;
        ok &= rep.passed;
        parts.push(format!("{}: {:.4} <= {:.4}", dist.name, rep.lhs_mean, rep.rhs_min + 3.0 * rep.lhs_se));
    }
    Ok((ok, parts.join("; ")))
}

fn kl(seed: u64) -> Result<(bool, String)> {
    let mut g = rng(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let eps = 0.125 * g.random::<f64>();
        let cut = (g.random_range(1..16) as f64) / 16.0;
        let (a1, a2) = (0.5 + eps * (2.0 * g.random::<f64>() - 1.0), 0.5 + eps * (2.0 * g.random::<f64>() - 1.0));
        let e1 = move |x: &[f64]| if x[0] < cut { a1 } else { 0.9 };
        let e2 = move |x: &[f64]| if x[0] < cut { a2 } else { 0.9 };
        let k = kl_divergence(&e1, &e2, &Marginal::lebesgue(1), QuadSpec::new(64, 1))?;
        worst = worst.max(k - 18.0 * eps * eps * cut);
    }
    Ok((worst <= 1e-6, format!("max(kl - 18 eps^2 Q(A)) = {worst:.3e}")))
}

fn lecam() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [4usize, 16, 64] {
        let row = lecam_pipeline(2.0, n, 1.0, 0, 1, 1, 1, QuadSpec::new(256, 1))?;
        ok &= row.affinity >= 0.25 && row.bound >= row.floor && (row.affinity - row.affinity_closed_form).abs() <= 1e-12;
        parts.push(format!("n={n}: bound {:.4e} >= {:.4e}", row.bound, row.floor));
    }
    Ok((ok, parts.join("; ")))
}

fn threshold() -> Result<(bool, String)> {
    let mut ok = true;
    for k in 2..=8 {
        let delta = 2f64.powi(-k);
        let net = build_threshold_net(delta)?;
        let start = 0.5 + 5.0 * delta / 14.0;
        ok &= (0..=1000).all(|i| net.eval(&[-1.0 + 1.5 * i as f64 / 1000.0]) == -1.0);
        ok &= (0..=1000).all(|i| net.eval(&[start + (1.0 - start) * i as f64 / 1000.0]) == 1.0);
    }
    Ok((ok, "delta = 2^-2..2^-8".into()))
}

fn covering() -> Result<(bool, String)> {
    let params = CoveringParams { q: 0, k: 1, d_star: 1, d_lower: 1, beta: 1.0, r: 1.0, d: 1 };
    let mut x = Vec::new();
    let mut y = Vec::new();
    for i in 1..=5 {
        let xi = 2f64.powi(-i);
        x.push(1.0 / xi);
        y.push(build_covering_net(params, xi)?.log_count);
    }
    let fit = linear_fit(&x, &y)?;
    Ok((fit.r_squared >= 0.95, format!("log count slope {:.4}, R² {:.5}", fit.slope, fit.r_squared)))
}

fn tail(seed: u64) -> Result<(bool, String)> {
    let mut g = rng(seed);
    let mut worst = 0.0f64;
    let mut ok = true;
    for _ in 0..100 {
        let rep = tail_integral_bound(3.0 + 1000.0 * g.random::<f64>(), 0.1 + 9.9 * g.random::<f64>(), 1.0 + g.random::<f64>())?;
        ok &= rep.holds;
        worst = worst.max(rep.numeric / rep.bound);
    }
    Ok((ok, format!("max numeric/bound {worst:.4}")))
}

fn vg(seed: u64) -> Result<(bool, String)> {
    let mut g = rng(seed);
    let mut ok = true;
    for _ in 0..30 {
        let m = g.random_range(2..=64usize);
        ok &= vg_code(m, g.random())?.certify();
    }
    Ok((ok, "30 random lengths".into()))
}

fn degenerate(seed: u64) -> Result<(bool, String)> {
    let rep = degenerate_class_check(2, 1, 2, 1, 1.0, 0.5, 20, seed, QuadSpec::default_for(2))?;
    let worst = rep.excess.iter().cloned().fold(0.0, f64::max);
    Ok((rep.passed, format!("max excess {worst:.1e}")))
}

fn one(s: Suite, seed: u64) -> Result<(bool, String)> {
    match s {
        Suite::Oracle => oracle(seed),
        Suite::Kl => kl(seed),
        Suite::Lecam => lecam(),
        Suite::Threshold => threshold(),
        Suite::Covering => covering(),
        Suite::Tail => tail(seed),
        Suite::Vg => vg(seed),
        Suite::Degenerate => degenerate(seed),
        Suite::All => unreachable!(),
    }
}

pub fn run(suite: Suite, seed: u64) -> Result<ExitCode> {
    let list: Vec<Suite> = if suite == Suite::All { SUITES.to_vec() } else { vec![suite] };
    let mut all = true;
    for s in list {
        let (ok, detail) = one(s, seed)?;
        all &= ok;
        let name = format!("{s:?}").to_lowercase();
        println!("{name:<10} {} {detail}", if ok { "PASS" } else { "FAIL" });
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
