//! Fano and Le Cam evaluators, the minimax rate exponent, and the lower-bound pipelines.

use super::separation::excess_sum_separation;
use crate::dist::{
    build_lower_bound_family, build_twopoint_family, kl_divergence, random_degenerate_member, DistributionSpec, LowerBoundParams,
    Marginal, QuadSpec,
};
use crate::risk::{excess_risk, Loss, RiskMethod};
use crate::util::derive_seed;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;

/// `v/4 · (1 - (2nu + √(2nu)) / log M)`; may be negative.
pub fn fano_lower_bound(v: f64, u: f64, m: usize, n: usize) -> f64 {
    let nu = 2.0 * n as f64 * u;
    v / 4.0 * (1.0 - (nu + nu.sqrt()) / (m as f64).ln())
}

pub fn fano_lower_bound_clamped(v: f64, u: f64, m: usize, n: usize) -> f64 {
    fano_lower_bound(v, u, m, n).max(0.0)
}

pub fn lecam_lower_bound(v: f64, affinity: f64) -> f64 {
    v / 4.0 * affinity
}

/// `β(1∧β)^q / (d*/(s+1) + (1 + 1/(s+1)) β(1∧β)^q)`; equals 1 at `s = ∞`.
pub fn rate_exponent(beta: f64, q: usize, d_lower: usize, s: f64) -> f64 {
    let b = beta * beta.min(1.0).powi(q as i32);
    let inv = if s.is_infinite() { 0.0 } else { 1.0 / (s + 1.0) };
    b / (d_lower as f64 * inv + (1.0 + inv) * b)
}

pub const AFFINITY_ENUM_CAP: f64 = 5e6;

/// Atom probabilities `(box, label)` for a piecewise-constant `η`.
fn atoms(p: &DistributionSpec) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for b in p.marginal.boxes() {
        let mass = b.mass();
        if mass <= 0.0 {
            out.push(0.0);
            out.push(0.0);
            continue;
        }
        let centre: Vec<f64> = b.lo.iter().zip(&b.hi).map(|(a, c)| 0.5 * (a + c)).collect();
        let e = p.eta(&centre);
        let d = centre.len();
        for corner in 0..(1usize << d.min(16)) {
            let x: Vec<f64> = (0..d).map(|k| if k < 16 && corner >> k & 1 == 1 { b.hi[k] } else { b.lo[k] }).collect();
            if (p.eta(&x) - e).abs() > 1e-12 {
                return Err(Error::param(format!("{}: η is not constant on box {:?}..{:?}", p.name, b.lo, b.hi)));
            }
        }
        out.push(mass * e);
        out.push(mass * (1.0 - e));
    }
    Ok(out)
}

/// `1 - ½‖P^n - Q^n‖₁` for laws with identical box marginals and `η` constant per box,
/// by enumerating multinomial count vectors over the atoms.
pub fn exact_affinity(p: &DistributionSpec, q: &DistributionSpec, n: usize) -> Result<f64> {
    let (pb, qb) = (p.marginal.boxes(), q.marginal.boxes());
    if pb.len() != qb.len() || pb.iter().zip(&qb).any(|(a, b)| a.lo != b.lo || a.hi != b.hi || a.density != b.density) {
        return Err(Error::param("exact affinity needs identical box marginals"));
    }
    let (pa, qa) = (atoms(p)?, atoms(q)?);
    let keep: Vec<(f64, f64)> = pa.into_iter().zip(qa).filter(|(a, b)| *a > 0.0 || *b > 0.0).collect();
    let k = keep.len();
    let mut count = 1.0;
    for i in 1..k {
        count = count * (n + i) as f64 / i as f64;
    }
    if count > AFFINITY_ENUM_CAP {
        return Err(Error::Capacity { required: format!("{count:.0} count vectors"), cap: AFFINITY_ENUM_CAP as usize });
    }
    let mut lf = vec![0.0; n + 1];
    for i in 1..=n {
        lf[i] = lf[i - 1] + (i as f64).ln();
    }
    let lp: Vec<f64> = keep.iter().map(|a| a.0.ln()).collect();
    let lq: Vec<f64> = keep.iter().map(|a| a.1.ln()).collect();
    fn rec(i: usize, rem: usize, coef: f64, a: f64, b: f64, lf: &[f64], lp: &[f64], lq: &[f64], acc: &mut f64) {
        let k = lp.len();
        if i + 1 == k {
            let c = rem as f64;
            let ta = if rem == 0 { a } else { a + c * lp[i] };
            let tb = if rem == 0 { b } else { b + c * lq[i] };
            *acc += (coef - lf[rem] + ta.min(tb)).exp();
            return;
        }
        for c in 0..=rem {
            let cf = c as f64;
            let na = if c == 0 { a } else { a + cf * lp[i] };
            let nb = if c == 0 { b } else { b + cf * lq[i] };
            if na == f64::NEG_INFINITY && nb == f64::NEG_INFINITY {
                continue;
            }
            rec(i + 1, rem - c, coef - lf[c], na, nb, lf, lp, lq, acc);
        }
    }
    if k == 0 {
        return Err(Error::param("no atoms with positive mass"));
    }
    let mut acc = 0.0;
    rec(0, n, lf[n], 0.0, 0.0, &lf, &lp, &lq, &mut acc);
    Ok(acc.min(1.0))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LeCamRow {
    pub n: usize,
    pub v: f64,
    pub separation: f64,
    pub affinity: f64,
    pub affinity_closed_form: f64,
    pub bound: f64,
    pub floor: f64,
}

/// Two-point bound for `s = ∞` at sample size `n`.
#[allow(clippy::too_many_arguments)]
pub fn lecam_pipeline(lambda: f64, n: usize, beta: f64, q: usize, k: usize, d: usize, d_lower: usize, quad: QuadSpec) -> Result<LeCamRow> {
    let fam = build_twopoint_family(lambda, n, beta, q, k, d, d_lower)?;
    let separation = excess_sum_separation(&*fam.p0.eta, &*fam.p1.eta, &fam.p0.marginal, quad);
    let affinity = exact_affinity(&fam.p0, &fam.p1, n)?;
    let nf = n as f64;
    Ok(LeCamRow {
        n,
        v: fam.v,
        separation,
        affinity,
        affinity_closed_form: (1.0 - 1.0 / (2.0 * nf)).powi(n as i32),
        bound: lecam_lower_bound(fam.v, affinity),
        floor: 1.0 / (32.0 * nf),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub n: usize,
    pub grid: usize,
    pub eps: f64,
    pub m_alternatives: usize,
    /// Quadrature separation of the closest pair of codes.
    pub separation: f64,
    pub separation_formula: f64,
    /// Mean `KL(P_j || P_0)`.
    pub kl: f64,
    pub kl_bound: f64,
    pub fano_raw: f64,
    pub fano_value: f64,
    /// `n^{-rate}` for the class parameters.
    pub rate_formula: f64,
}

fn hamming(a: &[usize], b: &[usize]) -> usize {
    let sa: std::collections::BTreeSet<_> = a.iter().collect();
    let sb: std::collections::BTreeSet<_> = b.iter().collect();
    sa.symmetric_difference(&sb).count()
}

/// Fano bound for the finite-`s` family at sample size `n`.
pub fn lower_bound_pipeline(params: &LowerBoundParams, n: usize, quad: QuadSpec) -> Result<LowerBoundRow> {
    let fam = build_lower_bound_family(params)?;
    let meta = &fam.meta;
    let mut best = (usize::MAX, 0, 1);
    for i in 0..meta.codes.len() {
        for j in i + 1..meta.codes.len() {
            let h = hamming(&meta.codes[i].ones, &meta.codes[j].ones);
            if h < best.0 {
                best = (h, i, j);
            }
        }
    }
    let (hmin, i, j) = best;
    let marginal: &Marginal = &fam.members[0].marginal;
    let separation = excess_sum_separation(&*fam.members[i].eta, &*fam.members[j].eta, marginal, quad);
    let s = params.s;
    let separation_formula =
        meta.mass_const * 2f64.powf(s + 1.0) * meta.eps.powf(s + 1.0) * hmin as f64 / meta.active_cells.len() as f64;
    let m = meta.m_alternatives;
    let mut kl = 0.0;
    for member in fam.members.iter().skip(1) {
        kl += kl_divergence(&*member.eta, &*fam.members[0].eta, marginal, quad)?;
    }
    kl /= m as f64;
    let fano_raw = fano_lower_bound(separation, kl, m, n);
    Ok(LowerBoundRow {
        n,
        grid: meta.grid,
        eps: meta.eps,
        m_alternatives: m,
        separation,
        separation_formula,
        kl,
        kl_bound: 18.0 * meta.eps * meta.eps * meta.plateau_mass,
        fano_raw,
        fano_value: fano_raw.max(0.0),
        rate_formula: (n as f64).powf(-rate_exponent(params.beta, params.q, params.d_lower, s)),
    })
}

pub fn write_lower_bound_csv<W: Write>(rows: &[LowerBoundRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["n", "eps", "separation", "kl", "fano_value"])?;
    for r in rows {
        wr.write_record([r.n.to_string(), r.eps.to_string(), r.separation.to_string(), r.kl.to_string(), r.fano_value.to_string()])
            ?;
    }
    wr.flush().map_err(|e| Error::io("csv", e))?;
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegenerateReport {
    pub excess: Vec<f64>,
    pub max_eta: Vec<f64>,
    pub passed: bool,
}

/// Excess 0-1 risk of the constant `-1` classifier on random members with radius `r ≤ 1/2`.
#[allow(clippy::too_many_arguments)]
pub fn degenerate_class_check(
    d: usize,
    q: usize,
    k: usize,
    d_lower: usize,
    beta: f64,
    r: f64,
    members: usize,
    seed: u64,
    quad: QuadSpec,
) -> Result<DegenerateReport> {
    if r > 0.5 {
        return Err(Error::param(format!("degenerate check needs r ≤ 1/2, got {r}")));
    }
    let mut excess = Vec::with_capacity(members);
    let mut max_eta = Vec::with_capacity(members);
    for i in 0..members {
        let f = random_degenerate_member(d, q, k, d_lower, beta, r, 5, derive_seed(seed, &[i as u64]))?;
        let dist = DistributionSpec::from_chom(format!("degenerate_{i}"), f, Marginal::lebesgue(d));
        let eg = dist.eta_grid(quad);
        max_eta.push(eg.eta.iter().cloned().fold(f64::NEG_INFINITY, f64::max));
        excess.push(excess_risk(&|_: &[f64]| -1.0, &dist, Loss::ZeroOne, RiskMethod::Quadrature { spec: quad }).excess);
    }
    let passed = excess.iter().all(|e| e.abs() <= 1e-12);
    Ok(DegenerateReport { excess, max_eta, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fano_values() {
        assert_eq!(fano_lower_bound(1.0, 0.0, 16, 5), 0.25);
        let want = 0.25 * (1.0 - (0.02 + 0.02f64.sqrt()) / 16f64.ln());
        assert!((fano_lower_bound(1.0, 0.01, 16, 1) - want).abs() < 1e-15);
        assert!((fano_lower_bound(1.0, 0.01, 16, 1) - 0.23545).abs() < 1e-5);
        assert!(fano_lower_bound(1.0, 10.0, 2, 10) < 0.0);
        assert_eq!(fano_lower_bound_clamped(1.0, 10.0, 2, 10), 0.0);
    }

    #[test]
    fn lecam_values() {
        assert_eq!(lecam_lower_bound(0.3, 1.0), 0.075);
        let n = 10.0;
        assert!((lecam_lower_bound(1.0 / (2.0 * n), 0.25) - 1.0 / (32.0 * n)).abs() < 1e-15);
    }

    #[test]
    fn exponents() {
        assert!((rate_exponent(1.0, 0, 4, 0.0) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(rate_exponent(1.0, 0, 4, f64::INFINITY), 1.0);
        assert!((rate_exponent(2.0, 1, 1, 0.0) - 0.4).abs() < 1e-15);
        assert!((rate_exponent(1.0, 0, 1, 0.0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn twopoint_affinity_closed_form() {
        for n in [1, 4, 16] {
            let row = lecam_pipeline(2.0, n, 1.0, 0, 1, 1, 1, QuadSpec::new(64, 1)).unwrap();
            assert!((row.affinity - row.affinity_closed_form).abs() < 1e-12, "{row:?}");
            assert!((row.separation - row.v).abs() < 1e-12, "{row:?}");
            assert!(row.bound >= row.floor);
        }
    }

    #[test]
    fn affinity_identical_laws() {
        let fam = build_twopoint_family(2.0, 8, 1.0, 0, 1, 2, 1).unwrap();
        assert!((exact_affinity(&fam.p1, &fam.p1, 8).unwrap() - 1.0).abs() < 1e-12);
        assert!(exact_affinity(&fam.p0, &fam.p2, 8).is_ok());
    }
}
