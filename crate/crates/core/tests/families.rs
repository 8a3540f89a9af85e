use hinge_minimax::bounds::{exact_affinity, excess_sum_separation};
use hinge_minimax::dist::{
    build_lower_bound_family, build_noiseless_family, build_twopoint_family, check_noise, LowerBoundParams, NoiseMethod,
    NoiseProfile, QuadSpec,
};
use hinge_minimax::funcspace::validate_chom;

fn params(d: usize, q: usize) -> LowerBoundParams {
    LowerBoundParams::new(19, 1.0, 1.0, 2.0, 1.0, q, 1, d, 1, 3)
}

#[test]
fn lower_bound_members_stay_in_range() {
    let fam = build_lower_bound_family(&params(1, 0)).unwrap();
    let eps = fam.meta.eps;
    assert!(fam.members.len() >= 3);
    for m in &fam.members {
        for i in 0..=2000 {
            let x = i as f64 / 2000.0;
            let e = m.eta(&[x]);
            assert!(e >= 0.5 - eps - 1e-12 && e <= 1.0 + 1e-12, "eta({x}) = {e}");
            if x >= 0.5 {
                assert!((e - 1.0).abs() < 1e-12, "eta({x}) = {e} on the upper region");
            }
        }
    }
}

#[test]
fn lower_bound_members_are_in_class() {
    for (d, q) in [(1, 0), (2, 1)] {
        let fam = build_lower_bound_family(&params(d, q)).unwrap();
        for m in fam.members.iter().take(4) {
            let f = m.eta_chom.as_ref().unwrap();
            let rep = validate_chom(f, 33);
            assert!(rep.passed(), "{:?}", rep.checks);
        }
    }
}

#[test]
fn lower_bound_noise_condition() {
    let p = params(1, 0);
    let fam = build_lower_bound_family(&p).unwrap();
    let eps = fam.meta.eps;
    let profile = NoiseProfile::new(p.s, p.alpha, 1.0).unwrap();
    let t0 = 2.0 * eps * (1.0 + 1e-9);
    let ts: Vec<f64> = (0..20).map(|i| t0 + i as f64 * (1.0 - t0) / 20.0).collect();
    for m in &fam.members {
        let rep = check_noise(m, &profile, &ts, NoiseMethod::Quadrature { spec: QuadSpec::new(4096, 1) });
        assert!(rep.passed, "{:?}", rep.rows);
        let want = fam.meta.mass_const * 2f64.powf(p.s) * eps.powf(p.s);
        assert!((rep.rows[0].measure - want).abs() < 1e-9, "{} vs {want}", rep.rows[0].measure);
    }
}

#[test]
fn lower_bound_pairs_are_separated() {
    let p = params(1, 0);
    let fam = build_lower_bound_family(&p).unwrap();
    let eps = fam.meta.eps;
    let floor = fam.meta.mass_const * eps.powf(p.s + 1.0) * 2f64.powf(p.s) / 4.0;
    let marg = &fam.members[0].marginal;
    for i in 0..fam.members.len() {
        for j in i + 1..fam.members.len() {
            let sep = excess_sum_separation(&*fam.members[i].eta, &*fam.members[j].eta, marg, QuadSpec::new(4096, 1));
            assert!(sep >= floor * (1.0 - 1e-9), "pair ({i},{j}): {sep} < {floor}");
        }
    }
}

#[test]
fn twopoint_triple() {
    for n in [4usize, 16] {
        let fam = build_twopoint_family(2.0, n, 1.0, 0, 1, 2, 1).unwrap();
        for x in [[0.0, 0.0], [0.3, 0.9], [1.0, 1.0]] {
            assert_eq!(fam.p1.eta(&x), 1.0);
            assert_eq!(fam.p2.eta(&x), 0.5);
        }
        let g = fam.p0.marginal.quadrature(QuadSpec::new(256, 1));
        let gap = g.integrate(|x| 1.0 - fam.p0.eta(x));
        assert!(gap >= 1.0 / (2.0 * n as f64) - 1e-12, "{gap}");
    }
    let fam = build_twopoint_family(2.0, 4, 1.0, 0, 1, 1, 1).unwrap();
    assert!(exact_affinity(&fam.p0, &fam.p1, 4).unwrap() >= 0.25);
    assert!(build_twopoint_family(1.0, 4, 1.0, 0, 1, 1, 1).is_err());
    assert!(build_twopoint_family(1.1, 4, 1.0, 0, 1, 1, 1).is_err());
}

#[test]
fn noiseless_members_are_in_class() {
    let fam = build_noiseless_family(4, 1.0, 0, 1, 1, 1, 0.75, 5).unwrap();
    assert_eq!(fam.members.len(), fam.meta.m_alternatives + 1);
    for m in &fam.members {
        let rep = validate_chom(m.eta_chom.as_ref().unwrap(), 65);
        assert!(rep.passed(), "{:?}", rep.checks);
        for i in 0..=200 {
            let e = m.eta(&[i as f64 / 200.0]);
            assert!((0.0..=1.0).contains(&e));
        }
    }
    assert!(build_noiseless_family(4, 1.0, 0, 1, 1, 1, 0.5, 5).is_err());
}

#[test]
fn rejects_bad_grid() {
    let mut p = params(1, 0);
    p.grid = 10;
    assert!(build_lower_bound_family(&p).is_err());
    p.grid = 19;
    p.lambda = 1.0;
    assert!(build_lower_bound_family(&p).is_err());
}
