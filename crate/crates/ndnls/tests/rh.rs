use ndnls::cauchy::CauchyProjector;
use ndnls::direct_scattering::{reflection, scattering_data, ReflectionData};
use ndnls::model::{build_grids, Potential, C64, ONE};
use ndnls::rh_solver::{certificate, solve_boundary_pair, solve_scalar_delta, SolverOptions};
use ndnls::Error;

fn setup() -> (CauchyProjector, ReflectionData) {
    let (g, zg) = build_grids(2048, 12.0, 2048, 24.0).unwrap();
    let r = reflection(&scattering_data(
        &Potential::gaussian(g, 0.095, 1.0, 0.0),
        &zg,
    ))
    .unwrap();
    (CauchyProjector::new(&zg), r)
}

#[test]
fn neumann_first_term_is_the_born_term() {
    let (p, r) = setup();
    for eps in [1.0, 0.5] {
        let r = r.scaled(eps);
        let x = 0.4;
        let pair = solve_boundary_pair(&p, &r, x, &SolverOptions::default()).unwrap();
        let born: Vec<C64> =
            r.z.iter()
                .zip(&r.r_minus)
                .map(|(&z, rm)| rm * (C64::new(0.0, 2.0 * z * x)).exp())
                .collect();
        let born = p.minus(&born);
        let err = pair.m[1]
            .iter()
            .zip(&born)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let size = born.iter().map(|c| c.norm()).fold(0.0, f64::max);
        // Second-order remainder: m2 has no O(eps^2) term, so the gap is O(eps^3).
        assert!(
            err < 0.05 * eps * eps * size + 1e-12,
            "eps {eps}: {err} vs {size}"
        );
        let m1 = pair.m[0]
            .iter()
            .map(|c| (c - ONE).norm())
            .fold(0.0, f64::max);
        assert!(m1 < 0.05 * eps, "eps {eps}: m1 - 1 = {m1}");
    }
}

#[test]
fn krylov_fallback_handles_large_data() {
    let (p, r) = setup();
    // Far outside the small-norm regime: plain alternation diverges here.
    let big = r.scaled(32.0);
    let opts = SolverOptions {
        tol: 1e-10,
        max_iter: 400,
    };
    let pair = solve_boundary_pair(&p, &big, 0.0, &opts).unwrap();
    assert!(
        pair.krylov,
        "alternation was expected to stall, contraction {:?}",
        pair.contraction
    );
    assert!(pair.residual <= 1e-10);
    assert!(certificate(&p, &pair, &big.r_minus, &big.r_plus) <= 1e-10);
}

#[test]
fn exhausted_budget_reports_convergence_failure() {
    let (p, r) = setup();
    let opts = SolverOptions {
        tol: 1e-10,
        max_iter: 2,
    };
    match solve_boundary_pair(&p, &r, 0.0, &opts) {
        Err(e @ Error::Convergence { .. }) => assert_eq!(e.exit_code(), 3),
        other => panic!("expected a convergence error, got {other:?}"),
    }
}

#[test]
fn boundary_values_have_the_right_frequency_support() {
    let (p, r) = setup();
    let pair = solve_boundary_pair(&p, &r, 0.5, &SolverOptions::default()).unwrap();
    let sup = |v: &[C64]| v.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let m_minus_e1: Vec<C64> = pair.m[0]
        .iter()
        .map(|c| c - ONE)
        .chain(pair.m[1].iter().copied())
        .collect();
    let n_minus_e2: Vec<C64> = pair.n[0]
        .iter()
        .copied()
        .chain(pair.n[1].iter().map(|c| c - ONE))
        .collect();
    let len = r.z.len();
    for k in 0..2 {
        let m = &m_minus_e1[k * len..(k + 1) * len];
        let n = &n_minus_e2[k * len..(k + 1) * len];
        assert!(
            sup(&p.plus(m)) < 1e-6 * sup(m).max(1e-3),
            "component {k} of m - e1"
        );
        assert!(
            sup(&p.minus(n)) < 1e-6 * sup(n).max(1e-3),
            "component {k} of n - e2"
        );
    }
}

#[test]
fn delta_is_trivial_for_zero_data_and_satisfies_jump() {
    let (p, r) = setup();
    let d = solve_scalar_delta(&p, &ReflectionData::zero(p.grid())).unwrap();
    assert!(d
        .plus
        .iter()
        .chain(&d.minus)
        .all(|c| (c - ONE).norm() < 1e-15));
    let d = solve_scalar_delta(&p, &r.scaled(3.0)).unwrap();
    assert!(d.jump_defect(&r.scaled(3.0)) < 1e-8);
}
