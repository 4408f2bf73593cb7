use ndnls::model::{Potential, SpatialGrid, C64, I};
use ndnls::reconstruction::{ist_solve, phase_unwind, IstOptions};
use statrs::function::erf::erfc;

#[test]
fn phase_unwind_matches_closed_form_tail_integral() {
    let a = 0.095;
    let g = SpatialGrid { n: 2048, l: 12.0 };
    let p = Potential::gaussian(g, a, 1.0, 0.0);
    let exact: Vec<C64> = g
        .nodes()
        .iter()
        .map(|&x| I * a * a * (std::f64::consts::PI / 8.0).sqrt() * erfc(2f64.sqrt() * x))
        .collect();
    let w: Vec<C64> =
        p.u.iter()
            .zip(&exact)
            .map(|(u, t)| u * (I * t).exp())
            .collect();
    let un = phase_unwind(&w, g.h(), 1e-14, 100).unwrap();
    let dt = un
        .theta
        .iter()
        .zip(&exact)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let du =
        un.u.iter()
            .zip(&p.u)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max);
    assert!(dt < 1e-6, "theta error {dt}");
    assert!(du < 1e-6, "u error {du}");
    assert!(un
        .increments
        .windows(2)
        .all(|w| w[1] <= w[0] || w[1] < 1e-15));
}

#[test]
fn zero_datum_round_trips_to_zero() {
    let g = SpatialGrid { n: 256, l: 12.0 };
    let zg = ndnls::model::SpectralGrid {
        m: 256,
        z_max: 24.0,
    };
    let sol = ist_solve(&Potential::zero(g), 0.3, &zg, &IstOptions::default()).unwrap();
    assert!(sol.u.iter().all(|c| c.norm() == 0.0));
    assert_eq!(sol.x.len(), 256 / 8);
}

#[test]
fn failing_gate_is_refused() {
    let g = SpatialGrid { n: 256, l: 12.0 };
    let zg = ndnls::model::SpectralGrid {
        m: 256,
        z_max: 24.0,
    };
    let err = ist_solve(
        &Potential::gaussian(g, 0.2, 1.0, 0.0),
        0.0,
        &zg,
        &IstOptions::default(),
    )
    .unwrap_err();
    assert_eq!(err.exit_code(), 2);
}
