//! Scalar delta problem and the coupled boundary system at a few points.
//!
//! `cargo run --release --example rh_solve`

use ndnls::cauchy::CauchyProjector;
use ndnls::direct_scattering::{reflection, scattering_data};
use ndnls::model::{build_grids, Potential};
use ndnls::rh_solver::{
    certificate, deltify, solve_boundary_pair, solve_boundary_pair_delta, solve_scalar_delta,
    SolverOptions,
};

fn main() -> ndnls::Result<()> {
    let (g, zg) = build_grids(2048, 12.0, 2048, 24.0)?;
    let r = reflection(&scattering_data(
        &Potential::gaussian(g, 0.095, 1.0, 0.0),
        &zg,
    ))?;
    let proj = CauchyProjector::new(&zg);
    let delta = solve_scalar_delta(&proj, &r)?;
    println!(
        "delta jump defect {:.2e}, edge distance {:.2e}",
        delta.jump_defect(&r),
        delta.edge_defect()
    );
    let rd = deltify(&r, &delta);
    let opts = SolverOptions::default();
    println!("bound sup r1 * sup r2 = {:.3e}", r.sup_r1 * r.sup_r2);
    for x in [-3.0, -0.5, 0.0, 0.5, 3.0] {
        let (pair, cert) = if x >= 0.0 {
            let p = solve_boundary_pair(&proj, &r, x, &opts)?;
            let c = certificate(&proj, &p, &r.r_minus, &r.r_plus);
            (p, c)
        } else {
            let p = solve_boundary_pair_delta(&proj, &rd, x, &opts)?;
            let c = certificate(&proj, &p, &rd.r_minus, &rd.r_plus);
            (p, c)
        };
        println!(
            "x={x:>5} {:<9} iterations {:>2} residual {:.2e} certificate {:.2e} contraction {:.2e}",
            pair.flavor.name(),
            pair.iterations,
            pair.residual,
            cert,
            pair.contraction.unwrap_or(0.0)
        );
    }
    Ok(())
}
