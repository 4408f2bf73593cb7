//! Pseudo-spectral oracle: free evolution, conserved mass, frozen spectrum.
//!
//! `cargo run --release --example oracle`

use ndnls::model::{build_grids, relative_l2, Potential};
use ndnls::pde_oracle::{
    self, free_evolution, nonlocal_mass, scattering_invariance_check, OracleConfig,
};

fn main() -> ndnls::Result<()> {
    let (g, zg) = build_grids(2048, 12.0, 2048, 24.0)?;
    let u0 = Potential::gaussian(g, 0.095, 1.0, 0.0);
    let linear = OracleConfig {
        nonlinear: false,
        ..OracleConfig::default()
    };
    let st = pde_oracle::run(&u0, 0.25, &linear)?;
    println!(
        "linear run vs exact propagator {:.2e}",
        relative_l2(&st.u, &free_evolution(&g, &u0.u, 0.25))
    );
    let m0 = nonlocal_mass(&g, &u0.u);
    let mut drift: f64 = 0.0;
    pde_oracle::run_observed(&u0, 0.25, &OracleConfig::default(), |_, u| {
        drift = drift.max((nonlocal_mass(&g, u) - m0).norm() / m0.norm());
    })?;
    println!("nonlocal mass {m0:.10}, max relative drift {drift:.2e}");
    for t in [0.1, 0.25] {
        let rep = scattering_invariance_check(&u0, t, &zg, &OracleConfig::default())?;
        println!(
            "t={t}: a drift {:.2e}, B2 drift {:.2e}",
            rep.a_deviation, rep.b2_deviation
        );
    }
    Ok(())
}
