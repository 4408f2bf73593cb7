//! Direct scattering: Jost solutions, Wronskians, reflection coefficients.
//!
//! `cargo run --release --example scattering [out_dir]`

use std::path::PathBuf;

use ndnls::direct_scattering::{reflection, scattering_data};
use ndnls::model::{build_grids, Potential};
use ndnls::pipeline::write_scattering;

fn main() -> ndnls::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let (g, zg) = build_grids(2048, 12.0, 2048, 24.0)?;
    let u0 = Potential::gaussian(g, 0.095, 1.0, 0.0);
    let sd = scattering_data(&u0, &zg);
    let r = reflection(&sd)?;
    println!("unimodularity defect  {:.3e}", sd.unimodularity_defect());
    println!("a/d symmetry defect   {:.3e}", sd.symmetry_defect());
    println!(
        "C2/B2 symmetry defect {:.3e}",
        sd.off_diagonal_symmetry_defect()
    );
    println!(
        "min|a| {:.6}  min|d| {:.6}  sup b {:.6}",
        sd.min_abs_a(),
        sd.min_abs_d(),
        sd.sup_b()
    );
    println!("sup r1 {:.6}  sup r2 {:.6}", r.sup_r1, r.sup_r2);
    println!("a_inf {:.10}  a(edge) {:.10}", sd.a_inf, sd.a[0]);
    std::fs::create_dir_all(&out)?;
    write_scattering(&out.join("scattering.csv"), &sd, &r)?;
    println!("wrote {}", out.join("scattering.csv").display());
    Ok(())
}
