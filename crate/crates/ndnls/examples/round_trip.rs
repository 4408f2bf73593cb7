//! Inverse scattering at t = 0 reproduces the initial datum.
//!
//! `cargo run --release --example round_trip [out_dir]`

use std::path::PathBuf;

use ndnls::model::{build_grids, relative_l2, Potential};
use ndnls::pipeline::{write_rh_diag, write_solution};
use ndnls::reconstruction::{ist_solve, IstOptions};

fn main() -> ndnls::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    for n in [1024, 2048, 4096] {
        let (g, zg) = build_grids(n, 12.0, n, 24.0)?;
        let u0 = Potential::gaussian(g, 0.095, 1.0, 0.0);
        let opts = IstOptions::default();
        let sol = ist_solve(&u0, 0.0, &zg, &opts)?;
        let reference: Vec<_> = u0.u.iter().step_by(opts.nx_stride).copied().collect();
        println!(
            "N=M={n:<5} relative L2 {:.3e}  origin mismatch {:.2e}  unwind iterations {}",
            relative_l2(&sol.u, &reference),
            sol.origin_mismatch,
            sol.unwind_iterations
        );
        if n == 2048 {
            std::fs::create_dir_all(&out)?;
            write_solution(&out.join("solution.csv"), &sol)?;
            write_rh_diag(&out.join("rh_diag.csv"), &sol)?;
        }
    }
    println!("wrote {}", out.join("solution.csv").display());
    Ok(())
}
