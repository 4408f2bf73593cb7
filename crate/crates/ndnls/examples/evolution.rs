//! Time evolution through the reflection data, checked against the oracle.
//!
//! `cargo run --release --example evolution [out_dir]`

use std::path::PathBuf;

use ndnls::model::build_grids;
use ndnls::model::Potential;
use ndnls::pde_oracle::{self, OracleConfig};
use ndnls::pipeline::{compare_solutions, write_compare, write_oracle, write_solution};
use ndnls::reconstruction::{ist_solve, IstOptions};

fn main() -> ndnls::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    std::fs::create_dir_all(&out)?;
    let (g, zg) = build_grids(2048, 12.0, 2048, 24.0)?;
    let u0 = Potential::gaussian(g, 0.095, 1.0, 0.0);
    let cfg = OracleConfig::default();
    for t in [0.05, 0.1, 0.25, 0.5] {
        let sol = ist_solve(&u0, t, &zg, &IstOptions::default())?;
        let st = pde_oracle::run(&u0, t, &cfg)?;
        let c = compare_solutions(&sol, &st);
        println!("t={t:<5} IST vs oracle relative L2 {:.3e}", c.relative_l2);
        if t == 0.25 {
            write_solution(&out.join("solution.csv"), &sol)?;
            write_oracle(&out.join("oracle.csv"), &st)?;
            write_compare(&out.join("compare.csv"), &c)?;
        }
    }
    Ok(())
}
