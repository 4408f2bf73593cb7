//! Small-norm gate and discrete Sobolev norms for a few initial data.
//!
//! `cargo run --release --example gate_check`

use ndnls::model::{build_grids, gate_functional, sobolev_norms, Potential};

fn main() -> ndnls::Result<()> {
    let (g, _) = build_grids(2048, 12.0, 2048, 24.0)?;
    let cases = [
        ("gaussian A=0.050", Potential::gaussian(g, 0.05, 1.0, 0.0)),
        ("gaussian A=0.095", Potential::gaussian(g, 0.095, 1.0, 0.0)),
        ("gaussian A=0.120", Potential::gaussian(g, 0.12, 1.0, 0.0)),
        ("sech A=0.060", Potential::sech(g, 0.06, 1.0, 0.0)),
        ("shifted gaussian", Potential::gaussian(g, 0.08, 1.0, 0.8)),
    ];
    println!(
        "{:<18} {:>10} {:>6} {:>10} {:>10}",
        "datum", "gate", "pass", "H2", "H11"
    );
    for (name, p) in &cases {
        let gate = gate_functional(p);
        let s = sobolev_norms(&g, &p.u);
        println!(
            "{name:<18} {:>10.6} {:>6} {:>10.6} {:>10.6}",
            gate.value, gate.pass, s.h2, s.h11
        );
    }
    println!("threshold = {}", ndnls::model::GATE_THRESHOLD);
    Ok(())
}
