//! Cross-check of the transformed Jost solution against the k-plane system.
//!
//! `cargo run --release --example kplane`

use ndnls::direct_scattering::kplane_crosscheck;
use ndnls::model::{Potential, SpatialGrid, C64};

fn main() {
    let ks = [
        C64::new(0.5, 0.0),
        C64::new(1.0, 0.0),
        C64::new(1.5, 0.0),
        C64::new(0.0, 0.5),
        C64::new(0.0, 1.0),
    ];
    for n in [2048, 4096, 8192] {
        let p = Potential::gaussian(SpatialGrid { n, l: 12.0 }, 0.095, 1.0, 0.0);
        let row: Vec<String> = ks
            .iter()
            .map(|&k| format!("{:.2e}", kplane_crosscheck(&p, k, 24.0).unwrap()))
            .collect();
        println!("N={n:<5} {}", row.join("  "));
    }
    let p = Potential::gaussian(SpatialGrid { n: 2048, l: 12.0 }, 0.095, 1.0, 0.0);
    for k in [C64::new(0.0, 0.0), C64::new(1.0, 1.0), C64::new(6.0, 0.0)] {
        println!("k={k}: {}", kplane_crosscheck(&p, k, 24.0).unwrap_err());
    }
}
