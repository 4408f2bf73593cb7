//! Cauchy projections on the spectral grid against residue-calculus values.
//!
//! `cargo run --release --example cauchy`

use ndnls::cauchy::CauchyProjector;
use ndnls::model::{SpectralGrid, C64, I};

fn sup(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn main() {
    let g = SpectralGrid {
        m: 2048,
        z_max: 24.0,
    };
    let p = CauchyProjector::new(&g);
    let z = g.nodes();
    // 1/(z^2+1) = (i/2)/(z+i) - (i/2)/(z-i); the first term is the C+ part.
    let f: Vec<C64> = z
        .iter()
        .map(|&x| C64::new(1.0 / (x * x + 1.0), 0.0))
        .collect();
    let want_p: Vec<C64> = z.iter().map(|&x| I * 0.5 / C64::new(x, 1.0)).collect();
    let want_m: Vec<C64> = z.iter().map(|&x| I * 0.5 / C64::new(x, -1.0)).collect();
    let (cp, cm) = p.split(&f);
    let (pp, pm) = p.split_periodic(&f);
    println!(
        "tail-corrected: |C+ f - exact| {:.2e}  |C- f - exact| {:.2e}",
        sup(&cp, &want_p),
        sup(&cm, &want_m)
    );
    println!(
        "periodic:       |C+ f - exact| {:.2e}  |C- f - exact| {:.2e}",
        sup(&pp, &want_p),
        sup(&pm, &want_m)
    );
    let diff: Vec<C64> = cp.iter().zip(&cm).map(|(a, b)| a - b).collect();
    println!("C+ f - C- f - f {:.2e}", sup(&diff, &f));
    let h = p.hilbert(&f);
    // C+ + C- = -iH, so H(1/(z^2+1)) = -z/(z^2+1) in this convention.
    let want_h: Vec<C64> = z
        .iter()
        .map(|&x| C64::new(-x / (x * x + 1.0), 0.0))
        .collect();
    println!(
        "Hilbert transform of 1/(z^2+1) vs -z/(z^2+1): {:.2e}",
        sup(&h, &want_h)
    );
    let (pos, neg) = p.frequency_content(&want_p);
    println!("frequency content of C+ f: nonnegative {pos:.3e}, negative {neg:.3e}");
}
