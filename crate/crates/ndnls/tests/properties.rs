use ndnls::cauchy::CauchyProjector;
use ndnls::direct_scattering::ReflectionData;
use ndnls::evolution::evolve_reflection;
use ndnls::model::{
    gate_functional, nonlocal_conjugate, reflect, Potential, SpatialGrid, SpectralGrid, C64,
};
use proptest::prelude::*;

fn field(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(
        (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(a, b)| C64::new(a, b)),
        len,
    )
}

fn sup(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn l2(a: &[C64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cauchy_difference_is_identity(f in field(128)) {
        let p = CauchyProjector::new(&SpectralGrid { m: 128, z_max: 8.0 });
        let (cp, cm) = p.split_periodic(&f);
        let d: Vec<C64> = cp.iter().zip(&cm).map(|(a, b)| a - b).collect();
        prop_assert!(sup(&d, &f) < 1e-14);
        let (cp, cm) = p.split(&f);
        let d: Vec<C64> = cp.iter().zip(&cm).map(|(a, b)| a - b).collect();
        prop_assert!(sup(&d, &f) < 1e-13);
    }

    #[test]
    fn periodic_projections_are_contractions(f in field(128)) {
        let p = CauchyProjector::new(&SpectralGrid { m: 128, z_max: 8.0 });
        let (cp, cm) = p.split_periodic(&f);
        prop_assert!(l2(&cp) <= l2(&f) * (1.0 + 1e-14));
        prop_assert!(l2(&cm) <= l2(&f) * (1.0 + 1e-14));
    }

    #[test]
    fn hilbert_squares_to_minus_one_on_mean_zero(f in field(128)) {
        let p = CauchyProjector::new(&SpectralGrid { m: 128, z_max: 8.0 });
        let mean = f.iter().sum::<C64>() / f.len() as f64;
        let f: Vec<C64> = f.iter().map(|c| c - mean).collect();
        // Zero the Nyquist mode too: its sign is not antisymmetric.
        let hat = ndnls::fourier::Fourier::new(128);
        let mut fh = hat.forward(&f);
        fh[64] = C64::new(0.0, 0.0);
        let f = hat.inverse(&fh);
        let hh = p.hilbert_periodic(&p.hilbert_periodic(&f));
        let neg: Vec<C64> = f.iter().map(|c| -c).collect();
        prop_assert!(sup(&hh, &neg) < 1e-13);
        prop_assert!((l2(&p.hilbert_periodic(&f)) - l2(&f)).abs() < 1e-12);
    }

    #[test]
    fn reduction_is_an_involution(f in field(64)) {
        let back = nonlocal_conjugate(&nonlocal_conjugate(&f));
        prop_assert!(sup(&back, &f) < 1e-15);
        prop_assert!(sup(&reflect(&reflect(&f)), &f) == 0.0);
    }

    #[test]
    fn gate_is_invariant_under_spatial_reflection(a in 0.01..0.2f64, c in -1.0..1.0f64, w in 0.7..1.5f64) {
        let g = SpatialGrid { n: 512, l: 12.0 };
        let p = Potential::gaussian(g, a, w, c);
        let q = Potential::new(g, reflect(&p.u)).unwrap();
        let (gp, gq) = (gate_functional(&p).value, gate_functional(&q).value);
        prop_assert!((gp - gq).abs() < 1e-12 * gp.max(1.0));
    }

    #[test]
    fn evolution_is_a_group(t1 in -1.0..1.0f64, t2 in -1.0..1.0f64, f in field(32), g in field(32)) {
        let grid = SpectralGrid { m: 32, z_max: 4.0 };
        let mut r = ReflectionData::zero(&grid);
        r.r_plus = f;
        r.r_minus = g;
        let a = evolve_reflection(&evolve_reflection(&r, t1), t2);
        let b = evolve_reflection(&r, t1 + t2);
        prop_assert!(sup(&a.r_plus, &b.r_plus) < 1e-12);
        prop_assert!(sup(&a.r_minus, &b.r_minus) < 1e-12);
        let back = evolve_reflection(&evolve_reflection(&r, t1), -t1);
        prop_assert!(sup(&back.r_plus, &r.r_plus) < 1e-12);
    }
}
