use ndnls::direct_scattering::{
    integral_form_a, reflection, scattering_data, solve_jost, JostKind,
};
use ndnls::model::{
    build_grids, build_potential_matrices, Potential, SpatialGrid, SpectralGrid, C64,
};

fn gaussian(a: f64) -> Potential {
    Potential::gaussian(SpatialGrid { n: 2048, l: 12.0 }, a, 1.0, 0.0)
}

#[test]
fn born_scaling_of_data() {
    let zg = SpectralGrid {
        m: 128,
        z_max: 12.0,
    };
    let (e1, e2) = (0.02, 0.01);
    let s1 = scattering_data(&gaussian(e1), &zg);
    let s2 = scattering_data(&gaussian(e2), &zg);
    let ratio = |f: &dyn Fn(&ndnls::direct_scattering::ScatteringData) -> f64| f(&s1) / f(&s2);
    let b = ratio(&|s| s.b2.iter().map(|c| c.norm()).fold(0.0, f64::max));
    let a = ratio(&|s| s.a.iter().map(|c| (c - 1.0).norm()).fold(0.0, f64::max));
    assert!((b - 2.0).abs() < 0.01, "B2 ratio {b}");
    assert!((a - 4.0).abs() < 0.05, "a - 1 ratio {a}");
}

#[test]
fn a_approaches_its_edge_limit() {
    let p = gaussian(0.095);
    let mut prev = f64::INFINITY;
    for z in [4.0, 8.0, 16.0] {
        let zg = SpectralGrid { m: 512, z_max: z };
        let sd = scattering_data(&p, &zg);
        let d = (sd.a[sd.a.len() - 1] - sd.a_inf)
            .norm()
            .max((sd.a[0] - sd.a_inf).norm());
        assert!(d < prev, "edge distance {d} at Z={z}");
        assert!(d * z < 5e-3, "edge distance {d} at Z={z} is not O(1/Z)");
        prev = d;
    }
    assert!((sd_d_inf(&p) - 1.0 / sd_a_inf(&p)).norm() < 1e-14);
}

fn sd_a_inf(p: &Potential) -> C64 {
    scattering_data(p, &SpectralGrid { m: 8, z_max: 1.0 }).a_inf
}

fn sd_d_inf(p: &Potential) -> C64 {
    scattering_data(p, &SpectralGrid { m: 8, z_max: 1.0 }).d_inf
}

#[test]
fn wronskian_and_integral_forms_of_a_agree() {
    let mut errs = Vec::new();
    for n in [1024, 2048, 4096] {
        let (g, _) = build_grids(n, 12.0, 8, 1.0).unwrap();
        let p = Potential::gaussian(g, 0.095, 1.0, 0.3);
        let mats = build_potential_matrices(&p);
        let sd = scattering_data(&p, &SpectralGrid { m: 8, z_max: 1.0 });
        let k =
            sd.z.iter()
                .position(|&x| (x - 0.625).abs() < 1e-12)
                .unwrap();
        errs.push((sd.a[k] - integral_form_a(&p, &mats, sd.z[k])).norm());
    }
    assert!(errs[2] < 1e-7, "{errs:?}");
    assert!(
        errs[0] / errs[1] > 3.0 && errs[1] / errs[2] > 3.0,
        "{errs:?}"
    );
}

#[test]
fn jost_high_z_limit_is_the_phase_factor() {
    let p = gaussian(0.095);
    let mats = build_potential_matrices(&p);
    let uv = p.uv();
    let h = p.grid.h();
    let mut cum = vec![C64::new(0.0, 0.0); uv.len()];
    for j in 1..uv.len() {
        cum[j] = cum[j - 1] + (uv[j - 1] + uv[j]) * (0.5 * h);
    }
    let limit: Vec<C64> = cum.iter().map(|c| (c * C64::new(0.0, 0.5)).exp()).collect();
    let mut prev = f64::INFINITY;
    for z in [6.0, 12.0, 24.0] {
        let mu = solve_jost(&p, &mats, z, JostKind::MuMinus);
        let d = mu
            .values
            .iter()
            .zip(&limit)
            .map(|(f, l)| (f[0] - l).norm())
            .fold(0.0, f64::max);
        assert!(d < prev, "{d} at z={z}");
        prev = d;
    }
    assert!(prev < 1e-3, "{prev}");
}

#[test]
fn data_is_branch_independent() {
    // Stored data depend on z only, so mirrored nodes obey the conjugation symmetry exactly.
    let sd = scattering_data(
        &gaussian(0.095),
        &SpectralGrid {
            m: 256,
            z_max: 24.0,
        },
    );
    assert!(sd.symmetry_defect() < 1e-12);
    assert!(sd.off_diagonal_symmetry_defect() < 1e-12);
}

#[test]
fn complex_data_stays_in_the_small_norm_regime() {
    let g = SpatialGrid { n: 2048, l: 12.0 };
    let u: Vec<C64> = g
        .nodes()
        .iter()
        .map(|&x| C64::new(0.06, 0.03) * (-(x - 0.5f64).powi(2)).exp())
        .collect();
    let p = Potential::new(g, u).unwrap();
    let sd = scattering_data(
        &p,
        &SpectralGrid {
            m: 1024,
            z_max: 24.0,
        },
    );
    let r = reflection(&sd).unwrap();
    assert!(sd.unimodularity_defect() < 1e-6);
    assert!(r.sup_r1 < 1.0 && r.sup_r2 < 1.0);
}
