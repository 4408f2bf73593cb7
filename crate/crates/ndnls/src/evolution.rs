//! Exact time evolution of scattering and reflection data in the `z` variable.

use crate::direct_scattering::{ReflectionData, ScatteringData};
use crate::model::{C64, I};

fn phase(z: f64, t: f64) -> C64 {
    (I * 4.0 * z * z * t).exp()
}

/// `r- -> r- e^{4iz^2 t}`, `r+ -> r+ e^{-4iz^2 t}`.
pub fn evolve_reflection(r: &ReflectionData, t: f64) -> ReflectionData {
    let e: Vec<C64> = r.z.iter().map(|&z| phase(z, t)).collect();
    ReflectionData {
        z: r.z.clone(),
        r_minus: r.r_minus.iter().zip(&e).map(|(a, p)| a * p).collect(),
        r_plus: r.r_plus.iter().zip(&e).map(|(a, p)| a / p).collect(),
        sup_r1: r.sup_r1,
        sup_r2: r.sup_r2,
    }
}

/// `a`, `d` are frozen; `B2 -> B2 e^{4iz^2 t}`, `C2 -> C2 e^{-4iz^2 t}`.
pub fn evolve_scattering(sd: &ScatteringData, t: f64) -> ScatteringData {
    let e: Vec<C64> = sd.z.iter().map(|&z| phase(z, t)).collect();
    ScatteringData {
        z: sd.z.clone(),
        a: sd.a.clone(),
        d: sd.d.clone(),
        b2: sd.b2.iter().zip(&e).map(|(a, p)| a * p).collect(),
        c2: sd.c2.iter().zip(&e).map(|(a, p)| a / p).collect(),
        a_inf: sd.a_inf,
        d_inf: sd.d_inf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct_scattering::reflection;
    use crate::model::SpectralGrid;

    fn data() -> ScatteringData {
        let g = SpectralGrid { m: 64, z_max: 4.0 };
        let z = g.nodes();
        let f = |s: f64| -> Vec<C64> {
            z.iter()
                .map(|&x| C64::new((-x * x * s).exp() * 0.1, 0.05 * x * (-x * x).exp()))
                .collect()
        };
        let b2 = f(1.0);
        let c2 = f(0.5);
        let a: Vec<C64> = z.iter().map(|&x| C64::new(1.0, 0.01 * x)).collect();
        let d = (0..z.len())
            .map(|k| (C64::new(1.0, 0.0) - b2[k] * c2[k] / (4.0 * z[k])) / a[k])
            .collect();
        ScatteringData {
            z,
            a,
            d,
            b2,
            c2,
            a_inf: C64::new(1.0, 0.0),
            d_inf: C64::new(1.0, 0.0),
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let sd = data();
        let e = evolve_scattering(&sd, 0.0);
        assert_eq!(e.b2, sd.b2);
        assert_eq!(e.c2, sd.c2);
        let r = reflection(&sd).unwrap();
        assert_eq!(evolve_reflection(&r, 0.0).r_plus, r.r_plus);
    }

    #[test]
    fn commutes_with_reflection() {
        let sd = data();
        let t = 0.37;
        let a = reflection(&evolve_scattering(&sd, t)).unwrap();
        let b = evolve_reflection(&reflection(&sd).unwrap(), t);
        for k in 0..sd.z.len() {
            assert!((a.r_plus[k] - b.r_plus[k]).norm() < 1e-15);
            assert!((a.r_minus[k] - b.r_minus[k]).norm() < 1e-15);
        }
    }

    #[test]
    fn unimodularity_preserved() {
        let sd = data();
        let e = evolve_scattering(&sd, 2.5);
        assert!((sd.unimodularity_defect() - e.unimodularity_defect()).abs() < 1e-15);
    }
}
