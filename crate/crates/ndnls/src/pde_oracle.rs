//! Pseudo-spectral integrator for `u_t = i u_xx + i (u^2 flip(conj u))_x` on
//! the periodic spatial grid. The linear part is propagated exactly in
//! frequency space and classical RK4 is applied to the transformed nonlinear
//! term (integrating-factor RK4).

use crate::direct_scattering::scattering_data;
use crate::error::{Error, Result};
use crate::fourier::{angular_frequencies, Fourier};
use crate::model::{reflect, trapezoid_c, Potential, SpatialGrid, SpectralGrid, C64, I, ZERO};

/// Edge ratio above which the periodic domain is considered too small.
pub const EDGE_LIMIT: f64 = 1e-8;
const EDGE_CHECK_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub dt: f64,
    pub dealias_fraction: f64,
    pub nonlinear: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            dealias_fraction: 2.0 / 3.0,
            nonlinear: true,
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleState {
    pub grid: SpatialGrid,
    pub u: Vec<C64>,
    pub t: f64,
}

struct Operator {
    fft: Fourier,
    xi: Vec<f64>,
    keep: Vec<bool>,
    nonlinear: bool,
}

impl Operator {
    fn new(grid: &SpatialGrid, cfg: &OracleConfig) -> Self {
        let xi = angular_frequencies(grid.n, grid.h());
        let cutoff = cfg.dealias_fraction * std::f64::consts::PI / grid.h();
        let keep = xi.iter().map(|k| k.abs() <= cutoff).collect();
        Self {
            fft: Fourier::new(grid.n),
            xi,
            keep,
            nonlinear: cfg.nonlinear,
        }
    }

    /// Fourier coefficients of `i d/dx (u^2 flip(conj u))`, dealiased.
    fn nonlinear_hat(&self, uhat: &[C64]) -> Vec<C64> {
        if !self.nonlinear {
            return vec![ZERO; uhat.len()];
        }
        let u = self.fft.inverse(uhat);
        let ubar: Vec<C64> = reflect(&u).into_iter().map(|c| c.conj()).collect();
        let mut p: Vec<C64> = u.iter().zip(&ubar).map(|(a, b)| a * a * b).collect();
        self.fft.forward_in_place(&mut p);
        for (k, c) in p.iter_mut().enumerate() {
            *c = if self.keep[k] {
                *c * (-self.xi[k])
            } else {
                ZERO
            };
        }
        p
    }

    fn step(&self, uhat: &[C64], dt: f64) -> Vec<C64> {
        let e2: Vec<C64> = self
            .xi
            .iter()
            .map(|k| (-I * k * k * (0.5 * dt)).exp())
            .collect();
        let n = uhat.len();
        let comb = |a: &[C64], s: f64, b: &[C64]| -> Vec<C64> {
            (0..n).map(|j| a[j] + b[j] * s).collect()
        };
        let k1 = self.nonlinear_hat(uhat);
        let a2: Vec<C64> = comb(uhat, 0.5 * dt, &k1)
            .iter()
            .zip(&e2)
            .map(|(a, e)| a * e)
            .collect();
        let k2 = self.nonlinear_hat(&a2);
        let eu: Vec<C64> = uhat.iter().zip(&e2).map(|(a, e)| a * e).collect();
        let k3 = self.nonlinear_hat(&comb(&eu, 0.5 * dt, &k2));
        let a4: Vec<C64> = (0..n).map(|j| eu[j] * e2[j] + k3[j] * e2[j] * dt).collect();
        let k4 = self.nonlinear_hat(&a4);
        (0..n)
            .map(|j| {
                let e = e2[j] * e2[j];
                e * uhat[j] + (e * k1[j] + e2[j] * (k2[j] + k3[j]) * 2.0 + k4[j]) * (dt / 6.0)
            })
            .collect()
    }
}

/// `F(u) = i u_xx + i (u^2 flip(conj u))_x` with spectral derivatives.
pub fn rhs(grid: &SpatialGrid, u: &[C64], cfg: &OracleConfig) -> Vec<C64> {
    let op = Operator::new(grid, cfg);
    let uhat = op.fft.forward(u);
    let mut f = op.nonlinear_hat(&uhat);
    for (k, c) in f.iter_mut().enumerate() {
        *c += -I * op.xi[k] * op.xi[k] * uhat[k];
    }
    op.fft.inverse_in_place(&mut f);
    f
}

/// Runs to time `t`, calling `observe(t, u)` after every step.
pub fn run_observed(
    u0: &Potential,
    t: f64,
    cfg: &OracleConfig,
    mut observe: impl FnMut(f64, &[C64]),
) -> Result<OracleState> {
    if cfg.dt.is_nan() || cfg.dt <= 0.0 || t.is_nan() || t < 0.0 {
        return Err(Error::Config(format!(
            "oracle needs dt > 0 and t >= 0, got dt = {}, t = {t}",
            cfg.dt
        )));
    }
    let grid = u0.grid;
    let edge = u0.edge_ratio();
    if edge > EDGE_LIMIT {
        return Err(Error::DomainTooSmall {
            t: 0.0,
            edge_ratio: edge,
        });
    }
    let op = Operator::new(&grid, cfg);
    let steps = if t == 0.0 {
        0
    } else {
        ((t / cfg.dt) - 1e-9).ceil() as usize
    };
    let mut uhat = op.fft.forward(&u0.u);
    let mut now = 0.0;
    for s in 0..steps {
        let dt = if s + 1 == steps { t - now } else { cfg.dt };
        let next = op.step(&uhat, dt);
        if next.iter().any(|c| !c.is_finite()) {
            return Err(Error::BlowUp { t: now });
        }
        uhat = next;
        now = if s + 1 == steps { t } else { now + dt };
        let u = op.fft.inverse(&uhat);
        if (s + 1) % EDGE_CHECK_EVERY == 0 || s + 1 == steps {
            let edge = crate::model::edge_ratio(&u);
            if edge > EDGE_LIMIT {
                return Err(Error::DomainTooSmall {
                    t: now,
                    edge_ratio: edge,
                });
            }
        }
        observe(now, &u);
    }
    Ok(OracleState {
        grid,
        u: op.fft.inverse(&uhat),
        t: now,
    })
}

pub fn run(u0: &Potential, t: f64, cfg: &OracleConfig) -> Result<OracleState> {
    run_observed(u0, t, cfg, |_, _| {})
}

/// Exact solution of the linear part, `u(t) = F^{-1}[e^{-i xi^2 t} F u0]`.
pub fn free_evolution(grid: &SpatialGrid, u0: &[C64], t: f64) -> Vec<C64> {
    let fft = Fourier::new(grid.n);
    let xi = angular_frequencies(grid.n, grid.h());
    let mut hat = fft.forward(u0);
    for (c, k) in hat.iter_mut().zip(&xi) {
        *c *= (-I * k * k * t).exp();
    }
    fft.inverse_in_place(&mut hat);
    hat
}

/// `\int u(x) conj(u(-x)) dx` by trapezoid.
pub fn nonlocal_mass(grid: &SpatialGrid, u: &[C64]) -> C64 {
    let f: Vec<C64> = u
        .iter()
        .zip(reflect(u))
        .map(|(a, b)| a * b.conj())
        .collect();
    trapezoid_c(&f, grid.h())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvarianceReport {
    /// `max_z |a(t,z) - a(0,z)|`
    pub a_deviation: f64,
    /// `max_z |B2(t,z) - B2(0,z) e^{4iz^2 t}|`
    pub b2_deviation: f64,
}

pub fn scattering_invariance_check(
    u0: &Potential,
    t: f64,
    g: &SpectralGrid,
    cfg: &OracleConfig,
) -> Result<InvarianceReport> {
    let gate = crate::model::gate_functional(u0);
    if !gate.pass {
        return Err(Error::GateFailed {
            value: gate.value,
            threshold: gate.threshold,
        });
    }
    let s0 = scattering_data(u0, g);
    let state = run(u0, t, cfg)?;
    let st = scattering_data(&Potential::new(u0.grid, state.u)?, g);
    let mut a_dev: f64 = 0.0;
    let mut b_dev: f64 = 0.0;
    for k in 0..g.m {
        let z = s0.z[k];
        a_dev = a_dev.max((st.a[k] - s0.a[k]).norm());
        b_dev = b_dev.max((st.b2[k] - s0.b2[k] * (I * 4.0 * z * z * t).exp()).norm());
    }
    Ok(InvarianceReport {
        a_deviation: a_dev,
        b2_deviation: b_dev,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpatialGrid {
        SpatialGrid { n: 256, l: 12.0 }
    }

    #[test]
    fn zero_stays_zero() {
        let p = Potential::zero(grid());
        let s = run(&p, 0.01, &OracleConfig::default()).unwrap();
        assert!(s.u.iter().all(|c| *c == ZERO));
        assert_eq!(nonlocal_mass(&p.grid, &p.u), ZERO);
    }

    #[test]
    fn linear_rhs_on_fourier_mode() {
        let g = grid();
        let xi = 2.0 * std::f64::consts::PI * 5.0 / (2.0 * g.l);
        let u: Vec<C64> = g.nodes().iter().map(|x| (I * xi * x).exp()).collect();
        let cfg = OracleConfig {
            nonlinear: false,
            ..Default::default()
        };
        let f = rhs(&g, &u, &cfg);
        for (a, b) in f.iter().zip(&u) {
            assert!((a - (-I * xi * xi) * b).norm() < 1e-10);
        }
    }

    #[test]
    fn flip_twice_is_identity() {
        let u: Vec<C64> = (0..16).map(|k| C64::new(k as f64, -(k as f64))).collect();
        assert_eq!(reflect(&reflect(&u)), u);
    }

    #[test]
    fn real_even_mass_is_square_integral() {
        let g = grid();
        let p = Potential::gaussian(g, 1.0, 1.0, 0.0);
        let m = nonlocal_mass(&g, &p.u);
        assert!(m.im.abs() < 1e-16);
        assert!((m.re - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn wide_data_is_rejected() {
        let g = grid();
        let p = Potential::gaussian(g, 0.1, 6.0, 0.0);
        assert!(matches!(
            run(&p, 0.01, &OracleConfig::default()),
            Err(Error::DomainTooSmall { .. })
        ));
    }
}
