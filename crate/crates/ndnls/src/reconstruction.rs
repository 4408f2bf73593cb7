//! Reconstruction of `w = u e^{i Theta}` and `s` from boundary-pair solutions,
//! phase unwinding to recover `u`, and the full inverse-scattering solve.
//!
//! `Theta(x) = \int_x^inf u v dy`. For `x >= 0` the plain pair is used, for
//! `x < 0` the deltified pair.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::cauchy::{edge_decay, CauchyProjector, DECAY_WARNING_RATIO};
use crate::direct_scattering::{reflection, scattering_data, ReflectionData};
use crate::error::{Error, Result};
use crate::evolution::evolve_reflection;
use crate::model::{gate_functional, nonlocal_conjugate, Potential, SpectralGrid, C64, I, ZERO};
use crate::rh_solver::{
    deltify, solve_boundary_pair, solve_boundary_pair_delta, solve_on_grid, solve_scalar_delta,
    BoundaryPair, DeltifiedReflection, Flavor, SolverOptions,
};

fn check_flavor(pair: &BoundaryPair) -> Result<()> {
    let want = if pair.x >= 0.0 {
        Flavor::Plain
    } else {
        Flavor::Deltified
    };
    if pair.flavor != want {
        return Err(Error::Precondition(format!(
            "x = {} needs the {} flavor, got {}",
            pair.x,
            want.name(),
            pair.flavor.name()
        )));
    }
    Ok(())
}

fn quadrature(z: &[f64], dz: f64, f: impl Fn(usize) -> C64) -> C64 {
    (0..z.len()).map(f).sum::<C64>() * dz
}

/// `(2/(pi i)) \int m^(1) r e^{-2izx} dz` for one pair, with `r` the flavor's `r+`.
pub fn w_at(pair: &BoundaryPair, z: &[f64], dz: f64, r_plus: &[C64]) -> C64 {
    let x = pair.x;
    quadrature(z, dz, |k| {
        pair.m[0][k] * r_plus[k] * (-I * 2.0 * z[k] * x).exp()
    }) * (2.0 / (PI * I))
}

/// `(1/pi) \int n^(2) r e^{2izx} dz` for one pair, with `r` the flavor's `r-`.
pub fn s_at(pair: &BoundaryPair, z: &[f64], dz: f64, r_minus: &[C64]) -> C64 {
    let x = pair.x;
    quadrature(z, dz, |k| {
        pair.n[1][k] * r_minus[k] * (I * 2.0 * z[k] * x).exp()
    }) / PI
}

pub fn reconstruct_w(
    pairs: &[BoundaryPair],
    g: &SpectralGrid,
    r: &ReflectionData,
    rd: &DeltifiedReflection,
) -> Result<Vec<C64>> {
    let z = g.nodes();
    pairs
        .iter()
        .map(|p| {
            check_flavor(p)?;
            let rp = if p.flavor == Flavor::Plain {
                &r.r_plus
            } else {
                &rd.r_plus
            };
            Ok(w_at(p, &z, g.dz(), rp))
        })
        .collect()
}

pub fn reconstruct_s(
    pairs: &[BoundaryPair],
    g: &SpectralGrid,
    r: &ReflectionData,
    rd: &DeltifiedReflection,
) -> Result<Vec<C64>> {
    let z = g.nodes();
    pairs
        .iter()
        .map(|p| {
            check_flavor(p)?;
            let rm = if p.flavor == Flavor::Plain {
                &r.r_minus
            } else {
                &rd.r_minus
            };
            Ok(s_at(p, &z, g.dz(), rm))
        })
        .collect()
}

/// `Theta(x_j) = \int_{x_j}^{x_last} f dy` by cumulative trapezoid from the right.
pub fn tail_integral(f: &[C64], h: f64) -> Vec<C64> {
    let n = f.len();
    let mut out = vec![ZERO; n];
    for j in (0..n.saturating_sub(1)).rev() {
        out[j] = out[j + 1] + (f[j] + f[j + 1]) * (0.5 * h);
    }
    out
}

#[derive(Debug, Clone)]
pub struct PhaseUnwind {
    pub u: Vec<C64>,
    pub theta: Vec<C64>,
    pub iterations: usize,
    /// Sup-norm increments of `Theta`, one per iteration.
    pub increments: Vec<f64>,
}

/// Fixed point of `Theta = \int_x^inf u v`, `u = w e^{-i Theta}`, on a uniform
/// grid symmetric under index reflection with spacing `h`.
pub fn phase_unwind(w: &[C64], h: f64, tol: f64, max_iter: usize) -> Result<PhaseUnwind> {
    let mut theta = vec![ZERO; w.len()];
    let mut increments = Vec::new();
    for it in 1..=max_iter {
        let u: Vec<C64> = w
            .iter()
            .zip(&theta)
            .map(|(w, t)| w * (-I * t).exp())
            .collect();
        let v = nonlocal_conjugate(&u);
        let uv: Vec<C64> = u.iter().zip(&v).map(|(a, b)| a * b).collect();
        let next = tail_integral(&uv, h);
        let inc = next
            .iter()
            .zip(&theta)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        increments.push(inc);
        theta = next;
        if inc <= tol {
            let u = w
                .iter()
                .zip(&theta)
                .map(|(w, t)| w * (-I * t).exp())
                .collect();
            return Ok(PhaseUnwind {
                u,
                theta,
                iterations: it,
                increments,
            });
        }
    }
    Err(Error::PhaseUnwind {
        increment: increments.last().copied().unwrap_or(f64::NAN),
        iterations: max_iter,
    })
}

#[derive(Debug, Clone, Copy)]
pub struct IstOptions {
    pub solver: SolverOptions,
    /// Reconstruction on every `nx_stride`-th spatial node.
    pub nx_stride: usize,
    pub unwind_tol: f64,
    pub unwind_max_iter: usize,
}

impl Default for IstOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            nx_stride: 8,
            unwind_tol: 1e-14,
            unwind_max_iter: 100,
        }
    }
}

#[derive(Debug, Clone)]
pub struct IstSolution {
    pub t: f64,
    pub x: Vec<f64>,
    pub u: Vec<C64>,
    pub w: Vec<C64>,
    pub s: Vec<C64>,
    pub theta: Vec<C64>,
    pub unwind_iterations: usize,
    pub pairs: Vec<BoundaryPair>,
    pub reflection: ReflectionData,
    /// `|w| difference between the plain and deltified formulas at x = 0`.
    pub origin_mismatch: f64,
    pub warnings: Vec<String>,
}

impl IstSolution {
    pub fn diagnostics(&self) -> impl Iterator<Item = (f64, Flavor, usize, f64)> + '_ {
        self.pairs
            .iter()
            .map(|p| (p.x, p.flavor, p.iterations, p.residual))
    }
}

/// Scattering data, exact evolution to `t`, scalar and matrix RH solves,
/// reconstruction and phase unwinding.
pub fn ist_solve(
    u0: &Potential,
    t: f64,
    g: &SpectralGrid,
    opts: &IstOptions,
) -> Result<IstSolution> {
    let gate = gate_functional(u0);
    if !gate.pass {
        return Err(Error::GateFailed {
            value: gate.value,
            threshold: gate.threshold,
        });
    }
    let grid = u0.grid;
    if opts.nx_stride == 0 || !grid.n.is_multiple_of(opts.nx_stride) {
        return Err(Error::Config(format!(
            "output.nx_stride {} must divide N = {}",
            opts.nx_stride, grid.n
        )));
    }
    let sd = scattering_data(u0, g);
    let r = evolve_reflection(&reflection(&sd)?, t);
    let mut warnings = Vec::new();
    for (name, f) in [("r+", &r.r_plus), ("r-", &r.r_minus)] {
        let e = edge_decay(f);
        if e > DECAY_WARNING_RATIO {
            warnings.push(format!(
                "{name} edge ratio {e:.2e} exceeds {DECAY_WARNING_RATIO:e}"
            ));
        }
    }
    let proj = CauchyProjector::new(g);
    let delta = solve_scalar_delta(&proj, &r)?;
    let rd = deltify(&r, &delta);
    let x: Vec<f64> = (0..grid.n)
        .step_by(opts.nx_stride)
        .map(|j| grid.x(j))
        .collect();
    let pairs = solve_on_grid(&proj, &r, &rd, &x, &opts.solver)?;
    let w = reconstruct_w(&pairs, g, &r, &rd)?;
    let s = reconstruct_s(&pairs, g, &r, &rd)?;
    let z = g.nodes();
    let origin = x
        .iter()
        .position(|&v| v == 0.0)
        .expect("x = 0 is a reconstruction node");
    let left = solve_boundary_pair_delta(&proj, &rd, 0.0, &opts.solver)?;
    let origin_mismatch = (w_at(&left, &z, g.dz(), &rd.r_plus) - w[origin]).norm();
    let h = grid.h() * opts.nx_stride as f64;
    let unwound = phase_unwind(&w, h, opts.unwind_tol, opts.unwind_max_iter)?;
    Ok(IstSolution {
        t,
        x,
        u: unwound.u,
        w,
        s,
        theta: unwound.theta,
        unwind_iterations: unwound.iterations,
        pairs,
        reflection: r,
        origin_mismatch,
        warnings,
    })
}

/// Plain-flavor solve at `x = 0` exposed for dispatch-continuity checks.
pub fn plain_w_at_origin(
    proj: &CauchyProjector,
    r: &ReflectionData,
    opts: &SolverOptions,
) -> Result<C64> {
    let g = *proj.grid();
    let p = solve_boundary_pair(proj, r, 0.0, opts)?;
    Ok(w_at(&p, &g.nodes(), g.dz(), &r.r_plus))
}

/// Natural cubic spline through `(x, f)` evaluated at `xi`. Queries past the
/// last knot return the last value.
pub fn cubic_spline(x: &[f64], f: &[C64], xi: &[f64]) -> Vec<C64> {
    let n = x.len();
    if n < 3 {
        return xi
            .iter()
            .map(|_| f.first().copied().unwrap_or(ZERO))
            .collect();
    }
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    // Tridiagonal system for second derivatives with natural end conditions.
    let mut diag = vec![1.0; n];
    let mut upper = vec![0.0; n];
    let mut lower = vec![0.0; n];
    let mut rhs = vec![ZERO; n];
    for i in 1..n - 1 {
        lower[i] = h[i - 1];
        diag[i] = 2.0 * (h[i - 1] + h[i]);
        upper[i] = h[i];
        rhs[i] = ((f[i + 1] - f[i]) / h[i] - (f[i] - f[i - 1]) / h[i - 1]) * 6.0;
    }
    for i in 1..n {
        let m = lower[i] / diag[i - 1];
        diag[i] -= m * upper[i - 1];
        rhs[i] = rhs[i] - rhs[i - 1] * m;
    }
    let mut s = vec![ZERO; n];
    s[n - 1] = rhs[n - 1] / diag[n - 1];
    for i in (0..n - 1).rev() {
        s[i] = (rhs[i] - s[i + 1] * upper[i]) / diag[i];
    }
    xi.par_iter()
        .map(|&q| {
            if q >= x[n - 1] {
                return f[n - 1];
            }
            let i = match x.partition_point(|&v| v <= q) {
                0 => 0,
                k => (k - 1).min(n - 2),
            };
            let t = q - x[i];
            let hi = h[i];
            let b = (f[i + 1] - f[i]) / hi - (s[i + 1] + s[i] * 2.0) * (hi / 6.0);
            f[i] + b * t + s[i] * (t * t / 2.0) + (s[i + 1] - s[i]) * (t * t * t / (6.0 * hi))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpatialGrid;

    #[test]
    fn zero_w_unwinds_in_one_iteration() {
        let w = vec![ZERO; 64];
        let out = phase_unwind(&w, 0.1, 1e-14, 10).unwrap();
        assert_eq!(out.iterations, 1);
        assert!(out.u.iter().chain(&out.theta).all(|c| *c == ZERO));
    }

    #[test]
    fn theta_vanishes_at_right_edge() {
        let g = SpatialGrid { n: 256, l: 10.0 };
        let p = Potential::gaussian(g, 0.1, 1.0, 0.3);
        let out = phase_unwind(&p.u, g.h(), 1e-14, 50).unwrap();
        assert_eq!(*out.theta.last().unwrap(), ZERO);
    }

    #[test]
    fn spline_reproduces_cubic_interior() {
        let x: Vec<f64> = (0..41).map(|k| -2.0 + 0.1 * k as f64).collect();
        let f: Vec<C64> = x.iter().map(|&t| C64::new(t.sin(), t.cos())).collect();
        let xi = vec![-0.55, 0.0, 0.33, 1.07];
        let out = cubic_spline(&x, &f, &xi);
        for (q, v) in xi.iter().zip(out) {
            assert!((v - C64::new(q.sin(), q.cos())).norm() < 1e-5);
        }
    }
}
