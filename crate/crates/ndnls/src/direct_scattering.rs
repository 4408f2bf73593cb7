//! Jost solutions of the transformed spectral problems, scattering data from
//! Wronskians at `x = 0`, reflection coefficients, and an independent k-plane
//! integrator used as a cross-check.
//!
//! Each Jost solution satisfies a Volterra equation whose kernel is the
//! potential matrix times a diagonal of one plain entry and one oscillating
//! entry. The equivalent ODE is marched with trapezoidal product integration:
//! the plain component uses the trapezoid rule and the oscillating component
//! integrates the exponential factor exactly against a linear interpolant of
//! the forcing. Each step is implicit through a 2x2 solve.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{
    trapezoid_c, Mat2, Potential, PotentialMatrices, SpectralGrid, C64, I, ONE, ZERO,
};

/// Smallest admissible `|a|` and `|d|` for reflection coefficients.
pub const MIN_MODULUS: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JostKind {
    MuMinus,
    MuPlus,
    NuMinus,
    NuPlus,
}

impl JostKind {
    fn marches_rightward(self) -> bool {
        matches!(self, JostKind::MuMinus | JostKind::NuMinus)
    }

    fn is_mu(self) -> bool {
        matches!(self, JostKind::MuMinus | JostKind::MuPlus)
    }
}

#[derive(Debug, Clone)]
pub struct JostSolution {
    pub kind: JostKind,
    pub z: f64,
    /// Two components at every spatial node.
    pub values: Vec<[C64; 2]>,
    /// Largest defect of the discrete step equations.
    pub residual: f64,
}

struct Step {
    e: C64,
    w0: C64,
    w1: C64,
    half: f64,
}

/// Product-integration weights for `f' = c f + g` over one step of signed length `s`:
/// `f(s) = e^{cs} f(0) + w0 g(0) + w1 g(s)` with `g` linear in between.
fn step_weights(c: C64, s: f64) -> Step {
    let t = c * s;
    let e = t.exp();
    let (w0, w1) = if t.norm() < 1e-3 {
        (
            (0.5 + t / 3.0 + t * t / 8.0 + t * t * t / 30.0) * s,
            (0.5 + t / 6.0 + t * t / 24.0 + t * t * t / 120.0) * s,
        )
    } else {
        let t2 = t * t;
        ((t * e - e + 1.0) / t2 * s, (e - 1.0 - t) / t2 * s)
    };
    Step {
        e,
        w0,
        w1,
        half: 0.5 * s,
    }
}

fn mul(q: &Mat2, f: &[C64; 2]) -> [C64; 2] {
    [
        q[0][0] * f[0] + q[0][1] * f[1],
        q[1][0] * f[0] + q[1][1] * f[1],
    ]
}

struct Marcher<'a> {
    q: &'a [Mat2],
    osc: usize,
    st: Step,
}

impl<'a> Marcher<'a> {
    fn new(mats: &'a PotentialMatrices, h: f64, z: f64, kind: JostKind) -> Self {
        let s = if kind.marches_rightward() { h } else { -h };
        let (q, osc, c) = if kind.is_mu() {
            (&mats.q1[..], 1, I * (2.0 * z))
        } else {
            (&mats.q2[..], 0, -I * (2.0 * z))
        };
        Self {
            q,
            osc,
            st: step_weights(c, s),
        }
    }

    fn start(&self) -> [C64; 2] {
        if self.osc == 1 {
            [ONE, ZERO]
        } else {
            [ZERO, ONE]
        }
    }

    /// Explicit part of a step from node `a`, and the diagonal coefficient of the implicit part.
    fn explicit(&self, f: &[C64; 2], a: usize) -> ([C64; 2], [C64; 2]) {
        let g = mul(&self.q[a], f);
        let (o, p) = (self.osc, 1 - self.osc);
        let mut rhs = [ZERO; 2];
        let mut coef = [ZERO; 2];
        rhs[p] = f[p] + g[p] * self.st.half;
        coef[p] = C64::new(self.st.half, 0.0);
        rhs[o] = self.st.e * f[o] + self.st.w0 * g[o];
        coef[o] = self.st.w1;
        (rhs, coef)
    }

    fn step(&self, f: &[C64; 2], a: usize, b: usize) -> [C64; 2] {
        let (rhs, coef) = self.explicit(f, a);
        let qb = &self.q[b];
        let a11 = ONE - coef[0] * qb[0][0];
        let a12 = -coef[0] * qb[0][1];
        let a21 = -coef[1] * qb[1][0];
        let a22 = ONE - coef[1] * qb[1][1];
        let det = a11 * a22 - a12 * a21;
        [
            (a22 * rhs[0] - a12 * rhs[1]) / det,
            (a11 * rhs[1] - a21 * rhs[0]) / det,
        ]
    }

    fn defect(&self, f: &[C64; 2], g: &[C64; 2], a: usize, b: usize) -> f64 {
        let (rhs, coef) = self.explicit(f, a);
        let gb = mul(&self.q[b], g);
        (0..2)
            .map(|k| (g[k] - rhs[k] - coef[k] * gb[k]).norm())
            .fold(0.0, f64::max)
    }
}

fn march_order(n: usize, from_left: bool, stop: usize) -> Vec<usize> {
    if from_left {
        (0..=stop).collect()
    } else {
        (stop..n).rev().collect()
    }
}

/// Full Jost profile over the spatial grid, anchored at the left edge (minus
/// solutions) or the right edge (plus solutions).
pub fn solve_jost(p: &Potential, mats: &PotentialMatrices, z: f64, kind: JostKind) -> JostSolution {
    let n = p.grid.n;
    let m = Marcher::new(mats, p.grid.h(), z, kind);
    let stop = if kind.marches_rightward() { n - 1 } else { 0 };
    let order = march_order(n, kind.marches_rightward(), stop);
    let mut values = vec![[ZERO; 2]; n];
    let mut f = m.start();
    values[order[0]] = f;
    let mut residual: f64 = 0.0;
    for w in order.windows(2) {
        let g = m.step(&f, w[0], w[1]);
        residual = residual.max(m.defect(&f, &g, w[0], w[1]));
        values[w[1]] = g;
        f = g;
    }
    JostSolution {
        kind,
        z,
        values,
        residual,
    }
}

fn value_at_origin(p: &Potential, mats: &PotentialMatrices, z: f64, kind: JostKind) -> [C64; 2] {
    let m = Marcher::new(mats, p.grid.h(), z, kind);
    let order = march_order(p.grid.n, kind.marches_rightward(), p.grid.origin());
    let mut f = m.start();
    for w in order.windows(2) {
        f = m.step(&f, w[0], w[1]);
    }
    f
}

#[derive(Debug, Clone)]
pub struct ScatteringData {
    pub z: Vec<f64>,
    pub a: Vec<C64>,
    pub d: Vec<C64>,
    /// `2ik b(k)`
    pub b2: Vec<C64>,
    /// `2ik c(k)`
    pub c2: Vec<C64>,
    pub a_inf: C64,
    pub d_inf: C64,
}

impl ScatteringData {
    /// `max |a d + B2 C2/(4z) - 1|` over nodes.
    pub fn unimodularity_defect(&self) -> f64 {
        (0..self.z.len())
            .map(|k| {
                (self.a[k] * self.d[k] + self.b2[k] * self.c2[k] / (4.0 * self.z[k]) - 1.0).norm()
            })
            .fold(0.0, f64::max)
    }

    /// `max(|a(z) - conj a(-z)|, |d(z) - conj d(-z)|)`, relying on the mirrored node layout.
    pub fn symmetry_defect(&self) -> f64 {
        let m = self.z.len();
        (0..m)
            .map(|k| {
                let j = m - 1 - k;
                (self.a[k] - self.a[j].conj())
                    .norm()
                    .max((self.d[k] - self.d[j].conj()).norm())
            })
            .fold(0.0, f64::max)
    }

    /// `max |C2(z) - i conj B2(-z)|`.
    pub fn off_diagonal_symmetry_defect(&self) -> f64 {
        let m = self.z.len();
        (0..m)
            .map(|k| (self.c2[k] - I * self.b2[m - 1 - k].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn min_abs_a(&self) -> f64 {
        self.a
            .iter()
            .map(|c| c.norm())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_abs_d(&self) -> f64 {
        self.d
            .iter()
            .map(|c| c.norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// `sup |b|` with `|b| = |B2| / (2 sqrt|z|)`.
    pub fn sup_b(&self) -> f64 {
        self.z
            .iter()
            .zip(&self.b2)
            .map(|(z, b)| b.norm() / (2.0 * z.abs().sqrt()))
            .fold(0.0, f64::max)
    }
}

fn nonlocal_phase_limit(p: &Potential) -> C64 {
    let integral = trapezoid_c(&p.uv(), p.grid.h());
    (I * 0.5 * integral).exp()
}

pub fn scattering_data(p: &Potential, g: &SpectralGrid) -> ScatteringData {
    let mats = crate::model::build_potential_matrices(p);
    let c = p.grid.origin();
    let (u0, v0) = (p.u[c], p.v[c]);
    let z = g.nodes();
    let rows: Vec<[C64; 4]> = z
        .par_iter()
        .map(|&z| {
            let mm = value_at_origin(p, &mats, z, JostKind::MuMinus);
            let mp = value_at_origin(p, &mats, z, JostKind::MuPlus);
            let nm = value_at_origin(p, &mats, z, JostKind::NuMinus);
            let np = value_at_origin(p, &mats, z, JostKind::NuPlus);
            let a = mm[0] * np[1] + (mm[1] - v0 * mm[0]) * (np[0] + u0 * np[1]) / (4.0 * z);
            let d = mp[0] * nm[1] + (mp[1] - v0 * mp[0]) * (nm[0] + u0 * nm[1]) / (4.0 * z);
            let b2 = mp[0] * mm[1] - mp[1] * mm[0];
            let c2 = nm[0] * np[1] - nm[1] * np[0];
            [a, d, b2, c2]
        })
        .collect();
    let a_inf = nonlocal_phase_limit(p);
    ScatteringData {
        a: rows.iter().map(|r| r[0]).collect(),
        d: rows.iter().map(|r| r[1]).collect(),
        b2: rows.iter().map(|r| r[2]).collect(),
        c2: rows.iter().map(|r| r[3]).collect(),
        z,
        a_inf,
        d_inf: 1.0 / a_inf,
    }
}

/// `a(z) = 1 - (1/2i) \int (u v mu1 - u mu2) dx` from the left Jost profile.
pub fn integral_form_a(p: &Potential, mats: &PotentialMatrices, z: f64) -> C64 {
    let mu = solve_jost(p, mats, z, JostKind::MuMinus);
    let integrand: Vec<C64> = (0..p.grid.n)
        .map(|j| p.u[j] * p.v[j] * mu.values[j][0] - p.u[j] * mu.values[j][1])
        .collect();
    ONE + I * 0.5 * trapezoid_c(&integrand, p.grid.h())
}

#[derive(Debug, Clone)]
pub struct ReflectionData {
    pub z: Vec<f64>,
    pub r_plus: Vec<C64>,
    pub r_minus: Vec<C64>,
    pub sup_r1: f64,
    pub sup_r2: f64,
}

impl ReflectionData {
    pub fn zero(g: &SpectralGrid) -> Self {
        Self {
            z: g.nodes(),
            r_plus: vec![ZERO; g.m],
            r_minus: vec![ZERO; g.m],
            sup_r1: 0.0,
            sup_r2: 0.0,
        }
    }

    /// `|r1(k)| = |r_-(z)| / (2 sqrt|z|)`.
    pub fn r1_abs(&self) -> Vec<f64> {
        self.z
            .iter()
            .zip(&self.r_minus)
            .map(|(z, r)| r.norm() / (2.0 * z.abs().sqrt()))
            .collect()
    }

    /// `|r2(k)| = 2 sqrt|z| |r_+(z)|`.
    pub fn r2_abs(&self) -> Vec<f64> {
        self.z
            .iter()
            .zip(&self.r_plus)
            .map(|(z, r)| r.norm() * 2.0 * z.abs().sqrt())
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            z: self.z.clone(),
            r_plus: self.r_plus.iter().map(|r| r * s).collect(),
            r_minus: self.r_minus.iter().map(|r| r * s).collect(),
            sup_r1: self.sup_r1 * s.abs(),
            sup_r2: self.sup_r2 * s.abs(),
        }
    }
}

pub fn reflection(sd: &ScatteringData) -> Result<ReflectionData> {
    let (min_a, min_d) = (sd.min_abs_a(), sd.min_abs_d());
    if min_a < MIN_MODULUS || min_d < MIN_MODULUS {
        return Err(Error::SpectralSingularity { min_a, min_d });
    }
    let r_minus: Vec<C64> = sd.b2.iter().zip(&sd.a).map(|(b, a)| b / a).collect();
    let r_plus: Vec<C64> = (0..sd.z.len())
        .map(|k| sd.c2[k] / (4.0 * sd.z[k] * sd.d[k]))
        .collect();
    let sup = |v: Vec<f64>| v.into_iter().fold(0.0, f64::max);
    let mut r = ReflectionData {
        z: sd.z.clone(),
        r_plus,
        r_minus,
        sup_r1: 0.0,
        sup_r2: 0.0,
    };
    r.sup_r1 = sup(r.r1_abs());
    r.sup_r2 = sup(r.r2_abs());
    Ok(r)
}

/// Solves the untransformed k-plane Jost equation for the left solution by
/// classical RK4 with step `2h` (odd nodes serve as midpoints), maps the
/// z-plane solution at `z = k^2` back to the k-plane and returns the sup-norm
/// discrepancy over the even nodes.
pub fn kplane_crosscheck(p: &Potential, k: C64, z_limit: f64) -> Result<f64> {
    let refuse = |reason: &str| Error::KPlaneRefused {
        k: format!("{k}"),
        reason: reason.into(),
    };
    if k.norm() == 0.0 {
        return Err(refuse(
            "k = 0 is a removable singularity of the transformation",
        ));
    }
    if k.re != 0.0 && k.im != 0.0 {
        return Err(refuse("k must lie on the real or imaginary axis"));
    }
    if k.norm() > z_limit.sqrt() {
        return Err(refuse("|k| exceeds the stable marching range"));
    }
    let z = (k * k).re;
    let n = p.grid.n;
    let h2 = 2.0 * p.grid.h();
    let rhs = |j: usize, f: [C64; 2]| -> [C64; 2] {
        [
            k * p.u[j] * f[1],
            I * 2.0 * k * k * f[1] + k * p.v[j] * f[0],
        ]
    };
    let axpy = |f: [C64; 2], s: f64, g: [C64; 2]| [f[0] + g[0] * s, f[1] + g[1] * s];
    let mats = crate::model::build_potential_matrices(p);
    let mu = solve_jost(p, &mats, z, JostKind::MuMinus);
    let mapped = |j: usize| {
        let m = mu.values[j];
        [m[0], (m[1] - p.v[j] * m[0]) / (2.0 * I * k)]
    };
    let mut phi = [ONE, ZERO];
    let mut residual: f64 = 0.0;
    let mut j = 0;
    while j + 2 < n {
        let k1 = rhs(j, phi);
        let k2 = rhs(j + 1, axpy(phi, 0.5 * h2, k1));
        let k3 = rhs(j + 1, axpy(phi, 0.5 * h2, k2));
        let k4 = rhs(j + 2, axpy(phi, h2, k3));
        for c in 0..2 {
            phi[c] += (k1[c] + k2[c] * 2.0 + k3[c] * 2.0 + k4[c]) * (h2 / 6.0);
        }
        j += 2;
        let m = mapped(j);
        residual = residual
            .max((phi[0] - m[0]).norm())
            .max((phi[1] - m[1]).norm());
    }
    Ok(residual)
}
