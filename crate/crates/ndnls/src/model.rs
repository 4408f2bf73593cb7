//! Grids, the potential and its nonlocal conjugate, the transformed potential
//! matrices, discrete norms and the small-norm admissibility gate.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::{self, Fourier};

pub type C64 = Complex<f64>;
pub type Mat2 = [[C64; 2]; 2];

pub const I: C64 = C64::new(0.0, 1.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Admissibility threshold of the small-norm gate.
pub const GATE_THRESHOLD: f64 = 0.295;

/// Oversampling factor for the gate's L1 quadrature. The term `|v_x|` has a
/// kink wherever `v_x` changes sign, which limits plain trapezoid accuracy.
const GATE_OVERSAMPLE: usize = 8;

/// Uniform periodic grid `x_j = -L + j 2L/N`, `j = 0..N-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub n: usize,
    pub l: f64,
}

impl SpatialGrid {
    pub fn h(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        -self.l + j as f64 * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Index of the node `x = 0`.
    pub fn origin(&self) -> usize {
        self.n / 2
    }

    /// Index of `-x_j`. Node 0 (`x = -L`) maps to itself.
    pub fn reflect_index(&self, j: usize) -> usize {
        (self.n - j) % self.n
    }
}

/// Half-offset grid `z_m = -Z + (m + 1/2) 2Z/M`; `z = 0` is never a node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub m: usize,
    pub z_max: f64,
}

impl SpectralGrid {
    pub fn dz(&self) -> f64 {
        2.0 * self.z_max / self.m as f64
    }

    pub fn z(&self, k: usize) -> f64 {
        -self.z_max + (k as f64 + 0.5) * self.dz()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.z(k)).collect()
    }

    /// Index of `-z_k`.
    pub fn mirror_index(&self, k: usize) -> usize {
        self.m - 1 - k
    }
}

pub fn build_grids(n: usize, l: f64, m: usize, z: f64) -> Result<(SpatialGrid, SpectralGrid)> {
    if n < 8 || !n.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "grid.N must be even and >= 8, got {n}"
        )));
    }
    if m < 8 || !m.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "spectral.M must be even and >= 8, got {m}"
        )));
    }
    if !(l.is_finite() && l > 0.0) {
        return Err(Error::Config(format!("grid.L must be positive, got {l}")));
    }
    if !(z.is_finite() && z > 0.0) {
        return Err(Error::Config(format!(
            "spectral.Z must be positive, got {z}"
        )));
    }
    Ok((SpatialGrid { n, l }, SpectralGrid { m, z_max: z }))
}

/// `f(-x_j)` by index permutation.
pub fn reflect(f: &[C64]) -> Vec<C64> {
    let n = f.len();
    (0..n).map(|j| f[(n - j) % n]).collect()
}

/// `v(x) = i conj(u(-x))`.
pub fn nonlocal_conjugate(u: &[C64]) -> Vec<C64> {
    reflect(u).into_iter().map(|c| I * c.conj()).collect()
}

/// Composite trapezoid rule over the listed samples.
pub fn trapezoid(f: &[f64], h: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n => h * (f.iter().sum::<f64>() - 0.5 * (f[0] + f[n - 1])),
    }
}

pub fn trapezoid_c(f: &[C64], h: f64) -> C64 {
    match f.len() {
        0 | 1 => ZERO,
        n => (f.iter().sum::<C64>() - (f[0] + f[n - 1]) * 0.5) * h,
    }
}

/// Discrete L2 norm by trapezoid quadrature.
pub fn l2_norm(f: &[C64], h: f64) -> f64 {
    let sq: Vec<f64> = f.iter().map(|c| c.norm_sqr()).collect();
    trapezoid(&sq, h).sqrt()
}

pub fn relative_l2(a: &[C64], b: &[C64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    if den == 0.0 {
        num.sqrt()
    } else {
        (num / den).sqrt()
    }
}

#[derive(Debug, Clone)]
pub struct Potential {
    pub grid: SpatialGrid,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
}

impl Potential {
    pub fn new(grid: SpatialGrid, u: Vec<C64>) -> Result<Self> {
        if u.len() != grid.n {
            return Err(Error::Precondition(format!(
                "potential has {} samples for a grid of {}",
                u.len(),
                grid.n
            )));
        }
        if u.iter().any(|c| !c.is_finite()) {
            return Err(Error::Precondition(
                "potential has non-finite samples".into(),
            ));
        }
        let v = nonlocal_conjugate(&u);
        Ok(Self { grid, u, v })
    }

    pub fn zero(grid: SpatialGrid) -> Self {
        Self {
            grid,
            u: vec![ZERO; grid.n],
            v: vec![ZERO; grid.n],
        }
    }

    /// `A exp(-((x - c)/w)^2)`.
    pub fn gaussian(grid: SpatialGrid, amplitude: f64, width: f64, center: f64) -> Self {
        let u = grid
            .nodes()
            .into_iter()
            .map(|x| C64::new(amplitude * (-((x - center) / width).powi(2)).exp(), 0.0))
            .collect();
        Self::new(grid, u).expect("finite samples")
    }

    /// `A sech((x - c)/w)`.
    pub fn sech(grid: SpatialGrid, amplitude: f64, width: f64, center: f64) -> Self {
        let u = grid
            .nodes()
            .into_iter()
            .map(|x| C64::new(amplitude / ((x - center) / width).cosh(), 0.0))
            .collect();
        Self::new(grid, u).expect("finite samples")
    }

    pub fn ux(&self) -> Vec<C64> {
        fourier::derivative(&Fourier::new(self.grid.n), &self.u, self.grid.h())
    }

    pub fn vx(&self) -> Vec<C64> {
        fourier::derivative(&Fourier::new(self.grid.n), &self.v, self.grid.h())
    }

    pub fn uv(&self) -> Vec<C64> {
        self.u.iter().zip(&self.v).map(|(a, b)| a * b).collect()
    }

    /// `max(|u(-L)|, |u(L - h)|) / max |u|`.
    pub fn edge_ratio(&self) -> f64 {
        edge_ratio(&self.u)
    }
}

pub fn edge_ratio(f: &[C64]) -> f64 {
    let peak = f.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return 0.0;
    }
    f[0].norm().max(f[f.len() - 1].norm()) / peak
}

/// Pointwise `Q1` and `Q2` of the two transformed spectral problems.
#[derive(Debug, Clone)]
pub struct PotentialMatrices {
    pub q1: Vec<Mat2>,
    pub q2: Vec<Mat2>,
}

pub fn build_potential_matrices(p: &Potential) -> PotentialMatrices {
    let ux = p.ux();
    let vx = p.vx();
    let c = C64::new(0.0, -0.5); // 1/(2i)
    let mut q1 = Vec::with_capacity(p.grid.n);
    let mut q2 = Vec::with_capacity(p.grid.n);
    for j in 0..p.grid.n {
        let (u, v) = (p.u[j], p.v[j]);
        let uv = u * v;
        q1.push([[-uv * c, u * c], [(I * 2.0 * vx[j] - uv * v) * c, uv * c]]);
        q2.push([[-uv * c, (-I * 2.0 * ux[j] - u * uv) * c], [v * c, uv * c]]);
    }
    PotentialMatrices { q1, q2 }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateReport {
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
    /// `[||v_x||_1, ||u v^2||_1, ||u v||_1, ||u||_1]`
    pub terms: [f64; 4],
}

struct Fine {
    h: f64,
    u: Vec<C64>,
    v: Vec<C64>,
}

fn oversampled(p: &Potential) -> Fine {
    let u = fourier::upsample(&p.u, GATE_OVERSAMPLE);
    let v = nonlocal_conjugate(&u);
    Fine {
        h: p.grid.h() / GATE_OVERSAMPLE as f64,
        u,
        v,
    }
}

fn l1(f: impl Iterator<Item = C64>, h: f64) -> f64 {
    let a: Vec<f64> = f.map(|c| c.norm()).collect();
    trapezoid(&a, h)
}

/// `(2 ||v_x||_1 + ||u v^2||_1 + 2 ||u v||_1 + ||u||_1) / 2`.
pub fn gate_functional(p: &Potential) -> GateReport {
    let f = oversampled(p);
    let vx = fourier::derivative(&Fourier::new(f.v.len()), &f.v, f.h);
    let terms = [
        l1(vx.iter().copied(), f.h),
        l1(f.u.iter().zip(&f.v).map(|(u, v)| u * v * v), f.h),
        l1(f.u.iter().zip(&f.v).map(|(u, v)| u * v), f.h),
        l1(f.u.iter().copied(), f.h),
    ];
    let value = 0.5 * (2.0 * terms[0] + terms[1] + 2.0 * terms[2] + terms[3]);
    GateReport {
        value,
        threshold: GATE_THRESHOLD,
        pass: value <= GATE_THRESHOLD,
        terms,
    }
}

/// The same split functional built from the entries of `Q2`.
pub fn gate_functional_q2(p: &Potential) -> f64 {
    let f = oversampled(p);
    let ux = fourier::derivative(&Fourier::new(f.u.len()), &f.u, f.h);
    0.5 * (2.0 * l1(ux.iter().copied(), f.h)
        + l1(f.u.iter().zip(&f.v).map(|(u, v)| u * u * v), f.h)
        + 2.0 * l1(f.u.iter().zip(&f.v).map(|(u, v)| u * v), f.h)
        + l1(f.v.iter().copied(), f.h))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorms {
    pub h2: f64,
    pub h11: f64,
    /// `[||u||, ||u_x||, ||u_xx||]`
    pub derivatives: [f64; 3],
    /// `[||<x> u||, ||<x> u_x||]`
    pub weighted: [f64; 2],
}

/// Discrete `H^2` and `H^{1,1}` norms, each the sum of its component L2 norms.
pub fn sobolev_norms(grid: &SpatialGrid, u: &[C64]) -> SobolevNorms {
    let h = grid.h();
    let fft = Fourier::new(grid.n);
    let ux = fourier::derivative(&fft, u, h);
    let uxx = fourier::derivative(&fft, &ux, h);
    let weight: Vec<f64> = grid.nodes().iter().map(|x| (1.0 + x * x).sqrt()).collect();
    let weighted = |f: &[C64]| -> f64 {
        let g: Vec<C64> = f.iter().zip(&weight).map(|(c, w)| c * w).collect();
        l2_norm(&g, h)
    };
    let derivatives = [l2_norm(u, h), l2_norm(&ux, h), l2_norm(&uxx, h)];
    let weighted = [weighted(u), weighted(&ux)];
    SobolevNorms {
        h2: derivatives.iter().sum(),
        h11: weighted.iter().sum(),
        derivatives,
        weighted,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn grid() -> SpatialGrid {
        SpatialGrid { n: 2048, l: 12.0 }
    }

    #[test]
    fn small_grids_have_documented_nodes() {
        let (s, _) = build_grids(8, 4.0, 8, 2.0).unwrap();
        let z = SpectralGrid { m: 4, z_max: 2.0 };
        assert_eq!(s.nodes(), vec![-4.0, -3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0]);
        assert_eq!(s.x(s.origin()), 0.0);
        assert_eq!(z.nodes(), vec![-1.5, -0.5, 0.5, 1.5]);
        assert_eq!(-s.x(3), s.x(s.reflect_index(3)));
    }

    #[test]
    fn grid_validation() {
        assert!(build_grids(1023, 12.0, 2048, 24.0).is_err());
        assert!(build_grids(2048, 12.0, 6, 24.0).is_err());
        assert!(build_grids(2048, -1.0, 2048, 24.0).is_err());
        assert!(build_grids(2048, 12.0, 2048, 24.0).is_ok());
    }

    #[test]
    fn conjugate_of_shifted_gaussian_moves_center() {
        let g = grid();
        let p = Potential::gaussian(g, 1.0, 1.0, 1.0);
        for (j, x) in g.nodes().into_iter().enumerate().skip(1) {
            let expect = (-(x + 1.0).powi(2)).exp();
            assert!((p.v[j] - I * expect).norm() < 1e-15);
        }
    }

    #[test]
    fn reduction_applied_twice_is_identity() {
        let g = grid();
        let p = Potential::gaussian(g, 0.3, 1.3, -0.7);
        let back: Vec<C64> = reflect(&p.v).iter().map(|c| I * c.conj()).collect();
        for (a, b) in back.iter().zip(&p.u) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn q1_corner_value_and_zero_trace() {
        let g = grid();
        let p = Potential::gaussian(g, 0.1, 1.0, 0.0);
        let q = build_potential_matrices(&p);
        let c = g.origin();
        assert!((q.q1[c][0][0] - C64::new(-0.005, 0.0)).norm() < 1e-15);
        for j in 0..g.n {
            assert!((q.q1[j][0][0] + q.q1[j][1][1]).norm() < 1e-16);
            assert!((q.q2[j][0][0] + q.q2[j][1][1]).norm() < 1e-16);
        }
    }

    #[test]
    fn zero_potential_is_trivial() {
        let p = Potential::zero(grid());
        let gate = gate_functional(&p);
        assert_eq!(gate.value, 0.0);
        assert!(gate.pass);
        let q = build_potential_matrices(&p);
        assert!(q.q1.iter().flatten().flatten().all(|c| c.norm() == 0.0));
        let s = sobolev_norms(&p.grid, &p.u);
        assert_eq!((s.h2, s.h11), (0.0, 0.0));
    }

    #[test]
    fn gaussian_l2_norms() {
        let g = grid();
        let p = Potential::gaussian(g, 1.0, 1.0, 0.0);
        let s = sobolev_norms(&g, &p.u);
        let expect = (PI / 2.0).powf(0.25);
        assert!((s.derivatives[0] - expect).abs() < 1e-12);
        assert!((s.derivatives[1] - expect).abs() < 1e-12);
    }

    #[test]
    fn gate_matches_between_q1_and_q2_forms() {
        let g = grid();
        let p = Potential::gaussian(g, 0.07, 0.9, 0.4);
        assert!((gate_functional(&p).value - gate_functional_q2(&p)).abs() < 1e-13);
    }
}
