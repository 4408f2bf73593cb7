//! Coupled Cauchy-projection boundary systems for the matrix Riemann-Hilbert
//! problem, in plain and deltified form, and the scalar problem for `delta`.
//!
//! Plain flavor (used for `x >= 0`):
//!   m = e1 + C-(n r- e^{2izx}),  n = e2 + C+(m r+ e^{-2izx})
//! Deltified flavor (used for `x < 0`):
//!   m = e1 + C+(n rd- e^{2izx}), n = e2 + C-(m rd+ e^{-2izx})
//!
//! The system is solved by alternating substitution. If that stagnates or
//! runs out of budget, restarted GMRES takes over on the stacked unknowns,
//! starting from the last iterate.

use rayon::prelude::*;

use crate::cauchy::CauchyProjector;
use crate::direct_scattering::ReflectionData;
use crate::error::{Error, Result};
use crate::model::{C64, I, ONE, ZERO};

/// Smallest admissible `|1 + r+ r-|` for the principal logarithm.
pub const BRANCH_MARGIN: f64 = 0.05;

const GMRES_RESTART: usize = 40;
/// Defects below this are treated as roundoff when estimating contraction.
const CONTRACTION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Plain,
    Deltified,
}

impl Flavor {
    pub fn name(self) -> &'static str {
        match self {
            Flavor::Plain => "plain",
            Flavor::Deltified => "deltified",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    /// Total budget; half goes to alternation, the rest to GMRES.
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryPair {
    pub x: f64,
    pub flavor: Flavor,
    pub m: [Vec<C64>; 2],
    pub n: [Vec<C64>; 2],
    /// Sup-norm defect of both fixed-point equations at the returned pair.
    pub residual: f64,
    pub iterations: usize,
    /// Largest ratio of consecutive alternation defects above roundoff.
    pub contraction: Option<f64>,
    pub krylov: bool,
}

#[derive(Debug, Clone)]
pub struct DeltaPair {
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

impl DeltaPair {
    /// `max |delta+ - delta- (1 + r+ r-)|`.
    pub fn jump_defect(&self, r: &ReflectionData) -> f64 {
        (0..self.plus.len())
            .map(|k| (self.plus[k] - self.minus[k] * (ONE + r.r_plus[k] * r.r_minus[k])).norm())
            .fold(0.0, f64::max)
    }

    /// Largest distance from 1 of either field at either grid edge.
    pub fn edge_defect(&self) -> f64 {
        let last = self.plus.len() - 1;
        [
            self.plus[0],
            self.plus[last],
            self.minus[0],
            self.minus[last],
        ]
        .iter()
        .map(|c| (c - ONE).norm())
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct DeltifiedReflection {
    pub r_plus: Vec<C64>,
    pub r_minus: Vec<C64>,
}

/// `delta± = exp(C±(log(1 + r+ r-)))`.
pub fn solve_scalar_delta(proj: &CauchyProjector, r: &ReflectionData) -> Result<DeltaPair> {
    let rho: Vec<C64> = r
        .r_plus
        .iter()
        .zip(&r.r_minus)
        .map(|(a, b)| ONE + a * b)
        .collect();
    let min_modulus = rho.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min);
    if min_modulus <= BRANCH_MARGIN {
        return Err(Error::BranchSafety { min_modulus });
    }
    let log: Vec<C64> = rho.iter().map(|c| c.ln()).collect();
    let (p, m) = proj.split(&log);
    Ok(DeltaPair {
        plus: p.iter().map(|c| c.exp()).collect(),
        minus: m.iter().map(|c| c.exp()).collect(),
    })
}

pub fn deltify(r: &ReflectionData, d: &DeltaPair) -> DeltifiedReflection {
    let pm: Vec<C64> = d.plus.iter().zip(&d.minus).map(|(a, b)| a * b).collect();
    DeltifiedReflection {
        r_plus: pm.iter().zip(&r.r_plus).map(|(a, b)| a * b).collect(),
        r_minus: pm.iter().zip(&r.r_minus).map(|(a, b)| b / a).collect(),
    }
}

/// The linear fixed-point map at one `x`.
struct System<'a> {
    proj: &'a CauchyProjector,
    flavor: Flavor,
    /// Multiplies `n` in the `m` equation.
    cm: Vec<C64>,
    /// Multiplies `m` in the `n` equation.
    cn: Vec<C64>,
}

type Pair = [Vec<C64>; 2];

impl<'a> System<'a> {
    fn new(proj: &'a CauchyProjector, flavor: Flavor, x: f64, rm: &[C64], rn: &[C64]) -> Self {
        let z = proj.grid().nodes();
        let cm = z
            .iter()
            .zip(rm)
            .map(|(z, r)| r * (I * 2.0 * z * x).exp())
            .collect();
        let cn = z
            .iter()
            .zip(rn)
            .map(|(z, r)| r * (-I * 2.0 * z * x).exp())
            .collect();
        Self {
            proj,
            flavor,
            cm,
            cn,
        }
    }

    fn project(&self, f: &[C64], for_m: bool) -> Vec<C64> {
        let plus = match self.flavor {
            Flavor::Plain => !for_m,
            Flavor::Deltified => for_m,
        };
        if plus {
            self.proj.plus(f)
        } else {
            self.proj.minus(f)
        }
    }

    /// Homogeneous part of the `m` update: `P_m(n cm)` per component.
    fn km(&self, n: &Pair) -> Pair {
        let f = |c: &Vec<C64>| -> Vec<C64> {
            let g: Vec<C64> = c.iter().zip(&self.cm).map(|(a, b)| a * b).collect();
            self.project(&g, true)
        };
        [f(&n[0]), f(&n[1])]
    }

    fn kn(&self, m: &Pair) -> Pair {
        let f = |c: &Vec<C64>| -> Vec<C64> {
            let g: Vec<C64> = c.iter().zip(&self.cn).map(|(a, b)| a * b).collect();
            self.project(&g, false)
        };
        [f(&m[0]), f(&m[1])]
    }

    fn update_m(&self, n: &Pair) -> Pair {
        let mut k = self.km(n);
        k[0].iter_mut().for_each(|c| *c += ONE);
        k
    }

    fn update_n(&self, m: &Pair) -> Pair {
        let mut k = self.kn(m);
        k[1].iter_mut().for_each(|c| *c += ONE);
        k
    }

    fn defect(&self, m: &Pair, n: &Pair) -> f64 {
        sup_diff(&self.update_m(n), m).max(sup_diff(&self.update_n(m), n))
    }
}

fn sup_diff(a: &Pair, b: &Pair) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

fn unit_pair(len: usize, first: bool) -> Pair {
    let (a, b) = if first { (ONE, ZERO) } else { (ZERO, ONE) };
    [vec![a; len], vec![b; len]]
}

fn solve(sys: &System, x: f64, opts: &SolverOptions) -> Result<BoundaryPair> {
    let len = sys.cm.len();
    let alternation_budget = (opts.max_iter / 2).max(1);
    let mut n = unit_pair(len, false);
    let mut m = sys.update_m(&n);
    n = sys.update_n(&m);
    let mut iterations = 1;
    let mut defects: Vec<f64> = Vec::new();
    let mut converged = false;
    loop {
        let m_next = sys.update_m(&n);
        let d = sup_diff(&m_next, &m);
        defects.push(d);
        if d <= opts.tol {
            converged = true;
            break;
        }
        let stagnating = defects.len() >= 4 && {
            let k = defects.len();
            (k - 3..k).all(|i| defects[i] > 0.9 * defects[i - 1])
        };
        if iterations >= alternation_budget || stagnating || !d.is_finite() {
            break;
        }
        m = m_next;
        n = sys.update_n(&m);
        iterations += 1;
    }
    let contraction = defects
        .windows(2)
        .filter(|w| w[0] > CONTRACTION_FLOOR)
        .map(|w| w[1] / w[0])
        .fold(None, |acc: Option<f64>, r| {
            Some(acc.map_or(r, |a| a.max(r)))
        });
    let mut krylov = false;
    if !converged {
        krylov = true;
        if !defects.last().copied().unwrap_or(0.0).is_finite() {
            m = unit_pair(len, true);
            n = unit_pair(len, false);
        }
        let budget = opts.max_iter.saturating_sub(iterations);
        let (mk, nk, used) = gmres(sys, m, n, opts.tol, budget);
        m = mk;
        n = nk;
        iterations += used;
    }
    let residual = sys.defect(&m, &n);
    if residual > opts.tol {
        return Err(Error::Convergence {
            x,
            residual,
            iterations,
            contraction: contraction.unwrap_or(f64::NAN),
        });
    }
    Ok(BoundaryPair {
        x,
        flavor: sys.flavor,
        m,
        n,
        residual,
        iterations,
        contraction,
        krylov,
    })
}

fn stack(m: &Pair, n: &Pair) -> Vec<C64> {
    m.iter().chain(n).flat_map(|v| v.iter().copied()).collect()
}

fn unstack(v: &[C64], len: usize) -> (Pair, Pair) {
    let part = |k: usize| v[k * len..(k + 1) * len].to_vec();
    ([part(0), part(1)], [part(2), part(3)])
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C64]) -> f64 {
    a.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Restarted GMRES for `(I - K) X = (e1, e2)`. Returns the iterate and the
/// number of operator applications used.
fn gmres(sys: &System, m0: Pair, n0: Pair, tol: f64, budget: usize) -> (Pair, Pair, usize) {
    let len = sys.cm.len();
    let apply = |v: &[C64]| -> Vec<C64> {
        let (m, n) = unstack(v, len);
        let km = sys.km(&n);
        let kn = sys.kn(&m);
        let k = stack(&km, &kn);
        v.iter().zip(&k).map(|(a, b)| a - b).collect()
    };
    let b = stack(&unit_pair(len, true), &unit_pair(len, false));
    let mut x = stack(&m0, &n0);
    let mut used = 0;
    while used < budget {
        let ax = apply(&x);
        let r: Vec<C64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let beta = norm(&r);
        if r.iter().map(|c| c.norm()).fold(0.0, f64::max) <= tol || beta == 0.0 {
            break;
        }
        let k = GMRES_RESTART.min(budget - used);
        let mut basis: Vec<Vec<C64>> = vec![r.iter().map(|c| c / beta).collect()];
        let mut hess = vec![vec![ZERO; k]; k + 1];
        let mut cs = vec![0.0; k];
        let mut sn = vec![ZERO; k];
        let mut g = vec![ZERO; k + 1];
        g[0] = C64::new(beta, 0.0);
        let mut cols = 0;
        for j in 0..k {
            let mut w = apply(&basis[j]);
            used += 1;
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate() {
                    let hij = dot(v, &w);
                    hess[i][j] += hij;
                    w.iter_mut().zip(v).for_each(|(a, b)| *a -= hij * b);
                }
            }
            let hn = norm(&w);
            hess[j + 1][j] = C64::new(hn, 0.0);
            for i in 0..j {
                let (a, c) = (hess[i][j], hess[i + 1][j]);
                hess[i][j] = a * cs[i] + sn[i] * c;
                hess[i + 1][j] = -sn[i].conj() * a + c * cs[i];
            }
            let (a, c) = (hess[j][j], hess[j + 1][j]);
            let rr = (a.norm_sqr() + c.norm_sqr()).sqrt();
            let phase = if a.norm() == 0.0 { ONE } else { a / a.norm() };
            cs[j] = a.norm() / rr;
            sn[j] = phase * c.conj() / rr;
            hess[j][j] = phase * rr;
            hess[j + 1][j] = ZERO;
            g[j + 1] = -sn[j].conj() * g[j];
            g[j] *= cs[j];
            cols = j + 1;
            if g[j + 1].norm() <= 0.25 * tol || hn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|c| c / hn).collect());
        }
        let mut y = vec![ZERO; cols];
        for i in (0..cols).rev() {
            let s: C64 = (i + 1..cols).map(|l| hess[i][l] * y[l]).sum();
            y[i] = (g[i] - s) / hess[i][i];
        }
        for (yi, v) in y.iter().zip(&basis) {
            x.iter_mut().zip(v).for_each(|(a, b)| *a += yi * b);
        }
    }
    let (m, n) = unstack(&x, len);
    (m, n, used)
}

pub fn solve_boundary_pair(
    proj: &CauchyProjector,
    r: &ReflectionData,
    x: f64,
    opts: &SolverOptions,
) -> Result<BoundaryPair> {
    let sys = System::new(proj, Flavor::Plain, x, &r.r_minus, &r.r_plus);
    solve(&sys, x, opts)
}

pub fn solve_boundary_pair_delta(
    proj: &CauchyProjector,
    rd: &DeltifiedReflection,
    x: f64,
    opts: &SolverOptions,
) -> Result<BoundaryPair> {
    let sys = System::new(proj, Flavor::Deltified, x, &rd.r_minus, &rd.r_plus);
    solve(&sys, x, opts)
}

/// Recomputes the fixed-point defect of a returned pair with one extra
/// application of the operators.
pub fn certificate(
    proj: &CauchyProjector,
    pair: &BoundaryPair,
    r_minus: &[C64],
    r_plus: &[C64],
) -> f64 {
    System::new(proj, pair.flavor, pair.x, r_minus, r_plus).defect(&pair.m, &pair.n)
}

/// Plain flavor for `x >= 0`, deltified flavor for `x < 0`, solved in parallel.
pub fn solve_on_grid(
    proj: &CauchyProjector,
    r: &ReflectionData,
    rd: &DeltifiedReflection,
    xs: &[f64],
    opts: &SolverOptions,
) -> Result<Vec<BoundaryPair>> {
    xs.par_iter()
        .map(|&x| {
            if x >= 0.0 {
                solve_boundary_pair(proj, r, x, opts)
            } else {
                solve_boundary_pair_delta(proj, rd, x, opts)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::SpectralGrid;

    fn zero_setup() -> (CauchyProjector, ReflectionData) {
        let g = SpectralGrid {
            m: 256,
            z_max: 12.0,
        };
        (CauchyProjector::new(&g), ReflectionData::zero(&g))
    }

    #[test]
    fn zero_reflection_gives_unit_pairs() {
        let (p, r) = zero_setup();
        let opts = SolverOptions::default();
        let pair = solve_boundary_pair(&p, &r, 0.3, &opts).unwrap();
        assert_eq!(pair.residual, 0.0);
        assert!(pair.m[0].iter().all(|c| *c == ONE) && pair.m[1].iter().all(|c| *c == ZERO));
        assert!(pair.n[0].iter().all(|c| *c == ZERO) && pair.n[1].iter().all(|c| *c == ONE));
        let d = solve_scalar_delta(&p, &r).unwrap();
        assert!(d
            .plus
            .iter()
            .chain(&d.minus)
            .all(|c| (c - ONE).norm() < 1e-15));
        let rd = deltify(&r, &d);
        let pair = solve_boundary_pair_delta(&p, &rd, -1.0, &opts).unwrap();
        assert_eq!(pair.residual, 0.0);
    }

    #[test]
    fn branch_safety_is_enforced() {
        let (p, mut r) = zero_setup();
        r.r_plus[10] = C64::new(1.0, 0.0);
        r.r_minus[10] = C64::new(-0.97, 0.0);
        assert!(matches!(
            solve_scalar_delta(&p, &r),
            Err(Error::BranchSafety { .. })
        ));
    }
}
