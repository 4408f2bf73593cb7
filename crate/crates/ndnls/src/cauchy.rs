//! Cauchy projections `C+`, `C-` and the Hilbert transform on the spectral grid.
//!
//! Two realizations are provided.
//!
//! The periodic projectors (`*_periodic`) are disjoint Fourier multipliers:
//! `C+` keeps `lambda >= 0` (zero mode included), `C-` is minus the `lambda < 0`
//! part. Their algebra (`C+ - C- = I`, idempotence, mutual annihilation) is
//! exact on the grid, but they approximate the line operators only to
//! `O(1/Z)`. The zero mode alone carries an error of about
//! `\int f / (4Z)`, even for rapidly decaying `f`.
//!
//! The default projectors (`plus`, `minus`, `hilbert`, `split`) first remove a
//! rational model `g = g+ + g-` with poles at `-i tau` (for `g+`) and `+i tau`
//! (for `g-`), whose line projections are known exactly. The model is fitted
//! to `f` on the edge windows, subject to the remainder `f - g` having
//! vanishing discrete moments of low order. The remainder then decays fast and
//! has projections that decay fast too, so periodization costs almost nothing.
//! This also settles how a `1/z` tail splits between the two half-planes.
//! `C+ - C- = I` still holds exactly. Idempotence holds to the accuracy of
//! the realization.

use nalgebra::DMatrix;

use crate::fourier::{angular_frequencies, Fourier};
use crate::model::{SpectralGrid, C64, I, ZERO};

/// Edge ratio above which inputs are considered non-decaying.
pub const DECAY_WARNING_RATIO: f64 = 1e-6;

const TAIL_POLE: f64 = 1.0;
const TAIL_ORDER: usize = 6;
const TAIL_MOMENTS: usize = 5;
const TAIL_WINDOW_FRACTION: f64 = 1.0 / 3.0;
const MOMENT_WEIGHT: f64 = 1e6;
/// Fitted edge residual (relative to `max|f|`) above which the rational model
/// is rejected and the periodic projectors are used unchanged.
const TAIL_REJECT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Plus,
    Minus,
}

#[derive(Debug, Clone)]
struct TailModel {
    edge: Vec<usize>,
    basis: Vec<Vec<C64>>,
    side: Vec<Side>,
    moments: Vec<Vec<f64>>,
    pinv: DMatrix<C64>,
}

impl TailModel {
    fn new(g: &SpectralGrid) -> Self {
        let z = g.nodes();
        let dz = g.dz();
        let window = g.z_max * TAIL_WINDOW_FRACTION;
        let edge: Vec<usize> = (0..g.m)
            .filter(|&k| z[k].abs() >= g.z_max - window)
            .collect();
        let mut basis = Vec::new();
        let mut side = Vec::new();
        for j in 1..=TAIL_ORDER as i32 {
            for (s, pole) in [(Side::Plus, -TAIL_POLE), (Side::Minus, TAIL_POLE)] {
                basis.push(
                    z.iter()
                        .map(|&x| (C64::new(x, -pole)).powi(-j))
                        .collect::<Vec<_>>(),
                );
                side.push(s);
            }
        }
        let moments: Vec<Vec<f64>> = (0..TAIL_MOMENTS as i32)
            .map(|p| {
                z.iter()
                    .map(|&x| MOMENT_WEIGHT * (x / g.z_max).powi(p) * dz)
                    .collect()
            })
            .collect();
        let rows = edge.len() + TAIL_MOMENTS;
        let a = DMatrix::<C64>::from_fn(rows, basis.len(), |r, c| {
            if r < edge.len() {
                basis[c][edge[r]]
            } else {
                moments[r - edge.len()]
                    .iter()
                    .zip(&basis[c])
                    .map(|(w, b)| b * w)
                    .sum()
            }
        });
        let svd = a.svd(true, true);
        let smax = svd.singular_values.max();
        let pinv = svd
            .pseudo_inverse(1e-13 * smax)
            .expect("SVD computed with both factors");
        Self {
            edge,
            basis,
            side,
            moments,
            pinv,
        }
    }

    /// Returns `(g+, g-)` or `None` if the model does not represent `f` at the edges.
    fn fit(&self, f: &[C64]) -> Option<(Vec<C64>, Vec<C64>)> {
        let ne = self.edge.len();
        let rhs = nalgebra::DVector::<C64>::from_fn(ne + TAIL_MOMENTS, |r, _| {
            if r < ne {
                f[self.edge[r]]
            } else {
                self.moments[r - ne].iter().zip(f).map(|(w, v)| v * w).sum()
            }
        });
        let coef = &self.pinv * rhs;
        let m = f.len();
        let mut gp = vec![ZERO; m];
        let mut gm = vec![ZERO; m];
        for (c, col) in self.basis.iter().enumerate() {
            let target = if self.side[c] == Side::Plus {
                &mut gp
            } else {
                &mut gm
            };
            for (t, b) in target.iter_mut().zip(col) {
                *t += coef[c] * b;
            }
        }
        let peak = f.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let misfit = self
            .edge
            .iter()
            .map(|&k| (f[k] - gp[k] - gm[k]).norm())
            .fold(0.0, f64::max);
        (misfit <= TAIL_REJECT * peak).then_some((gp, gm))
    }
}

#[derive(Debug, Clone)]
pub struct CauchyProjector {
    grid: SpectralGrid,
    fft: Fourier,
    nonneg: Vec<bool>,
    tail: TailModel,
}

impl CauchyProjector {
    pub fn new(grid: &SpectralGrid) -> Self {
        let nonneg = angular_frequencies(grid.m, grid.dz())
            .into_iter()
            .map(|l| l >= 0.0)
            .collect();
        Self {
            grid: *grid,
            fft: Fourier::new(grid.m),
            nonneg,
            tail: TailModel::new(grid),
        }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    /// Periodic multiplier pair `(C+ f, C- f)`.
    pub fn split_periodic(&self, f: &[C64]) -> (Vec<C64>, Vec<C64>) {
        let hat = self.fft.forward(f);
        let mut p = vec![ZERO; hat.len()];
        let mut n = vec![ZERO; hat.len()];
        for (k, c) in hat.into_iter().enumerate() {
            if self.nonneg[k] {
                p[k] = c;
            } else {
                n[k] = -c;
            }
        }
        self.fft.inverse_in_place(&mut p);
        self.fft.inverse_in_place(&mut n);
        (p, n)
    }

    pub fn plus_periodic(&self, f: &[C64]) -> Vec<C64> {
        self.split_periodic(f).0
    }

    pub fn minus_periodic(&self, f: &[C64]) -> Vec<C64> {
        self.split_periodic(f).1
    }

    pub fn hilbert_periodic(&self, f: &[C64]) -> Vec<C64> {
        let (p, n) = self.split_periodic(f);
        p.iter().zip(&n).map(|(a, b)| I * (a + b)).collect()
    }

    /// Tail-corrected pair `(C+ f, C- f)`. Falls back to the periodic pair when
    /// the rational model does not fit `f` at the edges (e.g. constants).
    pub fn split(&self, f: &[C64]) -> (Vec<C64>, Vec<C64>) {
        match self.tail.fit(f) {
            None => self.split_periodic(f),
            Some((gp, gm)) => {
                let r: Vec<C64> = (0..f.len()).map(|k| f[k] - gp[k] - gm[k]).collect();
                let (mut p, mut n) = self.split_periodic(&r);
                for k in 0..f.len() {
                    p[k] += gp[k];
                    n[k] -= gm[k];
                }
                (p, n)
            }
        }
    }

    /// Projection onto one side only (the same work as `split`).
    fn side(&self, f: &[C64], plus: bool) -> Vec<C64> {
        let (p, n) = self.split(f);
        if plus {
            p
        } else {
            n
        }
    }

    pub fn plus(&self, f: &[C64]) -> Vec<C64> {
        self.side(f, true)
    }

    pub fn minus(&self, f: &[C64]) -> Vec<C64> {
        self.side(f, false)
    }

    /// `H f = i (C+ f + C- f)`.
    pub fn hilbert(&self, f: &[C64]) -> Vec<C64> {
        let (p, n) = self.split(f);
        p.iter().zip(&n).map(|(a, b)| I * (a + b)).collect()
    }

    /// L2 norms of the nonnegative- and negative-frequency content of `f`.
    pub fn frequency_content(&self, f: &[C64]) -> (f64, f64) {
        let hat = self.fft.forward(f);
        let mut pos = 0.0;
        let mut neg = 0.0;
        for (k, c) in hat.iter().enumerate() {
            if self.nonneg[k] {
                pos += c.norm_sqr();
            } else {
                neg += c.norm_sqr();
            }
        }
        (pos.sqrt(), neg.sqrt())
    }
}

/// `max(|f| at both edges) / max|f|`; inputs above [`DECAY_WARNING_RATIO`] are
/// outside the regime where either realization is accurate.
pub fn edge_decay(f: &[C64]) -> f64 {
    crate::model::edge_ratio(f)
}
