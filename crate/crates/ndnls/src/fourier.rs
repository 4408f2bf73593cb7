//! Thin wrapper over `rustfft` with the normalization used throughout the crate:
//! the forward transform is unnormalized and the inverse divides by `n`.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::model::C64;

#[derive(Clone)]
pub struct Fourier {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Fourier").field("n", &self.n).finish()
    }
}

impl Fourier {
    pub fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn forward(&self, f: &[C64]) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.fwd.process(&mut buf);
        buf
    }

    pub fn inverse(&self, f: &[C64]) -> Vec<C64> {
        let mut buf = f.to_vec();
        self.inv.process(&mut buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= s);
        buf
    }

    pub fn forward_in_place(&self, buf: &mut [C64]) {
        self.fwd.process(buf);
    }

    pub fn inverse_in_place(&self, buf: &mut [C64]) {
        self.inv.process(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|c| *c *= s);
    }
}

/// Angular frequencies `2 pi fftfreq(n, h)` in transform order.
pub fn angular_frequencies(n: usize, h: f64) -> Vec<f64> {
    let scale = 2.0 * PI / (n as f64 * h);
    (0..n)
        .map(|k| {
            let k = if k < n.div_ceil(2) {
                k as f64
            } else {
                k as f64 - n as f64
            };
            k * scale
        })
        .collect()
}

/// Spectral derivative of a periodic sample vector with spacing `h`.
/// The Nyquist mode of an even-length vector is dropped.
pub fn derivative(fourier: &Fourier, f: &[C64], h: f64) -> Vec<C64> {
    let n = f.len();
    let xi = angular_frequencies(n, h);
    let mut hat = fourier.forward(f);
    for (c, &k) in hat.iter_mut().zip(&xi) {
        *c *= C64::new(0.0, k);
    }
    if n.is_multiple_of(2) {
        hat[n / 2] = C64::new(0.0, 0.0);
    }
    fourier.inverse_in_place(&mut hat);
    hat
}

/// Trigonometric interpolation onto a grid `factor` times finer sharing the first node.
pub fn upsample(f: &[C64], factor: usize) -> Vec<C64> {
    let n = f.len();
    let nf = n * factor;
    let hat = Fourier::new(n).forward(f);
    let mut big = vec![C64::new(0.0, 0.0); nf];
    let half = n / 2;
    for k in 0..n {
        if n.is_multiple_of(2) && k == half {
            big[half] += hat[k] * 0.5;
            big[nf - half] += hat[k] * 0.5;
        } else if k < half || (n % 2 == 1 && k == half) {
            big[k] = hat[k];
        } else {
            big[nf - (n - k)] = hat[k];
        }
    }
    let mut out = Fourier::new(nf).inverse(&big);
    let s = factor as f64;
    out.iter_mut().for_each(|c| *c *= s);
    out
}
