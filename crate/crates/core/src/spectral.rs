//! Fourier transforms on the unit torus.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse FFT pair for real data of length `n` on a period-1 grid.
#[derive(Clone)]
pub(crate) struct Spectral {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Spectral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

impl Spectral {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    /// Signed integer wavenumber of FFT slot `j`.
    pub(crate) fn wavenumber(&self, j: usize) -> i64 {
        if j <= self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// True for the unpaired Nyquist slot of an even-length transform.
    pub(crate) fn is_nyquist(&self, j: usize) -> bool {
        self.n.is_multiple_of(2) && j == self.n / 2
    }

    pub(crate) fn forward(&self, values: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    /// Inverse transform, normalised, real part.
    pub(crate) fn inverse(&self, mut coeffs: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut coeffs);
        let scale = 1.0 / self.n as f64;
        coeffs.into_iter().map(|c| c.re * scale).collect()
    }

    /// Multiplies every Fourier coefficient by `symbol(j)` and transforms back.
    pub(crate) fn apply<F>(&self, values: &[f64], symbol: F) -> Vec<f64>
    where
        F: Fn(usize) -> Complex64,
    {
        let mut coeffs = self.forward(values);
        for (j, c) in coeffs.iter_mut().enumerate() {
            *c *= symbol(j);
        }
        self.inverse(coeffs)
    }

    /// Symbol of d/dx: `2πik`, zero on the Nyquist slot so the derivative of
    /// real data stays real.
    pub(crate) fn derivative_symbol(&self, j: usize) -> Complex64 {
        if self.is_nyquist(j) {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(0.0, 2.0 * PI * self.wavenumber(j) as f64)
        }
    }

    pub(crate) fn derivative(&self, values: &[f64]) -> Vec<f64> {
        self.apply(values, |j| self.derivative_symbol(j))
    }

    /// Zeroes the upper third of the spectrum (2/3 rule).
    pub(crate) fn dealias(&self, values: &[f64]) -> Vec<f64> {
        let cutoff = self.n as f64 / 3.0;
        self.apply(values, |j| {
            if (self.wavenumber(j).abs() as f64) < cutoff {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Fraction of the L² energy carried by modes with |k| ≥ n/3.
    pub(crate) fn tail_fraction(&self, values: &[f64]) -> f64 {
        let coeffs = self.forward(values);
        let cutoff = self.n as f64 / 3.0;
        let mut total = 0.0;
        let mut tail = 0.0;
        for (j, c) in coeffs.iter().enumerate() {
            let e = c.norm_sqr();
            total += e;
            if self.wavenumber(j).abs() as f64 >= cutoff {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}
