//! Spatial domains and cell-centred grid functions.
//!
//! Every field in the crate is a [`GridFn`]: `n` samples at the cell centres of
//! either the unit torus or a truncated window `[a, b]` of the real line. On the
//! line, functions are taken to vanish outside the window.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::Spectral;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Domain {
    /// `R / Z`, period exactly 1.
    Torus,
    /// Truncation window `[a, b]`, zero far field.
    Line { a: f64, b: f64 },
}

impl Domain {
    pub fn line(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite("line endpoints".into()));
        }
        if b - a <= 0.0 {
            return Err(Error::InvalidParameter(format!("line window needs a < b, got [{a}, {b}]")));
        }
        Ok(Domain::Line { a, b })
    }

    /// Default line window `[-20, 20]`.
    pub fn default_line() -> Self {
        Domain::Line { a: -20.0, b: 20.0 }
    }

    pub fn length(&self) -> f64 {
        match *self {
            Domain::Torus => 1.0,
            Domain::Line { a, b } => b - a,
        }
    }

    pub fn start(&self) -> f64 {
        match *self {
            Domain::Torus => 0.0,
            Domain::Line { a, .. } => a,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Domain::Torus)
    }

    pub fn spacing(&self, n: usize) -> f64 {
        self.length() / n as f64
    }

    pub fn cell_center(&self, n: usize, i: usize) -> f64 {
        self.start() + (i as f64 + 0.5) * self.spacing(n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Norm {
    L1,
    L2,
    Linf,
    /// Total variation; wraps around on the torus.
    Tv,
}

/// Sampled real function on a [`Domain`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    domain: Domain,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("grid function needs n > 0 cells".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("grid value at cell {i}")));
        }
        Ok(Self { domain, values })
    }

    /// Constructor for values already known to be finite.
    pub(crate) fn from_vec(domain: Domain, values: Vec<f64>) -> Self {
        debug_assert!(!values.is_empty());
        Self { domain, values }
    }

    pub fn zeros(domain: Domain, n: usize) -> Self {
        assert!(n > 0, "grid function needs n > 0 cells");
        Self { domain, values: vec![0.0; n] }
    }

    pub fn constant(domain: Domain, n: usize, c: f64) -> Self {
        assert!(n > 0, "grid function needs n > 0 cells");
        Self { domain, values: vec![c; n] }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(domain: Domain, n: usize, f: F) -> Result<Self> {
        let values = (0..n).map(|i| f(domain.cell_center(n, i))).collect();
        Self::new(domain, values)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn h(&self) -> f64 {
        self.domain.spacing(self.n())
    }

    pub fn x(&self, i: usize) -> f64 {
        self.domain.cell_center(self.n(), i)
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n()).map(|i| self.x(i)).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_compatible(&self, other: &GridFn) -> bool {
        self.domain == other.domain && self.n() == other.n()
    }

    pub fn check_compatible(&self, other: &GridFn) -> Result<()> {
        if self.is_compatible(other) {
            Ok(())
        } else {
            Err(Error::Mismatch(format!(
                "{:?} with n = {} vs {:?} with n = {}",
                self.domain,
                self.n(),
                other.domain,
                other.n()
            )))
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> GridFn {
        GridFn::from_vec(self.domain, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, alpha: f64) -> GridFn {
        self.map(|v| alpha * v)
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &GridFn) -> Result<GridFn> {
        self.check_compatible(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + alpha * b).collect();
        Ok(GridFn::from_vec(self.domain, values))
    }

    pub fn sub(&self, other: &GridFn) -> Result<GridFn> {
        self.axpy(-1.0, other)
    }

    /// Midpoint quadrature `h Σ g_i`.
    pub fn integral(&self) -> f64 {
        self.h() * self.values.iter().sum::<f64>()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n() as f64
    }

    /// Discrete L² inner product `h Σ f_i g_i`.
    pub fn dot(&self, other: &GridFn) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(self.h() * self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>())
    }

    pub fn norm(&self, which: Norm) -> f64 {
        let h = self.h();
        match which {
            Norm::L1 => h * self.values.iter().map(|v| v.abs()).sum::<f64>(),
            Norm::L2 => (h * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt(),
            Norm::Linf => self.values.iter().fold(0.0, |m, v| m.max(v.abs())),
            Norm::Tv => {
                let mut tv: f64 = self.values.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
                if self.domain.is_periodic() {
                    tv += (self.values[0] - self.values[self.n() - 1]).abs();
                }
                tv
            }
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Discrete `d/dx`. Torus: Fourier multiplier. Line: second-order central
    /// differences, one-sided second-order stencils at the two ends.
    pub fn derivative(&self) -> GridFn {
        match self.domain {
            Domain::Torus => {
                let spectral = Spectral::new(self.n());
                GridFn::from_vec(self.domain, spectral.derivative(&self.values))
            }
            Domain::Line { .. } => GridFn::from_vec(self.domain, central_derivative(&self.values, self.h())),
        }
    }

    /// Linear interpolation at an arbitrary point (periodic on the torus,
    /// zero outside the window on the line).
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.n();
        let h = self.h();
        let s = (x - self.domain.start()) / h - 0.5;
        match self.domain {
            Domain::Torus => {
                let s = s.rem_euclid(n as f64);
                let i = (s.floor() as usize).min(n - 1);
                let frac = s - i as f64;
                let j = (i + 1) % n;
                self.values[i] * (1.0 - frac) + self.values[j] * frac
            }
            Domain::Line { .. } => {
                if s < -0.5 || s > n as f64 - 0.5 {
                    return 0.0;
                }
                if s <= 0.0 {
                    return self.values[0];
                }
                if s >= (n - 1) as f64 {
                    return self.values[n - 1];
                }
                let i = s.floor() as usize;
                let frac = s - i as f64;
                self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
            }
        }
    }

    /// Snapshot CSV: header `x,u`, one row per cell.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,u")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.x(i), v)?;
        }
        Ok(())
    }

    /// Same layout as [`GridFn::write_csv`] with a custom header.
    pub fn write_csv_with_header<W: Write>(&self, mut w: W, xname: &str, vname: &str) -> Result<()> {
        writeln!(w, "{xname},{vname}")?;
        for (i, v) in self.values.iter().enumerate() {
            writeln!(w, "{:.16e},{:.16e}", self.x(i), v)?;
        }
        Ok(())
    }
}

pub(crate) fn central_derivative(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len();
    let mut d = vec![0.0; n];
    if n < 3 {
        if n == 2 {
            let s = (g[1] - g[0]) / h;
            d[0] = s;
            d[1] = s;
        }
        return d;
    }
    let inv2h = 0.5 / h;
    for i in 1..n - 1 {
        d[i] = (g[i + 1] - g[i - 1]) * inv2h;
    }
    d[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) * inv2h;
    d[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) * inv2h;
    d
}

/// Time series of a scalar diagnostic.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ScalarSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl ScalarSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_parts(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidParameter("series times and values differ in length".into()));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("series times must increase strictly".into()));
        }
        Ok(Self { times, values })
    }

    pub fn push(&mut self, t: f64, v: f64) -> Result<()> {
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::InvalidParameter(format!("series time {t} does not follow {last}")));
            }
        }
        self.times.push(t);
        self.values.push(v);
        Ok(())
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn first(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn last(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Largest deviation from the initial value.
    pub fn max_drift(&self) -> f64 {
        match self.values.first() {
            Some(&v0) => self.values.iter().fold(0.0, |m, v| m.max((v - v0).abs())),
            None => 0.0,
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// First time at which `pred(value)` holds.
    pub fn first_time_where<P: Fn(f64) -> bool>(&self, pred: P) -> Option<f64> {
        self.times.iter().zip(&self.values).find(|(_, &v)| pred(v)).map(|(&t, _)| t)
    }
}
