//! Convolution with the kernel `K(x) = e^{-|x|}/2` and its derivative.
//!
//! `K` is the fundamental solution of `1 - ∂²`, so `K*g` is computed as the
//! solution `w` of `(I - D²) w = g`: a Fourier multiplier on the torus and a
//! tridiagonal solve on the line.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{central_derivative, Domain, GridFn};
use crate::spectral::Spectral;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// `e^{-|x|}/2`.
    KLine,
    /// `-sgn(x) e^{-|x|}/2`, with `sgn(0) = 0`.
    KprimeLine,
    /// Periodisation of `KLine` with period 1.
    KTorus,
}

pub fn kernel_eval(which: KernelKind, x: f64) -> f64 {
    match which {
        KernelKind::KLine => 0.5 * (-x.abs()).exp(),
        KernelKind::KprimeLine => {
            if x == 0.0 {
                0.0
            } else {
                -0.5 * x.signum() * (-x.abs()).exp()
            }
        }
        KernelKind::KTorus => {
            let e = std::f64::consts::E;
            let y = x.rem_euclid(1.0);
            (y.exp() + (1.0 - y).exp()) / (2.0 * (e - 1.0))
        }
    }
}

#[derive(Debug, Clone)]
enum Factor {
    Torus {
        spectral: Spectral,
        multipliers: Vec<f64>,
    },
    /// Thomas factorisation of the constant-coefficient matrix with diagonal
    /// `1 + 2/h²` and off-diagonals `-1/h²`.
    Line {
        off: f64,
        /// Modified super-diagonal `c'_i`.
        upper: Vec<f64>,
        /// Reciprocal pivots.
        inv_pivot: Vec<f64>,
    },
}

/// Precomputed `K*` / `K′*` for one domain and cell count.
#[derive(Debug, Clone)]
pub struct KernelOp {
    domain: Domain,
    n: usize,
    h: f64,
    factor: Factor,
}

impl KernelOp {
    pub fn new(domain: Domain, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParameter(format!("kernel operator needs n >= 3, got {n}")));
        }
        let h = domain.spacing(n);
        let factor = match domain {
            Domain::Torus => {
                let spectral = Spectral::new(n);
                let multipliers = (0..n)
                    .map(|j| {
                        let k = 2.0 * PI * spectral.wavenumber(j) as f64;
                        1.0 / (1.0 + k * k)
                    })
                    .collect();
                Factor::Torus { spectral, multipliers }
            }
            Domain::Line { .. } => {
                let off = -1.0 / (h * h);
                let diag = 1.0 + 2.0 / (h * h);
                let mut upper = vec![0.0; n];
                let mut inv_pivot = vec![0.0; n];
                let mut prev_upper = 0.0;
                for i in 0..n {
                    let pivot = diag - off * prev_upper;
                    if pivot.abs() < 1e-300 {
                        return Err(Error::InvalidParameter("singular Helmholtz factorisation".into()));
                    }
                    inv_pivot[i] = 1.0 / pivot;
                    upper[i] = off * inv_pivot[i];
                    prev_upper = upper[i];
                }
                Factor::Line { off, upper, inv_pivot }
            }
        };
        Ok(Self { domain, n, h, factor })
    }

    /// Operator matching the domain and size of `g`.
    pub fn for_grid(g: &GridFn) -> Result<Self> {
        Self::new(g.domain(), g.n())
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Fourier multipliers in FFT slot order; `None` on the line.
    pub fn multipliers(&self) -> Option<&[f64]> {
        match &self.factor {
            Factor::Torus { multipliers, .. } => Some(multipliers),
            Factor::Line { .. } => None,
        }
    }

    fn check(&self, g: &GridFn) -> Result<()> {
        if g.domain() != self.domain || g.n() != self.n {
            return Err(Error::Mismatch(format!(
                "kernel operator built for {:?} n = {}, got {:?} n = {}",
                self.domain,
                self.n,
                g.domain(),
                g.n()
            )));
        }
        Ok(())
    }

    pub(crate) fn conv_k_slice(&self, g: &[f64]) -> Vec<f64> {
        match &self.factor {
            Factor::Torus { spectral, multipliers } => spectral.apply(g, |j| Complex64::new(multipliers[j], 0.0)),
            Factor::Line { off, upper, inv_pivot } => {
                let n = g.len();
                let mut w = vec![0.0; n];
                let mut prev = 0.0;
                for i in 0..n {
                    w[i] = (g[i] - off * prev) * inv_pivot[i];
                    prev = w[i];
                }
                for i in (0..n - 1).rev() {
                    w[i] -= upper[i] * w[i + 1];
                }
                w
            }
        }
    }

    pub(crate) fn derivative_slice(&self, g: &[f64]) -> Vec<f64> {
        match &self.factor {
            Factor::Torus { spectral, .. } => spectral.derivative(g),
            Factor::Line { .. } => central_derivative(g, self.h),
        }
    }

    pub(crate) fn conv_kprime_slice(&self, g: &[f64]) -> Vec<f64> {
        match &self.factor {
            Factor::Torus { spectral, multipliers } => {
                spectral.apply(g, |j| spectral.derivative_symbol(j) * multipliers[j])
            }
            Factor::Line { .. } => central_derivative(&self.conv_k_slice(g), self.h),
        }
    }

    /// `K*g`.
    pub fn conv_k(&self, g: &GridFn) -> Result<GridFn> {
        self.check(g)?;
        Ok(GridFn::from_vec(self.domain, self.conv_k_slice(g.values())))
    }

    /// `K′*g = ∂ₓ(K*g)`.
    pub fn conv_kprime(&self, g: &GridFn) -> Result<GridFn> {
        self.check(g)?;
        Ok(GridFn::from_vec(self.domain, self.conv_kprime_slice(g.values())))
    }

    /// The discrete `(I - D²) w` this operator inverts. On the line, cells
    /// outside the window count as zero.
    pub fn helmholtz(&self, w: &GridFn) -> Result<GridFn> {
        self.check(w)?;
        let v = w.values();
        let out = match &self.factor {
            Factor::Torus { spectral, .. } => spectral.apply(v, |j| {
                let k = 2.0 * PI * spectral.wavenumber(j) as f64;
                Complex64::new(1.0 + k * k, 0.0)
            }),
            Factor::Line { .. } => {
                let n = v.len();
                let inv_h2 = 1.0 / (self.h * self.h);
                (0..n)
                    .map(|i| {
                        let l = if i > 0 { v[i - 1] } else { 0.0 };
                        let r = if i + 1 < n { v[i + 1] } else { 0.0 };
                        v[i] - (l - 2.0 * v[i] + r) * inv_h2
                    })
                    .collect()
            }
        };
        Ok(GridFn::from_vec(self.domain, out))
    }
}

/// `K*` and `K′*` of a point-mass measure `Σ w_j δ(x - X_j)` evaluated at the
/// (sorted) points themselves, in O(n) via the exponential recursions
/// `A_i = e^{-(X_i - X_{i-1})}(A_{i-1} + w_{i-1})` and its mirror image.
pub(crate) fn particle_convolutions(xs: &[f64], weights: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = xs.len();
    let mut left = vec![0.0; n];
    let mut right = vec![0.0; n];
    for i in 1..n {
        left[i] = (-(xs[i] - xs[i - 1])).exp() * (left[i - 1] + weights[i - 1]);
    }
    for i in (0..n.saturating_sub(1)).rev() {
        right[i] = (-(xs[i + 1] - xs[i])).exp() * (right[i + 1] + weights[i + 1]);
    }
    let k = (0..n).map(|i| 0.5 * (left[i] + right[i] + weights[i])).collect();
    let kp = (0..n).map(|i| 0.5 * (right[i] - left[i])).collect();
    (k, kp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Norm;
    use crate::profile::{sample, Profile};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn direct_line_conv(g: &GridFn, which: KernelKind, x: f64) -> f64 {
        let h = g.h();
        (0..g.n()).map(|j| h * kernel_eval(which, x - g.x(j)) * g.values()[j]).sum()
    }

    #[test]
    fn kernel_values() {
        assert_eq!(kernel_eval(KernelKind::KLine, 0.0), 0.5);
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(kernel_eval(KernelKind::KTorus, 0.0), (1.0 + e) / (2.0 * (e - 1.0)), epsilon = 1e-15);
        assert_abs_diff_eq!(kernel_eval(KernelKind::KTorus, 0.0), 1.08198, epsilon = 1e-5);
        let jump = kernel_eval(KernelKind::KprimeLine, 1e-300) - kernel_eval(KernelKind::KprimeLine, -1e-300);
        assert_abs_diff_eq!(jump, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn periodic_kernel_is_the_periodisation() {
        for x in [0.0, 0.1, 0.37, 0.5, 0.93] {
            let images: f64 = (-40..=40).map(|m| kernel_eval(KernelKind::KLine, x + m as f64)).sum();
            assert_abs_diff_eq!(kernel_eval(KernelKind::KTorus, x), images, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        for dom in [Domain::Torus, Domain::default_line()] {
            let op = KernelOp::new(dom, 64).unwrap();
            let z = GridFn::zeros(dom, 64);
            assert_eq!(op.conv_k(&z).unwrap().norm(Norm::Linf), 0.0);
            assert_eq!(op.conv_kprime(&z).unwrap().norm(Norm::Linf), 0.0);
        }
    }

    #[test]
    fn torus_constant_is_fixed() {
        let op = KernelOp::new(Domain::Torus, 128).unwrap();
        assert_eq!(op.multipliers().unwrap()[0], 1.0);
        let c = GridFn::constant(Domain::Torus, 128, 1.0);
        let w = op.conv_k(&c).unwrap();
        assert!(w.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        // Oracle: the periodic kernel integrates to 1 over a period.
        let fine = GridFn::from_fn(Domain::Torus, 20000, |x| kernel_eval(KernelKind::KTorus, x)).unwrap();
        assert_abs_diff_eq!(fine.integral(), 1.0, epsilon = 1e-9);
        let cp = op.conv_kprime(&c.scale(3.0)).unwrap();
        assert!(cp.norm(Norm::Linf) < 1e-12);
    }

    #[test]
    fn torus_matches_periodic_quadrature() {
        let n = 256;
        let g = GridFn::from_fn(Domain::Torus, n, |x| (2.0 * PI * x).sin() + 0.3 * (6.0 * PI * x).cos()).unwrap();
        let op = KernelOp::for_grid(&g).unwrap();
        let w = op.conv_k(&g).unwrap();
        let i = 37;
        // Midpoint rule is spectrally accurate only for smooth periodic
        // integrands; the kernel corner limits it to O(h²).
        let direct: f64 =
            (0..n).map(|j| g.h() * kernel_eval(KernelKind::KTorus, g.x(i) - g.x(j)) * g.values()[j]).sum();
        assert_abs_diff_eq!(w.values()[i], direct, epsilon = 1e-4);
    }

    #[test]
    fn kernel_self_convolution_at_origin() {
        let dom = Domain::line(-30.0, 30.0).unwrap();
        let n = 6000;
        let k = sample(&Profile::Kernel, dom, n).unwrap();
        let op = KernelOp::new(dom, n).unwrap();
        let w = op.conv_k(&k).unwrap();
        // (K*K)(x) = (1 + |x|) e^{-|x|}/4; compare at the two cells next to 0.
        let exact = |x: f64| (1.0 + x.abs()) * (-x.abs()).exp() / 4.0;
        for i in [n / 2 - 1, n / 2] {
            let oracle = direct_line_conv(&k, KernelKind::KLine, k.x(i));
            assert_abs_diff_eq!(oracle, exact(k.x(i)), epsilon = 1e-5);
            assert_abs_diff_eq!(w.values()[i], exact(k.x(i)), epsilon = 1e-6);
        }
        assert_abs_diff_eq!(exact(0.0), 0.25, epsilon = 0.0);
    }

    #[test]
    fn kprime_of_kernel() {
        let dom = Domain::line(-30.0, 30.0).unwrap();
        let n = 6000;
        let k = sample(&Profile::Kernel, dom, n).unwrap();
        let op = KernelOp::new(dom, n).unwrap();
        let d = op.conv_kprime(&k).unwrap();
        let at0 = 0.5 * (d.values()[n / 2 - 1] + d.values()[n / 2]);
        assert_abs_diff_eq!(at0, 0.0, epsilon = 1e-8);
        // x = 1 is also a cell face.
        let i = ((1.0 + 30.0) / k.h()).round() as usize;
        let at1 = 0.5 * (d.values()[i - 1] + d.values()[i]);
        let exact = -(-1.0f64).exp() / 4.0;
        let oracle = 0.5
            * (direct_line_conv(&k, KernelKind::KprimeLine, k.x(i - 1))
                + direct_line_conv(&k, KernelKind::KprimeLine, k.x(i)));
        assert_abs_diff_eq!(oracle, exact, epsilon = 1e-4);
        assert_abs_diff_eq!(at1, exact, epsilon = 1e-4);
    }

    #[test]
    fn line_helmholtz_residual_is_round_off() {
        let dom = Domain::default_line();
        let g = sample(&Profile::Gaussian { amplitude: 1.0, center: 0.5, width: 2.0 }, dom, 1000).unwrap();
        let op = KernelOp::for_grid(&g).unwrap();
        let w = op.conv_k(&g).unwrap();
        let r = op.helmholtz(&w).unwrap().sub(&g).unwrap();
        assert!(r.norm(Norm::Linf) < 1e-12, "{}", r.norm(Norm::Linf));
    }

    #[test]
    fn torus_helmholtz_residual() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 256;
        let coeffs: Vec<(f64, f64)> =
            (0..20).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let g = GridFn::from_fn(Domain::Torus, n, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| a * (2.0 * PI * k as f64 * x).cos() + b * (2.0 * PI * k as f64 * x).sin())
                .sum()
        })
        .unwrap();
        let op = KernelOp::for_grid(&g).unwrap();
        let w = op.conv_k(&g).unwrap();
        let r = op.helmholtz(&w).unwrap().sub(&g).unwrap();
        assert!(r.norm(Norm::Linf) < 1e-10);
    }

    #[test]
    fn size_mismatch_is_an_error() {
        let op = KernelOp::new(Domain::Torus, 32).unwrap();
        assert!(matches!(op.conv_k(&GridFn::zeros(Domain::Torus, 16)), Err(Error::Mismatch(_))));
        assert!(op.conv_k(&GridFn::zeros(Domain::default_line(), 32)).is_err());
    }

    #[test]
    fn particle_sums_match_direct_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut xs: Vec<f64> = (0..60).map(|_| rng.random_range(-5.0..5.0)).collect();
        xs.sort_by(f64::total_cmp);
        let ws: Vec<f64> = (0..60).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (k, kp) = particle_convolutions(&xs, &ws);
        for i in 0..xs.len() {
            let dk: f64 = (0..xs.len()).map(|j| ws[j] * kernel_eval(KernelKind::KLine, xs[i] - xs[j])).sum();
            let dkp: f64 = (0..xs.len()).map(|j| ws[j] * kernel_eval(KernelKind::KprimeLine, xs[i] - xs[j])).sum();
            assert_abs_diff_eq!(k[i], dk, epsilon = 1e-12);
            assert_abs_diff_eq!(kp[i], dkp, epsilon = 1e-12);
        }
    }

    proptest! {
        #[test]
        fn conv_k_is_symmetric(
            v in prop::collection::vec(-1.0f64..1.0, 64),
            w in prop::collection::vec(-1.0f64..1.0, 64),
            torus in any::<bool>(),
        ) {
            let dom = if torus { Domain::Torus } else { Domain::line(-4.0, 4.0).unwrap() };
            let v = GridFn::new(dom, v).unwrap();
            let w = GridFn::new(dom, w).unwrap();
            let op = KernelOp::for_grid(&v).unwrap();
            let a = op.conv_k(&v).unwrap().dot(&w).unwrap();
            let b = v.dot(&op.conv_k(&w).unwrap()).unwrap();
            prop_assert!((a - b).abs() <= 1e-10);
        }

        #[test]
        fn torus_kprime_is_skew_and_mean_free(v in prop::collection::vec(-1.0f64..1.0, 16..128)) {
            let v = GridFn::new(Domain::Torus, v).unwrap();
            let op = KernelOp::for_grid(&v).unwrap();
            let kp = op.conv_kprime(&v).unwrap();
            prop_assert!(kp.dot(&v).unwrap().abs() <= 1e-10);
            prop_assert!(kp.mean().abs() <= 1e-13);
        }
    }
}
