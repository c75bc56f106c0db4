//! Weak-form and Kružkov entropy residuals of a space-time trajectory.
//!
//! Two quadratures are offered. `Midpoint` samples the continuum integrands
//! at every snapshot (midpoint rule in space, trapezoid rule in time).
//! `Conservative` is the discrete summation-by-parts form matched to a
//! Godunov update: snapshots are read as consecutive steps, the entropy flux
//! is the Godunov entropy flux `G(a, b) = F(a∨λ, b∨λ) - F(a∧λ, b∧λ)`, and for
//! the additive split step the Kružkov residual is nonnegative up to round-off.

use serde::{Deserialize, Serialize};

use super::check::Thresholds;
use super::stability::oleinik_check;
use crate::error::{Error, Result};
use crate::grid::{Domain, GridFn, Norm};
use crate::nonlocal::KernelOp;
use crate::profile::{bump, bump_prime};
use crate::shock::godunov_flux;
use crate::trajectory::Trajectory;

fn sgn(z: f64) -> f64 {
    if z > 0.0 {
        1.0
    } else if z < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `φ(x, t) = ψ((x - x0)/r) ψ((t - t0)/s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFn {
    pub x0: f64,
    pub t0: f64,
    pub r: f64,
    pub s: f64,
}

impl TestFn {
    pub fn eval(&self, x: f64, t: f64) -> f64 {
        bump((x - self.x0) / self.r) * bump((t - self.t0) / self.s)
    }

    pub fn dx(&self, x: f64, t: f64) -> f64 {
        bump_prime((x - self.x0) / self.r) / self.r * bump((t - self.t0) / self.s)
    }

    pub fn dt(&self, x: f64, t: f64) -> f64 {
        bump((x - self.x0) / self.r) * bump_prime((t - self.t0) / self.s) / self.s
    }
}

/// Entropy `|z - λ|` with flux `sgn(z - λ)(z² - λ²)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruzhkovPair {
    pub lambda: f64,
}

impl KruzhkovPair {
    pub fn eta(&self, z: f64) -> f64 {
        (z - self.lambda).abs()
    }

    pub fn q(&self, z: f64) -> f64 {
        sgn(z - self.lambda) * 0.5 * (z * z - self.lambda * self.lambda)
    }

    /// Godunov entropy flux consistent with `q`.
    pub fn godunov(&self, a: f64, b: f64) -> f64 {
        let l = self.lambda;
        godunov_flux(a.max(l), b.max(l)) - godunov_flux(a.min(l), b.min(l))
    }
}

/// Twelve bumps at two spatial scales and two times: three of radius `w/3`
/// and three of radius `w/6` centred on `[center - w, center + w]`, each at
/// `t0 = 0.3 T` and `0.7 T` with temporal radius `T/4`.
pub fn default_family(center: f64, half_width: f64, t_end: f64) -> Vec<TestFn> {
    let r1 = half_width / 3.0;
    let r2 = r1 / 2.0;
    let mut out = Vec::with_capacity(12);
    for t0 in [0.3 * t_end, 0.7 * t_end] {
        let s = 0.25 * t_end;
        for (x0, r) in [
            (center - 2.0 * r1, r1),
            (center, r1),
            (center + 2.0 * r1, r1),
            (center - r1, r2),
            (center, r2),
            (center + r1, r2),
        ] {
            out.push(TestFn { x0, t0, r, s });
        }
    }
    out
}

/// `count` equally spaced values in `[-bound, bound]`.
pub fn lambda_grid(bound: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.0];
    }
    (0..count).map(|k| -bound + 2.0 * bound * k as f64 / (count - 1) as f64).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    Conservative,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualOptions {
    pub quadrature: Quadrature,
    /// Include the `K′*u` term.
    pub with_source: bool,
    pub min_cells_per_radius: f64,
}

impl Default for ResidualOptions {
    fn default() -> Self {
        Self { quadrature: Quadrature::Conservative, with_source: true, min_cells_per_radius: 8.0 }
    }
}

/// Precomputed per-snapshot data shared by all test functions.
struct Prepared<'a> {
    traj: &'a Trajectory,
    times: Vec<f64>,
    source: Vec<Vec<f64>>,
    domain: Domain,
    n: usize,
    h: f64,
}

impl<'a> Prepared<'a> {
    fn new(traj: &'a Trajectory, with_source: bool) -> Result<Self> {
        let first = traj.first().ok_or_else(|| Error::InvalidTrajectory("empty trajectory".into()))?;
        let domain = first.u.domain();
        let n = first.u.n();
        let source = if with_source {
            let op = KernelOp::for_grid(&first.u)?;
            traj.snapshots()
                .iter()
                .map(|s| op.conv_kprime(&s.u).map(GridFn::into_values))
                .collect::<Result<Vec<_>>>()?
        } else {
            vec![vec![0.0; n]; traj.snapshots().len()]
        };
        Ok(Self { traj, times: traj.times(), source, domain, n, h: first.u.h() })
    }

    fn u(&self, k: usize) -> &[f64] {
        self.traj.snapshots()[k].u.values()
    }

    fn validate(&self, phi: &TestFn, opts: &ResidualOptions, need_zero_start: bool) -> Result<()> {
        if phi.r < opts.min_cells_per_radius * self.h {
            return Err(Error::Unresolved(format!(
                "test function radius {} spans fewer than {} cells of width {}",
                phi.r, opts.min_cells_per_radius, self.h
            )));
        }
        let (a, b) = (self.domain.start(), self.domain.start() + self.domain.length());
        if phi.x0 - phi.r < a || phi.x0 + phi.r > b {
            return Err(Error::Unresolved(format!(
                "test function support [{}, {}] leaves the window [{a}, {b}]",
                phi.x0 - phi.r,
                phi.x0 + phi.r
            )));
        }
        let t_last = *self.times.last().unwrap();
        if phi.t0 + phi.s > t_last + 1e-12 {
            return Err(Error::Unresolved(format!(
                "test function support ends at t = {} after the last snapshot {t_last}",
                phi.t0 + phi.s
            )));
        }
        if need_zero_start && phi.t0 - phi.s <= 0.0 {
            return Err(Error::Unresolved("entropy test functions must vanish near t = 0".into()));
        }
        Ok(())
    }

    /// Cell index range covering the spatial support plus one neighbour.
    fn cells(&self, phi: &TestFn) -> std::ops::Range<usize> {
        let s0 = self.domain.start();
        let lo = (((phi.x0 - phi.r - s0) / self.h).floor() as isize - 1).max(0) as usize;
        let hi = ((((phi.x0 + phi.r - s0) / self.h).ceil() as isize + 1).max(0) as usize).min(self.n);
        lo..hi
    }

    fn x(&self, i: usize) -> f64 {
        self.domain.cell_center(self.n, i)
    }

    /// Weight of snapshot `k` in the trapezoid rule.
    fn trapezoid_weight(&self, k: usize) -> f64 {
        let t = &self.times;
        let left = if k > 0 { t[k] - t[k - 1] } else { 0.0 };
        let right = if k + 1 < t.len() { t[k + 1] - t[k] } else { 0.0 };
        0.5 * (left + right)
    }

    /// `∬ η(u) φ_t + q(u) φ_x - σ(u) S φ`, plus `∫ η(u0) φ(·, 0)` when
    /// `initial` is set. For the weak form `η = id`, `q = u²/2`, `σ = 1`.
    #[allow(clippy::too_many_arguments)]
    fn residual<E, Q, G, S>(&self, phi: &TestFn, eta: E, q: Q, g: G, sigma: S, initial: bool, quad: Quadrature) -> f64
    where
        E: Fn(f64) -> f64,
        Q: Fn(f64) -> f64,
        G: Fn(f64, f64) -> f64,
        S: Fn(f64) -> f64,
    {
        let cells = self.cells(phi);
        let h = self.h;
        let periodic = self.domain.is_periodic();
        let mut total = 0.0;
        match quad {
            Quadrature::Midpoint => {
                for k in 0..self.times.len() {
                    let t = self.times[k];
                    if (t - phi.t0).abs() >= phi.s {
                        continue;
                    }
                    let w = self.trapezoid_weight(k);
                    let u = self.u(k);
                    let src = &self.source[k];
                    let mut row = 0.0;
                    for i in cells.clone() {
                        let x = self.x(i);
                        let z = u[i];
                        row += eta(z) * phi.dt(x, t) + q(z) * phi.dx(x, t) - sigma(z) * src[i] * phi.eval(x, t);
                    }
                    total += w * h * row;
                }
            }
            Quadrature::Conservative => {
                let nt = self.times.len();
                for k in 0..nt.saturating_sub(1) {
                    let (t, t1) = (self.times[k], self.times[k + 1]);
                    if (t - phi.t0).abs() >= phi.s && (t1 - phi.t0).abs() >= phi.s {
                        continue;
                    }
                    let dt = t1 - t;
                    let u = self.u(k);
                    let u1 = self.u(k + 1);
                    let src = &self.source[k];
                    let mut time_part = 0.0;
                    let mut source_part = 0.0;
                    for i in cells.clone() {
                        let x = self.x(i);
                        let p1 = phi.eval(x, t1);
                        time_part += eta(u[i]) * (p1 - phi.eval(x, t));
                        source_part += sigma(u1[i]) * src[i] * p1;
                    }
                    let mut flux_part = 0.0;
                    let last = if cells.end == self.n && periodic { cells.end } else { cells.end.saturating_sub(1) };
                    for i in cells.start..last {
                        let j = (i + 1) % self.n;
                        let dphi = phi.eval(self.x(j), t1) - phi.eval(self.x(i), t1);
                        flux_part += g(u[i], u[j]) * dphi;
                    }
                    total += h * time_part + dt * flux_part - dt * h * source_part;
                }
            }
        }
        if initial {
            let t0 = self.times[0];
            let u = self.u(0);
            total += h * cells.map(|i| eta(u[i]) * phi.eval(self.x(i), t0)).sum::<f64>();
        }
        total
    }
}

/// Largest `|R(φ)|` of the weak form over the family.
pub fn weak_residual(traj: &Trajectory, family: &[TestFn], opts: &ResidualOptions) -> Result<f64> {
    let prep = Prepared::new(traj, opts.with_source)?;
    let mut worst: f64 = 0.0;
    for phi in family {
        prep.validate(phi, opts, false)?;
        let r = prep.residual(phi, |z| z, |z| 0.5 * z * z, godunov_flux, |_| 1.0, true, opts.quadrature);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Kružkov residual `E(λ, φ)` for every pair, in family-major order.
pub fn kruzhkov_values(
    traj: &Trajectory,
    lambdas: &[f64],
    family: &[TestFn],
    opts: &ResidualOptions,
) -> Result<Vec<(f64, usize, f64)>> {
    let prep = Prepared::new(traj, opts.with_source)?;
    let mut out = Vec::with_capacity(lambdas.len() * family.len());
    for (idx, phi) in family.iter().enumerate() {
        prep.validate(phi, opts, true)?;
        for &lambda in lambdas {
            let pair = KruzhkovPair { lambda };
            let e = prep.residual(
                phi,
                |z| pair.eta(z),
                |z| pair.q(z),
                |a, b| pair.godunov(a, b),
                |z| sgn(z - lambda),
                false,
                opts.quadrature,
            );
            out.push((lambda, idx, e));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KruzhkovMin {
    pub value: f64,
    pub lambda: f64,
    pub test_fn: usize,
}

/// Minimum of `E(λ, φ)` over the grid of pairs.
pub fn kruzhkov_residual(
    traj: &Trajectory,
    lambdas: &[f64],
    family: &[TestFn],
    opts: &ResidualOptions,
) -> Result<KruzhkovMin> {
    let values = kruzhkov_values(traj, lambdas, family, opts)?;
    values
        .into_iter()
        .map(|(lambda, test_fn, value)| KruzhkovMin { value, lambda, test_fn })
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .ok_or_else(|| Error::InvalidParameter("empty lambda grid or test family".into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    pub weak_residual_max: f64,
    pub kruzhkov_min: KruzhkovMin,
    /// Smallest Oleinik margin over snapshots with `t > 0`, relative to the
    /// coefficient.
    pub oleinik_margin: f64,
    pub weak_pass: bool,
    pub kruzhkov_pass: bool,
    pub oleinik_pass: bool,
}

impl EntropyReport {
    pub fn pass(&self) -> bool {
        self.weak_pass && self.kruzhkov_pass && self.oleinik_pass
    }
}

pub fn entropy_report(
    traj: &Trajectory,
    lambdas: &[f64],
    family: &[TestFn],
    opts: &ResidualOptions,
    thresholds: &Thresholds,
) -> Result<EntropyReport> {
    let weak = weak_residual(traj, family, opts)?;
    let kr = kruzhkov_residual(traj, lambdas, family, opts)?;
    let u0_l1 = traj.first().map_or(0.0, |s| s.u.norm(Norm::L1));
    let mut margin = f64::INFINITY;
    let mut oleinik_pass = true;
    for s in traj.snapshots().iter().filter(|s| s.t > 0.0) {
        let r = oleinik_check(&s.u, s.t, u0_l1, thresholds)?;
        margin = margin.min(r.margin / r.coefficient);
        oleinik_pass &= r.pass;
    }
    if !margin.is_finite() {
        margin = 0.0;
    }
    Ok(EntropyReport {
        weak_residual_max: weak,
        kruzhkov_min: kr,
        oleinik_margin: margin,
        weak_pass: weak <= thresholds.weak_residual,
        kruzhkov_pass: kr.value >= thresholds.kruzhkov,
        oleinik_pass,
    })
}
