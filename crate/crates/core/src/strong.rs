//! Method-of-lines solver for smooth solutions of
//! `u_t + λ u u_x + K′*u = 0`.
//!
//! Torus: Fourier differentiation, optional 2/3 dealiasing of `u u_x`, RK4.
//! Line: by default a characteristics (particle) scheme that carries the slope
//! along each path, so slopes far beyond `1/h` stay representable up to
//! breaking; central differences with RK4 are available as well.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{slope_extrema_at, SlopeExtrema};
use crate::error::{Error, Result};
use crate::grid::{Domain, GridFn, Norm};
use crate::nonlocal::{particle_convolutions, KernelOp};
use crate::spectral::Spectral;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LineScheme {
    Characteristics,
    CentralDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrongConfig {
    pub n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub dealias: bool,
    pub lambda: f64,
    /// Abort once the minimum slope drops below `-stop_slope`.
    pub stop_slope: f64,
    /// Keep every `snapshot_stride`-th step (the last step is always kept).
    pub snapshot_stride: usize,
    pub line_scheme: LineScheme,
}

impl Default for StrongConfig {
    fn default() -> Self {
        Self {
            n: 256,
            dt: 1e-3,
            t_end: 1.0,
            dealias: true,
            lambda: 1.0,
            stop_slope: 1e3,
            snapshot_stride: 10,
            line_scheme: LineScheme::Characteristics,
        }
    }
}

impl StrongConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 16 {
            return bad(format!("n must be >= 16, got {}", self.n));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("T must be positive, got {}", self.t_end));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be >= 0, got {}", self.lambda));
        }
        if !(self.stop_slope > 0.0) {
            return bad(format!("stop_slope must be positive, got {}", self.stop_slope));
        }
        if self.snapshot_stride == 0 {
            return bad("snapshot_stride must be >= 1".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    SlopeThreshold { t: f64 },
    Overflow { last_valid_time: f64 },
}

#[derive(Debug, Clone)]
pub struct StrongRun {
    pub trajectory: Trajectory,
    pub stop: StopReason,
}

impl StrongRun {
    pub fn final_time(&self) -> f64 {
        self.trajectory.last().map_or(0.0, |s| s.t)
    }
}

/// Semi-discrete right-hand side `-λ u u_x - K′*u`.
pub fn rhs(u: &GridFn, lambda: f64, op: &KernelOp, dealias: bool) -> Result<GridFn> {
    let kp = op.conv_kprime(u)?;
    Ok(GridFn::from_vec(u.domain(), rhs_values(u.values(), lambda, op, dealias, None, kp.values())))
}

fn rhs_values(
    u: &[f64],
    lambda: f64,
    op: &KernelOp,
    dealias: bool,
    spectral: Option<&Spectral>,
    kprime: &[f64],
) -> Vec<f64> {
    let ux = op.derivative_slice(u);
    let mut adv: Vec<f64> = u.iter().zip(&ux).map(|(a, b)| a * b).collect();
    if dealias && op.domain().is_periodic() {
        adv = match spectral {
            Some(s) => s.dealias(&adv),
            None => Spectral::new(u.len()).dealias(&adv),
        };
    }
    adv.iter().zip(kprime).map(|(a, k)| -lambda * a - k).collect()
}

struct Stepper<'a> {
    op: &'a KernelOp,
    lambda: f64,
    dealias: bool,
    spectral: Option<Spectral>,
}

impl Stepper<'_> {
    fn f(&self, u: &[f64]) -> Vec<f64> {
        let kp = self.op.conv_kprime_slice(u);
        rhs_values(u, self.lambda, self.op, self.dealias, self.spectral.as_ref(), &kp)
    }

    fn rk4(&self, u: &[f64], dt: f64) -> Vec<f64> {
        let stage = |k: &[f64], a: f64| -> Vec<f64> { u.iter().zip(k).map(|(x, y)| x + a * y).collect() };
        let k1 = self.f(u);
        let k2 = self.f(&stage(&k1, 0.5 * dt));
        let k3 = self.f(&stage(&k2, 0.5 * dt));
        let k4 = self.f(&stage(&k3, dt));
        (0..u.len()).map(|i| u[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect()
    }
}

/// One classical RK4 step on the Eulerian grid.
pub fn step_rk4(u: &GridFn, dt: f64, lambda: f64, op: &KernelOp, dealias: bool) -> Result<GridFn> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if op.domain() != u.domain() || op.n() != u.n() {
        return Err(Error::Mismatch("kernel operator does not match the grid".into()));
    }
    let spectral = u.domain().is_periodic().then(|| Spectral::new(u.n()));
    let stepper = Stepper { op, lambda, dealias, spectral };
    let next = stepper.rk4(u.values(), dt);
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::Overflow { last_valid_time: 0.0 });
    }
    Ok(GridFn::from_vec(u.domain(), next))
}

fn record(traj: &mut Trajectory, t: f64, u: &GridFn, mass: f64, l2: f64, s: &SlopeExtrema) -> Result<()> {
    traj.record(
        t,
        &[
            ("mass", mass),
            ("l2", l2),
            ("linf", u.norm(Norm::Linf)),
            ("m1", s.m1),
            ("m2", s.m2),
            ("xi1", s.xi1),
            ("xi2", s.xi2),
        ],
    )
}

/// Integrates from `u0` up to `cfg.t_end`, the slope threshold, or overflow.
pub fn run_strong(u0: &GridFn, cfg: &StrongConfig) -> Result<StrongRun> {
    cfg.validate()?;
    if u0.n() != cfg.n {
        return Err(Error::Mismatch(format!("config n = {} but initial data has n = {}", cfg.n, u0.n())));
    }
    if u0.domain().is_periodic() {
        let tail = Spectral::new(u0.n()).tail_fraction(u0.values()).sqrt();
        if tail > 1e-8 {
            return Err(Error::Unresolved(format!(
                "initial data carries a relative spectral tail of {tail:.2e} above 1e-8"
            )));
        }
    }
    let op = KernelOp::for_grid(u0)?;
    match (u0.domain(), cfg.line_scheme) {
        (Domain::Line { .. }, LineScheme::Characteristics) => run_characteristics(u0, cfg, &op),
        _ => run_eulerian(u0, cfg, &op),
    }
}

fn step_count(cfg: &StrongConfig) -> usize {
    ((cfg.t_end / cfg.dt) - 1e-9).ceil().max(1.0) as usize
}

fn run_eulerian(u0: &GridFn, cfg: &StrongConfig, op: &KernelOp) -> Result<StrongRun> {
    let spectral = u0.domain().is_periodic().then(|| Spectral::new(u0.n()));
    let stepper = Stepper { op, lambda: cfg.lambda, dealias: cfg.dealias, spectral };
    let xs = u0.xs();
    let extrema = |v: &[f64]| slope_extrema_at(&op.derivative_slice(v), &xs);

    let mut traj = Trajectory::new();
    let mut u = u0.clone();
    let s0 = extrema(u.values());
    record(&mut traj, 0.0, &u, u.integral(), u.norm(Norm::L2), &s0)?;
    traj.push_snapshot(0.0, u.clone())?;

    let steps = step_count(cfg);
    let mut t = 0.0;
    let mut stop = StopReason::Completed;
    for k in 1..=steps {
        let dt = if k == steps { cfg.t_end - t } else { cfg.dt };
        if dt <= 0.0 {
            break;
        }
        let next = stepper.rk4(u.values(), dt);
        if next.iter().any(|v| !v.is_finite()) {
            stop = StopReason::Overflow { last_valid_time: t };
            break;
        }
        t = if k == steps { cfg.t_end } else { k as f64 * cfg.dt };
        u = GridFn::from_vec(u.domain(), next);
        let s = extrema(u.values());
        record(&mut traj, t, &u, u.integral(), u.norm(Norm::L2), &s)?;
        let crossed = s.m1 < -cfg.stop_slope;
        if k % cfg.snapshot_stride == 0 || k == steps || crossed {
            traj.push_snapshot(t, u.clone())?;
        }
        if crossed {
            stop = StopReason::SlopeThreshold { t };
            break;
        }
    }
    if let StopReason::Overflow { last_valid_time } = stop {
        if traj.last().map(|s| s.t) != Some(last_valid_time) {
            traj.push_snapshot(last_valid_time, u.clone())?;
        }
    }
    Ok(StrongRun { trajectory: traj, stop })
}

/// Particle state: position, value, slope and Jacobian `∂X/∂x₀`.
#[derive(Debug, Clone)]
struct Particles {
    x: Vec<f64>,
    u: Vec<f64>,
    q: Vec<f64>,
    j: Vec<f64>,
}

impl Particles {
    fn axpy(&self, a: f64, d: &Particles) -> Particles {
        let f = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| x + a * y).collect();
        Particles { x: f(&self.x, &d.x), u: f(&self.u, &d.u), q: f(&self.q, &d.q), j: f(&self.j, &d.j) }
    }

    fn is_finite(&self) -> bool {
        [&self.x, &self.u, &self.q, &self.j].iter().all(|v| v.iter().all(|x| x.is_finite()))
    }

    fn weights(&self, h: f64) -> Vec<f64> {
        self.u.iter().zip(&self.j).map(|(u, j)| u * j * h).collect()
    }

    fn rate(&self, lambda: f64, h: f64) -> Particles {
        let (k, kp) = particle_convolutions(&self.x, &self.weights(h));
        let n = self.x.len();
        Particles {
            x: self.u.iter().map(|u| lambda * u).collect(),
            u: kp.iter().map(|v| -v).collect(),
            q: (0..n).map(|i| -lambda * self.q[i] * self.q[i] + self.u[i] - k[i]).collect(),
            j: (0..n).map(|i| lambda * self.q[i] * self.j[i]).collect(),
        }
    }

    fn rk4(&self, dt: f64, lambda: f64, h: f64) -> Particles {
        let k1 = self.rate(lambda, h);
        let k2 = self.axpy(0.5 * dt, &k1).rate(lambda, h);
        let k3 = self.axpy(0.5 * dt, &k2).rate(lambda, h);
        let k4 = self.axpy(dt, &k3).rate(lambda, h);
        let n = self.x.len();
        let comb = |a: &[f64], b1: &[f64], b2: &[f64], b3: &[f64], b4: &[f64]| -> Vec<f64> {
            (0..n).map(|i| a[i] + dt / 6.0 * (b1[i] + 2.0 * b2[i] + 2.0 * b3[i] + b4[i])).collect()
        };
        Particles {
            x: comb(&self.x, &k1.x, &k2.x, &k3.x, &k4.x),
            u: comb(&self.u, &k1.u, &k2.u, &k3.u, &k4.u),
            q: comb(&self.q, &k1.q, &k2.q, &k3.q, &k4.q),
            j: comb(&self.j, &k1.j, &k2.j, &k3.j, &k4.j),
        }
    }

    /// Piecewise-linear resampling of the particle values on the fixed grid.
    fn to_grid(&self, template: &GridFn) -> GridFn {
        let n = self.x.len();
        let mut out = Vec::with_capacity(template.n());
        let mut k = 0;
        for i in 0..template.n() {
            let x = template.x(i);
            let v = if x <= self.x[0] {
                self.u[0]
            } else if x >= self.x[n - 1] {
                self.u[n - 1]
            } else {
                while k + 1 < n && self.x[k + 1] < x {
                    k += 1;
                }
                let w = (x - self.x[k]) / (self.x[k + 1] - self.x[k]);
                self.u[k] * (1.0 - w) + self.u[k + 1] * w
            };
            out.push(v);
        }
        GridFn::from_vec(template.domain(), out)
    }
}

fn run_characteristics(u0: &GridFn, cfg: &StrongConfig, op: &KernelOp) -> Result<StrongRun> {
    let h = u0.h();
    let mut p =
        Particles { x: u0.xs(), u: u0.values().to_vec(), q: op.derivative_slice(u0.values()), j: vec![1.0; u0.n()] };
    let observe = |p: &Particles| {
        let s = slope_extrema_at(&p.q, &p.x);
        let mass: f64 = p.weights(h).iter().sum();
        let l2 = (p.u.iter().zip(&p.j).map(|(u, j)| u * u * j * h).sum::<f64>()).sqrt();
        (s, mass, l2)
    };

    let mut traj = Trajectory::new();
    let (s0, mass0, l20) = observe(&p);
    record(&mut traj, 0.0, u0, mass0, l20, &s0)?;
    traj.push_snapshot(0.0, u0.clone())?;

    let mut t = 0.0;
    let mut k = 0usize;
    let mut stop = StopReason::Completed;
    let mut last_grid = u0.clone();
    while t < cfg.t_end - 1e-12 {
        k += 1;
        let qmin = p.q.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut dt = cfg.dt.min(cfg.t_end - t);
        if qmin < 0.0 && cfg.lambda > 0.0 {
            dt = dt.min(0.05 / (cfg.lambda * qmin.abs()));
        }
        let next = p.rk4(dt, cfg.lambda, h);
        if !next.is_finite() || next.j.iter().any(|&j| j <= 0.0) {
            stop = StopReason::Overflow { last_valid_time: t };
            break;
        }
        p = next;
        t = if cfg.t_end - (t + dt) < 1e-12 { cfg.t_end } else { t + dt };
        let (s, mass, l2) = observe(&p);
        let grid = p.to_grid(u0);
        record(&mut traj, t, &grid, mass, l2, &s)?;
        let crossed = s.m1 < -cfg.stop_slope;
        let done = t >= cfg.t_end;
        if k.is_multiple_of(cfg.snapshot_stride) || done || crossed {
            traj.push_snapshot(t, grid.clone())?;
        }
        last_grid = grid;
        if crossed {
            stop = StopReason::SlopeThreshold { t };
            break;
        }
    }
    if let StopReason::Overflow { last_valid_time } = stop {
        if traj.last().map(|s| s.t) != Some(last_valid_time) {
            traj.push_snapshot(last_valid_time, last_grid)?;
        }
    }
    Ok(StrongRun { trajectory: traj, stop })
}

/// Maps a solution of the `λ = 1` equation to one of the `λ` equation:
/// `v = u / λ`.
pub fn scaling_transport(traj: &Trajectory, lambda: f64) -> Result<Trajectory> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("scaling needs lambda > 0, got {lambda}")));
    }
    Ok(traj.map_snapshots(|u| u.scale(1.0 / lambda)))
}
