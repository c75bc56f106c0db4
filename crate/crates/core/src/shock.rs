//! First-order Godunov finite volumes for weak entropy solutions, with the
//! nonlocal term handled by operator splitting and an optional viscosity.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{one_sided_slope_extrema, SlopeExtrema};
use crate::error::{Error, Result};
use crate::grid::{GridFn, Norm};
use crate::nonlocal::KernelOp;
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Splitting {
    /// Burgers step, then explicit source step.
    Lie,
    /// Half Burgers step, midpoint source step, half Burgers step.
    Strang,
    /// Burgers step and source increment evaluated on the same old state.
    Additive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvConfig {
    pub n: usize,
    pub cfl: f64,
    pub t_end: f64,
    pub eps: f64,
    pub splitting: Splitting,
    /// Switches the nonlocal term off, leaving plain Burgers.
    pub with_source: bool,
    pub snapshot_stride: usize,
    /// When set, snapshots are taken exactly at multiples of this interval
    /// (the step size is clipped to land on them) instead of by stride.
    pub output_every: Option<f64>,
    /// Overrides the adaptive CFL step.
    pub fixed_dt: Option<f64>,
}

impl Default for FvConfig {
    fn default() -> Self {
        Self {
            n: 4000,
            cfl: 0.45,
            t_end: 1.0,
            eps: 0.0,
            splitting: Splitting::Strang,
            with_source: true,
            snapshot_stride: 50,
            output_every: None,
            fixed_dt: None,
        }
    }
}

impl FvConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.n < 4 {
            return bad(format!("n must be >= 4, got {}", self.n));
        }
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad(format!("cfl must lie in (0, 1], got {}", self.cfl));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("T must be positive, got {}", self.t_end));
        }
        if !(self.eps >= 0.0 && self.eps.is_finite()) {
            return bad(format!("eps must be >= 0, got {}", self.eps));
        }
        if self.snapshot_stride == 0 {
            return bad("snapshot_stride must be >= 1".into());
        }
        if let Some(dt) = self.output_every {
            if !(dt > 0.0) {
                return bad(format!("output interval must be positive, got {dt}"));
            }
        }
        if let Some(dt) = self.fixed_dt {
            if !(dt > 0.0) {
                return bad(format!("fixed dt must be positive, got {dt}"));
            }
        }
        Ok(())
    }
}

/// Exact Riemann flux for `f(u) = u²/2`.
pub fn godunov_flux(ul: f64, ur: f64) -> f64 {
    if ul <= ur {
        if ul <= 0.0 && 0.0 <= ur {
            0.0
        } else {
            0.5 * (ul * ul).min(ur * ur)
        }
    } else {
        0.5 * (ul * ul).max(ur * ur)
    }
}

/// Interface fluxes `F_{i+1/2}` for `i = -1..n-1`; entry `k` is the flux on
/// the left face of cell `k`, entry `n` the right face of the last cell.
/// Line ends use zero-gradient ghost cells.
pub(crate) fn interface_fluxes(u: &[f64], periodic: bool, flux: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    let n = u.len();
    let mut f = Vec::with_capacity(n + 1);
    let left_ghost = if periodic { u[n - 1] } else { u[0] };
    let right_ghost = if periodic { u[0] } else { u[n - 1] };
    f.push(flux(left_ghost, u[0]));
    for i in 0..n - 1 {
        f.push(flux(u[i], u[i + 1]));
    }
    f.push(flux(u[n - 1], right_ghost));
    f
}

fn second_difference(u: &[f64], periodic: bool, h: f64) -> Vec<f64> {
    let n = u.len();
    let inv = 1.0 / (h * h);
    (0..n)
        .map(|i| {
            let l = if i > 0 {
                u[i - 1]
            } else if periodic {
                u[n - 1]
            } else {
                u[0]
            };
            let r = if i + 1 < n {
                u[i + 1]
            } else if periodic {
                u[0]
            } else {
                u[n - 1]
            };
            (l - 2.0 * u[i] + r) * inv
        })
        .collect()
}

/// Godunov update for `u_t + (u²/2)_x = ε u_xx` over `dt`.
pub(crate) fn burgers_step(u: &[f64], dt: f64, h: f64, eps: f64, periodic: bool) -> Vec<f64> {
    let f = interface_fluxes(u, periodic, godunov_flux);
    let r = dt / h;
    let mut out: Vec<f64> = (0..u.len()).map(|i| u[i] - r * (f[i + 1] - f[i])).collect();
    if eps > 0.0 {
        let d2 = second_difference(u, periodic, h);
        for (o, d) in out.iter_mut().zip(d2) {
            *o += dt * eps * d;
        }
    }
    out
}

fn max_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Largest admissible step for state `u`.
pub fn stable_dt(u: &GridFn, cfg: &FvConfig) -> f64 {
    let h = u.h();
    let mut dt = cfg.cfl * h / max_abs(u.values()).max(1e-12);
    if cfg.eps > 0.0 {
        dt = dt.min(0.4 * h * h / cfg.eps);
    }
    dt
}

/// One split step of size `dt`.
pub fn fv_step(u: &GridFn, dt: f64, op: &KernelOp, cfg: &FvConfig) -> Result<GridFn> {
    let limit = stable_dt(u, cfg);
    if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
        return Err(Error::TimeStepTooLarge { dt, limit });
    }
    if op.domain() != u.domain() || op.n() != u.n() {
        return Err(Error::Mismatch("kernel operator does not match the grid".into()));
    }
    let h = u.h();
    let periodic = u.domain().is_periodic();
    let b = |v: &[f64], tau: f64| burgers_step(v, tau, h, cfg.eps, periodic);
    let v = u.values();
    let out = if !cfg.with_source {
        b(v, dt)
    } else {
        match cfg.splitting {
            Splitting::Lie => {
                let w = b(v, dt);
                let s = op.conv_kprime_slice(&w);
                w.iter().zip(&s).map(|(a, k)| a - dt * k).collect()
            }
            Splitting::Strang => {
                let w = b(v, 0.5 * dt);
                let s = op.conv_kprime_slice(&w);
                let half: Vec<f64> = w.iter().zip(&s).map(|(a, k)| a - 0.5 * dt * k).collect();
                let s = op.conv_kprime_slice(&half);
                let w: Vec<f64> = w.iter().zip(&s).map(|(a, k)| a - dt * k).collect();
                b(&w, 0.5 * dt)
            }
            Splitting::Additive => {
                let s = op.conv_kprime_slice(v);
                b(v, dt).iter().zip(&s).map(|(a, k)| a - dt * k).collect()
            }
        }
    };
    if out.iter().any(|x| !x.is_finite()) {
        return Err(Error::Overflow { last_valid_time: 0.0 });
    }
    Ok(GridFn::from_vec(u.domain(), out))
}

#[derive(Debug, Clone)]
pub struct FvRun {
    pub trajectory: Trajectory,
    pub steps: usize,
    pub completed: bool,
    pub last_valid_time: f64,
}

impl FvRun {
    pub fn dt_mean(&self) -> f64 {
        self.last_valid_time / self.steps.max(1) as f64
    }
}

fn record(traj: &mut Trajectory, t: f64, u: &GridFn, s: &SlopeExtrema) -> Result<()> {
    traj.record(
        t,
        &[
            ("mass", u.integral()),
            ("l2", u.norm(Norm::L2)),
            ("linf", u.norm(Norm::Linf)),
            ("m1", s.m1),
            ("m2", s.m2),
            ("xi1", s.xi1),
            ("xi2", s.xi2),
            ("l1", u.norm(Norm::L1)),
        ],
    )
}

pub fn run_fv(u0: &GridFn, cfg: &FvConfig) -> Result<FvRun> {
    cfg.validate()?;
    if u0.n() != cfg.n {
        return Err(Error::Mismatch(format!("config n = {} but initial data has n = {}", cfg.n, u0.n())));
    }
    let op = KernelOp::for_grid(u0)?;
    let mut traj = Trajectory::new();
    let mut u = u0.clone();
    record(&mut traj, 0.0, &u, &one_sided_slope_extrema(&u))?;
    traj.push_snapshot(0.0, u.clone())?;

    let mut t = 0.0;
    let mut steps = 0usize;
    let mut next_output = cfg.output_every;
    let tol = 1e-12 * cfg.t_end.max(1.0);
    while t < cfg.t_end - tol {
        let limit = stable_dt(&u, cfg);
        let mut dt = cfg.fixed_dt.map_or(limit, |d| d.min(limit)).min(cfg.t_end - t);
        let mut hits_output = false;
        if let Some(to) = next_output {
            if t + dt >= to - tol {
                dt = to - t;
                hits_output = true;
            }
        }
        let next = match fv_step(&u, dt, &op, cfg) {
            Ok(v) => v,
            Err(Error::Overflow { .. }) => {
                return Ok(FvRun { trajectory: traj, steps, completed: false, last_valid_time: t });
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        t = if hits_output {
            next_output.unwrap()
        } else if cfg.t_end - (t + dt) <= tol {
            cfg.t_end
        } else {
            t + dt
        };
        u = next;
        record(&mut traj, t, &u, &one_sided_slope_extrema(&u))?;
        let done = t >= cfg.t_end - tol;
        let take = match cfg.output_every {
            Some(every) => {
                if hits_output {
                    next_output = Some(next_output.unwrap() + every);
                }
                hits_output || done
            }
            None => steps.is_multiple_of(cfg.snapshot_stride) || done,
        };
        if take && traj.last().map(|s| s.t) != Some(t) {
            traj.push_snapshot(t, u.clone())?;
        }
    }
    Ok(FvRun { trajectory: traj, steps, completed: true, last_valid_time: t })
}

/// Runs `eps = 0` and each listed viscosity, returning the final-time L¹
/// distance of every viscous run to the inviscid one.
pub fn viscosity_sweep(u0: &GridFn, eps_list: &[f64], cfg: &FvConfig) -> Result<Vec<(f64, f64)>> {
    if eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::InvalidParameter("viscosities must be positive".into()));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParameter("viscosities must be listed in descending order".into()));
    }
    let base = run_fv(u0, &FvConfig { eps: 0.0, ..cfg.clone() })?;
    let reference = final_state(&base)?;
    eps_list
        .iter()
        .map(|&eps| {
            let run = run_fv(u0, &FvConfig { eps, ..cfg.clone() })?;
            let d = final_state(&run)?.sub(&reference)?.norm(Norm::L1);
            Ok((eps, d))
        })
        .collect()
}

/// Final snapshot of a completed run.
pub fn final_state(run: &FvRun) -> Result<GridFn> {
    if !run.completed {
        return Err(Error::Overflow { last_valid_time: run.last_valid_time });
    }
    run.trajectory.last().map(|s| s.u.clone()).ok_or_else(|| Error::InvalidTrajectory("empty run".into()))
}

/// Cell averages of `fine` on a grid with half as many cells.
pub fn restrict_pairwise(fine: &GridFn) -> Result<GridFn> {
    if !fine.n().is_multiple_of(2) {
        return Err(Error::Mismatch(format!("cannot halve n = {}", fine.n())));
    }
    let v = fine.values();
    let coarse = v.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect();
    Ok(GridFn::from_vec(fine.domain(), coarse))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub dt_mean: f64,
    /// L¹ distance to the restricted run at `2n`.
    pub l1_err: Option<f64>,
    /// `log2` of the previous row's error over this one.
    pub order: Option<f64>,
}

/// Self-convergence study over successively doubled resolutions.
pub fn convergence_table<F>(ns: &[usize], cfg: &FvConfig, initial: F) -> Result<Vec<ConvergenceRow>>
where
    F: Fn(usize) -> Result<GridFn>,
{
    check_doubling(ns)?;
    let mut runs = Vec::new();
    for &n in ns {
        runs.push(run_fv(&initial(n)?, &FvConfig { n, ..cfg.clone() })?);
    }
    convergence_rows(&runs)
}

fn check_doubling(ns: &[usize]) -> Result<()> {
    if ns.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(Error::InvalidParameter("resolutions must double".into()));
    }
    Ok(())
}

/// Rows of a self-convergence study from completed runs at doubling
/// resolutions.
pub fn convergence_rows(runs: &[FvRun]) -> Result<Vec<ConvergenceRow>> {
    let finals = runs.iter().map(final_state).collect::<Result<Vec<_>>>()?;
    check_doubling(&finals.iter().map(GridFn::n).collect::<Vec<_>>())?;
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for (k, run) in runs.iter().enumerate() {
        let err = match finals.get(k + 1) {
            Some(fine) => Some(finals[k].sub(&restrict_pairwise(fine)?)?.norm(Norm::L1)),
            None => None,
        };
        let order = match (prev, err) {
            (Some(a), Some(b)) if b > 0.0 => Some((a / b).log2()),
            _ => None,
        };
        rows.push(ConvergenceRow { n: finals[k].n(), dt_mean: run.dt_mean(), l1_err: err, order });
        prev = err;
    }
    Ok(rows)
}

pub fn write_convergence_csv<W: Write>(rows: &[ConvergenceRow], mut w: W) -> Result<()> {
    writeln!(w, "n,dt_mean,l1_err,order")?;
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.16e}"));
    for r in rows {
        writeln!(w, "{},{:.16e},{},{}", r.n, r.dt_mean, opt(r.l1_err), opt(r.order))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;
    use crate::profile::{sample, Profile};
    use approx::assert_abs_diff_eq;

    fn brute_min_flux(a: f64, b: f64) -> f64 {
        let (lo, hi) = (a.min(b), a.max(b));
        let m = 100_000;
        let vals = (0..=m).map(|k| lo + (hi - lo) * k as f64 / m as f64).map(|u| 0.5 * u * u);
        if a <= b {
            vals.fold(f64::INFINITY, f64::min)
        } else {
            vals.fold(f64::NEG_INFINITY, f64::max)
        }
    }

    #[test]
    fn flux_cases() {
        assert_eq!(godunov_flux(1.0, 1.0), 0.5);
        assert_eq!(godunov_flux(-1.0, 1.0), 0.0);
        assert_abs_diff_eq!(godunov_flux(-1.0, 1.0), brute_min_flux(-1.0, 1.0), epsilon = 1e-9);
        assert_eq!(godunov_flux(2.0, -1.0), 2.0);
        for (a, b) in [(0.3, 1.2), (-2.0, -0.5), (1.5, 0.2), (-0.4, -1.1), (0.7, -0.9)] {
            assert_abs_diff_eq!(godunov_flux(a, b), brute_min_flux(a, b), epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_and_constant_steps() {
        let cfg = FvConfig { n: 32, ..FvConfig::default() };
        let op = KernelOp::new(Domain::Torus, 32).unwrap();
        let z = GridFn::zeros(Domain::Torus, 32);
        assert_eq!(fv_step(&z, 0.01, &op, &cfg).unwrap(), z);
        let c = GridFn::constant(Domain::Torus, 32, 0.8);
        let dt = stable_dt(&c, &cfg);
        let next = fv_step(&c, dt, &op, &cfg).unwrap();
        assert!(next.sub(&c).unwrap().norm(Norm::Linf) < 1e-14);
    }

    #[test]
    fn cfl_and_viscous_limits() {
        let cfg = FvConfig { n: 32, ..FvConfig::default() };
        let op = KernelOp::new(Domain::Torus, 32).unwrap();
        let c = GridFn::constant(Domain::Torus, 32, 1.0);
        let limit: f64 = 0.45 / 32.0;
        assert!(matches!(fv_step(&c, 2.0 * limit, &op, &cfg), Err(Error::TimeStepTooLarge { .. })));
        let visc = FvConfig { eps: 0.1, ..cfg };
        let vlimit: f64 = 0.4 / (32.0 * 32.0) / 0.1;
        assert_abs_diff_eq!(stable_dt(&c, &visc), vlimit.min(limit), epsilon = 1e-15);
    }

    #[test]
    fn riemann_shock_speed() {
        // Exact solution: a shock from 2 to 0 moving at (2 + 0)/2 = 1.
        let dom = Domain::line(-1.0, 3.0).unwrap();
        let n = 800;
        let u0 = GridFn::from_fn(dom, n, |x| if x < 0.0 { 2.0 } else { 0.0 }).unwrap();
        let op = KernelOp::for_grid(&u0).unwrap();
        let cfg = FvConfig { n, with_source: false, ..FvConfig::default() };
        let mut u = u0;
        let dt = 0.45 * u.h() / 2.0;
        for _ in 0..100 {
            u = fv_step(&u, dt, &op, &cfg).unwrap();
        }
        let t = 100.0 * dt;
        // Mass to the right of the initial jump locates the front.
        let front =
            u.values().iter().enumerate().filter(|(i, _)| u.x(*i) > 0.0).map(|(_, v)| v * u.h()).sum::<f64>() / 2.0;
        assert!((front / t - 1.0).abs() <= u.h() / t, "{}", front / t);
    }

    #[test]
    fn torus_mass_is_exact() {
        let u0 = sample(&Profile::Sine { amplitude: 0.8, offset: 0.3, mode: 1.0 }, Domain::Torus, 200).unwrap();
        for splitting in [Splitting::Lie, Splitting::Strang, Splitting::Additive] {
            let cfg = FvConfig { n: 200, t_end: 0.6, splitting, ..FvConfig::default() };
            let run = run_fv(&u0, &cfg).unwrap();
            assert!(run.trajectory.series("mass").unwrap().max_drift() <= 1e-12);
        }
    }

    #[test]
    fn zero_run() {
        let z = GridFn::zeros(Domain::default_line(), 100);
        let run = run_fv(&z, &FvConfig { n: 100, ..FvConfig::default() }).unwrap();
        assert!(run.completed);
        assert!(run.trajectory.snapshots().iter().all(|s| s.u.norm(Norm::Linf) == 0.0));
    }

    #[test]
    fn output_times_are_exact() {
        let u0 = sample(&Profile::Peakon { center: 0.0 }, Domain::default_line(), 400).unwrap();
        let cfg = FvConfig { n: 400, t_end: 0.5, output_every: Some(0.125), ..FvConfig::default() };
        let run = run_fv(&u0, &cfg).unwrap();
        assert_eq!(run.trajectory.times(), vec![0.0, 0.125, 0.25, 0.375, 0.5]);
    }

    #[test]
    fn sweep_with_zero_data() {
        let z = GridFn::zeros(Domain::default_line(), 64);
        let cfg = FvConfig { n: 64, t_end: 0.2, ..FvConfig::default() };
        let d = viscosity_sweep(&z, &[1e-2, 5e-3], &cfg).unwrap();
        assert!(d.iter().all(|&(_, v)| v == 0.0));
        assert!(viscosity_sweep(&z, &[5e-3, 1e-2], &cfg).is_err());
    }

    #[test]
    fn restriction_preserves_mass() {
        let f = GridFn::from_fn(Domain::Torus, 16, |x| x * x).unwrap();
        let c = restrict_pairwise(&f).unwrap();
        assert_eq!(c.n(), 8);
        assert_abs_diff_eq!(c.integral(), f.integral(), epsilon = 1e-15);
    }

    #[test]
    fn convergence_csv() {
        let rows = vec![
            ConvergenceRow { n: 10, dt_mean: 0.1, l1_err: Some(0.2), order: None },
            ConvergenceRow { n: 20, dt_mean: 0.05, l1_err: None, order: None },
        ];
        let mut buf = Vec::new();
        write_convergence_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,dt_mean,l1_err,order\n10,"));
        assert!(text.lines().nth(2).unwrap().ends_with(",,"));
    }
}
