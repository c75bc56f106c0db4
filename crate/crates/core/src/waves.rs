//! Traveling waves `u(x, t) = v(x - ct)`: the peakon and the cusped profile.
//!
//! A profile is a weak traveling wave exactly when the first integral
//! `(v - c)²/2 + K*v` is constant. For the cusp, `w = (v - c)²/2` solves
//! `w'' = w + c - sqrt(2w) - E` away from the crest with `E = c²/2`, and the
//! first integral instead equals `E + λ₁K` with `λ₁ = -[w']₀`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFn, Norm};
use crate::nonlocal::{kernel_eval, KernelKind, KernelOp};
use crate::trajectory::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Peakon,
    Cusp,
    Custom,
}

/// Dense solution of the cusp ODE on `[ξ_min, ξ_max]`, `ξ > 0`.
#[derive(Debug, Clone, PartialEq)]
struct CuspTable {
    c: f64,
    b: f64,
    step: f64,
    xi0: f64,
    w: Vec<f64>,
    dw: Vec<f64>,
}

impl CuspTable {
    fn v(&self, xi: f64) -> f64 {
        let a = xi.abs();
        if a <= self.xi0 {
            return self.c - 2.0 * self.b * a.sqrt();
        }
        let s = (a - self.xi0) / self.step;
        let k = s.floor() as usize;
        if k + 1 >= self.w.len() {
            return 0.0;
        }
        // Cubic Hermite interpolation of w.
        let tau = s - k as f64;
        let (h00, h10, h01, h11) = (
            2.0 * tau.powi(3) - 3.0 * tau * tau + 1.0,
            tau.powi(3) - 2.0 * tau * tau + tau,
            -2.0 * tau.powi(3) + 3.0 * tau * tau,
            tau.powi(3) - tau * tau,
        );
        let w = h00 * self.w[k] + h10 * self.step * self.dw[k] + h01 * self.w[k + 1] + h11 * self.step * self.dw[k + 1];
        (self.c - (2.0 * w.max(0.0)).sqrt()).max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TravelingWave {
    pub c: f64,
    pub profile: GridFn,
    pub kind: WaveKind,
    cusp: Option<CuspTable>,
}

impl TravelingWave {
    pub fn custom(c: f64, profile: GridFn) -> Self {
        Self { c, profile, kind: WaveKind::Custom, cusp: None }
    }

    /// Profile value at an arbitrary `ξ`.
    pub fn eval(&self, xi: f64) -> f64 {
        match (self.kind, &self.cusp) {
            (WaveKind::Peakon, _) => peakon_profile(xi),
            (WaveKind::Cusp, Some(t)) => t.v(xi),
            _ => self.profile.interpolate(xi),
        }
    }

    /// Samples `v(x - c t)` at each time.
    pub fn transport(&self, times: &[f64]) -> Result<Trajectory> {
        let dom = self.profile.domain();
        let n = self.profile.n();
        let mut traj = Trajectory::new();
        for &t in times {
            traj.push_snapshot(t, GridFn::from_fn(dom, n, |x| self.eval(x - self.c * t))?)?;
        }
        Ok(traj)
    }
}

pub fn peakon_profile(xi: f64) -> f64 {
    4.0 / 3.0 * (-xi.abs() / 2.0).exp()
}

/// The peakon `(4/3) e^{-|ξ|/2}` with speed `4/3`.
pub fn peakon(domain: Domain, n: usize) -> Result<TravelingWave> {
    Ok(TravelingWave {
        c: 4.0 / 3.0,
        profile: GridFn::from_fn(domain, n, peakon_profile)?,
        kind: WaveKind::Peakon,
        cusp: None,
    })
}

/// `ξ ↦ (v(ξ) - c)²/2 + (K*v)(ξ)`.
pub fn tw_first_integral(w: &TravelingWave) -> Result<GridFn> {
    first_integral_for(&w.profile, w.c, &KernelOp::for_grid(&w.profile)?)
}

fn first_integral_for(v: &GridFn, c: f64, op: &KernelOp) -> Result<GridFn> {
    let kv = op.conv_k(v)?;
    let vals = v.values().iter().zip(kv.values()).map(|(vi, ki)| 0.5 * (vi - c).powi(2) + ki).collect();
    GridFn::new(v.domain(), vals)
}

/// `max - min` of the first integral, ignoring `margin` at each window end
/// where the zero far field truncates `K*v`.
fn oscillation(g: &GridFn, margin: f64) -> f64 {
    let (a, b) = (g.domain().start(), g.domain().start() + g.domain().length());
    let inside = (0..g.n()).filter(|&i| g.x(i) >= a + margin && g.x(i) <= b - margin);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in inside {
        lo = lo.min(g.values()[i]);
        hi = hi.max(g.values()[i]);
    }
    if hi < lo {
        0.0
    } else {
        hi - lo
    }
}

/// Oscillation of the first integral of a profile for a trial speed.
pub fn first_integral_oscillation(v: &GridFn, c: f64) -> Result<f64> {
    let op = KernelOp::for_grid(v)?;
    Ok(oscillation(&first_integral_for(v, c, &op)?, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualScan {
    pub c_best: f64,
    pub oscillation: f64,
    /// `(c, oscillation)` on the coarse grid.
    pub samples: Vec<(f64, f64)>,
}

/// Speed minimising the first-integral oscillation of `v` over
/// `[c_lo, c_hi]`: coarse grid search, then golden-section refinement.
pub fn residual_scan(v: &GridFn, c_lo: f64, c_hi: f64, coarse: usize) -> Result<ResidualScan> {
    if !(c_lo < c_hi) || coarse < 2 {
        return Err(Error::InvalidParameter("scan needs c_lo < c_hi and at least 2 samples".into()));
    }
    let op = KernelOp::for_grid(v)?;
    // K*v does not depend on c; reuse it.
    let kv = op.conv_k(v)?;
    let osc = |c: f64| -> f64 {
        let vals: Vec<f64> = v.values().iter().zip(kv.values()).map(|(vi, ki)| 0.5 * (vi - c).powi(2) + ki).collect();
        oscillation(&GridFn::from_vec(v.domain(), vals), 0.0)
    };
    let step = (c_hi - c_lo) / (coarse - 1) as f64;
    let samples: Vec<(f64, f64)> = (0..coarse).map(|k| c_lo + step * k as f64).map(|c| (c, osc(c))).collect();
    let kbest = samples.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|(k, _)| k).unwrap();
    let (mut a, mut b) = ((samples[kbest].0 - step).max(c_lo), (samples[kbest].0 + step).min(c_hi));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (osc(x1), osc(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = osc(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = osc(x2);
        }
    }
    let c_best = 0.5 * (a + b);
    Ok(ResidualScan { c_best, oscillation: osc(c_best), samples })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspParams {
    pub c: f64,
    /// `4 c^{3/2} sqrt(c - 4/3)`.
    pub stated_b: f64,
    /// `(c³(c - 4/3)/16)^{1/4}`, the value forced by decay at infinity.
    pub energy_b: f64,
    /// First-integral constant `c²/2`.
    pub e: f64,
}

impl CuspParams {
    pub fn new(c: f64) -> Result<Self> {
        if !c.is_finite() || c <= 4.0 / 3.0 + 1e-6 {
            return Err(Error::InvalidParameter(format!("cusp waves need c > 4/3, got {c}")));
        }
        Ok(Self { c, stated_b: stated_b(c), energy_b: energy_b(c), e: 0.5 * c * c })
    }
}

pub fn stated_b(c: f64) -> f64 {
    4.0 * c.powf(1.5) * (c - 4.0 / 3.0).max(0.0).sqrt()
}

/// From `w'²/2 = w²/2 + (c - E)w - (2√2/3) w^{3/2} + c⁴/8 - c³/6` at `w = 0`.
pub fn energy_b(c: f64) -> f64 {
    (c.powi(3) * (c - 4.0 / 3.0).max(0.0) / 16.0).powf(0.25)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CuspSeed {
    /// Determine `b` by shooting for the decaying solution.
    Shooting,
    /// Seed with `stated_b` and integrate as is.
    Stated,
    Given(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    /// `v` went negative: `b` too large.
    Over(f64),
    /// `w` turned back toward the crest: `b` too small.
    Under(f64),
    Reached,
}

const SEED_EPS: f64 = 1e-6;

fn cusp_rhs(c: f64, e: f64, w: f64) -> f64 {
    w + c - (2.0 * w.max(0.0)).sqrt() - e
}

/// RK4 integration of `w'' = w + c - sqrt(2w) - E` from the seed at `ξ = ε`.
fn integrate_cusp(c: f64, b: f64, xi_max: f64, step: f64, keep: bool) -> (Outcome, Vec<f64>, Vec<f64>) {
    let e = 0.5 * c * c;
    let wmax = 0.5 * c * c;
    let mut w = 2.0 * b * b * SEED_EPS;
    let mut dw = 2.0 * b * b;
    let mut ws = Vec::new();
    let mut dws = Vec::new();
    if keep {
        ws.push(w);
        dws.push(dw);
    }
    let steps = ((xi_max - SEED_EPS) / step).ceil() as usize;
    for k in 0..steps {
        let f = |w: f64| cusp_rhs(c, e, w);
        let (k1w, k1d) = (dw, f(w));
        let (k2w, k2d) = (dw + 0.5 * step * k1d, f(w + 0.5 * step * k1w));
        let (k3w, k3d) = (dw + 0.5 * step * k2d, f(w + 0.5 * step * k2w));
        let (k4w, k4d) = (dw + step * k3d, f(w + step * k3w));
        w += step / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
        dw += step / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        let xi = SEED_EPS + (k + 1) as f64 * step;
        if keep {
            ws.push(w);
            dws.push(dw);
        }
        if w > wmax {
            return (Outcome::Over(xi), ws, dws);
        }
        if dw < 0.0 || w <= 0.0 {
            return (Outcome::Under(xi), ws, dws);
        }
    }
    (Outcome::Reached, ws, dws)
}

/// Cusped wave of speed `c` sampled on `domain` (centred at `ξ = 0`).
pub fn cusp_profile(c: f64, domain: Domain, n: usize, seed: CuspSeed) -> Result<TravelingWave> {
    let params = CuspParams::new(c)?;
    let Domain::Line { a, b: right } = domain else {
        return Err(Error::InvalidParameter("cusp profiles live on the line".into()));
    };
    let xi_max = a.abs().max(right.abs());
    let step = (domain.spacing(n) / 4.0).min(1e-3);
    let b = match seed {
        CuspSeed::Stated => params.stated_b,
        CuspSeed::Given(b) => b,
        CuspSeed::Shooting => {
            // The separatrix is unstable; bisect on the exit type.
            let (mut lo, mut hi) = (0.0, 2.0 * params.energy_b.max(params.stated_b));
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                match integrate_cusp(c, mid, xi_max, step, false).0 {
                    Outcome::Over(_) => hi = mid,
                    Outcome::Under(_) => lo = mid,
                    Outcome::Reached => {
                        lo = mid;
                        hi = mid;
                    }
                }
            }
            0.5 * (lo + hi)
        }
    };
    let (outcome, w, dw) = integrate_cusp(c, b, xi_max, step, true);
    let table = CuspTable { c, b, step, xi0: SEED_EPS, w, dw };
    match (seed, outcome) {
        (_, Outcome::Reached) => {}
        (CuspSeed::Shooting, Outcome::Over(xi) | Outcome::Under(xi)) if v_small(&table, xi) => {}
        (_, Outcome::Over(xi)) => {
            return Err(Error::ProfileConstruction(format!("with b = {b} the profile drops below 0 at xi = {xi:.4}")))
        }
        (_, Outcome::Under(xi)) => {
            return Err(Error::ProfileConstruction(format!(
                "with b = {b} the profile turns back toward c at xi = {xi:.4}"
            )))
        }
    }
    let profile = GridFn::from_fn(domain, n, |x| table.v(x))?;
    Ok(TravelingWave { c, profile, kind: WaveKind::Cusp, cusp: Some(table) })
}

/// Past this point the remaining tail is below the window's resolution.
fn v_small(t: &CuspTable, xi: f64) -> bool {
    t.v(xi - t.step) < 1e-6 * t.c
}

impl TravelingWave {
    /// `b` used to build a cusp profile.
    pub fn cusp_b(&self) -> Option<f64> {
        self.cusp.as_ref().map(|t| t.b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpMeasurement {
    /// `w'(0+)`.
    pub right: f64,
    /// `-w'(0-)`.
    pub left: f64,
    pub jump: f64,
}

/// One-sided slopes of `w = (v - c)²/2` at the crest from least-squares fits
/// `w ≈ α|ξ| + β|ξ|^{3/2}` on `0 < |ξ| <= reach` on each side.
pub fn measure_jump(w: &TravelingWave, reach: f64) -> Result<JumpMeasurement> {
    let v = &w.profile;
    let fit = |sign: f64| -> Result<f64> {
        let (mut s11, mut s12, mut s22, mut r1, mut r2) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let mut count = 0;
        for i in 0..v.n() {
            let xi = v.x(i);
            if xi * sign <= 0.0 || xi.abs() > reach {
                continue;
            }
            let a = xi.abs();
            let (p, q) = (a, a.powf(1.5));
            let y = 0.5 * (v.values()[i] - w.c).powi(2);
            s11 += p * p;
            s12 += p * q;
            s22 += q * q;
            r1 += p * y;
            r2 += q * y;
            count += 1;
        }
        if count < 3 {
            return Err(Error::Unresolved(format!("fewer than 3 cells within {reach} of the crest")));
        }
        let det = s11 * s22 - s12 * s12;
        Ok((r1 * s22 - r2 * s12) / det)
    };
    let right = fit(1.0)?;
    let left = fit(-1.0)?;
    Ok(JumpMeasurement { right, left, jump: right + left })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    pub c: f64,
    pub b: Option<f64>,
    pub lambda1: f64,
    pub mismatch: f64,
}

/// Fits `((v - c)²/2)' + K′*v ≈ λ₁ K′` over `|ξ| > exclude` and reports the
/// relative sup mismatch `sup|lhs - λ₁K′| / max(sup|λ₁K′|, 1)`.
pub fn tw_defect(w: &TravelingWave, exclude: f64) -> Result<DefectReport> {
    let fi = tw_first_integral(w)?;
    let lhs = fi.derivative();
    let v = &w.profile;
    let (a, b) = (v.domain().start(), v.domain().start() + v.domain().length());
    // Stay clear of the one-sided boundary stencils as well.
    let margin = 2.0 * v.h();
    let cells: Vec<usize> = (0..v.n())
        .filter(|&i| {
            let x = v.x(i);
            x.abs() > exclude && x > a + margin && x < b - margin
        })
        .collect();
    let kp = |i: usize| kernel_eval(KernelKind::KprimeLine, v.x(i));
    let num: f64 = cells.iter().map(|&i| lhs.values()[i] * kp(i)).sum();
    let den: f64 = cells.iter().map(|&i| kp(i) * kp(i)).sum();
    let lambda1 = if den > 0.0 { num / den } else { 0.0 };
    let mut sup_diff: f64 = 0.0;
    let mut sup_rhs: f64 = 0.0;
    for &i in &cells {
        sup_diff = sup_diff.max((lhs.values()[i] - lambda1 * kp(i)).abs());
        sup_rhs = sup_rhs.max((lambda1 * kp(i)).abs());
    }
    Ok(DefectReport { c: w.c, b: w.cusp_b(), lambda1, mismatch: sup_diff / sup_rhs.max(1.0) })
}

/// Location of the maximum, refined by a parabola through the three
/// samples around the grid argmax.
pub fn crest_location(u: &GridFn) -> f64 {
    let v = u.values();
    let k = v.iter().enumerate().fold(0, |best, (i, &x)| if x > v[best] { i } else { best });
    if k == 0 || k + 1 >= v.len() {
        return u.x(k);
    }
    let (l, m, r) = (v[k - 1], v[k], v[k + 1]);
    let denom = l - 2.0 * m + r;
    let offset = if denom != 0.0 { 0.5 * (l - r) / denom } else { 0.0 };
    u.x(k) + offset.clamp(-0.5, 0.5) * u.h()
}

/// L¹ distance between a trajectory's last snapshot and the exactly
/// transported profile.
pub fn transport_error(w: &TravelingWave, traj: &Trajectory) -> Result<f64> {
    let last = traj.last().ok_or_else(|| Error::InvalidTrajectory("empty trajectory".into()))?;
    let exact = GridFn::from_fn(last.u.domain(), last.u.n(), |x| w.eval(x - w.c * last.t))?;
    Ok(last.u.sub(&exact)?.norm(Norm::L1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn peakon_shape() {
        let p = peakon(Domain::default_line(), 4000).unwrap();
        assert_eq!(p.eval(0.0), 4.0 / 3.0);
        assert_abs_diff_eq!(p.eval(2.0) / p.eval(0.0), (-1.0f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn peakon_first_integral_is_flat() {
        let p = peakon(Domain::line(-30.0, 30.0).unwrap(), 8000).unwrap();
        let fi = tw_first_integral(&p).unwrap();
        assert!(oscillation(&fi, 0.0) <= 2e-3, "{}", oscillation(&fi, 0.0));
        // Oracle: closed form c²/2 + (16/9 - 4c/3) e^{-|x|/2} is flat only at c = 4/3.
        let exact = |c: f64, x: f64| 0.5 * c * c + (16.0 / 9.0 - 4.0 * c / 3.0) * (-x.abs() / 2.0).exp();
        assert_abs_diff_eq!(exact(4.0 / 3.0, 3.0), exact(4.0 / 3.0, 0.0), epsilon = 1e-15);
        assert_abs_diff_eq!(fi.values()[4000], exact(4.0 / 3.0, fi.x(4000)), epsilon = 1e-3);
    }

    #[test]
    fn peakon_speed_from_scan() {
        let p = peakon(Domain::line(-30.0, 30.0).unwrap(), 8000).unwrap();
        let scan = residual_scan(&p.profile, 1.0, 2.0, 101).unwrap();
        assert!((scan.c_best - 4.0 / 3.0).abs() < 0.01, "{}", scan.c_best);
    }

    #[test]
    fn constant_on_torus() {
        let w = TravelingWave::custom(0.4, GridFn::constant(Domain::Torus, 64, 0.9));
        let fi = tw_first_integral(&w).unwrap();
        assert!(oscillation(&fi, 0.0) < 1e-12);
        assert_abs_diff_eq!(fi.values()[0], 0.5 * 0.25 + 0.9, epsilon = 1e-12);
    }

    #[test]
    fn b_formulas() {
        assert_abs_diff_eq!(stated_b(1.5), 3.0, epsilon = 1e-14);
        assert_eq!(stated_b(4.0 / 3.0), 0.0);
        assert_abs_diff_eq!(energy_b(1.5), 3f64.sqrt() / 4.0, epsilon = 1e-14);
        let mut prev = 0.0;
        for k in 1..50 {
            let c = 4.0 / 3.0 + 0.02 * k as f64;
            assert!(stated_b(c) > prev);
            prev = stated_b(c);
        }
        assert!(CuspParams::new(1.2).is_err());
    }

    #[test]
    fn stated_seed_leaves_the_band() {
        let err = cusp_profile(1.5, Domain::default_line(), 2000, CuspSeed::Stated).unwrap_err();
        assert!(matches!(err, Error::ProfileConstruction(_)));
    }

    #[test]
    fn shooting_recovers_energy_b() {
        let w = cusp_profile(1.5, Domain::default_line(), 8000, CuspSeed::Shooting).unwrap();
        let b = w.cusp_b().unwrap();
        assert_abs_diff_eq!(b, energy_b(1.5), epsilon = 1e-6);
        assert_abs_diff_eq!(w.eval(0.0), 1.5, epsilon = 0.0);
        for x in [0.3, 1.0, 4.0] {
            assert_eq!(w.eval(x), w.eval(-x));
        }
        assert!(w.eval(15.0) < 1e-3);
        let m = measure_jump(&w, 0.05).unwrap();
        assert_abs_diff_eq!(m.jump, 4.0 * b * b, epsilon = 0.05 * 4.0 * b * b);
        let d = tw_defect(&w, 0.1).unwrap();
        assert_abs_diff_eq!(d.lambda1, -4.0 * b * b, epsilon = 0.05 * 4.0 * b * b);
    }

    #[test]
    fn defect_of_trivial_waves() {
        let z = TravelingWave::custom(1.0, GridFn::zeros(Domain::default_line(), 400));
        let d = tw_defect(&z, 0.1).unwrap();
        assert_eq!(d.lambda1, 0.0);
        let p = peakon(Domain::default_line(), 4000).unwrap();
        let d = tw_defect(&p, 0.1).unwrap();
        assert!(d.lambda1.abs() < 0.05 && d.mismatch < 0.05, "{d:?}");
    }

    #[test]
    fn crest_refinement() {
        let g = GridFn::from_fn(Domain::default_line(), 400, |x| 1.0 - (x - 0.337).powi(2)).unwrap();
        assert_abs_diff_eq!(crest_location(&g), 0.337, epsilon = 1e-12);
    }
}
