use serde::{Deserialize, Serialize};

use super::check::{Check, Thresholds};
use crate::error::{Error, Result};
use crate::grid::{GridFn, Norm};
use crate::nonlocal::KernelOp;
use crate::trajectory::Trajectory;

/// `1/t + 2 + 2t(1 + 2 e^t ‖u0‖₁)`.
pub fn oleinik_coefficient(t: f64, u0_l1: f64) -> f64 {
    1.0 / t + 2.0 + 2.0 * t * (1.0 + 2.0 * t.exp() * u0_l1)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OleinikReport {
    pub t: f64,
    pub coefficient: f64,
    /// `min over checked x < y of coefficient·(y - x) - (u(y) - u(x))`.
    pub margin: f64,
    pub pass: bool,
}

/// One-sided Lipschitz bound on `u(·, t)`, checked on all adjacent pairs and
/// on pairs at distances `2, 4, 8, …` cells.
pub fn oleinik_check(u: &GridFn, t: f64, u0_l1: f64, thresholds: &Thresholds) -> Result<OleinikReport> {
    if !(t > 0.0) {
        return Err(Error::InvalidParameter(format!("Oleinik check needs t > 0, got {t}")));
    }
    let coefficient = oleinik_coefficient(t, u0_l1);
    let v = u.values();
    let n = v.len();
    let h = u.h();
    let mut margin = f64::INFINITY;
    let mut d = 1;
    while d < n {
        for i in 0..n - d {
            margin = margin.min(coefficient * d as f64 * h - (v[i + d] - v[i]));
        }
        d *= 2;
    }
    if !margin.is_finite() {
        margin = 0.0;
    }
    let pass = margin >= -thresholds.oleinik_rel * coefficient;
    Ok(OleinikReport { t, coefficient, margin, pass })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// `(t, ‖u - v‖₁ / (e^t ‖u0 - v0‖₁))` at every shared snapshot.
    pub ratios: Vec<(f64, f64)>,
    pub max_ratio: f64,
}

pub fn l1_stability_check(traj_u: &Trajectory, traj_v: &Trajectory) -> Result<StabilityReport> {
    let (su, sv) = (traj_u.snapshots(), traj_v.snapshots());
    if su.is_empty() || su.len() != sv.len() {
        return Err(Error::Mismatch(format!("trajectories have {} and {} snapshots", su.len(), sv.len())));
    }
    let d0 = su[0].u.sub(&sv[0].u)?.norm(Norm::L1);
    if d0 == 0.0 {
        return Err(Error::InvalidParameter("initial data coincide; the ratio is undefined".into()));
    }
    let mut ratios = Vec::with_capacity(su.len());
    for (a, b) in su.iter().zip(sv) {
        if a.t != b.t {
            return Err(Error::Mismatch(format!("snapshot times {} and {} differ", a.t, b.t)));
        }
        let d = a.u.sub(&b.u)?.norm(Norm::L1);
        ratios.push((a.t, d / (a.t.exp() * d0)));
    }
    let max_ratio = ratios.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport { ratios, max_ratio })
}

/// `max_t ‖u(t)‖₁ / (e^t ‖u0‖₁)`; zero data gives 0.
pub fn l1_growth_ratio(traj: &Trajectory) -> Result<f64> {
    let first = traj.first().ok_or_else(|| Error::InvalidTrajectory("empty trajectory".into()))?;
    let l0 = first.u.norm(Norm::L1);
    let mut worst: f64 = 0.0;
    for s in traj.snapshots() {
        let l = s.u.norm(Norm::L1);
        if l0 == 0.0 {
            if l > 0.0 {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        worst = worst.max(l / (s.t.exp() * l0));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `max_t |∫u(t) - ∫u0|`.
    pub mass_drift: f64,
    /// `max_t |‖u(t)‖₂² - ‖u0‖₂²|`.
    pub l2_drift: f64,
    /// `l2_drift / ‖u0‖₂²` (zero for zero data).
    pub l2_rel_drift: f64,
    /// Largest single-step increase of `‖u‖₂²`.
    pub l2_max_increase: f64,
}

/// Drift of the mass and of the squared L² norm, from the recorded series
/// when present, otherwise from the snapshots.
pub fn conservation_report(traj: &Trajectory) -> ConservationReport {
    let (mass, l2sq): (Vec<f64>, Vec<f64>) = match (traj.series("mass"), traj.series("l2")) {
        (Some(m), Some(l)) => (m.values().to_vec(), l.values().iter().map(|v| v * v).collect()),
        _ => traj.snapshots().iter().map(|s| (s.u.integral(), s.u.norm(Norm::L2).powi(2))).unzip(),
    };
    if mass.is_empty() {
        return ConservationReport { mass_drift: 0.0, l2_drift: 0.0, l2_rel_drift: 0.0, l2_max_increase: 0.0 };
    }
    let mass_drift = mass.iter().map(|m| (m - mass[0]).abs()).fold(0.0, f64::max);
    let l2_drift = l2sq.iter().map(|m| (m - l2sq[0]).abs()).fold(0.0, f64::max);
    let l2_rel_drift = if l2sq[0] > 0.0 { l2_drift / l2sq[0] } else { l2_drift };
    let l2_max_increase = l2sq.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    ConservationReport { mass_drift, l2_drift, l2_rel_drift, l2_max_increase }
}

/// Mass drift against `mass_drift` on the torus, or against
/// `window_mass_drift · ‖u0‖₁` on a line window.
pub fn mass_check(traj: &Trajectory, thresholds: &Thresholds) -> Check {
    let drift = conservation_report(traj).mass_drift;
    match traj.first() {
        Some(s) if !s.u.domain().is_periodic() => {
            let bound = thresholds.window_mass_drift * s.u.norm(Norm::L1);
            Check::at_most("mass_drift", drift, bound.max(thresholds.mass_drift))
                .with_details("line window: relative to the initial L1 norm")
        }
        _ => Check::at_most("mass_drift", drift, thresholds.mass_drift),
    }
}

/// `‖K*u_x(t)‖∞ <= ‖u0‖₂` and `‖u(t)‖∞ <= ‖u0‖∞ + t‖u0‖₂`, with relative slack.
pub fn sup_norm_checks(traj: &Trajectory, thresholds: &Thresholds) -> Result<Vec<Check>> {
    let first = traj.first().ok_or_else(|| Error::InvalidTrajectory("empty trajectory".into()))?;
    let op = KernelOp::for_grid(&first.u)?;
    let u0_inf = first.u.norm(Norm::Linf);
    let u0_l2 = first.u.norm(Norm::L2);
    let slack = 1.0 + thresholds.sup_bound_slack;
    let mut conv_worst: f64 = 0.0;
    let mut sup_worst: f64 = 0.0;
    for s in traj.snapshots() {
        let kux = op.conv_kprime(&s.u)?.norm(Norm::Linf);
        conv_worst = conv_worst.max(kux - slack * u0_l2);
        sup_worst = sup_worst.max(s.u.norm(Norm::Linf) - slack * (u0_inf + s.t * u0_l2));
    }
    Ok(vec![
        Check::at_most("conv_derivative_bound", conv_worst, 0.0).with_details("max over t of ‖K*u_x‖∞ - 1.02‖u0‖₂"),
        Check::at_most("sup_norm_bound", sup_worst, 0.0).with_details("max over t of ‖u‖∞ - 1.02(‖u0‖∞ + t‖u0‖₂)"),
    ])
}
