//! Mechanical checks of conservation laws, breaking criteria, slope bounds,
//! stability inequalities and entropy conditions.

mod check;
pub mod entropy;
mod stability;

use serde::{Deserialize, Serialize};

pub use check::{all_pass, Check, Thresholds};
pub use entropy::{
    default_family, entropy_report, kruzhkov_residual, kruzhkov_values, lambda_grid, weak_residual, EntropyReport,
    KruzhkovMin, KruzhkovPair, Quadrature, ResidualOptions, TestFn,
};
pub use stability::{
    conservation_report, l1_growth_ratio, l1_stability_check, mass_check, oleinik_check, oleinik_coefficient,
    sup_norm_checks, ConservationReport, OleinikReport, StabilityReport,
};

use crate::error::{Error, Result};
use crate::grid::{GridFn, Norm};
use crate::nonlocal::KernelOp;
use crate::trajectory::Trajectory;

/// Extreme slopes and where they occur.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeExtrema {
    pub m1: f64,
    pub xi1: f64,
    pub m2: f64,
    pub xi2: f64,
}

/// Extrema of `slopes[i]` located at `xs[i]`; ties go to the smallest index.
pub fn slope_extrema_at(slopes: &[f64], xs: &[f64]) -> SlopeExtrema {
    let mut i1 = 0;
    let mut i2 = 0;
    for (i, &s) in slopes.iter().enumerate() {
        if s < slopes[i1] {
            i1 = i;
        }
        if s > slopes[i2] {
            i2 = i;
        }
    }
    SlopeExtrema { m1: slopes[i1], xi1: xs[i1], m2: slopes[i2], xi2: xs[i2] }
}

/// Extrema of the discrete derivative of `u` at the cell centres.
pub fn slope_extrema(u: &GridFn) -> SlopeExtrema {
    slope_extrema_at(u.derivative().values(), &u.xs())
}

/// Extrema of the one-sided difference quotients `(u_{i+1} - u_i)/h`,
/// located on the faces between cells. Wraps around on the torus.
pub fn one_sided_slope_extrema(u: &GridFn) -> SlopeExtrema {
    let v = u.values();
    let n = v.len();
    let h = u.h();
    let pairs = if u.domain().is_periodic() { n } else { n - 1 };
    let slopes: Vec<f64> = (0..pairs).map(|i| (v[(i + 1) % n] - v[i]) / h).collect();
    let xs: Vec<f64> = (0..pairs).map(|i| u.x(i) + 0.5 * h).collect();
    slope_extrema_at(&slopes, &xs)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BreakingReport {
    pub m1_0: f64,
    pub m2_0: f64,
    pub xi1_0: f64,
    pub xi2_0: f64,
    /// Asymmetry margin `-(m1 + m2)`.
    pub s: f64,
    pub condition_met: bool,
    /// `m1(0) + 1/2`.
    pub m0: f64,
    /// Upper bound on the breaking time, present when the criterion holds.
    pub t_star: Option<f64>,
    /// First recorded time with minimum slope below the stop threshold.
    pub t_observed: Option<f64>,
}

impl BreakingReport {
    /// `t_observed <= t_star · (1 + slack)`, vacuous unless both are present.
    pub fn bound_holds(&self, slack: f64) -> bool {
        match (self.t_star, self.t_observed) {
            (Some(ts), Some(to)) => to <= ts * (1.0 + slack),
            (Some(_), None) => false,
            _ => true,
        }
    }
}

pub fn breaking_precheck(u0: &GridFn) -> BreakingReport {
    let e = slope_extrema(u0);
    let s = -(e.m1 + e.m2);
    let condition_met = s >= 1.0;
    let m0 = e.m1 + 0.5;
    BreakingReport {
        m1_0: e.m1,
        m2_0: e.m2,
        xi1_0: e.xi1,
        xi2_0: e.xi2,
        s,
        condition_met,
        m0,
        t_star: condition_met.then(|| 1.0 / m0.abs()),
        t_observed: None,
    }
}

/// Fills `t_observed` from the trajectory's `m1` series.
pub fn observe_breaking(mut report: BreakingReport, traj: &Trajectory, stop_slope: f64) -> BreakingReport {
    report.t_observed = traj.series("m1").and_then(|m1| m1.first_time_where(|v| v < -stop_slope));
    report
}

/// Solution of `y' = c² - y²`, `y(0) = m0`.
pub fn riccati_envelope(m0: f64, c: f64, t: f64) -> Result<f64> {
    if !(c >= 0.0) || !c.is_finite() || !m0.is_finite() || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "envelope needs finite m0, t and c >= 0, got m0 = {m0}, c = {c}, t = {t}"
        )));
    }
    if c == 0.0 {
        return Ok(m0 / (1.0 + m0 * t));
    }
    let r = m0 / c;
    Ok(if r == 1.0 {
        c
    } else if r.abs() < 1.0 {
        c * (c * t + r.atanh()).tanh()
    } else if r > 1.0 {
        // acoth(r) = atanh(1/r)
        c / (c * t + (1.0 / r).atanh()).tanh()
    } else {
        // Below -c the solution runs to -∞ in finite time.
        let a = (1.0 / r).atanh();
        c / (c * t + a).tanh()
    })
}

/// Upper-slope envelope: `m2(t) <= y(t) + slack · (1 + |m2(0)|)` where `y`
/// solves the Riccati comparison problem with `c = sqrt(2 · max ‖u‖∞)`.
pub fn envelope_check(traj: &Trajectory, thresholds: &Thresholds) -> Result<Check> {
    let m2 = traj.series("m2").ok_or_else(|| Error::InvalidTrajectory("missing m2 series".into()))?;
    let linf = traj.series("linf").ok_or_else(|| Error::InvalidTrajectory("missing linf series".into()))?;
    let m20 = m2.first().unwrap_or(0.0);
    let c = (2.0 * linf.max().max(0.0)).sqrt();
    let slack = thresholds.envelope_slack * (1.0 + m20.abs());
    let mut worst = f64::NEG_INFINITY;
    for (&t, &v) in m2.times().iter().zip(m2.values()) {
        worst = worst.max(v - riccati_envelope(m20, c, t)?);
    }
    Ok(Check::at_most("riccati_envelope", worst, slack)
        .with_details(format!("max over t of m2 - envelope; c = {c:.6}")))
}

/// Fraction of sampled times at which the centred difference quotient of
/// `m_j` obeys `m_j' <= -m_j² + (m2 - m1)/2 + tol`, `tol = k (1 + m_j²)`.
pub fn slope_inequality_check(traj: &Trajectory, thresholds: &Thresholds) -> Result<Vec<Check>> {
    let get = |name: &str| traj.series(name).ok_or_else(|| Error::InvalidTrajectory(format!("missing {name} series")));
    let m1 = get("m1")?;
    let m2 = get("m2")?;
    let t = m1.times();
    let mut out = Vec::new();
    for (name, m) in [("slope_inequality_m1", m1.values()), ("slope_inequality_m2", m2.values())] {
        let mut ok = 0usize;
        let mut total = 0usize;
        for k in 1..t.len().saturating_sub(1) {
            let d = (m[k + 1] - m[k - 1]) / (t[k + 1] - t[k - 1]);
            let rhs = -m[k] * m[k] + 0.5 * (m2.values()[k] - m1.values()[k]);
            let tol = thresholds.slope_ineq_tol * (1.0 + m[k] * m[k]);
            total += 1;
            if d <= rhs + tol {
                ok += 1;
            }
        }
        let frac = if total == 0 { 1.0 } else { ok as f64 / total as f64 };
        out.push(
            Check::at_least(name, frac, thresholds.slope_ineq_quantile)
                .with_details(format!("{ok} of {total} sampled times")),
        );
    }
    Ok(out)
}

/// `(K*u_xx)(ξ_j) >= (m1 - m2)/2 - tol` at every snapshot, using
/// `K*u_xx = K*u - u`.
pub fn convolution_bound_check(traj: &Trajectory, thresholds: &Thresholds) -> Result<Check> {
    let first = traj.first().ok_or_else(|| Error::InvalidTrajectory("empty trajectory".into()))?;
    let op = KernelOp::for_grid(&first.u)?;
    let mut worst = f64::INFINITY;
    for snap in traj.snapshots() {
        let u = &snap.u;
        let e = slope_extrema(u);
        let ku = op.conv_k(u)?;
        let lower = 0.5 * (e.m1 - e.m2);
        let tol = thresholds.conv_bound_tol * (1.0 + e.m2 - e.m1);
        for xi in [e.xi1, e.xi2] {
            let v = ku.interpolate(xi) - u.interpolate(xi);
            worst = worst.min((v - lower + tol) / (1.0 + e.m2 - e.m1));
        }
    }
    Ok(Check::at_least("convolution_lower_bound", worst, 0.0)
        .with_details("min over snapshots of ((K*u_xx)(xi) - (m1-m2)/2 + tol)/(1+m2-m1)"))
}

/// `max_t ‖u(t)‖∞` against `2(‖u0‖∞ + T ‖u0‖₂)`.
pub fn sup_growth_check(traj: &Trajectory) -> Result<Check> {
    let first = traj.first().ok_or_else(|| Error::InvalidTrajectory("empty trajectory".into()))?;
    let t_end = traj.last().map_or(0.0, |s| s.t);
    let bound = 2.0 * (first.u.norm(Norm::Linf) + t_end * first.u.norm(Norm::L2));
    let worst = traj.snapshots().iter().map(|s| s.u.norm(Norm::Linf)).fold(0.0, f64::max);
    Ok(Check::at_most("sup_norm_growth", worst, bound))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;
    use crate::profile::{sample, Profile};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn riccati_rk4(m0: f64, c: f64, t: f64) -> f64 {
        let steps = 100_000;
        let dt = t / steps as f64;
        let f = |y: f64| c * c - y * y;
        let mut y = m0;
        for _ in 0..steps {
            let k1 = f(y);
            let k2 = f(y + 0.5 * dt * k1);
            let k3 = f(y + 0.5 * dt * k2);
            let k4 = f(y + dt * k3);
            y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        y
    }

    #[test]
    fn constant_has_flat_extrema() {
        let g = GridFn::constant(Domain::Torus, 16, 3.0);
        let e = slope_extrema(&g);
        assert_eq!((e.m1, e.m2), (0.0, 0.0));
        assert!(e.m1.abs() < 1e-12);
        let e = one_sided_slope_extrema(&GridFn::constant(Domain::default_line(), 16, 3.0));
        assert_eq!((e.m1, e.xi1, e.m2, e.xi2), (0.0, e.xi1, 0.0, e.xi1));
    }

    #[test]
    fn sine_extrema() {
        let g = GridFn::from_fn(Domain::Torus, 256, |x| (2.0 * PI * x).sin()).unwrap();
        let e = slope_extrema(&g);
        assert!((e.m1 + 2.0 * PI).abs() < 1e-3);
        assert!((e.m2 - 2.0 * PI).abs() < 1e-3);
        assert!((e.xi1 - 0.5).abs() <= g.h());
        assert!(e.xi2.min(1.0 - e.xi2) <= g.h());
    }

    #[test]
    fn gaussian_derivative_extrema() {
        let g = sample(&Profile::GaussianDerivative { beta: 2.0 }, Domain::default_line(), 4096).unwrap();
        let e = slope_extrema(&g);
        // u0' = 2(x² - 1)e^{-x²/2}; fine-grid scan as an independent check.
        let fine = |x: f64| 2.0 * (x * x - 1.0) * (-x * x / 2.0).exp();
        let scan_max = (0..200_001).map(|k| -5.0 + 10.0 * k as f64 / 200_000.0).map(fine).fold(f64::MIN, f64::max);
        assert_abs_diff_eq!(scan_max, 4.0 * (-1.5f64).exp(), epsilon = 1e-9);
        assert_abs_diff_eq!(e.m1, -2.0, epsilon = 1e-3);
        assert_abs_diff_eq!(e.m2, 4.0 * (-1.5f64).exp(), epsilon = 1e-3);
        assert!(e.xi1.abs() <= g.h());
        assert!((e.xi2.abs() - 3f64.sqrt()).abs() <= g.h());
    }

    #[test]
    fn precheck_cases() {
        let g = sample(&Profile::GaussianDerivative { beta: 2.0 }, Domain::default_line(), 4096).unwrap();
        let r = breaking_precheck(&g);
        assert!(r.condition_met);
        assert_abs_diff_eq!(r.s, 2.0 - 4.0 * (-1.5f64).exp(), epsilon = 1e-3);
        assert_abs_diff_eq!(r.t_star.unwrap(), 2.0 / 3.0, epsilon = 1e-3);
        let sine = GridFn::from_fn(Domain::Torus, 128, |x| 0.3 * (2.0 * PI * x).sin()).unwrap();
        let r = breaking_precheck(&sine);
        assert!(r.s.abs() < 1e-10 && !r.condition_met && r.t_star.is_none());
        let r = breaking_precheck(&GridFn::zeros(Domain::Torus, 16));
        assert_eq!((r.m1_0, r.m2_0, r.condition_met, r.t_star), (0.0, 0.0, false, None));
        assert!(r.bound_holds(0.05));
    }

    #[test]
    fn envelope_branches() {
        assert_eq!(riccati_envelope(1.5, 1.5, 3.0).unwrap(), 1.5);
        assert_abs_diff_eq!(riccati_envelope(0.0, 1.0, 1.0).unwrap(), 1f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(riccati_envelope(0.0, 1.0, 1.0).unwrap(), 0.76159, epsilon = 1e-5);
        for (m0, c, t) in [(0.0, 1.0, 1.0), (2.0, 1.0, 0.7), (0.3, 2.0, 0.4), (-0.5, 1.0, 0.5), (-2.0, 1.0, 0.2)] {
            assert_abs_diff_eq!(riccati_envelope(m0, c, t).unwrap(), riccati_rk4(m0, c, t), epsilon = 1e-9);
        }
        let mut prev = 2.0;
        for t in [0.1, 1.0, 5.0, 10.0] {
            let y = riccati_envelope(2.0, 1.0, t).unwrap();
            assert!(y < prev && y > 1.0);
            prev = y;
        }
        assert_abs_diff_eq!(riccati_envelope(2.0, 1.0, 40.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(riccati_envelope(1.0, 0.0, 1.0).unwrap(), 0.5, epsilon = 1e-15);
        assert!(riccati_envelope(1.0, -1.0, 1.0).is_err());
    }
}
