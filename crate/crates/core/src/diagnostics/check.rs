use serde::{Deserialize, Serialize};

/// One verdict in a machine-readable report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check_name: String,
    pub pass: bool,
    pub value: f64,
    pub threshold: f64,
    pub details: String,
}

impl Check {
    /// Passes when `value <= threshold`.
    pub fn at_most(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value <= threshold, value, threshold)
    }

    /// Passes when `value >= threshold`.
    pub fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self::new(name, value >= threshold, value, threshold)
    }

    pub fn new(name: impl Into<String>, pass: bool, value: f64, threshold: f64) -> Self {
        Self { check_name: name.into(), pass, value, threshold, details: String::new() }
    }

    pub fn with_details(mut self, details: impl Into<String>) -> Self {
        self.details = details.into();
        self
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}

/// Every tolerance used by the verification layer, in one place.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub mass_drift: f64,
    /// Mass drift on a line window relative to `‖u0‖₁`; the window leaks
    /// through its ends.
    pub window_mass_drift: f64,
    pub l2_rel_drift: f64,
    /// Relative slack on `t_observed <= t_star`.
    pub breaking_slack: f64,
    /// Envelope slack is `envelope_slack · (1 + |m2(0)|)`.
    pub envelope_slack: f64,
    /// Slope-inequality tolerance factor: `tol = k · (1 + m²)`.
    pub slope_ineq_tol: f64,
    pub slope_ineq_quantile: f64,
    /// Convolution lower bound tolerance factor: `tol = k · (1 + m2 - m1)`.
    pub conv_bound_tol: f64,
    pub sup_bound_slack: f64,
    /// Oleinik margin must exceed `-oleinik_rel · coefficient`.
    pub oleinik_rel: f64,
    pub l1_stability: f64,
    pub l1_growth: f64,
    pub weak_residual: f64,
    pub kruzhkov: f64,
    /// Minimum cells across a test function's spatial radius.
    pub min_cells_per_radius: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            mass_drift: 1e-12,
            window_mass_drift: 1e-6,
            l2_rel_drift: 1e-8,
            breaking_slack: 0.05,
            envelope_slack: 0.05,
            slope_ineq_tol: 0.05,
            slope_ineq_quantile: 0.95,
            conv_bound_tol: 1e-2,
            sup_bound_slack: 0.02,
            oleinik_rel: 1e-8,
            l1_stability: 1.05,
            l1_growth: 1.05,
            weak_residual: 5e-3,
            kruzhkov: -1e-6,
            min_cells_per_radius: 8.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_and_conjunction() {
        let a = Check::at_most("a", 1.0, 2.0);
        let b = Check::at_least("b", 1.0, 2.0).with_details("short");
        assert!(a.pass && !b.pass);
        assert_eq!(b.details, "short");
        assert!(!all_pass(&[a.clone(), b]));
        assert!(all_pass(&[a]));
        assert!(all_pass(&[]));
    }
}
