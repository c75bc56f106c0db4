//! `verify`: weak-form, Kružkov, Oleinik and conservation checks on a
//! trajectory read from disk, built adversarially, or simulated inline.

use std::path::PathBuf;

use fwlab::diagnostics::{
    conservation_report, default_family, entropy_report, lambda_grid, mass_check, Check, Quadrature, ResidualOptions,
};
use fwlab::shock::run_fv;
use fwlab::{sample, Domain, GridFn, Norm, Snapshot, Trajectory};
use serde_json::json;

use super::fv_config;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{OutDir, Report};
use crate::trajio::{read_snapshots, write_snapshots};

/// The up-jump from -1 to 1 held fixed: a weak but non-entropic solution of
/// Burgers' equation.
pub fn stationary_up_jump(domain: Domain, n: usize, t_end: f64, steps: usize) -> Result<Trajectory, CliError> {
    let u = GridFn::from_fn(domain, n, |x| if x < 0.0 { -1.0 } else { 1.0 })?;
    let snaps = (0..=steps).map(|k| Snapshot { t: t_end * k as f64 / steps as f64, u: u.clone() }).collect();
    Ok(Trajectory::from_snapshots(snaps)?)
}

pub fn run(cfg: &mut RunConfig, out: &OutDir) -> Result<Report, CliError> {
    let th = cfg.thresholds()?;
    let mut notes = Vec::new();
    let (traj, source_default, origin) = if let Some(dir) = cfg.opt_str("input") {
        (read_snapshots(&PathBuf::from(&dir))?, true, format!("read from {dir}"))
    } else if let Some(kind) = cfg.opt_str("adversarial") {
        if kind != "up_jump" {
            return Err(CliError::Usage(format!("adversarial must be `up_jump`, got `{kind}`")));
        }
        let domain = cfg.domain(false)?;
        let n = cfg.usize("n", 4000)?;
        let t_end = cfg.f64("T", 1.0)?;
        let steps = cfg.usize("steps", 200)?;
        if steps == 0 || !(t_end > 0.0) {
            return Err(CliError::Usage("adversarial trajectory needs steps >= 1 and T > 0".into()));
        }
        (stationary_up_jump(domain, n, t_end, steps)?, false, "stationary up-jump".to_string())
    } else {
        let profile = cfg.profile(None)?;
        let domain = cfg.domain(matches!(profile, fwlab::Profile::Sine { .. }))?;
        let fc = fv_config(cfg, "additive", 1)?;
        let run = run_fv(&sample(&profile, domain, fc.n)?, &fc)?;
        if !run.completed {
            return Err(CliError::Failed(format!("finite-volume run overflowed after t = {}", run.last_valid_time)));
        }
        write_snapshots(out, "snapshots", &run.trajectory)?;
        (run.trajectory, fc.with_source, "finite-volume run".to_string())
    };

    let first = traj.first().expect("trajectories are non-empty");
    let domain = first.u.domain();
    let t_end = traj.last().map_or(0.0, |s| s.t);
    let quadrature = match cfg.choice("quadrature", "conservative", &["conservative", "midpoint"])?.as_str() {
        "midpoint" => Quadrature::Midpoint,
        _ => Quadrature::Conservative,
    };
    let with_source = cfg.bool("with_source", source_default)?;
    let (c0, w0) = if domain.is_periodic() { (0.5, 0.3) } else { (0.0, 3.0) };
    let center = cfg.f64("test_center", c0)?;
    let half_width = cfg.f64("test_half_width", w0)?;
    let sup = traj.snapshots().iter().map(|s| s.u.norm(Norm::Linf)).fold(0.0, f64::max);
    let bound = cfg.f64("lambda_bound", sup)?;
    let count = cfg.usize("lambda_count", 9)?;
    cfg.finish()?;
    if count == 0 {
        return Err(CliError::Usage("lambda_count must be >= 1".into()));
    }

    let opts = ResidualOptions { quadrature, with_source, min_cells_per_radius: th.min_cells_per_radius };
    let family = default_family(center, half_width, t_end);
    let lambdas = lambda_grid(bound, count);
    let er = entropy_report(&traj, &lambdas, &family, &opts, &th)?;
    let cons = conservation_report(&traj);
    let checks = vec![
        Check::at_most("weak_residual", er.weak_residual_max, th.weak_residual),
        Check::at_least("kruzhkov_residual", er.kruzhkov_min.value, th.kruzhkov).with_details(format!(
            "minimum at lambda = {}, test function {}",
            er.kruzhkov_min.lambda, er.kruzhkov_min.test_fn
        )),
        Check::at_least("oleinik_margin", er.oleinik_margin, -th.oleinik_rel)
            .with_details("smallest margin relative to the coefficient"),
        mass_check(&traj, &th),
    ];
    notes.push(format!("trajectory: {origin}, {} snapshots up to t = {t_end}", traj.snapshots().len()));
    let results = json!({
        "entropy": er,
        "conservation": cons,
        "lambdas": lambdas,
        "test_functions": family,
    });
    Ok(Report::new("verify", cfg.resolved().clone(), checks, results).with_notes(notes))
}
