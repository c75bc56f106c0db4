//! `simulate`: one strong or finite-volume run with its conservation report.

use std::f64::consts::PI;

use fwlab::diagnostics::{conservation_report, mass_check, Check};
use fwlab::shock::run_fv;
use fwlab::strong::{run_strong, StopReason};
use fwlab::waves::crest_location;
use fwlab::{sample, GridFn, Profile, Trajectory};
use serde_json::json;

use super::{fv_config, strong_config};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{OutDir, Report};
use crate::trajio::write_snapshots;

/// Phase of the first Fourier mode.
fn mode1_phase(u: &GridFn) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (x, v) in u.xs().iter().zip(u.values()) {
        re += v * (2.0 * PI * x).cos();
        im -= v * (2.0 * PI * x).sin();
    }
    im.atan2(re)
}

pub fn run(cfg: &mut RunConfig, out: &OutDir) -> Result<Report, CliError> {
    let profile = cfg.profile(None)?;
    let solver = cfg.choice("solver", "strong", &["strong", "fv"])?;
    let domain = cfg.domain(matches!(profile, Profile::Sine { .. }))?;
    let th = cfg.thresholds()?;
    let mut notes = Vec::new();
    let (traj, completed, stop, extra): (Trajectory, bool, serde_json::Value, serde_json::Value) = if solver == "strong"
    {
        let sc = strong_config(cfg, domain)?;
        cfg.finish()?;
        let u0 = sample(&profile, domain, sc.n)?;
        let run = run_strong(&u0, &sc)?;
        let completed = !matches!(run.stop, StopReason::Overflow { .. });
        if let StopReason::SlopeThreshold { t } = run.stop {
            notes.push(format!("minimum slope crossed -{} at t = {t}; run stopped", sc.stop_slope));
        }
        (run.trajectory, completed, json!(run.stop), json!({}))
    } else {
        let fc = fv_config(cfg, "strang", 50)?;
        cfg.finish()?;
        let u0 = sample(&profile, domain, fc.n)?;
        let run = run_fv(&u0, &fc)?;
        let extra = json!({ "steps": run.steps, "dt_mean": run.dt_mean() });
        let stop = if run.completed {
            json!({ "reason": "completed" })
        } else {
            json!({ "reason": "overflow", "last_valid_time": run.last_valid_time })
        };
        (run.trajectory, run.completed, stop, extra)
    };

    out.write_csv("series.csv", |w| traj.write_series_csv(w))?;
    write_snapshots(out, "snapshots", &traj)?;

    let first = traj.first().expect("runs record the initial state");
    let last = traj.last().expect("runs record the initial state");
    let cons = conservation_report(&traj);
    let mut results = json!({
        "solver": solver,
        "stop": stop,
        "final_time": last.t,
        "conservation": cons,
        "run": extra,
    });
    if domain.is_periodic() && last.t > 0.0 {
        let mut d = mode1_phase(&last.u) - mode1_phase(&first.u);
        d -= 2.0 * PI * (d / (2.0 * PI)).round();
        results["mode1_phase_speed"] = json!(-d / (2.0 * PI * last.t));
    } else if last.t > 0.0 {
        results["crest_speed"] = json!((crest_location(&last.u) - crest_location(&first.u)) / last.t);
    }
    notes.push(format!(
        "relative drift of the squared L2 norm {:.3e}; it is conserved only while the solution stays smooth",
        cons.l2_rel_drift
    ));

    let mut checks = vec![
        Check::new("run_completed", completed, last.t, 0.0).with_details("solver did not overflow"),
        mass_check(&traj, &th),
    ];
    if let (Profile::Peakon { .. }, Some(speed)) = (profile, results["crest_speed"].as_f64()) {
        let c = 4.0 / 3.0;
        checks.push(
            Check::at_most("crest_speed", (speed - c).abs(), 0.02 * c)
                .with_details(format!("crest speed {speed} against 4/3")),
        );
    }
    Ok(Report::new("simulate", cfg.resolved().clone(), checks, results).with_notes(notes))
}
