//! `breaking`: slope precheck, strong run to the slope threshold, comparison
//! of the observed breaking time with the predicted bound.

use fwlab::diagnostics::{breaking_precheck, envelope_check, observe_breaking, Check};
use fwlab::sample;
use fwlab::strong::{run_strong, StopReason};
use serde_json::json;

use super::strong_config;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{OutDir, Report};

pub fn run(cfg: &mut RunConfig, out: &OutDir) -> Result<Report, CliError> {
    let profile = cfg.profile(None)?;
    let domain = cfg.domain(matches!(profile, fwlab::Profile::Sine { .. }))?;
    let th = cfg.thresholds()?;
    let sc = strong_config(cfg, domain)?;
    cfg.finish()?;

    let u0 = sample(&profile, domain, sc.n)?;
    let pre = breaking_precheck(&u0);
    let run = run_strong(&u0, &sc)?;
    if let StopReason::Overflow { last_valid_time } = run.stop {
        return Err(CliError::Failed(format!("strong solver overflowed after t = {last_valid_time}")));
    }
    let report = observe_breaking(pre, &run.trajectory, sc.stop_slope);
    out.write_csv("series.csv", |w| run.trajectory.write_series_csv(w))?;
    out.write_json("breaking.json", &report)?;

    let mut checks = Vec::new();
    let mut notes = Vec::new();
    match report.t_star {
        Some(t_star) => {
            let bound = t_star * (1.0 + th.breaking_slack);
            let observed = report.t_observed.unwrap_or(f64::INFINITY);
            checks.push(
                Check::at_most("breaking_time", observed, bound)
                    .with_details(format!("t_observed against t_star = {t_star} with relative slack")),
            );
        }
        None => notes.push(format!("criterion not met: S = {} < 1", report.s)),
    }
    checks.push(envelope_check(&run.trajectory, &th)?);
    let results = json!({ "breaking": report, "stop": run.stop });
    Ok(Report::new("breaking", cfg.resolved().clone(), checks, results).with_notes(notes))
}
