//! `wave`: peakon or cusp profile, first integral and defect fit.

use fwlab::diagnostics::Check;
use fwlab::waves::{
    cusp_profile, first_integral_oscillation, measure_jump, peakon, residual_scan, stated_b, tw_defect,
    tw_first_integral, CuspParams, CuspSeed,
};
use serde_json::json;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{OutDir, Report};

pub fn run(cfg: &mut RunConfig, out: &OutDir) -> Result<Report, CliError> {
    let kind = cfg.choice("kind", "peakon", &["peakon", "cusp"])?;
    let domain = cfg.domain(false)?;
    if domain.is_periodic() {
        return Err(CliError::Usage("traveling waves are built on the line".into()));
    }
    let n = cfg.usize("n", 8000)?;
    let exclude = cfg.f64("exclude", 0.1)?;
    let weak_tol = cfg.f64("lambda1_tol", 0.5)?;
    let mut checks = Vec::new();
    let mut notes = Vec::new();
    let (wave, mut results) = if kind == "peakon" {
        let scan_lo = cfg.f64("scan_min", 1.0)?;
        let scan_hi = cfg.f64("scan_max", 2.0)?;
        let osc_tol = cfg.f64("oscillation_tol", 2e-3)?;
        cfg.finish()?;
        let w = peakon(domain, n)?;
        let scan = residual_scan(&w.profile, scan_lo, scan_hi, 101)?;
        let osc = first_integral_oscillation(&w.profile, w.c)?;
        checks.push(
            Check::at_most("speed_scan", (scan.c_best - 4.0 / 3.0).abs(), 0.01)
                .with_details(format!("scan minimiser {} against 4/3", scan.c_best)),
        );
        checks.push(Check::at_most("first_integral_oscillation", osc, osc_tol));
        (w, json!({ "scan_minimizer": scan.c_best, "scan_oscillation": scan.oscillation, "oscillation": osc }))
    } else {
        let c = cfg.f64("c", 1.5)?;
        let params = CuspParams::new(c)?;
        let seed = match cfg.opt_f64("cusp_b")? {
            Some(b) => CuspSeed::Given(b),
            None => match cfg.choice("cusp_seed", "shooting", &["shooting", "stated"])?.as_str() {
                "stated" => CuspSeed::Stated,
                _ => CuspSeed::Shooting,
            },
        };
        let reach = cfg.f64("reach", 0.05)?;
        cfg.finish()?;
        let w = cusp_profile(c, domain, n, seed).map_err(|e| CliError::Failed(e.to_string()))?;
        let jump = measure_jump(&w, reach)?;
        let b = w.cusp_b().expect("cusp waves carry b");
        (w, json!({ "params": params, "b": b, "jump": jump, "four_b_squared": 4.0 * b * b }))
    };

    let defect = tw_defect(&wave, exclude)?;
    out.write_csv("profile.csv", |w| wave.profile.write_csv_with_header(w, "xi", "v"))?;
    out.write_csv("first_integral.csv", |w| tw_first_integral(&wave)?.write_csv_with_header(w, "xi", "e"))?;
    out.write_json(
        "defect.json",
        &json!({
            "c": defect.c,
            "b": defect.b,
            "lambda1": defect.lambda1,
            "mismatch": defect.mismatch,
        }),
    )?;

    let weak = defect.lambda1.abs() <= weak_tol;
    results["defect"] = json!(defect);
    results["weak_solution"] = json!(weak);
    if kind == "peakon" {
        checks
            .push(Check::at_most("lambda1", defect.lambda1.abs(), weak_tol).with_details("peakon is a weak solution"));
    } else {
        let jump = results["jump"]["jump"].as_f64().unwrap_or(f64::NAN);
        checks.push(
            Check::at_most("lambda1_vs_jump", (defect.lambda1 + jump).abs(), 0.05 * jump.abs())
                .with_details("fitted lambda1 against minus the measured slope jump"),
        );
        let sb = stated_b(wave.c);
        let target = -4.0 * sb * sb;
        checks.push(
            Check::at_most("lambda1_vs_stated_b", (defect.lambda1 - target).abs(), 0.05 * target.abs())
                .with_details(format!("fitted lambda1 against -4 b^2 = {target} with b = {sb} from the closed form")),
        );
        if !weak {
            notes.push(format!("lambda1 = {:.6} is bounded away from 0: not a weak solution", defect.lambda1));
        }
    }
    Ok(Report::new("wave", cfg.resolved().clone(), checks, results).with_notes(notes))
}
