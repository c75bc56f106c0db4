//! `sweep`: independent finite-volume runs fanned out over a thread pool,
//! either over viscosities or over doubled resolutions.

use fwlab::diagnostics::Check;
use fwlab::shock::{convergence_rows, final_state, run_fv, write_convergence_csv, FvConfig, FvRun};
use fwlab::{sample, Domain, Norm, Profile};
use rayon::prelude::*;
use serde_json::json;

use super::{fv_config, thread_count};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::report::{OutDir, Report};

fn run_all(jobs: Vec<(usize, FvConfig)>, profile: &Profile, domain: Domain) -> Result<Vec<FvRun>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Failed(e.to_string()))?;
    pool.install(|| {
        jobs.into_par_iter()
            .map(|(n, cfg)| {
                let run = run_fv(&sample(profile, domain, n)?, &cfg)?;
                if !run.completed {
                    return Err(CliError::Failed(format!(
                        "run with n = {n} overflowed after t = {}",
                        run.last_valid_time
                    )));
                }
                Ok(run)
            })
            .collect()
    })
}

pub fn run(cfg: &mut RunConfig, out: &OutDir) -> Result<Report, CliError> {
    let kind = cfg.choice("kind", "viscosity", &["viscosity", "convergence"])?;
    if kind == "viscosity" {
        viscosity(cfg, out)
    } else {
        convergence(cfg, out)
    }
}

fn viscosity(cfg: &mut RunConfig, out: &OutDir) -> Result<Report, CliError> {
    let profile = cfg.profile(Some("riemann"))?;
    let domain = cfg.domain(false)?;
    let eps_list = cfg.f64_list("eps_list", &[1e-2, 5e-3, 2.5e-3])?;
    let ratio = cfg.f64("ratio", 2.0)?;
    let ratio_tol = cfg.f64("ratio_tol", 0.5)?;
    let base = fv_config(cfg, "strang", 1000)?;
    cfg.finish()?;
    if eps_list.is_empty() || eps_list.iter().any(|&e| !(e > 0.0)) || eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage("eps_list must be positive and strictly decreasing".into()));
    }
    let jobs = std::iter::once(0.0)
        .chain(eps_list.iter().copied())
        .map(|eps| (base.n, FvConfig { eps, ..base.clone() }))
        .collect();
    let runs = run_all(jobs, &profile, domain)?;
    let reference = final_state(&runs[0])?;
    let distances = runs[1..]
        .iter()
        .map(|r| Ok(final_state(r)?.sub(&reference)?.norm(Norm::L1)))
        .collect::<Result<Vec<f64>, CliError>>()?;
    let ratios: Vec<f64> = distances.windows(2).map(|w| w[0] / w[1]).collect();

    let mut csv = String::from("eps,l1_distance,ratio\n");
    for (k, (eps, d)) in eps_list.iter().zip(&distances).enumerate() {
        let r = if k > 0 { format!("{:.16e}", ratios[k - 1]) } else { String::new() };
        csv.push_str(&format!("{eps:.16e},{d:.16e},{r}\n"));
    }
    out.write("sweep.csv", csv.as_bytes())?;

    let decreasing = distances.windows(2).all(|w| w[1] < w[0]);
    let worst = ratios.iter().map(|r| (r - ratio).abs()).fold(0.0, f64::max);
    let checks = vec![
        Check::new("strictly_decreasing", decreasing, distances.last().copied().unwrap_or(0.0), 0.0),
        Check::at_most("ratio_deviation", worst, ratio_tol).with_details(format!("largest |ratio - {ratio}|")),
    ];
    let results = json!({ "eps": eps_list, "l1_distance": distances, "ratios": ratios });
    Ok(Report::new("sweep", cfg.resolved().clone(), checks, results))
}

fn convergence(cfg: &mut RunConfig, out: &OutDir) -> Result<Report, CliError> {
    let profile = cfg.profile(Some("peakon"))?;
    let domain = cfg.domain(false)?;
    let ns = cfg.usize_list("ns", &[2000, 4000, 8000])?;
    let order_min = cfg.f64("order_min", 0.7)?;
    let order_max = cfg.f64("order_max", 1.2)?;
    let base = fv_config(cfg, "strang", 1000)?;
    cfg.finish()?;
    if ns.len() < 3 || ns.windows(2).any(|w| w[1] != 2 * w[0]) {
        return Err(CliError::Usage("ns needs at least three doubling resolutions".into()));
    }
    let jobs = ns.iter().map(|&n| (n, FvConfig { n, ..base.clone() })).collect();
    let runs = run_all(jobs, &profile, domain)?;
    let rows = convergence_rows(&runs)?;
    out.write_csv("convergence.csv", |w| write_convergence_csv(&rows, w))?;
    let checks = rows
        .iter()
        .filter_map(|r| r.order.map(|o| (r.n, o)))
        .map(|(n, o)| {
            Check::new(format!("order_n{n}"), (order_min..=order_max).contains(&o), o, order_min)
                .with_details(format!("observed order must lie in [{order_min}, {order_max}]"))
        })
        .collect();
    Ok(Report::new("sweep", cfg.resolved().clone(), checks, json!({ "rows": rows })))
}
