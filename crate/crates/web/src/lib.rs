//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each entry point runs one computation and returns a [`Movie`]: a shared
//! grid, a list of frames and a few named diagnostics.

use fwlab::diagnostics::{breaking_precheck, observe_breaking};
use fwlab::shock::{run_fv, FvConfig, Splitting};
use fwlab::strong::{run_strong, StrongConfig};
use fwlab::waves::{
    crest_location, cusp_profile, measure_jump, peakon, transport_error, tw_defect, CuspSeed, TravelingWave,
};
use fwlab::{sample, Domain, Profile, Trajectory};
use wasm_bindgen::prelude::*;

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Movie {
    xs: Vec<f64>,
    times: Vec<f64>,
    frames: Vec<Vec<f64>>,
    info: Vec<(String, f64)>,
}

#[wasm_bindgen]
impl Movie {
    pub fn xs(&self) -> Vec<f64> {
        self.xs.clone()
    }

    pub fn frame_count(&self) -> usize {
        self.frames.len()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.times.get(k).copied().unwrap_or(f64::NAN)
    }

    pub fn frame(&self, k: usize) -> Vec<f64> {
        self.frames.get(k).cloned().unwrap_or_default()
    }

    /// Diagnostics as `name=value` lines.
    pub fn info(&self) -> String {
        self.info.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }
}

impl Movie {
    fn from_trajectory(traj: &Trajectory, info: Vec<(String, f64)>) -> Result<Self, String> {
        let first = traj.first().ok_or("empty trajectory")?;
        Ok(Self {
            xs: first.u.xs(),
            times: traj.snapshots().iter().map(|s| s.t).collect(),
            frames: traj.snapshots().iter().map(|s| s.u.values().to_vec()).collect(),
            info,
        })
    }

    #[cfg(test)]
    fn value(&self, name: &str) -> Option<f64> {
        self.info.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }
}

fn err(e: impl ToString) -> String {
    e.to_string()
}

fn line() -> Domain {
    Domain::line(-10.0, 10.0).expect("fixed window")
}

pub fn run_breaking(beta: f64, n: usize, t_end: f64) -> Result<Movie, String> {
    let u0 = sample(&Profile::GaussianDerivative { beta }, line(), n).map_err(err)?;
    let cfg = StrongConfig { n, t_end, dt: 1e-3, snapshot_stride: 20, ..StrongConfig::default() };
    let run = run_strong(&u0, &cfg).map_err(err)?;
    let report = observe_breaking(breaking_precheck(&u0), &run.trajectory, cfg.stop_slope);
    let mut info = vec![("S".to_string(), report.s), ("final_time".to_string(), run.final_time())];
    if let Some(t) = report.t_star {
        info.push(("t_star".into(), t));
    }
    if let Some(t) = report.t_observed {
        info.push(("t_observed".into(), t));
    }
    Movie::from_trajectory(&run.trajectory, info)
}

pub fn run_peakon(n: usize, t_end: f64, splitting: &str) -> Result<Movie, String> {
    let splitting = match splitting {
        "lie" => Splitting::Lie,
        "strang" => Splitting::Strang,
        "additive" => Splitting::Additive,
        other => return Err(format!("unknown splitting `{other}`")),
    };
    let domain = Domain::default_line();
    let wave = peakon(domain, n).map_err(err)?;
    let cfg = FvConfig { n, t_end, splitting, output_every: Some(t_end / 40.0), ..FvConfig::default() };
    let run = run_fv(&wave.profile, &cfg).map_err(err)?;
    if !run.completed {
        return Err(format!("run overflowed after t = {}", run.last_valid_time));
    }
    let last = run.trajectory.last().ok_or("empty run")?;
    let info = vec![
        ("crest_speed".to_string(), crest_location(&last.u) / last.t),
        ("exact_speed".to_string(), wave.c),
        ("l1_error".to_string(), transport_error(&wave, &run.trajectory).map_err(err)?),
    ];
    Movie::from_trajectory(&run.trajectory, info)
}

pub fn run_wave(kind: &str, c: f64, n: usize) -> Result<Movie, String> {
    let domain = Domain::default_line();
    let wave: TravelingWave = match kind {
        "peakon" => peakon(domain, n).map_err(err)?,
        "cusp" => cusp_profile(c, domain, n, CuspSeed::Shooting).map_err(err)?,
        other => return Err(format!("unknown wave `{other}`")),
    };
    let defect = tw_defect(&wave, 0.1).map_err(err)?;
    let mut info = vec![
        ("c".to_string(), wave.c),
        ("lambda1".to_string(), defect.lambda1),
        ("mismatch".to_string(), defect.mismatch),
    ];
    if let Some(b) = defect.b {
        info.push(("b".into(), b));
    }
    if kind == "cusp" {
        info.push(("jump".into(), measure_jump(&wave, 0.05).map_err(err)?.jump));
    }
    let traj = wave.transport(&[0.0]).map_err(err)?;
    Movie::from_trajectory(&traj, info)
}

/// Strong run from `-beta x e^{-x²/2}` until the slope blows up.
#[wasm_bindgen]
pub fn breaking(beta: f64, n: usize, t_end: f64) -> Result<Movie, JsError> {
    run_breaking(beta, n, t_end).map_err(|e| JsError::new(&e))
}

/// Finite-volume transport of the peakon.
#[wasm_bindgen]
pub fn peakon_transport(n: usize, t_end: f64, splitting: &str) -> Result<Movie, JsError> {
    run_peakon(n, t_end, splitting).map_err(|e| JsError::new(&e))
}

/// Peakon or cusped traveling-wave profile with its defect fit.
#[wasm_bindgen]
pub fn traveling_wave(kind: &str, c: f64, n: usize) -> Result<Movie, JsError> {
    run_wave(kind, c, n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breaking_reports_bound() {
        let m = run_breaking(2.0, 1024, 1.0).unwrap();
        assert!(m.frame_count() > 1);
        assert_eq!(m.frame(0).len(), m.xs().len());
        let (t_star, t_obs) = (m.value("t_star").unwrap(), m.value("t_observed").unwrap());
        assert!(t_obs <= t_star * 1.01, "{}", m.info());
    }

    #[test]
    fn peakon_moves_at_its_speed() {
        let m = run_peakon(2000, 0.5, "strang").unwrap();
        assert!((m.value("crest_speed").unwrap() - 4.0 / 3.0).abs() < 0.05, "{}", m.info());
        assert!((m.time(m.frame_count() - 1) - 0.5).abs() < 1e-12);
        assert!(run_peakon(200, 0.1, "other").is_err());
    }

    #[test]
    fn waves_report_defects() {
        let p = run_wave("peakon", 0.0, 4000).unwrap();
        assert!(p.value("lambda1").unwrap().abs() < 0.5);
        let c = run_wave("cusp", 1.5, 4000).unwrap();
        assert!(c.value("b").is_some() && c.value("jump").is_some(), "{}", c.info());
        assert!(run_wave("cusp", 1.0, 4000).is_err());
        assert!(run_wave("soliton", 1.5, 4000).is_err());
    }
}
