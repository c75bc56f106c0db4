//! One module per verb. Each returns a [`Report`]; files are written along
//! the way.

pub mod breaking;
pub mod simulate;
pub mod sweep;
pub mod verify;
pub mod wave;

use fwlab::shock::{FvConfig, Splitting};
use fwlab::strong::{LineScheme, StrongConfig};
use fwlab::Domain;

use crate::config::RunConfig;
use crate::error::CliError;

pub fn strong_config(cfg: &mut RunConfig, domain: Domain) -> Result<StrongConfig, CliError> {
    let d = StrongConfig::default();
    let n_default = if domain.is_periodic() { 256 } else { 4096 };
    let scheme = match cfg.choice("scheme", "characteristics", &["characteristics", "central"])?.as_str() {
        "central" => LineScheme::CentralDifference,
        _ => LineScheme::Characteristics,
    };
    let c = StrongConfig {
        n: cfg.usize("n", n_default)?,
        dt: cfg.f64("dt", d.dt)?,
        t_end: cfg.f64("T", d.t_end)?,
        dealias: cfg.bool("dealias", d.dealias)?,
        lambda: cfg.f64("lambda", d.lambda)?,
        stop_slope: cfg.f64("stop_slope", d.stop_slope)?,
        snapshot_stride: cfg.usize("stride", d.snapshot_stride)?,
        line_scheme: scheme,
    };
    c.validate()?;
    Ok(c)
}

pub fn fv_config(cfg: &mut RunConfig, splitting_default: &str, stride_default: usize) -> Result<FvConfig, CliError> {
    let d = FvConfig::default();
    let splitting = match cfg.choice("splitting", splitting_default, &["lie", "strang", "additive"])?.as_str() {
        "lie" => Splitting::Lie,
        "additive" => Splitting::Additive,
        _ => Splitting::Strang,
    };
    let c = FvConfig {
        n: cfg.usize("n", d.n)?,
        cfl: cfg.f64("cfl", d.cfl)?,
        t_end: cfg.f64("T", d.t_end)?,
        eps: cfg.f64("eps", d.eps)?,
        splitting,
        with_source: cfg.bool("source", d.with_source)?,
        snapshot_stride: cfg.usize("stride", stride_default)?,
        output_every: cfg.opt_f64("output_every")?,
        fixed_dt: cfg.opt_f64("dt")?,
    };
    c.validate()?;
    Ok(c)
}

/// Number of worker threads for fan-out commands, from `FWLAB_THREADS`.
pub fn thread_count() -> Result<Option<usize>, CliError> {
    match std::env::var("FWLAB_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Usage(format!("FWLAB_THREADS must be a positive integer, got `{s}`"))),
        },
    }
}
