use flevy::SamplePath;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::pipeline::{cutoff_tol, driver_path, floup_rate, floup_run, flp_path, model_path, Horizon};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SimKind {
    Driver,
    Flp,
    Floup,
    Sde,
}

pub fn simulate(kind: SimKind, cfg: &RunConfig) -> CliResult<SamplePath> {
    cfg.seed()?;
    let driver = cfg.driver()?;
    let flp = cfg.flp()?;
    let h = Horizon::from_config(cfg)?;
    match kind {
        SimKind::Driver => driver_path(&driver, &flp, h.t_min, h.t_max),
        SimKind::Flp => flp_path(&driver, &flp, h.t_min, h.t_max),
        SimKind::Floup => {
            if cfg.contains("model.id") {
                return Err(CliError::Config("model.* keys apply to `simulate sde`".into()));
            }
            let lambda = floup_rate(cfg, None)?;
            Ok(floup_run(&driver, &flp, lambda, cutoff_tol(cfg)?, h.t_min, h.t_max)?.floup)
        }
        SimKind::Sde => {
            let model = cfg
                .model()?
                .ok_or_else(|| CliError::Config("missing required key `model.id`".into()))?;
            let lambda = floup_rate(cfg, Some(&model))?;
            let start = match (cfg.get::<f64>("model.tau")?, cfg.get::<f64>("model.z")?) {
                (Some(tau), Some(z)) => Some((tau, z)),
                (None, None) => None,
                _ => return Err(CliError::Config("model.tau and model.z must be given together".into())),
            };
            let run = floup_run(&driver, &flp, lambda, cutoff_tol(cfg)?, h.t_min, h.t_max)?;
            model_path(&model, &run, start)
        }
    }
}
