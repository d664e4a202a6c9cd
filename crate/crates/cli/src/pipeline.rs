//! Dense path construction from a run configuration.

use flevy::floup::{floup_via_ibp, FloupParams, DEFAULT_CUTOFF_TOL};
use flevy::sst::{catalog, solve_sde, squared_floup, stationary_solution, Model};
use flevy::{sample_two_sided_levy, simulate_flp, FlevyError, FlpParams, LevyDriverSpec, SamplePath};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub struct Horizon {
    pub t_min: f64,
    pub t_max: f64,
}

impl Horizon {
    pub fn from_config(cfg: &RunConfig) -> CliResult<Self> {
        let h = Self {
            t_min: cfg.f64_or("output.t_min", 0.0)?,
            t_max: cfg.f64_or("output.t_max", 10.0)?,
        };
        if !(h.t_min < h.t_max) {
            return Err(CliError::Config(format!(
                "output.t_min = {} must be below output.t_max = {}",
                h.t_min, h.t_max
            )));
        }
        Ok(h)
    }
}

/// Driver path on the `1/n` grid covering `[t_min, t_max]` (and the origin).
pub fn driver_path(driver: &LevyDriverSpec, flp: &FlpParams, t_min: f64, t_max: f64) -> CliResult<SamplePath> {
    let dt = flp.dt();
    let full = sample_two_sided_levy(driver, t_min.min(-dt), t_max.max(dt), dt)?;
    Ok(full.restrict(t_min, t_max)?)
}

/// FLP path on `[t_min, t_max]`, with the driver drawn over the kernel window.
pub fn flp_path(driver: &LevyDriverSpec, flp: &FlpParams, t_min: f64, t_max: f64) -> CliResult<SamplePath> {
    let dt = flp.dt();
    let drv = sample_two_sided_levy(driver, flp.window_start(), t_max.max(dt), dt)?;
    Ok(simulate_flp(&drv, flp, t_min, t_max)?)
}

pub struct FloupRun {
    pub flp: SamplePath,
    pub floup: SamplePath,
}

/// FLOUP at rate `lambda` on `[t_min, t_max]` together with the FLP path it
/// was built from (which starts at the cutoff).
pub fn floup_run(
    driver: &LevyDriverSpec,
    flp: &FlpParams,
    lambda: f64,
    cutoff_tol: f64,
    t_min: f64,
    t_max: f64,
) -> CliResult<FloupRun> {
    let params = FloupParams::adaptive(lambda, flp.d, cutoff_tol, t_min)?;
    let dt = flp.dt();
    let start = (params.past_cutoff / dt).floor() * dt;
    if start < flp.window_start() {
        return Err(CliError::Model(FlevyError::WindowNotCovered(format!(
            "the FLOUP cutoff {start} precedes the kernel window start {}; raise flp.window_exponent",
            flp.window_start()
        ))));
    }
    let path = flp_path(driver, flp, start, t_max)?;
    let floup = floup_via_ibp(&path, &params, t_min, t_max)?;
    Ok(FloupRun { flp: path, floup })
}

pub fn cutoff_tol(cfg: &RunConfig) -> CliResult<f64> {
    cfg.f64_or("floup.cutoff_tol", DEFAULT_CUTOFF_TOL)
}

/// FLOUP rate a model needs: its friction coefficient, or half of it for the
/// squared FLOUP.
pub fn floup_rate_for(model: &Model) -> f64 {
    match model {
        Model::SquaredFloup { lambda, .. } => lambda / 2.0,
        m => m.lambda(),
    }
}

/// FLOUP rate from `floup.lambda`, checked against the model when one is set.
pub fn floup_rate(cfg: &RunConfig, model: Option<&Model>) -> CliResult<f64> {
    let given: Option<f64> = cfg.get("floup.lambda")?;
    match (given, model) {
        (Some(l), Some(m)) => {
            let need = floup_rate_for(m);
            if (l - need).abs() > 1e-12 * need {
                return Err(CliError::Config(format!(
                    "model/floup rate mismatch: model '{}' needs floup.lambda = {need}, got {l}",
                    m.id()
                )));
            }
            Ok(l)
        }
        (Some(l), None) => Ok(l),
        (None, Some(m)) => Ok(floup_rate_for(m)),
        (None, None) => Err(CliError::Config("missing required key `floup.lambda`".into())),
    }
}

/// Solution path of a catalog model driven by `run`: the stationary
/// solution, or the solution started at `(tau, z)`.
pub fn model_path(model: &Model, run: &FloupRun, start: Option<(f64, f64)>) -> CliResult<SamplePath> {
    if let Model::SquaredFloup { lambda, sigma } = *model {
        if start.is_some() {
            return Err(CliError::Config("squared-floup has no initial-value form; drop model.tau".into()));
        }
        return Ok(squared_floup(&run.floup, sigma, lambda, lambda / 2.0)?);
    }
    let triple = catalog(model)?;
    Ok(match start {
        Some((tau, z)) => solve_sde(&triple, &run.floup, triple.lambda, tau, z)?,
        None => stationary_solution(&triple, &run.floup)?,
    })
}
