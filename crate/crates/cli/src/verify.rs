//! Verification suites: each returns one row per check.

use std::fmt::Write as _;

use flevy::analytics::{
    compare_covariance_refined, lrd_slope, run_ensemble, CovarianceSource, EnsembleConfig, EnsembleStats, Observable,
};
use flevy::floup::{euler_langevin, floup_via_ibp, gripenberg_norros, langevin_residual, ou_operator, FloupParams};
use flevy::flp::floup_characteristic_function;
use flevy::levy::{mix_seed, replicate_seed};
use flevy::quad::{integrate, integrate_to_infinity, QuadOptions};
use flevy::sst::{catalog, residual_check, squared_floup_forms, Coefficients, Model};
use flevy::special::gamma;
use flevy::young::{chain_rule_residual, cumulative_rs_integral, p_variation_of, rs_integral};
use flevy::{FlpParams, GridFunction, LevyDriverSpec, SamplePath};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::pipeline::{cutoff_tol, floup_rate_for, floup_run, flp_path, model_path, FloupRun};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Covariance,
    Lrd,
    Langevin,
    SstResidual,
    AppendixCalculus,
    GammaIdentities,
    CharacteristicFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn within(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            observed,
            tolerance,
            pass: (observed - expected).abs() <= tolerance,
        }
    }

    fn relative(name: impl Into<String>, expected: f64, observed: f64, rel: f64) -> Self {
        let mut c = Self::within(name, expected, observed, rel * expected.abs());
        c.tolerance = rel;
        c
    }
}

pub fn render(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
    let mut s = format!("{:<width$}  {:>24}  {:>24}  {:>10}  status\n", "check", "expected", "observed", "tolerance");
    for c in checks {
        let _ = writeln!(
            s,
            "{:<width$}  {:>24.15e}  {:>24.15e}  {:>10.3e}  {}",
            c.name,
            c.expected,
            c.observed,
            c.tolerance,
            if c.pass { "PASS" } else { "FAIL" }
        );
    }
    s
}

pub fn run_suite(suite: Suite, cfg: &RunConfig) -> CliResult<Vec<Check>> {
    match suite {
        Suite::Covariance => covariance(cfg),
        Suite::Lrd => lrd(cfg),
        Suite::Langevin => langevin(cfg),
        Suite::SstResidual => sst_residual(cfg),
        Suite::AppendixCalculus => appendix_calculus(cfg),
        Suite::GammaIdentities => gamma_identities(cfg),
        Suite::CharacteristicFunction => characteristic_function(cfg),
    }
}

/// Deterministic uniform on [0, 1) from a seed and a counter.
fn uniform(seed: u64, i: u64) -> f64 {
    (mix_seed(replicate_seed(seed, i)) >> 11) as f64 / (1u64 << 53) as f64
}

fn seeded_driver(cfg: &RunConfig) -> CliResult<(LevyDriverSpec, u64)> {
    let seed = cfg.seed()?;
    Ok((cfg.driver()?, seed))
}

fn refined(flp: &FlpParams) -> CliResult<FlpParams> {
    Ok(FlpParams::new(flp.d, 2 * flp.n)?.with_window_exponent(flp.past_window_exponent)?)
}

fn grid_times(times: &[f64], flp: &FlpParams) -> Vec<f64> {
    let n = flp.n as f64;
    let mut out: Vec<f64> = times.iter().map(|t| (t * n).round() / n).collect();
    out.dedup();
    out
}

/// Ensembles at `n` and `2n` on the same replicate seeds. The `n` run is
/// compared, with its discretization bias estimated as `Δ·2^r/(2^r − 1)`
/// from the difference `Δ` of the two runs and the truncation rate `r`.
fn refined_comparison(
    label: &str,
    cfg: EnsembleConfig,
    source: CovarianceSource,
    pairs: &[(f64, f64)],
    rate: f64,
    checks: &mut Vec<Check>,
) -> CliResult<()> {
    let fine_flp = refined(&cfg.flp)?;
    let coarse = run_ensemble(&cfg)?;
    let fine = run_ensemble(&EnsembleConfig { flp: fine_flp, ..cfg })?;
    // comparing the n run: its bias is the fine run's bias times 2^r
    let report = compare_covariance_refined(&fine, &coarse, source, pairs, rate, 3.0)?;
    for r in &report.rows {
        let allowance = r.bias_allowance * 2f64.powf(rate);
        checks.push(Check::within(
            format!("{label} cov({}, {})", r.t, r.s),
            r.analytic,
            r.empirical,
            3.0 * r.se + allowance,
        ));
    }
    Ok(())
}

fn covariance(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let (driver, seed) = seeded_driver(cfg)?;
    let flp = cfg.flp()?;
    let m: usize = cfg.get_or("ensemble.replicates", 10_000)?;
    let reference_d = cfg.f64_or("ensemble.reference_d", flp.d)?;
    let m2 = driver.second_moment();
    let rate = (flp.past_window_exponent - 1.0).max(1.0) * (1.0 - 2.0 * flp.d);
    let times = grid_times(&cfg.list("ensemble.times")?.unwrap_or(vec![0.5, 1.0]), &flp);
    let pairs: Vec<(f64, f64)> = (0..times.len())
        .flat_map(|i| (i..times.len()).map(move |j| (i, j)))
        .map(|(i, j)| (times[j], times[i]))
        .collect();
    let mut checks = Vec::new();
    let ens = EnsembleConfig::new(m, driver.clone(), flp.clone(), Observable::Flp, times, seed);
    refined_comparison(
        "flp",
        ens,
        CovarianceSource::Flp { d: reference_d, m2 },
        &pairs,
        rate,
        &mut checks,
    )?;
    if let Some(lambda) = cfg.get::<f64>("floup.lambda")? {
        let floup = FloupParams::adaptive(lambda, flp.d, cutoff_tol(cfg)?, 0.0)?;
        let times = grid_times(&[0.0, 1.0], &flp);
        let ens = EnsembleConfig::new(m, driver, flp.clone(), Observable::Floup(floup), times.clone(), seed ^ 1);
        let source = CovarianceSource::Floup {
            d: reference_d,
            lambda,
            m2,
            quad_tol: 1e-9,
        };
        refined_comparison("floup", ens, source, &[(0.0, 0.0), (times[1], 0.0)], rate, &mut checks)?;
    }
    Ok(checks)
}

fn floup_ensemble_setup(cfg: &RunConfig) -> CliResult<(LevyDriverSpec, u64, FlpParams, f64, FloupParams, usize)> {
    let (driver, seed) = seeded_driver(cfg)?;
    let flp = cfg.flp()?;
    let lambda = cfg.f64_or("floup.lambda", 1.0)?;
    let floup = FloupParams::adaptive(lambda, flp.d, cutoff_tol(cfg)?, 0.0)?;
    let m: usize = cfg.get_or("ensemble.replicates", 10_000)?;
    Ok((driver, seed, flp, lambda, floup, m))
}

fn lrd(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let (driver, seed, flp, lambda, floup, m) = floup_ensemble_setup(cfg)?;
    let s_min = cfg.f64_or("ensemble.lag_min", 5.0)?;
    let s_max = cfg.f64_or("ensemble.lag_max", 50.0)?;
    let count: usize = cfg.get_or("ensemble.lags", 10)?;
    let tol = cfg.f64_or("ensemble.slope_tol", 0.15)?;
    if s_min < 5.0 / lambda || !(s_max > s_min) || count < 5 {
        return Err(CliError::Config(format!(
            "need 5/λ ≤ lag_min < lag_max and at least 5 lags, got [{s_min}, {s_max}] with {count}"
        )));
    }
    let lags: Vec<f64> = (0..count)
        .map(|k| s_min * (s_max / s_min).powf(k as f64 / (count - 1) as f64))
        .collect();
    let mut times = vec![0.0];
    times.extend(grid_times(&lags, &flp));
    let mut ens = EnsembleConfig::new(m, driver, flp.clone(), Observable::Floup(floup), times, seed);
    ens.pairs = (1..ens.times.len()).map(|j| (0, j)).collect();
    let stats = run_ensemble(&ens)?;
    let fit = lrd_slope(&stats, s_min, s_max)?;
    Ok(vec![Check::within(
        format!("autocovariance slope over [{s_min}, {s_max}]"),
        2.0 * flp.d - 1.0,
        fit.slope,
        tol,
    )])
}

/// FLP on `[start, t_max]` with `start` on the grid of the coarsest level.
fn nested_flp(cfg: &RunConfig, lambda: f64, levels: u32, t_max: f64) -> CliResult<(SamplePath, FloupParams)> {
    let (driver, _) = seeded_driver(cfg)?;
    let flp = cfg.flp()?;
    let coarse_dt = flp.dt() * (1u64 << levels) as f64;
    let adaptive = FloupParams::adaptive(lambda, flp.d, cutoff_tol(cfg)?, 0.0)?;
    let start = (adaptive.past_cutoff / coarse_dt).floor() * coarse_dt;
    let path = flp_path(&driver, &flp, start, t_max)?;
    let params = FloupParams::new(lambda, path.t0())?;
    Ok((path, params))
}

fn halving_checks(label: &str, errors: &[f64], checks: &mut Vec<Check>) {
    for (k, w) in errors.windows(2).enumerate() {
        checks.push(Check::within(format!("{label} ratio, halving {}", k + 1), 2.0, w[0] / w[1], 0.4));
    }
}

fn langevin(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let lambda = cfg.f64_or("floup.lambda", 1.0)?;
    let levels: u32 = cfg.get_or("ensemble.refinements", 3)?;
    let t_max = cfg.f64_or("output.t_max", 10.0)?;
    let (fine, params) = nested_flp(cfg, lambda, levels, t_max)?;
    let mut discrepancy = Vec::new();
    let mut residual = Vec::new();
    let mut checks = Vec::new();
    for level in (0..=levels).rev() {
        let flp = fine.subsample(1 << level)?;
        let ibp = floup_via_ibp(&flp, &params, 0.0, t_max)?;
        let euler = euler_langevin(&flp, lambda, 0.0, ibp[0])?;
        let gap = ibp
            .values()
            .iter()
            .zip(euler.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        discrepancy.push(gap);
        let x = ou_operator(&euler, lambda, 0.0, ibp[0] + 1.0)?;
        residual.push(langevin_residual(&x, &flp.restrict(0.0, t_max)?, lambda)?);
    }
    halving_checks("ibp vs euler discrepancy", &discrepancy, &mut checks);
    halving_checks("ou-operator langevin residual", &residual, &mut checks);

    // exponential forgetting of the start value
    let tau = cfg.f64_or("model.tau", t_max / 2.0)?;
    let ibp = floup_via_ibp(&fine, &params, 0.0, t_max)?;
    let (z1, z2) = (ibp.value_at(tau)? + 1.5, ibp.value_at(tau)? - 0.5);
    let a = ou_operator(&ibp, lambda, tau, z1)?;
    let b = ou_operator(&ibp, lambda, tau, z2)?;
    let worst = (0..a.len())
        .map(|i| {
            let want = (-lambda * (a.time(i) - tau)).exp() * (z1 - z2).abs();
            ((a[i] - b[i]).abs() - want).abs() / want
        })
        .fold(0.0, f64::max);
    checks.push(Check::within("ou-operator forgetting, max relative error", 0.0, worst, 1e-12));
    checks.extend(forgetting_in_transform_coordinates(cfg, t_max)?);
    Ok(checks)
}

/// Catalog models whose diffusion coefficient has no zero in the state space.
fn zero_free_models() -> Vec<(&'static str, Model)> {
    vec![
        ("power gamma=0", Model::Power { gamma: 0.0, alpha: 0.5, beta: -1.0, sigma0: 1.0 }),
        ("power gamma=1", Model::Power { gamma: 1.0, alpha: 0.0, beta: -1.0, sigma0: 1.0 }),
        ("trig", Model::Trig { sigma1: 1.0, sigma2: 1.0 }),
        ("log", Model::Log { lambda: 1.0, sigma: 1.0 }),
    ]
}

fn forgetting_in_transform_coordinates(cfg: &RunConfig, t_max: f64) -> CliResult<Vec<Check>> {
    let (driver, _) = seeded_driver(cfg)?;
    let flp = cfg.flp()?;
    let mut checks = Vec::new();
    for (name, model) in zero_free_models() {
        let triple = catalog(&model)?;
        let lambda = triple.lambda;
        let run = floup_run(&driver, &flp, lambda, cutoff_tol(cfg)?, 0.0, t_max)?;
        let tau = (t_max / 2.0 * flp.n as f64).round() / flp.n as f64;
        let centre = run.floup.value_at(tau)?;
        let (z1, z2) = ((triple.f)(centre + 0.5), (triple.f)(centre - 0.5));
        let start = Some((tau, z1));
        let a = model_path(&model, &run, start)?;
        let b = model_path(&model, &run, Some((tau, z2)))?;
        let d0 = ((triple.f_inv)(z1) - (triple.f_inv)(z2)).abs();
        // the difference shrinks like e^{−λ(t−τ)}; beyond 2/λ it falls into
        // the round-off of f_inv ∘ f
        let horizon = tau + 2.0 / lambda;
        let worst = (0..a.len())
            .filter(|&i| a.time(i) <= horizon + 1e-12)
            .map(|i| {
                let got = ((triple.f_inv)(a[i]) - (triple.f_inv)(b[i])).abs();
                let want = (-lambda * (a.time(i) - tau)).exp() * d0;
                (got - want).abs() / want
            })
            .fold(0.0, f64::max);
        checks.push(Check::within(format!("{name} forgetting in f_inv coordinates"), 0.0, worst, 1e-12));
    }
    Ok(checks)
}

fn residual_models() -> Vec<(&'static str, Model)> {
    vec![
        ("power gamma=0", Model::Power { gamma: 0.0, alpha: 0.5, beta: -1.0, sigma0: 1.0 }),
        ("power gamma=1/2", Model::Power { gamma: 0.5, alpha: 0.0, beta: -1.0, sigma0: 1.0 }),
        ("power gamma=1", Model::Power { gamma: 1.0, alpha: 0.0, beta: -1.0, sigma0: 1.0 }),
        ("affine-drift delta=1/2", Model::AffineDrift { alpha: 1.0, beta: -1.0, delta: 0.5, sigma1: 1.0, sigma2: 1.0 }),
        ("trig", Model::Trig { sigma1: 1.0, sigma2: 1.0 }),
        ("cir", Model::Cir { gamma: 2.0, sigma: 1.0 }),
        ("log", Model::Log { lambda: 1.0, sigma: 1.0 }),
        ("squared-floup", Model::SquaredFloup { lambda: 1.0, sigma: 1.0 }),
    ]
}

/// Solutions of each model at `n`, `2n` and `4n` on the same drivers. Every
/// run must stay in the state space at every mesh. The residual must shrink
/// at each halving on the mean over runs: a single run can stall for one
/// halving when a jump time sits near a cell boundary.
fn sst_residual(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let seed = cfg.seed()?;
    let driver = cfg.driver()?;
    let base = cfg.flp()?;
    let meshes = [base.clone(), refined(&base)?, refined(&refined(&base)?)?];
    let runs: u64 = cfg.get_or("ensemble.runs", 20)?;
    let t_max = cfg.f64_or("output.t_max", 10.0)?;
    let models = match cfg.model()? {
        Some(m) => vec![(m.id(), m)],
        None => residual_models(),
    };
    let mut checks = Vec::new();
    for (name, model) in models {
        let forms: Vec<(String, Coefficients)> = match model {
            Model::SquaredFloup { lambda, sigma } => {
                let (abs_form, root_form) = squared_floup_forms(lambda, sigma);
                vec![(format!("{name} (|x| form)"), abs_form), (format!("{name} (sqrt form)"), root_form)]
            }
            ref m => vec![(name.to_string(), catalog(m)?.coefficients())],
        };
        let lambda = floup_rate_for(&model);
        // residual[form][mesh][run]
        let mut residual = vec![vec![Vec::new(); meshes.len()]; forms.len()];
        let mut contained = vec![0u64; forms.len()];
        for r in 0..runs {
            let spec = driver.with_seed(replicate_seed(seed, r));
            let mut inside = vec![true; forms.len()];
            for (level, mesh) in meshes.iter().enumerate() {
                let run: FloupRun = floup_run(&spec, mesh, lambda, cutoff_tol(cfg)?, 0.0, t_max)?;
                let x = model_path(&model, &run, None)?;
                for (k, (_, coeffs)) in forms.iter().enumerate() {
                    let rep = residual_check(&x, coeffs, &run.flp, f64::INFINITY)?;
                    inside[k] &= rep.exit_time.is_none();
                    residual[k][level].push(rep.max_residual);
                }
            }
            for (k, ok) in inside.iter().enumerate() {
                contained[k] += *ok as u64;
            }
        }
        for (k, (label, _)) in forms.iter().enumerate() {
            let res = &residual[k];
            checks.push(Check::within(format!("{label}: runs inside the state space"), runs as f64, contained[k] as f64, 0.0));
            let mean = |v: &Vec<f64>| v.iter().sum::<f64>() / v.len() as f64;
            for w in 0..meshes.len() - 1 {
                let ratio = mean(&res[w]) / mean(&res[w + 1]);
                let mut c = Check::within(
                    format!("{label}: mean residual ratio n={} to n={} (must exceed 1)", meshes[w].n, meshes[w + 1].n),
                    1.0,
                    ratio,
                    0.0,
                );
                c.pass = ratio > 1.0;
                checks.push(c);
            }
        }
    }
    Ok(checks)
}

fn brute_force_p_variation(v: &[f64], p: f64) -> f64 {
    let inner = v.len() - 2;
    (0u32..(1 << inner))
        .map(|mask| {
            let mut prev = v[0];
            let mut s = 0.0;
            for (k, &x) in v.iter().enumerate().skip(1) {
                if k == v.len() - 1 || mask & (1 << (k - 1)) != 0 {
                    s += (x - prev).abs().powf(p);
                    prev = x;
                }
            }
            s
        })
        .fold(0.0, f64::max)
}

fn appendix_calculus(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let seed: u64 = cfg.get_or("ensemble.seed", 0)?;
    let instances: u64 = cfg.get_or("ensemble.instances", 1000)?;
    let mut checks = Vec::new();
    let mut counter = 0u64;
    let mut next = || {
        counter += 1;
        4.0 * uniform(seed, counter) - 2.0
    };

    // ∫f d(∫h dg) = ∫fh dg on any grid
    let mut worst: f64 = 0.0;
    for k in 0..instances {
        let len = 2 + (uniform(seed ^ 7, k) * 200.0) as usize;
        let rows: Vec<(f64, f64, f64)> = (0..len).map(|_| (next(), next(), next())).collect();
        let g = |k: usize| GridFunction::new(0.0, 1.0, rows.iter().map(|r| [r.0, r.1, r.2][k]).collect());
        let (f, h, gg) = (g(0)?, g(1)?, g(2)?);
        let fh = GridFunction::new(0.0, 1.0, rows.iter().map(|r| r.0 * r.1).collect())?;
        let lhs = rs_integral(&f, &cumulative_rs_integral(&h, &gg)?)?;
        let rhs = rs_integral(&fh, &gg)?;
        let scale: f64 = rows.iter().map(|r| (r.0 * r.1 * r.2).abs()).sum::<f64>().max(1.0);
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    checks.push(Check::within("density formula, max scaled defect", 0.0, worst, 1e-12));

    // chain rule for F(x) = x² under refinement
    let square = |x: f64| x * x;
    let twice = |x: f64| 2.0 * x;
    let smooth: Vec<f64> = [100usize, 200, 400]
        .iter()
        .map(|&n| {
            let g = GridFunction::from_fn(0.0, 1.0 / n as f64, n + 1, |t| (3.0 * t).sin() + t * t)?;
            Ok(chain_rule_residual(square, twice, &g))
        })
        .collect::<CliResult<_>>()?;
    let (driver, _) = seeded_driver(cfg)?;
    let d = cfg.f64_or("flp.d", 0.35)?;
    let rough: Vec<f64> = [50usize, 100, 200]
        .iter()
        .map(|&n| {
            let p = FlpParams::new(d, n)?;
            let path = flp_path(&driver, &p, 0.0, 1.0)?;
            Ok(chain_rule_residual(square, twice, &path))
        })
        .collect::<CliResult<_>>()?;
    for (label, seq) in [("deterministic", &smooth), ("flp", &rough)] {
        for (k, w) in seq.windows(2).enumerate() {
            let mut c = Check::within(format!("chain rule residual ratio on {label} path, halving {} (must exceed 1)", k + 1), 1.0, w[0] / w[1], 0.0);
            c.pass = w[1] < w[0];
            checks.push(c);
        }
    }

    // p-variation by dynamic programming against enumeration
    let mut mismatches = 0u64;
    for k in 0..instances {
        let len = 2 + (uniform(seed ^ 11, k) * 11.0) as usize;
        let v: Vec<f64> = (0..len).map(|_| next()).collect();
        let p = 1.0 + 3.0 * uniform(seed ^ 13, k);
        let dp = p_variation_of(&v, p)?;
        let brute = brute_force_p_variation(&v, p);
        if (dp - brute).abs() > 1e-12 * brute.max(1.0) {
            mismatches += 1;
        }
    }
    checks.push(Check::within("p-variation mismatches, <= 12 nodes", 0.0, mismatches as f64, 0.0));
    Ok(checks)
}

/// `∫_{−∞}^{t∧s} (t−u)^{d−1}(s−u)^{d−1} du` by quadrature.
fn gripenberg_norros_quadrature(t: f64, s: f64, d: f64) -> CliResult<f64> {
    let gap = (t - s).abs();
    let f = |v: f64| v.powf(d - 1.0) * (v + gap).powf(d - 1.0);
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-11,
        max_intervals: 20_000,
    };
    let near = integrate(f, 0.0, gap, opts)?;
    let far = integrate_to_infinity(f, gap, opts)?;
    Ok(near.value + far.value)
}

fn gamma_identities(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let seed: u64 = cfg.get_or("ensemble.seed", 0)?;
    let count: u64 = cfg.get_or("ensemble.instances", 20)?;
    let mut checks = vec![
        Check::relative("gamma(1/2)", std::f64::consts::PI.sqrt(), gamma(0.5), 1e-13),
        Check::relative("gamma(5)", 24.0, gamma(5.0), 1e-13),
        Check::relative(
            "gamma(0.3) gamma(0.7)",
            std::f64::consts::PI / (0.3 * std::f64::consts::PI).sin(),
            gamma(0.3) * gamma(0.7),
            1e-13,
        ),
    ];
    for k in 0..count {
        let t = 10.0 * uniform(seed, 3 * k) - 5.0;
        let s = 10.0 * uniform(seed, 3 * k + 1) - 5.0;
        let d = 0.05 + 0.4 * uniform(seed, 3 * k + 2);
        let closed = gripenberg_norros(t, s, d)?;
        let quad = gripenberg_norros_quadrature(t, s, d)?;
        checks.push(Check::relative(
            format!("gripenberg-norros t={t:.4} s={s:.4} d={d:.4}"),
            quad,
            closed,
            1e-6,
        ));
    }
    Ok(checks)
}

fn characteristic_function(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let (driver, seed, flp, lambda, floup, m) = floup_ensemble_setup(cfg)?;
    let us = cfg.list("ensemble.u")?.unwrap_or(vec![0.25, 0.5, 1.0]);
    let ens = EnsembleConfig::new(m, driver.clone(), flp.clone(), Observable::Floup(floup), vec![0.0], seed)
        .with_ecf(us.iter().map(|&u| (0, u)).collect());
    let stats: EnsembleStats = run_ensemble(&ens)?;
    let mut checks = Vec::new();
    for e in &stats.ecf {
        let phi = floup_characteristic_function(&driver, flp.d, lambda, &[0.0], &[e.u], 1e-9)?;
        checks.push(Check::within(format!("cf(u={}) real part", e.u), phi.re, e.re, 3.0 * e.re_se));
        checks.push(Check::within(format!("cf(u={}) imaginary part", e.u), phi.im, e.im, 3.0 * e.im_se));
    }
    Ok(checks)
}
