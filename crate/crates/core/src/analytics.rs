//! Monte Carlo ensembles and the statistics used to check simulated paths
//! against analytic results.
//!
//! Replicates are never built as dense paths. Each observation is a fixed
//! linear functional of the driver increments, so a replicate is evaluated
//! from its list of jump arrivals against precomputed response tables, plus a
//! deterministic compensator term.

use rayon::prelude::*;

use crate::error::{invalid, FlevyError, Result};
use crate::floup::{floup_autocovariance, floup_stationary_variance, ExpStep, FloupParams};
use crate::flp::{convolve, flp_covariance, power_table, FlpParams};
use crate::levy::{cell_of, replicate_seed, LevyDriverSpec};
use crate::path::SamplePath;
use crate::special::CompensatedSum;
use crate::sst::{catalog, Model, RealFn};
use crate::stats::{CoMoments, Moments};

/// Largest response table an ensemble may allocate.
pub const MAX_TABLE_LEN: usize = 40_000_000;
const CHUNK: usize = 256;
const DIRECT_TABLE_TERMS: f64 = 2e7;

#[derive(Debug, Clone, PartialEq)]
pub enum Observable {
    Driver,
    Flp,
    /// The cutoff span `t_first − past_cutoff` (with `t_first` the earliest
    /// observation time) is applied relative to every observation time.
    Floup(FloupParams),
}

#[derive(Debug, Clone)]
pub struct EnsembleConfig {
    pub replicates: usize,
    pub driver: LevyDriverSpec,
    pub flp: FlpParams,
    pub observable: Observable,
    /// Stationary transform applied to FLOUP observations.
    pub model: Option<Model>,
    pub times: Vec<f64>,
    /// Index pairs into `times` whose covariance is estimated.
    pub pairs: Vec<(usize, usize)>,
    /// `(time index, u)` points of the empirical characteristic function.
    pub ecf: Vec<(usize, f64)>,
    pub seed: u64,
}

impl EnsembleConfig {
    /// Config with every pair `i ≤ j` of observation times and no
    /// characteristic-function points.
    pub fn new(
        replicates: usize,
        driver: LevyDriverSpec,
        flp: FlpParams,
        observable: Observable,
        times: Vec<f64>,
        seed: u64,
    ) -> Self {
        let k = times.len();
        let pairs = (0..k).flat_map(|i| (i..k).map(move |j| (i, j))).collect();
        Self {
            replicates,
            driver,
            flp,
            observable,
            model: None,
            times,
            pairs,
            ecf: Vec::new(),
            seed,
        }
    }

    pub fn with_model(mut self, model: Model) -> Self {
        self.model = Some(model);
        self
    }

    pub fn with_ecf(mut self, points: Vec<(usize, f64)>) -> Self {
        self.ecf = points;
        self
    }

    /// Replicate `index` of the driver, as used by `run_ensemble`.
    pub fn replicate_driver(&self, index: u64) -> LevyDriverSpec {
        self.driver.with_seed(replicate_seed(self.seed, index))
    }
}

enum Weights {
    Driver,
    /// `T(j−k) − T(−k)` when anchored at the origin, else `T(j−k)`.
    Kernel { table: Vec<f64>, anchored: bool },
}

/// Each observation as a linear functional of the driver cells.
struct ResponsePlan {
    resolution: f64,
    dt: f64,
    nodes: Vec<i64>,
    /// Cells `[cell_lo, cell_hi)` that carry weight for some observation.
    cell_lo: i64,
    cell_hi: i64,
    weights: Weights,
    compensator: Vec<f64>,
    transform: Option<RealFn>,
}

impl ResponsePlan {
    fn build(cfg: &EnsembleConfig) -> Result<Self> {
        cfg.driver.validate()?;
        cfg.flp.validate()?;
        if cfg.replicates < 2 {
            return Err(invalid("replicates", format!("need at least 2, got {}", cfg.replicates)));
        }
        if cfg.times.is_empty() {
            return Err(invalid("times", "at least one observation time is required"));
        }
        let k = cfg.times.len();
        if let Some(&(i, j)) = cfg.pairs.iter().find(|p| p.0 >= k || p.1 >= k) {
            return Err(invalid("pairs", format!("pair ({i}, {j}) refers past {k} observation times")));
        }
        if let Some(&(i, u)) = cfg.ecf.iter().find(|p| p.0 >= k || !p.1.is_finite()) {
            return Err(invalid("ecf", format!("point ({i}, {u}) is not usable")));
        }
        let dt = cfg.flp.dt();
        let resolution = 1.0 / dt;
        let nodes = cfg
            .times
            .iter()
            .map(|&t| {
                let x = t * resolution;
                let j = x.round();
                if !t.is_finite() || (x - j).abs() > 1e-6 * x.abs().max(1.0) {
                    Err(FlevyError::OffGrid { time: t })
                } else {
                    Ok(j as i64)
                }
            })
            .collect::<Result<Vec<i64>>>()?;
        let j_min = *nodes.iter().min().expect("non-empty");
        let j_max = *nodes.iter().max().expect("non-empty");
        let window = -cfg.flp.window_cells();

        let transform = match (&cfg.model, &cfg.observable) {
            (None, _) => None,
            (Some(m), Observable::Floup(p)) => {
                if ((m.lambda() - p.lambda) / p.lambda).abs() > 1e-12 {
                    return Err(invalid(
                        "model",
                        format!("model rate {} does not match FLOUP rate {}", m.lambda(), p.lambda),
                    ));
                }
                Some(catalog(m)?.f)
            }
            (Some(_), _) => return Err(invalid("model", "a state-space model needs the FLOUP observable")),
        };

        let check_len = |len: i64| -> Result<usize> {
            if len as usize > MAX_TABLE_LEN {
                Err(FlevyError::GridTooLarge {
                    nodes: len as usize,
                    cap: MAX_TABLE_LEN,
                })
            } else {
                Ok(len as usize)
            }
        };

        let (cell_lo, cell_hi, weights) = match &cfg.observable {
            Observable::Driver => (j_min.min(0), j_max.max(0), Weights::Driver),
            Observable::Flp => {
                if j_min < window {
                    return Err(FlevyError::WindowNotCovered(format!(
                        "observation at {} precedes the kernel window start {}",
                        j_min as f64 * dt,
                        cfg.flp.window_start()
                    )));
                }
                let len = check_len(j_max.max(0) - window + 1)?;
                let table = power_table(cfg.flp.d, cfg.flp.n, len);
                (window, j_max.max(0), Weights::Kernel { table, anchored: true })
            }
            Observable::Floup(p) => {
                p.validate()?;
                let span = cells_back(j_min as f64 * dt - p.past_cutoff, dt);
                if span < 1 {
                    return Err(invalid("past_cutoff", "must precede the earliest observation"));
                }
                if j_min - span < window {
                    return Err(FlevyError::WindowNotCovered(format!(
                        "FLOUP cutoff {} precedes the kernel window start {}",
                        (j_min - span) as f64 * dt,
                        cfg.flp.window_start()
                    )));
                }
                let len = check_len(j_max - window + 1)?;
                let c = power_table(cfg.flp.d, cfg.flp.n, len);
                let table = floup_table(&c, &ibp_coefficients(p.lambda, dt, span as usize));
                (window, j_max, Weights::Kernel { table, anchored: false })
            }
        };

        let mut plan = ResponsePlan {
            resolution,
            dt,
            nodes,
            cell_lo,
            cell_hi,
            weights,
            compensator: Vec::new(),
            transform,
        };
        let rate = cfg.driver.compensator_rate();
        plan.compensator = plan
            .nodes
            .iter()
            .map(|&j| {
                let total: CompensatedSum = (plan.cell_lo..plan.cell_hi).map(|k| plan.weight(j, k)).collect();
                rate * dt * total.value()
            })
            .collect();
        Ok(plan)
    }

    #[inline]
    fn weight(&self, j: i64, k: i64) -> f64 {
        match &self.weights {
            Weights::Driver => {
                if 0 <= k && k < j {
                    1.0
                } else if j <= k && k < 0 {
                    -1.0
                } else {
                    0.0
                }
            }
            Weights::Kernel { table, anchored } => {
                let at = |m: i64| if m > 0 { table[m as usize] } else { 0.0 };
                if k < self.cell_lo {
                    0.0
                } else if *anchored {
                    if k < j.max(0) {
                        at(j - k) - at(-k)
                    } else {
                        0.0
                    }
                } else {
                    at(j - k)
                }
            }
        }
    }

    fn evaluate(&self, driver: &LevyDriverSpec) -> Vec<f64> {
        let arrivals = driver.arrivals(self.cell_lo as f64 * self.dt, self.cell_hi as f64 * self.dt);
        let mut out = vec![0.0; self.nodes.len()];
        for a in &arrivals {
            let k = cell_of(a.time, self.resolution);
            if k < self.cell_lo || k >= self.cell_hi {
                continue;
            }
            match &self.weights {
                Weights::Kernel { table, anchored: false } => {
                    for (o, &j) in out.iter_mut().zip(&self.nodes) {
                        if j > k {
                            *o += table[(j - k) as usize] * a.size;
                        }
                    }
                }
                _ => {
                    for (o, &j) in out.iter_mut().zip(&self.nodes) {
                        *o += self.weight(j, k) * a.size;
                    }
                }
            }
        }
        for (o, c) in out.iter_mut().zip(&self.compensator) {
            *o -= c;
        }
        if let Some(f) = &self.transform {
            for o in out.iter_mut() {
                *o = f(*o);
            }
        }
        out
    }
}

fn cells_back(span: f64, dt: f64) -> i64 {
    (span / dt - 1e-9).ceil() as i64
}

/// Weights `β_q` with `𝓛_j = Σ_q β_q L^d_{j−q}` for the product-trapezoid
/// integration by parts over `span` cells.
fn ibp_coefficients(lambda: f64, dt: f64, span: usize) -> Vec<f64> {
    let step = ExpStep::new(lambda, dt);
    let mut beta = vec![0.0; span + 1];
    beta[0] = 1.0;
    beta[span] -= (-lambda * span as f64 * dt).exp();
    let mut pow = 1.0;
    for q in 0..=span {
        // pow = decay^q
        if q < span {
            beta[q] -= lambda * pow * step.w_right;
        }
        if q + 1 <= span {
            beta[q + 1] -= lambda * pow * step.w_left;
        }
        pow *= step.decay;
    }
    beta
}

/// `R(m) = Σ_q β_q c(m−q)` for `m < c.len()`.
fn floup_table(c: &[f64], beta: &[f64]) -> Vec<f64> {
    if c.len() as f64 * beta.len() as f64 <= DIRECT_TABLE_TERMS {
        (0..c.len())
            .map(|m| {
                let s: CompensatedSum = (0..beta.len().min(m + 1)).map(|q| beta[q] * c[m - q]).collect();
                s.value()
            })
            .collect()
    } else {
        let mut r = convolve(beta, c);
        r.truncate(c.len());
        r
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub time: f64,
    pub mean: f64,
    pub mean_se: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub third: f64,
    pub third_se: f64,
    pub skewness: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PairEstimate {
    pub i: usize,
    pub j: usize,
    pub t: f64,
    pub s: f64,
    pub covariance: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EcfEstimate {
    pub time: f64,
    pub u: f64,
    pub re: f64,
    pub im: f64,
    pub re_se: f64,
    pub im_se: f64,
}

impl EcfEstimate {
    pub fn modulus(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub replicates: usize,
    pub moments: Vec<MomentEstimate>,
    pub pairs: Vec<PairEstimate>,
    pub ecf: Vec<EcfEstimate>,
}

impl EnsembleStats {
    /// Covariance estimate for the observation times `t` and `s`, in either order.
    pub fn pair_at(&self, t: f64, s: f64) -> Option<&PairEstimate> {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(1.0);
        self.pairs
            .iter()
            .find(|p| (close(p.t, t) && close(p.s, s)) || (close(p.t, s) && close(p.s, t)))
    }

    pub fn moment_at(&self, t: f64) -> Option<&MomentEstimate> {
        self.moments.iter().find(|m| (m.time - t).abs() <= 1e-9 * t.abs().max(1.0))
    }

    /// `(lag, covariance, se)` for the pairs that start at the first observation time.
    pub fn lag_table(&self) -> Vec<(f64, f64, f64)> {
        let mut rows: Vec<_> = self
            .pairs
            .iter()
            .filter_map(|p| match (p.i, p.j) {
                (0, j) if j > 0 => Some((p.s - p.t, p.covariance, p.se)),
                (i, 0) if i > 0 => Some((p.t - p.s, p.covariance, p.se)),
                _ => None,
            })
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows
    }
}

struct Accumulators {
    moments: Vec<Moments>,
    pairs: Vec<CoMoments>,
    cos: Vec<Moments>,
    sin: Vec<Moments>,
}

impl Accumulators {
    fn new(cfg: &EnsembleConfig, first: &[f64]) -> Self {
        let ecf_first = |g: fn(f64) -> f64| cfg.ecf.iter().map(|&(i, u)| Moments::new(g(u * first[i]))).collect();
        Self {
            moments: first.iter().map(|&x| Moments::new(x)).collect(),
            pairs: cfg.pairs.iter().map(|&(i, j)| CoMoments::new(first[i], first[j])).collect(),
            cos: ecf_first(f64::cos),
            sin: ecf_first(f64::sin),
        }
    }

    fn push(&mut self, cfg: &EnsembleConfig, x: &[f64]) {
        for (m, &v) in self.moments.iter_mut().zip(x) {
            m.push(v);
        }
        for (c, &(i, j)) in self.pairs.iter_mut().zip(&cfg.pairs) {
            c.push(x[i], x[j]);
        }
        for ((c, s), &(i, u)) in self.cos.iter_mut().zip(self.sin.iter_mut()).zip(&cfg.ecf) {
            let (sn, cs) = (u * x[i]).sin_cos();
            c.push(cs);
            s.push(sn);
        }
    }

    fn finish(self, cfg: &EnsembleConfig) -> EnsembleStats {
        let moments = self
            .moments
            .iter()
            .zip(&cfg.times)
            .map(|(m, &time)| MomentEstimate {
                time,
                mean: m.mean(),
                mean_se: m.mean_se(),
                variance: m.variance(),
                variance_se: m.variance_se(),
                third: m.central(3),
                third_se: m.third_se(),
                skewness: m.skewness(),
            })
            .collect();
        let pairs = self
            .pairs
            .iter()
            .zip(&cfg.pairs)
            .map(|(c, &(i, j))| PairEstimate {
                i,
                j,
                t: cfg.times[i],
                s: cfg.times[j],
                covariance: c.covariance(),
                se: c.covariance_se(),
            })
            .collect();
        let ecf = self
            .cos
            .iter()
            .zip(&self.sin)
            .zip(&cfg.ecf)
            .map(|((c, s), &(i, u))| EcfEstimate {
                time: cfg.times[i],
                u,
                re: c.mean(),
                im: s.mean(),
                re_se: c.mean_se(),
                im_se: s.mean_se(),
            })
            .collect();
        EnsembleStats {
            replicates: cfg.replicates,
            moments,
            pairs,
            ecf,
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = std::env::var("FLEVY_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(n.max(1));
    }
    builder
        .build()
        .map_err(|e| invalid("FLEVY_THREADS", format!("thread pool: {e}")))
}

/// Observation vectors of replicates `range`, in replicate order.
fn replicate_block(cfg: &EnsembleConfig, plan: &ResponsePlan, range: std::ops::Range<usize>) -> Vec<Vec<f64>> {
    range
        .into_par_iter()
        .map(|r| plan.evaluate(&cfg.replicate_driver(r as u64)))
        .collect()
}

/// Observation values of replicate `index`, exactly as `run_ensemble` sees them.
pub fn replicate_observations(cfg: &EnsembleConfig, index: u64) -> Result<Vec<f64>> {
    let plan = ResponsePlan::build(cfg)?;
    Ok(plan.evaluate(&cfg.replicate_driver(index)))
}

/// Streams `cfg.replicates` independent replicates into moment accumulators.
/// The result depends only on the config, not on the thread count.
pub fn run_ensemble(cfg: &EnsembleConfig) -> Result<EnsembleStats> {
    let plan = ResponsePlan::build(cfg)?;
    let pool = thread_pool()?;
    let mut acc: Option<Accumulators> = None;
    let mut start = 0;
    while start < cfg.replicates {
        let end = (start + CHUNK).min(cfg.replicates);
        let block = pool.install(|| replicate_block(cfg, &plan, start..end));
        for (r, row) in block.iter().enumerate() {
            if let Some(bad) = row.iter().position(|v| !v.is_finite()) {
                return Err(FlevyError::StateSpace(format!(
                    "replicate {} gave a non-finite value at t = {}",
                    start + r,
                    cfg.times[bad]
                )));
            }
            acc.get_or_insert_with(|| Accumulators::new(cfg, row)).push(cfg, row);
        }
        start = end;
    }
    Ok(acc.expect("at least two replicates").finish(cfg))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CovarianceSource {
    /// Closed-form FLP covariance.
    Flp { d: f64, m2: f64 },
    /// Stationary FLOUP covariance by the double integral.
    Floup { d: f64, lambda: f64, m2: f64, quad_tol: f64 },
}

impl CovarianceSource {
    pub fn covariance(&self, t: f64, s: f64) -> Result<f64> {
        match *self {
            CovarianceSource::Flp { d, m2 } => flp_covariance(t, s, d, m2),
            CovarianceSource::Floup { d, lambda, m2, quad_tol } => {
                if t == s {
                    floup_stationary_variance(d, lambda, m2)
                } else {
                    floup_autocovariance(t - s, d, lambda, m2, quad_tol)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceRow {
    pub t: f64,
    pub s: f64,
    pub empirical: f64,
    pub se: f64,
    pub analytic: f64,
    pub bias_allowance: f64,
    pub z: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceComparison {
    pub z_limit: f64,
    pub rows: Vec<CovarianceRow>,
}

impl CovarianceComparison {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

fn lookup<'a>(stats: &'a EnsembleStats, t: f64, s: f64) -> Result<&'a PairEstimate> {
    stats
        .pair_at(t, s)
        .ok_or_else(|| FlevyError::InsufficientData(format!("no covariance estimate for the pair ({t}, {s})")))
}

fn row(p: &PairEstimate, analytic: f64, allowance: f64, z_limit: f64) -> CovarianceRow {
    let diff = p.covariance - analytic;
    let z = if p.se > 0.0 {
        diff / p.se
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    CovarianceRow {
        t: p.t,
        s: p.s,
        empirical: p.covariance,
        se: p.se,
        analytic,
        bias_allowance: allowance,
        z,
        pass: diff.abs() <= z_limit * p.se + allowance,
    }
}

/// Empirical against analytic covariance for the requested pairs, with no
/// bias allowance. A pair passes when `|empirical − analytic| ≤ z_limit·se`.
pub fn compare_covariance(
    stats: &EnsembleStats,
    source: CovarianceSource,
    pairs: &[(f64, f64)],
    z_limit: f64,
) -> Result<CovarianceComparison> {
    let rows = pairs
        .iter()
        .map(|&(t, s)| Ok(row(lookup(stats, t, s)?, source.covariance(t, s)?, 0.0, z_limit)))
        .collect::<Result<Vec<_>>>()?;
    Ok(CovarianceComparison { z_limit, rows })
}

/// As `compare_covariance` on the `fine` ensemble, with a discretization
/// bias allowance estimated from a coarse run at half the resolution: the
/// remaining bias of a sequence converging like `n^{−rate}` is
/// `|fine − coarse| / (2^rate − 1)`.
pub fn compare_covariance_refined(
    coarse: &EnsembleStats,
    fine: &EnsembleStats,
    source: CovarianceSource,
    pairs: &[(f64, f64)],
    rate: f64,
    z_limit: f64,
) -> Result<CovarianceComparison> {
    if !(rate > 0.0) {
        return Err(invalid("rate", format!("must be positive, got {rate}")));
    }
    let rows = pairs
        .iter()
        .map(|&(t, s)| {
            let f = lookup(fine, t, s)?;
            let c = lookup(coarse, t, s)?;
            let allowance = (f.covariance - c.covariance).abs() / (2f64.powf(rate) - 1.0);
            Ok(row(f, source.covariance(t, s)?, allowance, z_limit))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CovarianceComparison { z_limit, rows })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Ordinary least squares of `y` on `x` with the residual standard error of the slope.
pub fn ols_fit(x: &[f64], y: &[f64]) -> Result<SlopeFit> {
    let n = x.len();
    if n != y.len() || n < 3 {
        return Err(FlevyError::InsufficientData(format!("need at least 3 paired points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(FlevyError::InsufficientData("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(SlopeFit {
        slope,
        stderr: (rss / (nf - 2.0) / sxx).sqrt(),
        intercept,
        points: n,
    })
}

/// Log-log slope of `|autocovariance|` against lag over `[s_min, s_max]`.
///
/// Needs at least 5 lags in the window. If some estimates there are not
/// positive, the window is widened once (halving `s_min`, doubling `s_max`)
/// and the non-positive lags are dropped; failing that the offending lags are
/// reported.
pub fn lrd_slope_from_table(table: &[(f64, f64)], s_min: f64, s_max: f64) -> Result<SlopeFit> {
    if !(s_min > 0.0 && s_max > s_min) {
        return Err(invalid("lag_window", format!("need 0 < s_min < s_max, got [{s_min}, {s_max}]")));
    }
    let inside = |lo: f64, hi: f64| -> Vec<(f64, f64)> {
        table.iter().copied().filter(|&(s, _)| s >= lo && s <= hi).collect()
    };
    let rows = inside(s_min, s_max);
    if rows.len() < 5 {
        return Err(FlevyError::InsufficientData(format!(
            "{} lags in [{s_min}, {s_max}], at least 5 needed",
            rows.len()
        )));
    }
    let fit = |rows: &[(f64, f64)]| {
        let x: Vec<f64> = rows.iter().map(|r| r.0.ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.1.ln()).collect();
        ols_fit(&x, &y)
    };
    if rows.iter().all(|r| r.1 > 0.0) {
        return fit(&rows);
    }
    let widened: Vec<(f64, f64)> = inside(s_min / 2.0, s_max * 2.0).into_iter().filter(|r| r.1 > 0.0).collect();
    if widened.len() >= 5 {
        return fit(&widened);
    }
    let bad: Vec<String> = rows.iter().filter(|r| !(r.1 > 0.0)).map(|r| format!("{}: {:e}", r.0, r.1)).collect();
    Err(FlevyError::InsufficientData(format!(
        "autocovariance at or below the noise floor at lags {}",
        bad.join(", ")
    )))
}

/// `lrd_slope_from_table` on the lag-covariance table of an ensemble.
pub fn lrd_slope(stats: &EnsembleStats, s_min: f64, s_max: f64) -> Result<SlopeFit> {
    let table: Vec<(f64, f64)> = stats.lag_table().iter().map(|r| (r.0, r.1)).collect();
    lrd_slope_from_table(&table, s_min, s_max)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayProfile {
    /// `(T, max_{t∈[−T,−T/2]} |L_t| / |t|^α)` in ladder order.
    pub ratios: Vec<(f64, f64)>,
}

impl DecayProfile {
    pub fn non_increasing(&self) -> bool {
        self.ratios.windows(2).all(|w| w[1].1 <= w[0].1)
    }
}

/// Maximum of `|path(t)| / |t|^α` over the grid nodes of `[−T, −T/2]` for
/// each `T` of the ladder. A finite-horizon surrogate for the decay of
/// `|L_t|/|t|^α`, which holds in the limit for `α > d + ½`.
pub fn long_time_ratio(path: &SamplePath, d: f64, alpha: f64, ladder: &[f64]) -> Result<DecayProfile> {
    crate::flp::check_d(d)?;
    if !(alpha > d + 0.5) {
        return Err(invalid("alpha", format!("must exceed d + 1/2 = {}, got {alpha}", d + 0.5)));
    }
    let ratios = ladder
        .iter()
        .map(|&big_t| {
            if !(big_t > 0.0) || -big_t < path.t0() - 1e-9 * big_t || path.t_end() < -big_t / 2.0 {
                return Err(FlevyError::WindowNotCovered(format!(
                    "path on [{}, {}] does not cover [−{big_t}, −{}]",
                    path.t0(),
                    path.t_end(),
                    big_t / 2.0
                )));
            }
            let lo = ((-big_t - path.t0()) / path.dt() - 1e-9).ceil().max(0.0) as usize;
            let hi = (((-big_t / 2.0 - path.t0()) / path.dt() + 1e-9).floor() as usize).min(path.len() - 1);
            let max = (lo..=hi)
                .map(|i| path[i].abs() / path.time(i).abs().powf(alpha))
                .fold(0.0, f64::max);
            Ok((big_t, max))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecayProfile { ratios })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheck {
    pub time: f64,
    pub statistic: &'static str,
    pub left: f64,
    pub right: f64,
    pub se: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub checks: Vec<MomentCheck>,
}

impl MomentReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn moment_checks(a: &MomentEstimate, b: &MomentEstimate, sign: f64, z: f64) -> [MomentCheck; 3] {
    let check = |statistic, left: f64, right: f64, se_a: f64, se_b: f64| {
        let se = se_a.hypot(se_b);
        MomentCheck {
            time: a.time,
            statistic,
            left,
            right,
            se,
            pass: (left - right).abs() <= z * se,
        }
    };
    [
        check("mean", a.mean, sign * b.mean, a.mean_se, b.mean_se),
        check("variance", a.variance, b.variance, a.variance_se, b.variance_se),
        check("third_moment", a.third, sign * b.third, a.third_se, b.third_se),
    ]
}

/// Compares an ensemble of `L` at times `t_i` with an independent ensemble of
/// `L` at `−t_i` (same order), testing `L_t` against `−L_{−t}` in mean,
/// variance and third central moment within `z` combined standard errors.
pub fn symmetry_test(forward: &EnsembleStats, mirrored: &EnsembleStats, z: f64) -> Result<MomentReport> {
    if forward.moments.len() != mirrored.moments.len() {
        return Err(FlevyError::InsufficientData("ensembles observe different numbers of times".into()));
    }
    let mut checks = Vec::new();
    for (a, b) in forward.moments.iter().zip(&mirrored.moments) {
        if (a.time + b.time).abs() > 1e-9 * a.time.abs().max(1.0) {
            return Err(invalid("mirrored", format!("time {} is not the mirror of {}", b.time, a.time)));
        }
        checks.extend(moment_checks(a, b, -1.0, z));
    }
    Ok(MomentReport { checks })
}

/// Compares the moments at every observation time with those at the first,
/// for a process that should be stationary. Estimates at different times are
/// correlated, so the band is conservative.
pub fn stationarity_test(stats: &EnsembleStats, z: f64) -> Result<MomentReport> {
    let (first, rest) = stats
        .moments
        .split_first()
        .ok_or_else(|| FlevyError::InsufficientData("no observation times".into()))?;
    let checks = rest.iter().flat_map(|m| moment_checks(m, first, 1.0, z)).collect();
    Ok(MomentReport { checks })
}
