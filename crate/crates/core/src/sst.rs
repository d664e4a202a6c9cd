//! Proper triples, state-space transforms and SDE solutions obtained by
//! transforming fractional OU paths.
//!
//! Sign convention: the friction coefficient satisfies `σψ′ ≡ −λ`, with
//! `ψ = µ/σ` strictly decreasing and `σ ≥ 0`.

use std::fmt;
use std::sync::Arc;

use crate::error::{invalid, FlevyError, Result};
use crate::floup::ou_operator;
use crate::path::SamplePath;
use crate::special::CompensatedSum;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Interval of the real line; infinite ends are always open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) {
            return Err(invalid("interval", format!("need lo < hi, got ({lo}, {hi})")));
        }
        Ok(Self {
            lo,
            hi,
            lo_closed: false,
            hi_closed: false,
        })
    }

    pub fn real_line() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY).expect("valid")
    }

    pub fn positive() -> Self {
        Self::open(0.0, f64::INFINITY).expect("valid")
    }

    pub fn non_negative() -> Self {
        Self {
            lo_closed: true,
            ..Self::positive()
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = x > self.lo || (self.lo_closed && x == self.lo);
        let below = x < self.hi || (self.hi_closed && x == self.hi);
        above && below
    }

    pub fn interior_contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    /// A point well inside the interval.
    pub fn center(&self) -> f64 {
        match (self.lo.is_finite(), self.hi.is_finite()) {
            (true, true) => 0.5 * (self.lo + self.hi),
            (true, false) => self.lo + 1.0,
            (false, true) => self.hi - 1.0,
            (false, false) => 0.0,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// Drift and volatility of `dX = µ(X)dt + σ(X)dL^d` on a state space.
#[derive(Clone)]
pub struct Coefficients {
    pub interval: Interval,
    pub mu: RealFn,
    pub sigma: RealFn,
}

impl fmt::Debug for Coefficients {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Coefficients").field("interval", &self.interval).finish_non_exhaustive()
    }
}

#[derive(Clone)]
pub struct ProperTriple {
    pub name: String,
    pub interval: Interval,
    pub mu: RealFn,
    pub sigma: RealFn,
    pub psi: RealFn,
    pub lambda: f64,
    /// State-space transform `ψ^{-1}(−λx)`.
    pub f: RealFn,
    pub f_inv: RealFn,
    /// Set when the transform is known in closed form, so it can be checked
    /// against root finding.
    pub closed_form: bool,
    pub strongly_proper: bool,
}

impl fmt::Debug for ProperTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProperTriple")
            .field("name", &self.name)
            .field("interval", &self.interval)
            .field("lambda", &self.lambda)
            .field("strongly_proper", &self.strongly_proper)
            .finish_non_exhaustive()
    }
}

impl ProperTriple {
    /// Triple with `ψ = µ/σ`, `f` by root finding and `f^{-1} = −ψ/λ`.
    pub fn from_coefficients(name: &str, coefficients: Coefficients, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        let (mu, sigma) = (coefficients.mu.clone(), coefficients.sigma.clone());
        let psi: RealFn = Arc::new(move |y| mu(y) / sigma(y));
        let sst = Sst::new(psi.clone(), lambda, coefficients.interval);
        let f: RealFn = Arc::new(move |x| sst.eval(x).unwrap_or(f64::NAN));
        let p = psi.clone();
        Ok(Self {
            name: name.to_string(),
            interval: coefficients.interval,
            mu: coefficients.mu,
            sigma: coefficients.sigma,
            psi,
            lambda,
            f,
            f_inv: Arc::new(move |y| -p(y) / lambda),
            closed_form: false,
            strongly_proper: false,
        })
    }

    pub fn coefficients(&self) -> Coefficients {
        Coefficients {
            interval: self.interval,
            mu: self.mu.clone(),
            sigma: self.sigma.clone(),
        }
    }
}

/// Numerical state-space transform: solves `ψ(y) = −λx` inside the interval.
#[derive(Clone)]
pub struct Sst {
    psi: RealFn,
    lambda: f64,
    interval: Interval,
}

const BRACKET_STEPS: usize = 1100;

impl Sst {
    pub fn new(psi: RealFn, lambda: f64, interval: Interval) -> Self {
        Self { psi, lambda, interval }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let target = -self.lambda * x;
        let g = |y: f64| (self.psi)(y) - target;
        let iv = self.interval;
        let c = iv.center();
        let gc = g(c);
        if gc == 0.0 {
            return Ok(c);
        }
        // ψ decreases, so the root lies to the right when g(c) > 0
        let right = gc > 0.0;
        let (mut lo, mut hi) = (c, c);
        let mut found = false;
        for k in 0..BRACKET_STEPS {
            let step = 2f64.powi(k as i32);
            let y = if right {
                if iv.hi.is_finite() {
                    iv.hi - (iv.hi - c) * 0.5f64.powi(k as i32 + 1)
                } else {
                    c + step
                }
            } else if iv.lo.is_finite() {
                iv.lo + (c - iv.lo) * 0.5f64.powi(k as i32 + 1)
            } else {
                c - step
            };
            if !iv.interior_contains(y) || !y.is_finite() {
                break;
            }
            let gy = g(y);
            if gy.is_nan() {
                break;
            }
            if right {
                if gy <= 0.0 {
                    hi = y;
                    found = true;
                    break;
                }
                lo = y;
            } else {
                if gy >= 0.0 {
                    lo = y;
                    found = true;
                    break;
                }
                hi = y;
            }
        }
        if !found {
            return Err(FlevyError::RootFinding(format!(
                "ψ(y) = {target} has no bracketed root in {iv}; ψ does not cover the real line"
            )));
        }
        // bisection in value; midpoints keep every iterate inside the bracket
        for _ in 0..4000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || (hi - lo) <= 1e-15 * lo.abs().max(hi.abs()) {
                break;
            }
            let gm = g(mid);
            if gm == 0.0 {
                return Ok(mid);
            }
            if gm > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (glo, ghi) = (g(lo), g(hi));
        Ok(if glo.abs() <= ghi.abs() { lo } else { hi })
    }
}

/// Transform `f(x) = ψ^{-1}(−λx)` by bracketed bisection. Fails when `ψ`
/// does not reach `∓λ·20` inside the interval.
pub fn sst_from_psi(psi: RealFn, lambda: f64, interval: Interval) -> Result<RealFn> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    let sst = Sst::new(psi, lambda, interval);
    sst.eval(-P2_REACH)?;
    sst.eval(P2_REACH)?;
    Ok(Arc::new(move |x| sst.eval(x).unwrap_or(f64::NAN)))
}

/// `ψ` must exceed `±λ·P2_REACH` near the endpoints for (P2) to pass.
pub const P2_REACH: f64 = 20.0;
/// Half-width of the transform-coordinate probe range.
const X_PROBE_RANGE: f64 = 5.0;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    /// Probe with the worst margin, if any.
    pub worst_probe: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<PropertyCheck>,
    /// Median of `−σψ′` over probes with `σ > 0`.
    pub recovered_lambda: f64,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect()
    }
}

fn interior_probes(iv: &Interval, count: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let u = -1.0 + 2.0 * (i as f64 + 0.5) / count as f64;
        let y = match (iv.lo.is_finite(), iv.hi.is_finite()) {
            (true, true) => iv.lo + (iv.hi - iv.lo) * 0.5 * (1.0 + (2.5 * u).tanh()),
            (true, false) => iv.lo + (8.0 * u).exp(),
            (false, true) => iv.hi - (-8.0 * u).exp(),
            (false, false) => (8.0 * u).sinh(),
        };
        if iv.interior_contains(y) {
            out.push(y);
        }
    }
    out
}

/// Points marching toward each end of the interval, innermost last.
fn endpoint_probes(iv: &Interval) -> (Vec<f64>, Vec<f64>) {
    let ks = [1, 2, 4, 8, 16, 32, 64, 128, 256];
    let half = if iv.lo.is_finite() && iv.hi.is_finite() {
        0.5 * (iv.hi - iv.lo)
    } else {
        1.0
    };
    let toward = |end: f64, dir: f64| -> Vec<f64> {
        ks.iter()
            .map(|&k| {
                if end.is_finite() {
                    end - dir * half.min(1.0) * 10f64.powi(-k)
                } else {
                    dir * 10f64.powi(k)
                }
            })
            .filter(|y| iv.interior_contains(*y) && y.is_finite())
            .collect()
    };
    (toward(iv.lo, -1.0), toward(iv.hi, 1.0))
}

fn worst<I: IntoIterator<Item = (f64, f64)>>(items: I) -> Option<(f64, f64)> {
    items.into_iter().fold(None, |acc, (x, m)| match acc {
        Some((_, best)) if best >= m => acc,
        _ => Some((x, m)),
    })
}

fn check(name: &'static str, passed: bool, worst_probe: Option<f64>, detail: String) -> PropertyCheck {
    PropertyCheck {
        name,
        passed,
        worst_probe,
        detail,
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// Probe-based check of (P1)–(P4) and the transform identities.
pub fn validate_strongly_proper(triple: &ProperTriple, probe_count: usize) -> Result<ValidationReport> {
    if probe_count < 16 {
        return Err(invalid("probe_count", format!("need at least 16 probes, got {probe_count}")));
    }
    let iv = triple.interval;
    let lambda = triple.lambda;
    let (mu, sigma, psi, f, f_inv) = (&triple.mu, &triple.sigma, &triple.psi, &triple.f, &triple.f_inv);
    let ys = interior_probes(&iv, probe_count);
    let (to_lo, to_hi) = endpoint_probes(&iv);
    let xs: Vec<f64> = (0..probe_count)
        .map(|i| -X_PROBE_RANGE + 2.0 * X_PROBE_RANGE * (i as f64 + 0.5) / probe_count as f64)
        .collect();
    for &x in &xs {
        let y = f(x);
        if y.is_finite() && !iv.contains(y) {
            return Err(FlevyError::StateSpace(format!(
                "transform maps probe x = {x} to {y}, outside the declared interval {iv}"
            )));
        }
    }
    let mut checks = Vec::new();

    // (P1) finite and continuous coefficients
    let mut bad = None;
    let mut all_y: Vec<f64> = ys.clone();
    all_y.extend(&to_lo);
    all_y.extend(&to_hi);
    for &y in &all_y {
        let h = 1e-9 * (1.0 + y.abs());
        let jumpy = |g: &RealFn| {
            let (a, b) = (g(y), g(y + h).max(f64::MIN));
            !a.is_finite() || (iv.interior_contains(y + h) && (b - a).abs() > 1e-3 * (1.0 + a.abs()))
        };
        if jumpy(mu) || jumpy(sigma) {
            bad = Some(y);
            break;
        }
    }
    checks.push(check("P1_continuity", bad.is_none(), bad, "µ and σ finite and continuous on probes".into()));

    let neg = all_y.iter().copied().find(|&y| sigma(y) < 0.0);
    checks.push(check("sigma_nonnegative", neg.is_none(), neg, "σ ≥ 0 on probes".into()));

    // ψ = µ/σ wherever σ > 0
    let mismatch = worst(ys.iter().filter(|&&y| sigma(y) > 0.0).map(|&y| {
        let r = (mu(y) / sigma(y) - psi(y)).abs() / (1.0 + psi(y).abs());
        (y, r)
    }));
    let ok = mismatch.map_or(true, |(_, r)| r < 1e-9);
    checks.push(check(
        "psi_is_mu_over_sigma",
        ok,
        mismatch.map(|w| w.0),
        format!("max relative gap {:.3e}", mismatch.map_or(0.0, |w| w.1)),
    ));

    // (P2) strictly decreasing and unbounded in both directions
    let mut sorted = all_y.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let rise = sorted.windows(2).find(|w| psi(w[1]) >= psi(w[0])).map(|w| w[0]);
    checks.push(check("P2_decreasing", rise.is_none(), rise, "ψ strictly decreasing on probes".into()));
    let reach = lambda * P2_REACH;
    let lo_val = to_lo.last().map(|&y| psi(y)).unwrap_or(f64::NAN);
    let hi_val = to_hi.last().map(|&y| psi(y)).unwrap_or(f64::NAN);
    let range_ok = lo_val >= reach && hi_val <= -reach;
    checks.push(check(
        "P2_range",
        range_ok,
        if lo_val >= reach { to_hi.last().copied() } else { to_lo.last().copied() },
        format!("ψ near the ends: {lo_val:.4e} and {hi_val:.4e}, need beyond ±{reach:.4e}"),
    ));

    // (P3) −σψ′ ≡ λ by central differences
    let mut recovered = Vec::new();
    let mut p3_worst: Option<(f64, f64)> = None;
    for &y in &ys {
        let s = sigma(y);
        if !(s > 0.0) {
            continue;
        }
        let mut h = 1e-6 * (1.0 + y.abs());
        if iv.lo.is_finite() {
            h = h.min(0.5 * (y - iv.lo));
        }
        if iv.hi.is_finite() {
            h = h.min(0.5 * (iv.hi - y));
        }
        let dpsi = (psi(y + h) - psi(y - h)) / (2.0 * h);
        let est = -s * dpsi;
        if !est.is_finite() {
            continue;
        }
        recovered.push(est);
        let r = (est - lambda).abs() / lambda;
        if p3_worst.map_or(true, |w| r > w.1) {
            p3_worst = Some((y, r));
        }
    }
    let recovered_lambda = median(recovered);
    let med_gap = (recovered_lambda - lambda).abs() / lambda;
    checks.push(check(
        "P3_friction",
        med_gap <= 1e-6 && p3_worst.map_or(false, |w| w.1 <= 1e-3),
        p3_worst.map(|w| w.0),
        format!(
            "median −σψ′ = {recovered_lambda:.10}, declared {lambda}; worst probe gap {:.3e}",
            p3_worst.map_or(f64::NAN, |w| w.1)
        ),
    ));

    // transform identities
    let inv_gap = worst(
        xs.iter()
            .map(|&x| (x, (f_inv(f(x)) - x).abs() / (x.abs() + 1e-300)))
            .chain(ys.iter().map(|&y| (y, (f(f_inv(y)) - y).abs() / (y.abs() + 1e-300)))),
    );
    let ok = inv_gap.map_or(false, |w| w.1 <= 1e-10);
    checks.push(check(
        "transform_inverse",
        ok,
        inv_gap.map(|w| w.0),
        format!("max relative round-trip error {:.3e}", inv_gap.map_or(f64::NAN, |w| w.1)),
    ));

    let mono = xs.windows(2).find(|w| !(f(w[1]) > f(w[0]))).map(|w| w[0]);
    checks.push(check("transform_increasing", mono.is_none(), mono, "f strictly increasing on probes".into()));

    // f′ = σ∘f away from the zeros of σ
    let deriv_gap = worst(xs.iter().filter_map(|&x| {
        let target = sigma(f(x));
        if !(target > 1e-6) {
            return None;
        }
        let h = 1e-5 * (1.0 + x.abs());
        let d = (f(x + h) - f(x - h)) / (2.0 * h);
        Some((x, (d - target).abs() / target))
    }));
    checks.push(check(
        "derivative_is_sigma_of_f",
        deriv_gap.map_or(false, |w| w.1 <= 1e-6),
        deriv_gap.map(|w| w.0),
        format!("max relative gap {:.3e}", deriv_gap.map_or(f64::NAN, |w| w.1)),
    ));

    if triple.closed_form {
        let numeric = Sst::new(psi.clone(), lambda, iv);
        let gap = worst(xs.iter().map(|&x| {
            let y = f(x);
            let r = match numeric.eval(x) {
                Ok(v) => (v - y).abs() / (y.abs() + 1e-300),
                Err(_) => f64::INFINITY,
            };
            (x, r)
        }));
        checks.push(check(
            "closed_form_matches_root",
            gap.map_or(false, |w| w.1 <= 1e-10),
            gap.map(|w| w.0),
            format!("max relative gap {:.3e}", gap.map_or(f64::NAN, |w| w.1)),
        ));
    }

    // (P4) local Lipschitz heuristic for f′ = σ∘f, including the zeros of σ
    let fprime = |x: f64| sigma(f(x));
    let mut lip_probes = xs.clone();
    lip_probes.extend(minimum_points(&fprime, &xs));
    let blowup = worst(lip_probes.iter().map(|&x| (x, lipschitz_growth(&fprime, x))));
    checks.push(check(
        "P4_lipschitz",
        blowup.map_or(false, |w| w.1 <= 100.0),
        blowup.map(|w| w.0),
        format!(
            "largest growth of difference quotients of f′ under refinement: {:.3e} (bounded-quotient heuristic)",
            blowup.map_or(f64::NAN, |w| w.1)
        ),
    ));

    Ok(ValidationReport {
        checks,
        recovered_lambda,
    })
}

/// Local minima of `g` on the sorted probes, refined by golden-section search.
fn minimum_points(g: &impl Fn(f64) -> f64, xs: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for w in xs.windows(3) {
        let (a, m, b) = (g(w[0]), g(w[1]), g(w[2]));
        if m <= a && m <= b {
            let (mut lo, mut hi) = (w[0], w[2]);
            let r = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..200 {
                let c = hi - r * (hi - lo);
                let d = lo + r * (hi - lo);
                if g(c) <= g(d) {
                    hi = d;
                } else {
                    lo = c;
                }
                if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
                    break;
                }
            }
            out.push(0.5 * (lo + hi));
        }
    }
    out
}

/// Ratio between the finest and the coarsest difference quotients of `g` at
/// `x` over dyadic steps 2⁰ … 2⁻²⁰; stays O(1) for Lipschitz `g`. Finer
/// steps would measure rounding rather than the function.
fn lipschitz_growth(g: &impl Fn(f64) -> f64, x: f64) -> f64 {
    let g0 = g(x);
    let q = |h: f64| ((g(x + h) - g0).abs() / h).max((g(x - h) - g0).abs() / h);
    let coarse = (0..6).map(|k| q(2f64.powi(-k))).fold(0.0, f64::max);
    let fine = (14..21).map(|k| q(2f64.powi(-k))).fold(0.0, f64::max);
    if !fine.is_finite() {
        return f64::INFINITY;
    }
    fine / (coarse + 1.0)
}

/// Models with closed-form transforms.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    /// `dX = (α|X|^γ + βX)dt + σ₀|X|^γ dL`, β < 0, γ ∈ [0, 1]; `γ = 1` lives on (0, ∞).
    Power { gamma: f64, alpha: f64, beta: f64, sigma0: f64 },
    /// `dX = (α + βX)dt + σ_i|α + βX|^δ dL`, β < 0, with `σ_1` below and `σ_2`
    /// above the root `−α/β`.
    AffineDrift { alpha: f64, beta: f64, delta: f64, sigma1: f64, sigma2: f64 },
    /// Bounded model on (0, π/σ₂): `dX = σ₁ sin(σ₂X)cos(σ₂X)dt + sin²(σ₂X)dL`.
    Trig { sigma1: f64, sigma2: f64 },
    /// `dX = −γX dt + σ√|X| dL` on the real line.
    Cir { gamma: f64, sigma: f64 },
    /// `dX = −λX log X dt + σX dL` on (0, ∞).
    Log { lambda: f64, sigma: f64 },
    /// `((0, ∞), −2λz, 2σ√z)`: proper in (P3) but violating (P2).
    SquaredFloup { lambda: f64, sigma: f64 },
}

pub const MODEL_IDS: [&str; 6] = ["power", "affine-drift", "trig", "cir", "log", "squared-floup"];

impl Model {
    pub fn id(&self) -> &'static str {
        match self {
            Model::Power { .. } => "power",
            Model::AffineDrift { .. } => "affine-drift",
            Model::Trig { .. } => "trig",
            Model::Cir { .. } => "cir",
            Model::Log { .. } => "log",
            Model::SquaredFloup { .. } => "squared-floup",
        }
    }

    /// Parameter names of a model id with their defaults.
    pub fn parameter_defaults(id: &str) -> Result<&'static [(&'static str, f64)]> {
        Ok(match id {
            "power" => &[("gamma", 0.5), ("alpha", 0.0), ("beta", -1.0), ("sigma0", 1.0)],
            "affine-drift" => &[("alpha", 1.0), ("beta", -1.0), ("delta", 0.5), ("sigma1", 1.0), ("sigma2", 1.0)],
            "trig" => &[("sigma1", 1.0), ("sigma2", 1.0)],
            "cir" => &[("gamma", 2.0), ("sigma", 1.0)],
            "log" => &[("lambda", 1.0), ("sigma", 1.0)],
            "squared-floup" => &[("lambda", 5.0), ("sigma", 1.0)],
            other => {
                return Err(invalid(
                    "model",
                    format!("unknown model '{other}', expected one of {}", MODEL_IDS.join(", ")),
                ))
            }
        })
    }

    /// Builds a model from an id and `name = value` overrides of its defaults.
    pub fn from_params(id: &str, params: &[(String, f64)]) -> Result<Self> {
        let defaults = Self::parameter_defaults(id)?;
        let mut values: Vec<f64> = defaults.iter().map(|d| d.1).collect();
        for (name, v) in params {
            match defaults.iter().position(|d| d.0 == name) {
                Some(i) => values[i] = *v,
                None => {
                    return Err(invalid(
                        "model parameter",
                        format!("'{name}' is not a parameter of model '{id}'"),
                    ))
                }
            }
        }
        let v = |i: usize| values[i];
        Ok(match id {
            "power" => Model::Power {
                gamma: v(0),
                alpha: v(1),
                beta: v(2),
                sigma0: v(3),
            },
            "affine-drift" => Model::AffineDrift {
                alpha: v(0),
                beta: v(1),
                delta: v(2),
                sigma1: v(3),
                sigma2: v(4),
            },
            "trig" => Model::Trig {
                sigma1: v(0),
                sigma2: v(1),
            },
            "cir" => Model::Cir { gamma: v(0), sigma: v(1) },
            "log" => Model::Log {
                lambda: v(0),
                sigma: v(1),
            },
            _ => Model::SquaredFloup {
                lambda: v(0),
                sigma: v(1),
            },
        })
    }

    /// Friction coefficient of the model's triple.
    pub fn lambda(&self) -> f64 {
        match *self {
            Model::Power { gamma, beta, .. } => {
                if gamma == 1.0 {
                    beta.abs()
                } else {
                    (1.0 - gamma) * beta.abs()
                }
            }
            Model::AffineDrift { beta, delta, .. } => (1.0 - delta) * beta.abs(),
            Model::Trig { sigma1, sigma2 } => sigma1 * sigma2,
            Model::Cir { gamma, .. } => gamma / 2.0,
            Model::Log { lambda, .. } | Model::SquaredFloup { lambda, .. } => lambda,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(name, format!("must be positive, got {v}")));
    }
    Ok(())
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(invalid(name, format!("must be finite, got {v}")));
    }
    Ok(())
}

fn arc(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> RealFn {
    Arc::new(f)
}

/// Strongly proper triple of a catalog model; models that are only proper
/// (or not proper) are rejected with the violated condition.
pub fn catalog(model: &Model) -> Result<ProperTriple> {
    let t = catalog_triple(model)?;
    if !t.strongly_proper {
        let why = match model {
            Model::Power { .. } => "power models are strongly proper only for γ ∈ {0} ∪ [1/2, 1]",
            Model::AffineDrift { .. } => "affine-drift models are strongly proper only for δ ∈ [1/2, 1)",
            _ => "the triple violates (P2): ψ is bounded on one side",
        };
        return Err(FlevyError::StateSpace(format!("model '{}' is not strongly proper: {why}", model.id())));
    }
    Ok(t)
}

/// Triple of a catalog model within its admissible parameter region, with
/// the strong-properness flag from the closed-form analysis.
pub fn catalog_triple(model: &Model) -> Result<ProperTriple> {
    let mut t = match *model {
        Model::Power {
            gamma,
            alpha,
            beta,
            sigma0,
        } => power_triple(gamma, alpha, beta, sigma0)?,
        Model::AffineDrift {
            alpha,
            beta,
            delta,
            sigma1,
            sigma2,
        } => affine_drift_triple(alpha, beta, delta, sigma1, sigma2)?,
        Model::Trig { sigma1, sigma2 } => {
            positive("sigma1", sigma1)?;
            positive("sigma2", sigma2)?;
            let lambda = sigma1 * sigma2;
            ProperTriple {
                name: "trig".into(),
                interval: Interval::open(0.0, std::f64::consts::PI / sigma2)?,
                mu: arc(move |y| sigma1 * (sigma2 * y).sin() * (sigma2 * y).cos()),
                sigma: arc(move |y| (sigma2 * y).sin().powi(2)),
                psi: arc(move |y| sigma1 / (sigma2 * y).tan()),
                lambda,
                // arccot(u) = π/2 − atan(u) takes values in (0, π)
                f: arc(move |x| (std::f64::consts::FRAC_PI_2 + (sigma2 * x).atan()) / sigma2),
                f_inv: arc(move |y| -1.0 / ((sigma2 * y).tan() * sigma2)),
                closed_form: true,
                strongly_proper: true,
            }
        }
        Model::Cir { gamma, sigma } => {
            positive("gamma", gamma)?;
            positive("sigma", sigma)?;
            ProperTriple {
                name: "cir".into(),
                interval: Interval::real_line(),
                mu: arc(move |y| -gamma * y),
                sigma: arc(move |y| sigma * y.abs().sqrt()),
                psi: arc(move |y| -gamma * y.signum() * y.abs().sqrt() / sigma),
                lambda: gamma / 2.0,
                f: arc(move |x| x.signum() * sigma * sigma / 4.0 * x * x),
                f_inv: arc(move |y| y.signum() * 2.0 * y.abs().sqrt() / sigma),
                closed_form: true,
                strongly_proper: true,
            }
        }
        Model::Log { lambda, sigma } => {
            positive("lambda", lambda)?;
            positive("sigma", sigma)?;
            ProperTriple {
                name: "log".into(),
                interval: Interval::positive(),
                mu: arc(move |y| -lambda * y * y.ln()),
                sigma: arc(move |y| sigma * y),
                psi: arc(move |y| -lambda * y.ln() / sigma),
                lambda,
                f: arc(move |x| (sigma * x).exp()),
                f_inv: arc(move |y| y.ln() / sigma),
                closed_form: true,
                strongly_proper: true,
            }
        }
        Model::SquaredFloup { lambda, sigma } => {
            positive("lambda", lambda)?;
            positive("sigma", sigma)?;
            let coeffs = Coefficients {
                interval: Interval::positive(),
                mu: arc(move |z| -2.0 * lambda * z),
                sigma: arc(move |z| 2.0 * sigma * z.sqrt()),
            };
            let mut t = ProperTriple::from_coefficients("squared-floup", coeffs, lambda)?;
            t.psi = arc(move |z| -lambda * z.sqrt() / sigma);
            t
        }
    };
    if let Model::SquaredFloup { .. } = model {
        t.strongly_proper = false;
    }
    Ok(t)
}

fn power_triple(gamma: f64, alpha: f64, beta: f64, sigma0: f64) -> Result<ProperTriple> {
    finite("alpha", alpha)?;
    positive("sigma0", sigma0)?;
    if !(beta < 0.0) || !beta.is_finite() {
        return Err(invalid("beta", format!("a proper power triple needs β < 0, got {beta}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(invalid("gamma", format!("only γ ∈ [0, 1] admits proper triples, got {gamma}")));
    }
    let lambda = if gamma == 1.0 { beta.abs() } else { (1.0 - gamma) * beta.abs() };
    let shift = alpha / beta;
    let t = if gamma == 0.0 {
        ProperTriple {
            name: "power".into(),
            interval: Interval::real_line(),
            mu: arc(move |y| alpha + beta * y),
            sigma: arc(move |_| sigma0),
            psi: arc(move |y| (alpha + beta * y) / sigma0),
            lambda,
            f: arc(move |x| sigma0 * x - shift),
            f_inv: arc(move |y| (y + shift) / sigma0),
            closed_form: true,
            strongly_proper: true,
        }
    } else if gamma == 1.0 {
        ProperTriple {
            name: "power".into(),
            interval: Interval::positive(),
            mu: arc(move |y| alpha * y + beta * y * y.ln()),
            sigma: arc(move |y| sigma0 * y),
            psi: arc(move |y| (alpha + beta * y.ln()) / sigma0),
            lambda,
            f: arc(move |x| (sigma0 * x - shift).exp()),
            f_inv: arc(move |y| (y.ln() + shift) / sigma0),
            closed_form: true,
            strongly_proper: true,
        }
    } else {
        let q = 1.0 - gamma;
        ProperTriple {
            name: "power".into(),
            interval: Interval::real_line(),
            mu: arc(move |y| alpha * y.abs().powf(gamma) + beta * y),
            sigma: arc(move |y| sigma0 * y.abs().powf(gamma)),
            psi: arc(move |y| alpha / sigma0 + beta * y.signum() * y.abs().powf(q) / sigma0),
            lambda,
            f: arc(move |x| {
                let z = q * sigma0 * x - shift;
                z.signum() * z.abs().powf(1.0 / q)
            }),
            f_inv: arc(move |y| (y.signum() * y.abs().powf(q) + shift) / (q * sigma0)),
            closed_form: true,
            strongly_proper: gamma >= 0.5,
        }
    };
    Ok(t)
}

fn affine_drift_triple(alpha: f64, beta: f64, delta: f64, s1: f64, s2: f64) -> Result<ProperTriple> {
    finite("alpha", alpha)?;
    if !(beta < 0.0) || !beta.is_finite() {
        return Err(invalid("beta", format!("affine drift needs β < 0, got {beta}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
    }
    positive("sigma1", s1)?;
    positive("sigma2", s2)?;
    let q = 1.0 - delta;
    let lambda = q * beta.abs();
    let root = -alpha / beta;
    let fi = |s: f64| beta.abs().powf(delta / q) * s.powf(1.0 / q) * q.powf(1.0 / q);
    let (f1, f2) = (fi(s1), fi(s2));
    Ok(ProperTriple {
        name: "affine-drift".into(),
        interval: Interval::real_line(),
        mu: arc(move |y| alpha + beta * y),
        sigma: arc(move |y| {
            let a = (alpha + beta * y).abs().powf(delta);
            if y <= root {
                s1 * a
            } else {
                s2 * a
            }
        }),
        psi: arc(move |y| {
            let m = alpha + beta * y;
            if m >= 0.0 {
                m.powf(q) / s1
            } else {
                -(-m).powf(q) / s2
            }
        }),
        lambda,
        f: arc(move |x| {
            if x <= 0.0 {
                root - f1 * x.abs().powf(1.0 / q)
            } else {
                root + f2 * x.powf(1.0 / q)
            }
        }),
        f_inv: arc(move |y| {
            let m = alpha + beta * y;
            if m >= 0.0 {
                -m.powf(q) / (s1 * lambda)
            } else {
                (-m).powf(q) / (s2 * lambda)
            }
        }),
        closed_form: true,
        strongly_proper: delta >= 0.5,
    })
}

/// `t ↦ f(OU(τ, f^{-1}(z)))` for `t ≥ τ`, built on a FLOUP path of rate
/// `lambda_check`.
pub fn solve_sde(triple: &ProperTriple, floup: &SamplePath, lambda_check: f64, tau: f64, z: f64) -> Result<SamplePath> {
    if !triple.strongly_proper {
        return Err(FlevyError::StateSpace(format!(
            "triple '{}' is not strongly proper; the transform construction does not apply",
            triple.name
        )));
    }
    if (lambda_check - triple.lambda).abs() > 1e-12 * triple.lambda {
        return Err(invalid(
            "lambda",
            format!("FLOUP rate {lambda_check} differs from the friction coefficient {}", triple.lambda),
        ));
    }
    if !triple.interval.interior_contains(z) {
        return Err(invalid("z", format!("start value {z} is not inside {}", triple.interval)));
    }
    let start = (triple.f_inv)(z);
    let i0 = floup.require_node(tau)?;
    if i0 + 1 >= floup.len() {
        return Err(invalid("tau", "no FLOUP nodes after the start time"));
    }
    let forward = floup.slice(i0, floup.len())?;
    let ou = ou_operator(&forward, triple.lambda, forward.t0(), start)?;
    let mut values: Vec<f64> = ou.values().iter().map(|&x| (triple.f)(x)).collect();
    values[0] = z;
    SamplePath::new(forward.t0(), floup.dt(), values)
}

/// Stationary solution `f∘X` of a FLOUP path `X`.
pub fn stationary_solution(triple: &ProperTriple, floup: &SamplePath) -> Result<SamplePath> {
    if !triple.strongly_proper {
        return Err(FlevyError::StateSpace(format!("triple '{}' is not strongly proper", triple.name)));
    }
    floup.map(|x| (triple.f)(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Contract {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionReport {
    pub max_residual: f64,
    pub residual_profile: SamplePath,
    pub mesh: f64,
    /// First time the path leaves the state space, if it does.
    pub exit_time: Option<f64>,
    pub contract: Contract,
}

/// Integral-equation residual `X_t − X_0 − ∫µ(X)du − ∫σ(X)dL^d` of a
/// candidate solution, with the trapezoid rule in time and left-point
/// Riemann–Stieltjes sums against the FLP. The contract passes when the path
/// stays in the state space and the largest residual is at most `tol`.
pub fn residual_check(x: &SamplePath, coeffs: &Coefficients, flp: &SamplePath, tol: f64) -> Result<SolutionReport> {
    let i0 = flp
        .node_index(x.t0())
        .ok_or(FlevyError::GridMismatch("solution and FLP grids do not share nodes".into()))?;
    if ((x.dt() - flp.dt()) / flp.dt()).abs() > 1e-9 || i0 + x.len() > flp.len() {
        return Err(FlevyError::GridMismatch("solution grid is not covered by the FLP grid".into()));
    }
    let xv = x.values();
    let lv = &flp.values()[i0..i0 + x.len()];
    let dt = x.dt();
    let exit = xv.iter().position(|&v| !coeffs.interval.contains(v));
    let mut profile = vec![0.0; xv.len()];
    let mut max_residual = 0.0f64;
    if exit.is_none() {
        let mut drift = CompensatedSum::new();
        let mut noise = CompensatedSum::new();
        let mut mu_prev = (coeffs.mu)(xv[0]);
        for i in 1..xv.len() {
            let mu_i = (coeffs.mu)(xv[i]);
            drift.add(0.5 * dt * (mu_prev + mu_i));
            noise.add((coeffs.sigma)(xv[i - 1]) * (lv[i] - lv[i - 1]));
            mu_prev = mu_i;
            let r = xv[i] - xv[0] - drift.value() - noise.value();
            profile[i] = r;
            max_residual = max_residual.max(r.abs());
        }
        if !max_residual.is_finite() {
            max_residual = f64::INFINITY;
        }
    } else {
        max_residual = f64::INFINITY;
    }
    let profile_path = SamplePath::new(x.t0(), dt, profile.iter().map(|v| if v.is_finite() { *v } else { 0.0 }).collect())?;
    let contract = if exit.is_none() && max_residual <= tol {
        Contract::Pass
    } else {
        Contract::Fail
    };
    Ok(SolutionReport {
        max_residual,
        residual_profile: profile_path,
        mesh: dt,
        exit_time: exit.map(|i| x.time(i)),
        contract,
    })
}

/// `((σ/2)·X)²` for a FLOUP path `X` of rate `lambda / 2`.
pub fn squared_floup(floup: &SamplePath, sigma: f64, lambda: f64, floup_rate: f64) -> Result<SamplePath> {
    positive("sigma", sigma)?;
    positive("lambda", lambda)?;
    if (floup_rate - lambda / 2.0).abs() > 1e-12 * lambda {
        return Err(invalid(
            "floup_rate",
            format!("the FLOUP must have rate λ/2 = {}, got {floup_rate}", lambda / 2.0),
        ));
    }
    floup.map(|x| (0.5 * sigma * x).powi(2))
}

/// Both SDE forms the squared FLOUP is tested against:
/// `(−λx, σ√|x|)` on the real line and `(−λx, σ√x)` on [0, ∞).
pub fn squared_floup_forms(lambda: f64, sigma: f64) -> (Coefficients, Coefficients) {
    let abs_form = Coefficients {
        interval: Interval::real_line(),
        mu: arc(move |x| -lambda * x),
        sigma: arc(move |x| sigma * x.abs().sqrt()),
    };
    let root_form = Coefficients {
        interval: Interval::non_negative(),
        mu: arc(move |x| -lambda * x),
        sigma: arc(move |x| sigma * x.sqrt()),
    };
    (abs_form, root_form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floup::{floup_via_ibp, FloupParams};
    use proptest::prelude::*;

    fn strong_models() -> Vec<Model> {
        vec![
            Model::Power { gamma: 0.0, alpha: 0.7, beta: -1.3, sigma0: 0.8 },
            Model::Power { gamma: 0.5, alpha: 0.4, beta: -2.0, sigma0: 1.1 },
            Model::Power { gamma: 0.75, alpha: -0.3, beta: -1.0, sigma0: 0.9 },
            Model::Power { gamma: 1.0, alpha: 0.5, beta: -1.5, sigma0: 0.6 },
            Model::AffineDrift { alpha: 1.0, beta: -2.0, delta: 0.5, sigma1: 1.2, sigma2: 0.7 },
            Model::AffineDrift { alpha: -0.5, beta: -1.0, delta: 0.7, sigma1: 0.8, sigma2: 1.3 },
            Model::Trig { sigma1: 1.5, sigma2: 2.0 },
            Model::Cir { gamma: 5.0, sigma: 1.0 },
            Model::Log { lambda: 1.0, sigma: 0.5 },
        ]
    }

    #[test]
    fn interval_membership() {
        let iv = Interval::open(0.0, 1.0).unwrap();
        assert!(iv.contains(0.5) && !iv.contains(0.0) && !iv.contains(1.0));
        assert!(Interval::non_negative().contains(0.0));
        assert!(!Interval::positive().contains(0.0));
        assert!(Interval::open(1.0, 1.0).is_err());
    }

    #[test]
    fn identity_transform() {
        let f = sst_from_psi(arc(|y| -y), 1.0, Interval::real_line()).unwrap();
        for x in [-3.0, -0.5, 0.0, 1e-7, 2.5, 100.0] {
            assert!((f(x) - x).abs() <= 1e-14 * (1.0 + x.abs()), "{x}: {}", f(x));
        }
    }

    #[test]
    fn numeric_transform_matches_closed_forms() {
        let s0: f64 = 1.7;
        let cir = catalog(&Model::Cir { gamma: 3.0, sigma: s0 }).unwrap();
        let numeric = sst_from_psi(cir.psi.clone(), cir.lambda, cir.interval).unwrap();
        assert!(((cir.f)(2.0 / s0) - 1.0).abs() < 1e-15);
        assert!((numeric(2.0 / s0) - 1.0).abs() < 1e-12);
        let trig = catalog(&Model::Trig { sigma1: 1.5, sigma2: 2.0 }).unwrap();
        let numeric = sst_from_psi(trig.psi.clone(), trig.lambda, trig.interval).unwrap();
        for x in [-10.0, -1.0, 0.0, 0.3, 4.0] {
            let closed = (trig.f)(x);
            assert!((numeric(x) - closed).abs() <= 1e-10 * closed, "{x}");
            assert!(trig.interval.interior_contains(closed));
        }
    }

    #[test]
    fn strongly_proper_models_validate() {
        for m in strong_models() {
            let t = catalog(&m).unwrap();
            let r = validate_strongly_proper(&t, 64).unwrap();
            assert!(r.passed(), "{m:?}: {:#?}", r.checks.iter().filter(|c| !c.passed).collect::<Vec<_>>());
            assert!((r.recovered_lambda - t.lambda).abs() <= 1e-6 * t.lambda);
        }
        let cir = catalog(&Model::Cir { gamma: 5.0, sigma: 1.0 }).unwrap();
        assert_eq!(cir.lambda, 2.5);
    }

    #[test]
    fn squared_floup_triple_fails_p2() {
        let m = Model::SquaredFloup { lambda: 2.0, sigma: 1.0 };
        assert!(catalog(&m).is_err());
        let t = catalog_triple(&m).unwrap();
        let r = validate_strongly_proper(&t, 64).unwrap();
        assert!(!r.check("P2_range").unwrap().passed);
        assert!(r.check("P3_friction").unwrap().passed);
    }

    #[test]
    fn weak_models_are_rejected() {
        let weak = Model::Power { gamma: 0.3, alpha: 0.0, beta: -1.0, sigma0: 1.0 };
        let err = catalog(&weak).unwrap_err().to_string();
        assert!(err.contains("strongly proper"), "{err}");
        let t = catalog_triple(&weak).unwrap();
        let r = validate_strongly_proper(&t, 64).unwrap();
        assert_eq!(r.failures(), vec!["P4_lipschitz"]);
        let floup = SamplePath::new(0.0, 0.1, vec![0.0, 1.0, 2.0]).unwrap();
        assert!(solve_sde(&t, &floup, t.lambda, 0.0, 1.0).is_err());

        let affine = Model::AffineDrift { alpha: 1.0, beta: -1.0, delta: 0.3, sigma1: 1.0, sigma2: 1.0 };
        let t = catalog_triple(&affine).unwrap();
        assert!(!t.strongly_proper);
        assert_eq!(validate_strongly_proper(&t, 64).unwrap().failures(), vec!["P4_lipschitz"]);

        assert!(catalog(&Model::Power { gamma: 1.2, alpha: 0.0, beta: -1.0, sigma0: 1.0 }).is_err());
        assert!(catalog(&Model::Power { gamma: 0.5, alpha: 0.0, beta: 1.0, sigma0: 1.0 }).is_err());
        assert!(catalog(&Model::AffineDrift { alpha: 1.0, beta: 0.5, delta: 0.5, sigma1: 1.0, sigma2: 1.0 })
            .unwrap_err()
            .to_string()
            .contains("β < 0"));
    }

    #[test]
    fn validation_catches_a_wrong_sign() {
        // the bounded model with µ and σ both negated: σ < 0 and σψ′ = +λ
        let mut t = catalog(&Model::Trig { sigma1: 1.0, sigma2: 1.0 }).unwrap();
        t.mu = arc(|y| -y.sin() * y.cos());
        t.sigma = arc(|y| -y.sin().powi(2));
        let r = validate_strongly_proper(&t, 32).unwrap();
        assert!(!r.check("sigma_nonnegative").unwrap().passed);
        assert!(!r.check("P3_friction").unwrap().passed);
        assert!(validate_strongly_proper(&t, 8).is_err());
    }

    #[test]
    fn model_parameters_from_names() {
        let m = Model::from_params("cir", &[("gamma".into(), 4.0)]).unwrap();
        assert_eq!(m, Model::Cir { gamma: 4.0, sigma: 1.0 });
        assert_eq!(m.lambda(), 2.0);
        assert!(Model::from_params("cir", &[("beta".into(), 4.0)]).is_err());
        assert!(Model::from_params("nope", &[]).is_err());
        for id in MODEL_IDS {
            assert_eq!(Model::from_params(id, &[]).unwrap().id(), id);
        }
        assert_eq!(Model::Power { gamma: 1.0, alpha: 0.0, beta: -2.0, sigma0: 1.0 }.lambda(), 2.0);
    }

    fn smooth_floup(lambda: f64, dt: f64) -> (SamplePath, SamplePath) {
        let len = (40.0 / dt).round() as usize + 1;
        let flp = SamplePath::from_fn(-30.0, dt, len, |t| (1.3 * t).sin() + 0.4 * (0.7 * t).cos()).unwrap();
        let p = FloupParams::new(lambda, -30.0).unwrap();
        let x = floup_via_ibp(&flp, &p, -10.0, 10.0).unwrap();
        (flp, x)
    }

    #[test]
    fn solutions_through_the_transform() {
        let t = catalog(&Model::Log { lambda: 1.0, sigma: 0.5 }).unwrap();
        let (_, x) = smooth_floup(1.0, 0.01);
        let stat = stationary_solution(&t, &x).unwrap();
        let z = (t.f)(x.value_at(0.0).unwrap());
        let via_start = solve_sde(&t, &x, 1.0, 0.0, z).unwrap();
        let stat = stat.restrict(0.0, 10.0).unwrap();
        assert_eq!(via_start.len(), stat.len());
        for i in 0..stat.len() {
            assert!((via_start[i] - stat[i]).abs() <= 1e-12 * stat[i]);
        }
        let s = solve_sde(&t, &x, 1.0, 2.0, 3.0).unwrap();
        assert_eq!(s.value_at(2.0).unwrap(), 3.0);
        assert!(solve_sde(&t, &x, 1.1, 2.0, 3.0).is_err());
        assert!(solve_sde(&t, &x, 1.0, 2.0, 0.0).is_err());
        assert!(solve_sde(&t, &x, 1.0, 2.005, 3.0).is_err());

        // γ = 0: the solution is affine in the OU path
        let aff = catalog(&Model::Power { gamma: 0.0, alpha: 0.7, beta: -1.0, sigma0: 0.8 }).unwrap();
        let s = solve_sde(&aff, &x, 1.0, 0.0, 2.0).unwrap();
        let ou = ou_operator(&x, 1.0, 0.0, (aff.f_inv)(2.0)).unwrap().restrict(0.0, 10.0).unwrap();
        for i in 0..s.len() {
            assert!((s[i] - (0.8 * ou[i] + 0.7)).abs() < 1e-12);
        }
    }

    #[test]
    fn residual_of_constant_zero_solution() {
        let cir = catalog(&Model::Cir { gamma: 2.0, sigma: 1.0 }).unwrap();
        let (flp, _) = smooth_floup(1.0, 0.1);
        let zero = flp.map(|_| 0.0).unwrap();
        let r = residual_check(&zero, &cir.coefficients(), &flp, 1e-12).unwrap();
        assert_eq!(r.max_residual, 0.0);
        assert_eq!(r.contract, Contract::Pass);
        let (a, b) = squared_floup_forms(2.0, 1.0);
        assert_eq!(residual_check(&zero, &a, &flp, 0.0).unwrap().max_residual, 0.0);
        assert_eq!(residual_check(&zero, &b, &flp, 0.0).unwrap().max_residual, 0.0);
    }

    #[test]
    fn residual_shrinks_with_mesh_on_smooth_inputs() {
        for m in strong_models() {
            let t = catalog(&m).unwrap();
            let resid = |dt: f64| {
                let (flp, x) = smooth_floup(t.lambda, dt);
                let inside = t.interval.center();
                let sol = solve_sde(&t, &x, t.lambda, 0.0, inside).unwrap();
                let sol = sol.restrict(0.0, 5.0).unwrap();
                let r = residual_check(&sol, &t.coefficients(), &flp, 1.0).unwrap();
                assert!(r.exit_time.is_none(), "{m:?}");
                r.max_residual
            };
            let (a, b) = (resid(0.02), resid(0.01));
            assert!(b < a && a / b > 1.6, "{m:?}: {a} {b}");
        }
    }

    #[test]
    fn containment_failure_is_reported() {
        let log = catalog(&Model::Log { lambda: 1.0, sigma: 1.0 }).unwrap();
        let (flp, _) = smooth_floup(1.0, 0.1);
        let bad = flp.map(|t| t).unwrap();
        let r = residual_check(&bad, &log.coefficients(), &flp, 1.0).unwrap();
        assert_eq!(r.contract, Contract::Fail);
        assert!(r.exit_time.is_some());
        assert!(squared_floup(&flp, 1.0, 2.0, 1.5).is_err());
        let sq = squared_floup(&flp, 1.0, 2.0, 1.0).unwrap();
        assert!(sq.values().iter().all(|&v| v >= 0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn transforms_increase(a in -6.0..6.0f64, gap in 1e-3..3.0f64, which in 0usize..9) {
            let t = catalog(&strong_models()[which]).unwrap();
            prop_assert!((t.f)(a + gap) > (t.f)(a));
        }

        #[test]
        fn forgetting_in_transform_coordinates(z1 in -2.0..2.0f64, z2 in -2.0..2.0f64, which in 0usize..9) {
            let t = catalog(&strong_models()[which]).unwrap();
            let (_, x) = smooth_floup(t.lambda, 0.05);
            let (y1, y2) = ((t.f)(z1), (t.f)(z2));
            prop_assume!(t.interval.interior_contains(y1) && t.interval.interior_contains(y2) && y1 != y2);
            let s1 = solve_sde(&t, &x, t.lambda, 0.0, y1).unwrap().restrict(0.0, 3.0).unwrap();
            let s2 = solve_sde(&t, &x, t.lambda, 0.0, y2).unwrap().restrict(0.0, 3.0).unwrap();
            let d0 = ((t.f_inv)(y1) - (t.f_inv)(y2)).abs();
            for i in 0..s1.len() {
                let got = ((t.f_inv)(s1[i]) - (t.f_inv)(s2[i])).abs();
                let want = (-t.lambda * s1.time(i)).exp() * d0;
                prop_assert!((got - want).abs() <= 1e-6 * want.max(1e-12), "{} vs {}", got, want);
            }
        }
    }
}
