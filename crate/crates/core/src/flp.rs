//! Fractional Lévy processes built from a driver path by the truncated
//! moving-average sum, plus the analytic objects attached to them.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{invalid, FlevyError, Result};
use crate::levy::{covering_nodes, LevyDriverSpec};
use crate::path::SamplePath;
use crate::quad::{integrate, integrate_to_infinity, integrate_with_breaks, QuadOptions};
use crate::special::{gamma, CompensatedSum};

/// Above this many kernel terms the automatic route switches to FFT convolution.
pub const DIRECT_TERM_LIMIT: f64 = 2e7;

pub(crate) fn check_d(d: f64) -> Result<()> {
    if !(d > 0.0 && d < 0.5) {
        return Err(invalid("d", format!("must lie in (0, 0.5), got {d}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlpParams {
    pub d: f64,
    /// Grid steps per unit time.
    pub n: usize,
    /// The moving-average sum starts at cell `-n^past_window_exponent`.
    pub past_window_exponent: f64,
}

impl FlpParams {
    pub fn new(d: f64, n: usize) -> Result<Self> {
        let p = Self {
            d,
            n,
            past_window_exponent: 2.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_window_exponent(mut self, exponent: f64) -> Result<Self> {
        self.past_window_exponent = exponent;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_d(self.d)?;
        if self.n < 2 {
            return Err(invalid("n", format!("need at least 2 steps per unit time, got {}", self.n)));
        }
        if !(self.past_window_exponent >= 1.0) || !self.past_window_exponent.is_finite() {
            return Err(invalid(
                "past_window_exponent",
                format!("must be at least 1, got {}", self.past_window_exponent),
            ));
        }
        Ok(())
    }

    pub fn hurst(&self) -> f64 {
        self.d + 0.5
    }

    pub fn dt(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Number of driver cells before time 0 entering the sum.
    pub fn window_cells(&self) -> i64 {
        ((self.n as f64).powf(self.past_window_exponent) - 1e-9).ceil() as i64
    }

    /// Earliest driver time the sum touches.
    pub fn window_start(&self) -> f64 {
        -(self.window_cells() as f64) / self.n as f64
    }
}

/// ((t−s)₊^d − (−s)₊^d)/Γ(d+1).
pub fn flp_kernel(t: f64, s: f64, d: f64) -> Result<f64> {
    check_d(d)?;
    Ok(kernel_unchecked(t, s, d, gamma(d + 1.0)))
}

fn kernel_unchecked(t: f64, s: f64, d: f64, gamma_d1: f64) -> f64 {
    let pos = |x: f64| if x > 0.0 { x.powf(d) } else { 0.0 };
    (pos(t - s) - pos(-s)) / gamma_d1
}

/// Table of `(m/n)₊^d / Γ(d+1)` for `m = 0..len`.
pub(crate) fn power_table(d: f64, n: usize, len: usize) -> Vec<f64> {
    let g = gamma(d + 1.0);
    let dt = 1.0 / n as f64;
    (0..len).map(|m| (m as f64 * dt).powf(d) / g).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlpMethod {
    Auto,
    Direct,
    Fft,
}

/// FLP path on the grid `k/n` covering `[t_min, t_max]`.
pub fn simulate_flp(driver: &SamplePath, params: &FlpParams, t_min: f64, t_max: f64) -> Result<SamplePath> {
    simulate_flp_with(driver, params, t_min, t_max, FlpMethod::Auto)
}

pub fn simulate_flp_with(
    driver: &SamplePath,
    params: &FlpParams,
    t_min: f64,
    t_max: f64,
    method: FlpMethod,
) -> Result<SamplePath> {
    params.validate()?;
    let n = params.n;
    let dt = params.dt();
    if ((driver.dt() - dt) / dt).abs() > 1e-9 {
        return Err(FlevyError::GridMismatch(format!(
            "driver step {} differs from 1/n = {dt}",
            driver.dt()
        )));
    }
    if !(t_min < t_max) {
        return Err(invalid("t_grid", format!("need t_min < t_max, got [{t_min}, {t_max}]")));
    }
    let k0 = -params.window_cells();
    let (j_lo, j_hi) = covering_nodes(t_min, t_max, dt);
    if j_lo < k0 {
        return Err(FlevyError::WindowNotCovered(format!(
            "output starts at {} before the kernel window start {}",
            j_lo as f64 * dt,
            params.window_start()
        )));
    }
    let drv0 = (driver.t0() / dt).round() as i64;
    if (driver.t0() / dt - drv0 as f64).abs() > 1e-6 {
        return Err(FlevyError::GridMismatch("driver nodes are not multiples of 1/n".into()));
    }
    let k_end = j_hi.max(0);
    let drv_end = drv0 + driver.len() as i64 - 1;
    if drv0 > k0 || drv_end < k_end {
        return Err(FlevyError::WindowNotCovered(format!(
            "driver covers [{}, {}] but [{}, {}] is needed",
            driver.t0(),
            driver.t_end(),
            k0 as f64 * dt,
            k_end as f64 * dt
        )));
    }
    let v = driver.values();
    let off = (k0 - drv0) as usize;
    let incs: Vec<f64> = (0..(k_end - k0) as usize).map(|i| v[off + i + 1] - v[off + i]).collect();
    let outputs = (j_hi - j_lo + 1) as usize;
    let table = power_table(params.d, n, (j_hi.max(0) - k0 + 1) as usize);

    let use_fft = match method {
        FlpMethod::Direct => false,
        FlpMethod::Fft => true,
        FlpMethod::Auto => outputs as f64 * incs.len() as f64 > DIRECT_TERM_LIMIT,
    };
    let mut values = if use_fft {
        flp_by_fft(&incs, &table, k0, j_lo, j_hi)
    } else {
        flp_direct(&incs, &table, k0, j_lo, j_hi)
    };
    if (j_lo..=j_hi).contains(&0) {
        values[(-j_lo) as usize] = 0.0;
    }
    SamplePath::new(j_lo as f64 * dt, dt, values)
}

fn flp_direct(incs: &[f64], c: &[f64], k0: i64, j_lo: i64, j_hi: i64) -> Vec<f64> {
    let coeff = |m: i64| if m > 0 { c[m as usize] } else { 0.0 };
    (j_lo..=j_hi)
        .map(|j| {
            let mut acc = CompensatedSum::new();
            for k in k0..j.max(0) {
                let w = coeff(j - k) - coeff(-k);
                acc.add(w * incs[(k - k0) as usize]);
            }
            acc.value()
        })
        .collect()
}

/// `A_j = Σ_k c(j−k)ΔL_k` by one linear convolution; the path is `A_j − A_0`.
fn flp_by_fft(incs: &[f64], c: &[f64], k0: i64, j_lo: i64, j_hi: i64) -> Vec<f64> {
    let conv = convolve(incs, c);
    let at = |j: i64| {
        let idx = (j - k0) as usize;
        if idx < conv.len() {
            conv[idx]
        } else {
            0.0
        }
    };
    let a0 = at(0);
    (j_lo..=j_hi).map(|j| at(j) - a0).collect()
}

/// Full linear convolution of two real sequences.
pub(crate) fn convolve(x: &[f64], y: &[f64]) -> Vec<f64> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let out_len = x.len() + y.len() - 1;
    let size = out_len.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut a: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    a.resize(size, Complex64::new(0.0, 0.0));
    let mut b: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    b.resize(size, Complex64::new(0.0, 0.0));
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (p, q) in a.iter_mut().zip(&b) {
        *p *= q;
    }
    inv.process(&mut a);
    let scale = 1.0 / size as f64;
    a.truncate(out_len);
    a.into_iter().map(|z| z.re * scale).collect()
}

/// Cov(L^d_t, L^d_s) with driver second moment `m2`.
pub fn flp_covariance(t: f64, s: f64, d: f64, m2: f64) -> Result<f64> {
    check_d(d)?;
    if !(m2 > 0.0) {
        return Err(invalid("m2", format!("must be positive, got {m2}")));
    }
    let h2 = 2.0 * d + 1.0;
    let pref = m2 / (2.0 * gamma(2.0 * d + 2.0) * (PI * (d + 0.5)).sin());
    Ok(pref * (t.abs().powf(h2) + s.abs().powf(h2) - (t - s).abs().powf(h2)))
}

/// Right-sided Riemann–Liouville integral (1/Γ(α))∫_x^∞ f(t)(t−x)^{α−1} dt.
///
/// The first unit past `x` is integrated in `u = (t−x)^α`, which removes the
/// endpoint singularity; the rest goes to a semi-infinite map.
pub fn riemann_liouville_minus<F: FnMut(f64) -> f64>(f: F, alpha: f64, x: f64, quad_tol: f64) -> Result<f64> {
    riemann_liouville_minus_bounded(f, alpha, x, f64::INFINITY, &[], quad_tol)
}

/// As [`riemann_liouville_minus`] for `f` vanishing above `upper`; `breaks`
/// are extra split points where `f` changes scale.
pub fn riemann_liouville_minus_bounded<F: FnMut(f64) -> f64>(
    mut f: F,
    alpha: f64,
    x: f64,
    upper: f64,
    breaks: &[f64],
    quad_tol: f64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    if !(quad_tol > 0.0) {
        return Err(invalid("quad_tol", "must be positive"));
    }
    if upper <= x {
        return Ok(0.0);
    }
    let near = (upper - x).min(1.0);
    let half = QuadOptions::tol(0.5 * quad_tol);
    let inv = 1.0 / alpha;
    let mut total = integrate(|u| f(x + u.powf(inv)) * inv, 0.0, near.powf(alpha), half)?.value;
    let start = x + near;
    if upper.is_infinite() {
        total += integrate_to_infinity(|t| f(t) * (t - x).powf(alpha - 1.0), start, half)?.value;
    } else if upper > start {
        total += integrate_with_breaks(|t| f(t) * (t - x).powf(alpha - 1.0), start, upper, breaks, half)?.value;
    }
    Ok(total / gamma(alpha))
}

/// Split points `upper − k/λ` that follow the decay of `e^{−λ(upper−t)}`.
fn exp_breaks(upper: f64, lambda: f64) -> Vec<f64> {
    [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0]
        .iter()
        .map(|k| upper - k / lambda)
        .collect()
}

/// Fractional integral of `e^{−λ(t−·)}1{· ≤ t}` evaluated at `s`: the weight
/// with which driver mass at time `s` enters the OU-filtered FLP at time `t`.
pub fn floup_response(d: f64, lambda: f64, t: f64, s: f64, quad_tol: f64) -> Result<f64> {
    check_d(d)?;
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    let breaks = exp_breaks(t, lambda);
    riemann_liouville_minus_bounded(|r| (-lambda * (t - r)).exp(), d, s, t, &breaks, quad_tol)
}

/// Joint characteristic function E[exp(i Σ u_j X_{t_j})] of the stationary
/// fractional OU process driven by `spec`.
pub fn floup_characteristic_function(
    spec: &LevyDriverSpec,
    d: f64,
    lambda: f64,
    t_points: &[f64],
    u_weights: &[f64],
    quad_tol: f64,
) -> Result<Complex64> {
    check_d(d)?;
    spec.validate()?;
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    if t_points.is_empty() || t_points.len() != u_weights.len() {
        return Err(invalid("t_points", "need equally many non-empty times and weights"));
    }
    if !(quad_tol > 0.0) {
        return Err(invalid("quad_tol", "must be positive"));
    }
    if u_weights.iter().all(|&u| u == 0.0) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let inner_tol = quad_tol * 1e-3;
    let t_lo = t_points.iter().copied().fold(f64::INFINITY, f64::min);
    let t_hi = t_points.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let profile = |s: f64| -> Result<f64> {
        let mut z = 0.0;
        for (&t, &u) in t_points.iter().zip(u_weights) {
            if u != 0.0 && s < t {
                z += u * floup_response(d, lambda, t, s, inner_tol)?;
            }
        }
        Ok(z)
    };
    let mut failure: Option<FlevyError> = None;
    let mut eval = |s: f64, part: usize| -> f64 {
        match profile(s) {
            Ok(z) => {
                let p = spec.psi(z);
                if part == 0 {
                    p.re
                } else {
                    p.im
                }
            }
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };

    // near part [t_lo − span, t_hi] split at each time and its decay scale
    let span = 16.0 / lambda + 4.0;
    let a = t_lo - span;
    let mut breaks: Vec<f64> = t_points.to_vec();
    for &t in t_points {
        breaks.extend(exp_breaks(t, lambda));
    }
    // tail (−∞, a] through s = a − span·w^{−m}; the integrand decays like |s|^{2d−2}
    let m = 2.0 / (1.0 - 2.0 * d);
    let opts = QuadOptions::tol(0.25 * quad_tol);
    let mut parts = [0.0; 2];
    for (part, slot) in parts.iter_mut().enumerate() {
        let near = integrate_with_breaks(|s| eval(s, part), a, t_hi, &breaks, opts)?;
        let tail = integrate(
            |w| {
                if w <= 0.0 {
                    return 0.0;
                }
                let s = a - span * w.powf(-m);
                let jac = span * m * w.powf(-m - 1.0);
                let v = eval(s, part);
                if v == 0.0 {
                    0.0
                } else {
                    v * jac
                }
            },
            0.0,
            1.0,
            opts,
        )?;
        *slot = near.value + tail.value;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Complex64::new(parts[0], parts[1]).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::sample_two_sided_levy;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn kernel_values() {
        assert!(close(flp_kernel(1.0, 0.5, 0.25).unwrap(), 0.927729608579001, 1e-12));
        assert_eq!(flp_kernel(0.0, -3.0, 0.3).unwrap(), 0.0);
        assert_eq!(flp_kernel(2.0, 2.5, 0.3).unwrap(), 0.0);
        assert_eq!(flp_kernel(-1.0, 0.0, 0.3).unwrap(), 0.0);
        assert!(flp_kernel(1.0, 0.0, 0.5).is_err());
        assert!(flp_kernel(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn covariance_values() {
        assert!(close(flp_covariance(1.0, 1.0, 0.25, 1.0).unwrap(), 1.06384608107049, 1e-12));
        assert_eq!(flp_covariance(1.0, 0.0, 0.3, 2.0).unwrap(), 0.0);
        assert!(flp_covariance(1.0, 1.0, 0.3, 0.0).is_err());
    }

    fn cholesky_ok(a: &[Vec<f64>]) -> bool {
        let n = a.len();
        let mut l = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (0..j).map(|k| l[i][k] * l[j][k]).sum();
                if i == j {
                    let v = a[i][i] - s;
                    if v <= 0.0 {
                        return false;
                    }
                    l[i][i] = v.sqrt();
                } else {
                    l[i][j] = (a[i][j] - s) / l[j][j];
                }
            }
        }
        true
    }

    proptest! {
        #[test]
        fn covariance_is_symmetric(t in -20.0..20.0f64, s in -20.0..20.0f64, d in 0.01..0.49f64) {
            prop_assert_eq!(flp_covariance(t, s, d, 1.3).unwrap(), flp_covariance(s, t, d, 1.3).unwrap());
        }

        #[test]
        fn covariance_matrix_is_psd(
            times in proptest::collection::vec(-10.0..10.0f64, 1..20),
            d in 0.01..0.49f64,
        ) {
            let c: Vec<Vec<f64>> = times
                .iter()
                .enumerate()
                .map(|(i, &t)| {
                    times
                        .iter()
                        .enumerate()
                        .map(|(j, &s)| flp_covariance(t, s, d, 1.0).unwrap() + if i == j { 1e-9 } else { 0.0 })
                        .collect()
                })
                .collect();
            prop_assert!(cholesky_ok(&c));
        }

        #[test]
        fn kernel_vanishes_beyond_both_ends(t in -5.0..5.0f64, gap in 0.0..5.0f64, d in 0.01..0.49f64) {
            prop_assert_eq!(flp_kernel(t, t.max(0.0) + gap, d).unwrap(), 0.0);
        }
    }

    fn driver(seed: u64, n: usize, lo: f64, hi: f64) -> SamplePath {
        let spec = LevyDriverSpec::compensated_poisson(1.0, seed).unwrap();
        sample_two_sided_levy(&spec, lo, hi, 1.0 / n as f64).unwrap()
    }

    #[test]
    fn matches_brute_force_kernel_sum() {
        let p = FlpParams::new(0.3, 4).unwrap();
        let drv = driver(3, 4, p.window_start() - 1.0, 5.0);
        let out = simulate_flp(&drv, &p, -2.0, 3.0).unwrap();
        for (i, &v) in out.values().iter().enumerate() {
            let t = out.time(i);
            let mut brute = 0.0;
            for k in -p.window_cells()..(t.max(0.0) * 4.0).round() as i64 {
                let s = k as f64 / 4.0;
                let inc = drv.value_at(s + 0.25).unwrap() - drv.value_at(s).unwrap();
                brute += flp_kernel(t, s, 0.3).unwrap() * inc;
            }
            assert!((v - brute).abs() < 1e-12, "t={t}: {v} vs {brute}");
        }
    }

    #[test]
    fn fft_route_agrees_with_direct_sum() {
        let p = FlpParams::new(0.35, 20).unwrap();
        let drv = driver(11, 20, p.window_start(), 10.0);
        let a = simulate_flp_with(&drv, &p, -5.0, 10.0, FlpMethod::Direct).unwrap();
        let b = simulate_flp_with(&drv, &p, -5.0, 10.0, FlpMethod::Fft).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn zero_at_origin_zero_driver_and_linearity() {
        let p = FlpParams::new(0.2, 10).unwrap();
        let (lo, hi) = (p.window_start(), 4.0);
        let a = driver(1, 10, lo, hi);
        let b = driver(2, 10, lo, hi);
        let fa = simulate_flp(&a, &p, -3.0, 4.0).unwrap();
        assert_eq!(fa.value_at(0.0).unwrap(), 0.0);
        let zero = a.map(|_| 0.0).unwrap();
        assert_eq!(simulate_flp(&zero, &p, -3.0, 4.0).unwrap().max_abs(), 0.0);
        let sum = SamplePath::new(a.t0(), a.dt(), a.values().iter().zip(b.values()).map(|(x, y)| x + y).collect())
            .unwrap();
        let fb = simulate_flp(&b, &p, -3.0, 4.0).unwrap();
        let fs = simulate_flp(&sum, &p, -3.0, 4.0).unwrap();
        for i in 0..fs.len() {
            assert!((fs[i] - fa[i] - fb[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_uncovered_or_mismatched_driver() {
        let p = FlpParams::new(0.2, 10).unwrap();
        let short = driver(1, 10, -1.0, 4.0);
        assert!(matches!(simulate_flp(&short, &p, 0.0, 1.0), Err(FlevyError::WindowNotCovered(_))));
        let coarse = driver(1, 5, -20.0, 4.0);
        assert!(matches!(simulate_flp(&coarse, &p, 0.0, 1.0), Err(FlevyError::GridMismatch(_))));
        let full = driver(1, 10, -20.0, 4.0);
        assert!(simulate_flp(&full, &p, 0.0, 5.0).is_err());
        assert!(FlpParams::new(0.2, 1).is_err());
        assert!(FlpParams::new(0.2, 10).unwrap().with_window_exponent(0.5).is_err());
    }

    #[test]
    fn riemann_liouville_of_exponential() {
        let v = riemann_liouville_minus(|t| (-t).exp(), 0.5, 0.0, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
        assert_eq!(riemann_liouville_minus(|_| 0.0, 0.3, 1.0, 1e-10).unwrap(), 0.0);
        for (alpha, x) in [(0.1, -2.0), (0.3, 0.7), (0.45, 3.0)] {
            let v = riemann_liouville_minus(|t| (-t).exp(), alpha, x, 1e-12).unwrap();
            assert!(close(v, (-x).exp(), 1e-9), "{alpha} {x}: {v}");
        }
    }

    /// Independent evaluation by the positive series
    /// (1/Γ(d)) e^{−λΔ} Σ λ^k Δ^{k+d} / (k! (k+d)).
    fn response_series(d: f64, lambda: f64, delta: f64) -> f64 {
        let mut term = delta.powf(d);
        let mut sum = term / d;
        for k in 1..400 {
            term *= lambda * delta / k as f64;
            sum += term / (k as f64 + d);
        }
        (-lambda * delta).exp() * sum / gamma(d)
    }

    #[test]
    fn response_matches_series() {
        for (d, lambda, delta) in [(0.25, 1.0, 0.3), (0.25, 1.0, 3.0), (0.1, 2.0, 7.0), (0.45, 0.5, 20.0), (0.3, 1.0, 1e-4)] {
            let v = floup_response(d, lambda, 1.0, 1.0 - delta, 1e-12).unwrap();
            let want = response_series(d, lambda, delta);
            assert!(close(v, want, 1e-8), "{d} {lambda} {delta}: {v} vs {want}");
        }
        assert_eq!(floup_response(0.3, 1.0, 1.0, 2.0, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn response_matches_midpoint_brute_force() {
        // after u = (r−s)^d the integrand is smooth
        let (d, lambda, t, s): (f64, f64, f64, f64) = (0.25, 1.0, 0.0, -2.0);
        let top = (t - s).powf(d);
        let m = 200_000;
        let h = top / m as f64;
        let brute: f64 = (0..m)
            .map(|i| {
                let u = (i as f64 + 0.5) * h;
                (-lambda * (t - s - u.powf(1.0 / d))).exp()
            })
            .sum::<f64>()
            * h
            / (d * gamma(d));
        let v = floup_response(d, lambda, t, s, 1e-12).unwrap();
        assert!((v - brute).abs() < 1e-6, "{v} vs {brute}");
    }

    #[test]
    fn characteristic_function_basics() {
        let spec = LevyDriverSpec::compensated_poisson(1.0, 0).unwrap();
        let one = floup_characteristic_function(&spec, 0.25, 1.0, &[1.0], &[0.0], 1e-8).unwrap();
        assert_eq!(one, Complex64::new(1.0, 0.0));
        let a = floup_characteristic_function(&spec, 0.25, 1.0, &[1.0], &[0.5], 1e-8).unwrap();
        let b = floup_characteristic_function(&spec, 0.25, 1.0, &[1.0], &[-0.5], 1e-8).unwrap();
        assert!((a - b.conj()).norm() < 1e-7, "{a} {b}");
        assert!(a.norm() <= 1.0);
        // stationarity: shifting every time leaves the law unchanged
        let c = floup_characteristic_function(&spec, 0.25, 1.0, &[5.0], &[0.5], 1e-8).unwrap();
        assert!((a - c).norm() < 1e-7, "{a} {c}");
        assert!(floup_characteristic_function(&spec, 0.25, 1.0, &[], &[], 1e-8).is_err());
        assert!(floup_characteristic_function(&spec, 0.25, 1.0, &[1.0, 2.0], &[1.0], 1e-8).is_err());
    }
}
