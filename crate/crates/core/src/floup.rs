//! Fractional Ornstein–Uhlenbeck processes: construction from an FLP path and
//! the analytic second-order theory.

use crate::error::{invalid, FlevyError, Result};
use crate::flp::{check_d, riemann_liouville_minus_bounded};
use crate::path::SamplePath;
use crate::quad::{integrate_to_infinity, integrate_with_breaks, QuadOptions};
use crate::special::gamma;

/// Default bound on the neglected boundary term at the past cutoff.
pub const DEFAULT_CUTOFF_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloupParams {
    pub lambda: f64,
    /// Time at which the improper integral is truncated.
    pub past_cutoff: f64,
}

impl FloupParams {
    pub fn new(lambda: f64, past_cutoff: f64) -> Result<Self> {
        let p = Self { lambda, past_cutoff };
        p.validate()?;
        Ok(p)
    }

    /// Cutoff `a = min(t_start, 0) − A` with `A` the smallest span such that
    /// `e^{−λA} A^{d+0.6} < tol`, a bound on the dropped boundary term.
    pub fn adaptive(lambda: f64, d: f64, tol: f64, t_start: f64) -> Result<Self> {
        check_d(d)?;
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid("lambda", format!("must be positive, got {lambda}")));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err(invalid("tol", format!("must lie in (0, 1), got {tol}")));
        }
        let span = cutoff_span(lambda, d, tol);
        Self::new(lambda, t_start.min(0.0) - span)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return Err(invalid("lambda", format!("must be positive, got {}", self.lambda)));
        }
        if !(self.past_cutoff < 0.0) || !self.past_cutoff.is_finite() {
            return Err(invalid("past_cutoff", format!("must be negative, got {}", self.past_cutoff)));
        }
        Ok(())
    }

    /// `e^{−λ(t−a)}|a|^{d+0.6}`: size of the dropped term at time `t`.
    pub fn truncation_bound(&self, d: f64, t: f64) -> f64 {
        (-self.lambda * (t - self.past_cutoff)).exp() * self.past_cutoff.abs().powf(d + 0.6)
    }
}

/// Smallest `A ≥ 1` with `e^{−λA} A^{d+0.6} < tol`, by bisection past the maximum.
pub fn cutoff_span(lambda: f64, d: f64, tol: f64) -> f64 {
    let g = |a: f64| -lambda * a + (d + 0.6) * a.ln() - tol.ln();
    // g decreases beyond its maximum at (d+0.6)/λ
    let mut lo = ((d + 0.6) / lambda).max(1.0);
    if g(lo) < 0.0 {
        return lo;
    }
    let mut hi = 2.0 * lo;
    while g(hi) >= 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// One step of the exponentially weighted trapezoid: for a path linear on
/// `[0, h]`, `∫_0^h e^{−λ(h−u)} x(u) du = w_left·x(0) + w_right·x(h)`.
#[derive(Debug, Clone, Copy)]
pub struct ExpStep {
    pub decay: f64,
    pub w_left: f64,
    pub w_right: f64,
}

impl ExpStep {
    pub fn new(lambda: f64, h: f64) -> Self {
        let z = lambda * h;
        let decay = (-z).exp();
        // ∫_0^h e^{−λv} dv and ∫_0^h v e^{−λv} dv
        let i0 = if z > 0.0 { -(-z).exp_m1() / lambda } else { h };
        let i1 = if z < 1.0 {
            let mut term = 1.0;
            let mut sum = 0.5;
            for k in 1..30 {
                term *= -z / k as f64;
                sum += term / (k + 2) as f64;
            }
            h * h * sum
        } else {
            (-(-z).exp_m1() - z * decay) / (lambda * lambda)
        };
        Self {
            decay,
            w_left: i1 / h,
            w_right: i0 - i1 / h,
        }
    }
}

/// FLOUP from an FLP path by integration by parts,
/// `X_t = L_t − e^{−λ(t−a)}L_a − λ∫_a^t e^{−λ(t−s)} L_s ds`,
/// with the ordinary integral taken over the piecewise-linear interpolant of
/// the FLP path against exact exponential weights.
pub fn floup_via_ibp(flp: &SamplePath, params: &FloupParams, t_min: f64, t_max: f64) -> Result<SamplePath> {
    params.validate()?;
    if !(t_min <= t_max) {
        return Err(invalid("t_grid", format!("need t_min <= t_max, got [{t_min}, {t_max}]")));
    }
    let dt = flp.dt();
    let ia = ((params.past_cutoff - flp.t0()) / dt + 1e-9).floor();
    if ia < 0.0 {
        return Err(FlevyError::WindowNotCovered(format!(
            "FLP path starts at {} after the cutoff {}",
            flp.t0(),
            params.past_cutoff
        )));
    }
    let ia = ia as usize;
    let i_lo = flp.require_node(t_min)?;
    let i_hi = flp.require_node(t_max)?;
    if i_lo < ia {
        return Err(FlevyError::WindowNotCovered(format!(
            "output start {t_min} precedes the cutoff {}",
            params.past_cutoff
        )));
    }
    let lambda = params.lambda;
    let step = ExpStep::new(lambda, dt);
    let v = flp.values();
    let la = v[ia];
    let ta = flp.time(ia);
    let mut out = Vec::with_capacity(i_hi - i_lo + 1);
    let mut y = 0.0;
    for i in ia..=i_hi {
        if i > ia {
            y = step.decay * y + step.w_left * v[i - 1] + step.w_right * v[i];
        }
        if i >= i_lo {
            let boundary = (-lambda * (flp.time(i) - ta)).exp() * la;
            out.push(v[i] - boundary - lambda * y);
        }
    }
    if out.len() < 2 {
        return Err(invalid("t_grid", "output needs at least two nodes"));
    }
    SamplePath::new(flp.time(i_lo), dt, out)
}

/// Explicit Euler for `dX = −λX dt + dL^d` started at `X_τ = x0`, run to the
/// end of the FLP path.
pub fn euler_langevin(flp: &SamplePath, lambda: f64, tau: f64, x0: f64) -> Result<SamplePath> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be non-negative, got {lambda}")));
    }
    let i0 = flp.require_node(tau)?;
    let v = flp.values();
    let factor = 1.0 - lambda * flp.dt();
    let mut out = Vec::with_capacity(v.len() - i0);
    let mut x = x0;
    out.push(x);
    for i in i0..v.len() - 1 {
        x = factor * x + (v[i + 1] - v[i]);
        out.push(x);
    }
    SamplePath::new(tau, flp.dt(), out)
}

/// `t ↦ X_t − e^{−λ(t−τ)}X_τ + e^{−λ(t−τ)}z`, equal to `z` at `τ`.
pub fn ou_operator(floup: &SamplePath, lambda: f64, tau: f64, z: f64) -> Result<SamplePath> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let i0 = floup.require_node(tau)?;
    let x_tau = floup[i0];
    let tau_node = floup.time(i0);
    let mut values: Vec<f64> = floup
        .values()
        .iter()
        .enumerate()
        .map(|(i, &x)| x + (-lambda * (floup.time(i) - tau_node)).exp() * (z - x_tau))
        .collect();
    values[i0] = z;
    SamplePath::new(floup.t0(), floup.dt(), values)
}

/// `max_t |l_t − l_s + λ∫_s^t l_u du − (L_t − L_s)|` from the first node `s`,
/// the ordinary integral by the trapezoid rule.
pub fn langevin_residual(l: &SamplePath, flp: &SamplePath, lambda: f64) -> Result<f64> {
    let i0 = flp.node_index(l.t0()).ok_or(FlevyError::GridMismatch("paths do not share nodes".into()))?;
    if ((l.dt() - flp.dt()) / flp.dt()).abs() > 1e-9 || i0 + l.len() > flp.len() {
        return Err(FlevyError::GridMismatch("FLOUP and FLP grids differ".into()));
    }
    let dt = l.dt();
    let lv = l.values();
    let fv = &flp.values()[i0..i0 + l.len()];
    let mut integral = 0.0;
    let mut worst: f64 = 0.0;
    for i in 1..lv.len() {
        integral += 0.5 * dt * (lv[i - 1] + lv[i]);
        let r = lv[i] - lv[0] + lambda * integral - (fv[i] - fv[0]);
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// `Γ(1−2d) m2 / (Γ(d) Γ(1−d))`, the covariance kernel constant.
pub fn covariance_constant(d: f64, m2: f64) -> f64 {
    gamma(1.0 - 2.0 * d) * m2 / (gamma(d) * gamma(1.0 - d))
}

/// Support of an integrand on the real line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || !(lo < hi) || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(invalid("support", format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn up_to(hi: f64) -> Self {
        Self {
            lo: f64::NEG_INFINITY,
            hi,
        }
    }
}

/// `∫ g(s)|t−s|^{2d−1} ds` over the support of `g`.
fn singular_potential<G: FnMut(f64) -> f64>(g: &mut G, t: f64, d: f64, sup: Support, breaks: &[f64], tol: f64) -> Result<f64> {
    let alpha = 2.0 * d;
    let scale = gamma(alpha);
    let mut total = 0.0;
    if sup.hi > t {
        let start = t.max(sup.lo);
        let right = if start > t {
            let mut h = |s: f64| g(s) * (s - t).powf(alpha - 1.0);
            bounded_or_infinite(&mut h, start, sup.hi, breaks, tol)?
        } else {
            scale * riemann_liouville_minus_bounded(&mut *g, alpha, t, sup.hi, breaks, tol)?
        };
        total += right;
    }
    if sup.lo < t {
        let end = t.min(sup.hi);
        let mirrored: Vec<f64> = breaks.iter().map(|b| -b).collect();
        let left = if end < t {
            let mut h = |s: f64| g(-s) * (t + s).powf(alpha - 1.0);
            bounded_or_infinite(&mut h, -end, -sup.lo, &mirrored, tol)?
        } else {
            scale * riemann_liouville_minus_bounded(|r: f64| g(-r), alpha, -t, -sup.lo, &mirrored, tol)?
        };
        total += left;
    }
    Ok(total)
}

fn bounded_or_infinite<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let opts = QuadOptions::tol(tol);
    if b.is_infinite() {
        let cut = breaks.iter().copied().filter(|&x| x > a).fold(a, f64::max);
        let mut v = 0.0;
        if cut > a {
            v += integrate_with_breaks(&mut *f, a, cut, breaks, QuadOptions::tol(0.5 * tol))?.value;
        }
        v += integrate_to_infinity(&mut *f, cut, QuadOptions::tol(0.5 * tol))?.value;
        Ok(v)
    } else {
        Ok(integrate_with_breaks(f, a, b, breaks, opts)?.value)
    }
}

/// Covariance of the Riemann–Stieltjes integrals `∫f dL^d` and `∫g dL^d`:
/// `C(d, m2) ∬ f(t) g(s) |t−s|^{2d−1} ds dt`.
///
/// The inner integral is taken on each side of the diagonal in the variable
/// `v = |t−s|^{2d}`, which removes the singularity. `breaks` are points where
/// either integrand changes scale.
#[allow(clippy::too_many_arguments)]
pub fn cov_rs_integrals<F, G>(
    mut f: F,
    f_support: Support,
    mut g: G,
    g_support: Support,
    breaks: &[f64],
    d: f64,
    m2: f64,
    quad_tol: f64,
) -> Result<f64>
where
    F: FnMut(f64) -> f64,
    G: FnMut(f64) -> f64,
{
    check_d(d)?;
    if !(m2 > 0.0) {
        return Err(invalid("m2", "must be positive"));
    }
    if !(quad_tol > 0.0) {
        return Err(invalid("quad_tol", "must be positive"));
    }
    let c = covariance_constant(d, m2);
    let inner_tol = 1e-3 * quad_tol / c;
    let mut failure: Option<FlevyError> = None;
    let mut outer = |t: f64| {
        let ft = f(t);
        if ft == 0.0 {
            return 0.0;
        }
        match singular_potential(&mut g, t, d, g_support, breaks, inner_tol) {
            Ok(v) => ft * v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let mut outer_breaks: Vec<f64> = breaks.to_vec();
    outer_breaks.extend([g_support.lo, g_support.hi].iter().filter(|x| x.is_finite()));
    let value = if f_support.lo.is_infinite() {
        let mut mirrored = |s: f64| outer(-s);
        let neg: Vec<f64> = outer_breaks.iter().map(|b| -b).collect();
        bounded_or_infinite(&mut mirrored, -f_support.hi, f64::INFINITY, &neg, 0.5 * quad_tol / c)?
    } else {
        bounded_or_infinite(&mut outer, f_support.lo, f_support.hi, &outer_breaks, 0.5 * quad_tol / c)?
    };
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(c * value)
}

/// `(Γ(d)Γ(1−2d)/Γ(1−d)) |t−s|^{2d−1}`, the value of
/// `∫_{−∞}^{t∧s} (t−u)^{d−1}(s−u)^{d−1} du`.
pub fn gripenberg_norros(t: f64, s: f64, d: f64) -> Result<f64> {
    check_d(d)?;
    if t == s {
        return Err(FlevyError::InvalidParameter {
            name: "t",
            reason: "the kernel diverges on the diagonal t = s".into(),
        });
    }
    Ok(gamma(d) * gamma(1.0 - 2.0 * d) / gamma(1.0 - d) * (t - s).abs().powf(2.0 * d - 1.0))
}

/// `N`-term large-lag expansion of the stationary FLOUP autocovariance.
pub fn floup_autocov_asymptotic(s: f64, terms: usize, d: f64, lambda: f64, m2: f64) -> Result<f64> {
    check_d(d)?;
    if !(s > 0.0) {
        return Err(invalid("s", format!("lag must be positive, got {s}")));
    }
    if terms == 0 {
        return Err(invalid("N", "need at least one term"));
    }
    if !(lambda > 0.0) || !(m2 > 0.0) {
        return Err(invalid("lambda", "lambda and m2 must be positive"));
    }
    let pref = covariance_constant(d, m2) / (2.0 * d * (2.0 * d + 1.0));
    let mut total = 0.0;
    let mut prod = 1.0;
    for n in 1..=terms {
        for k in [2 * n - 2, 2 * n - 1] {
            prod *= 2.0 * d + 1.0 - k as f64;
        }
        total += prod * lambda.powi(-2 * n as i32) * s.powf(2.0 * d + 1.0 - 2.0 * n as f64);
    }
    Ok(pref * total)
}

/// Exact stationary FLOUP autocovariance at lag `s` by the double integral,
/// with both integrands `e^{−λ(t−·)}1{· ≤ t}`.
pub fn floup_autocovariance(s: f64, d: f64, lambda: f64, m2: f64, quad_tol: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", "must be positive"));
    }
    let s = s.abs();
    let f = |u: f64| if u <= 0.0 { (lambda * u).exp() } else { 0.0 };
    let g = |u: f64| if u <= s { (-lambda * (s - u)).exp() } else { 0.0 };
    let mut breaks = vec![0.0, s];
    for k in [1.0, 4.0, 16.0] {
        breaks.push(-k / lambda);
        breaks.push(s - k / lambda);
    }
    cov_rs_integrals(f, Support::up_to(0.0), g, Support::up_to(s), &breaks, d, m2, quad_tol)
}

/// Closed-form stationary variance `m2 λ^{−2d−1} / (2 cos(πd))`.
pub fn floup_stationary_variance(d: f64, lambda: f64, m2: f64) -> Result<f64> {
    check_d(d)?;
    Ok(m2 * lambda.powf(-2.0 * d - 1.0) / (2.0 * (std::f64::consts::PI * d).cos()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flp::floup_response;
    use crate::quad::integrate;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn cutoff_meets_its_bound() {
        for (lambda, d, tol) in [(1.0, 0.25, 1e-8), (0.1, 0.45, 1e-6), (5.0, 0.05, 1e-12)] {
            let a = cutoff_span(lambda, d, tol);
            let b = |x: f64| (-lambda * x).exp() * x.powf(d + 0.6);
            assert!(b(a) < tol * (1.0 + 1e-9));
            assert!(b(a * (1.0 - 1e-6)) >= tol * (1.0 - 1e-5));
            let p = FloupParams::adaptive(lambda, d, tol, 2.0).unwrap();
            assert_eq!(p.past_cutoff, -a);
            assert!(p.truncation_bound(d, 0.0) < tol * (1.0 + 1e-9));
        }
        assert!(FloupParams::new(0.0, -5.0).is_err());
        assert!(FloupParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn exp_step_is_exact_on_linear_pieces() {
        for (lambda, h) in [(1.0, 0.1), (1e-5, 0.01), (3.0, 1e-4 / 3.0), (3.0, 1.1e-3 / 3.0), (1e3, 1e-3)] {
            let s = ExpStep::new(lambda, h);
            let (x0, x1) = (0.7, -1.3);
            let exact = integrate(
                |u| (-lambda * (h - u)).exp() * (x0 + (x1 - x0) * u / h),
                0.0,
                h,
                QuadOptions::tol(1e-18),
            )
            .unwrap()
            .value;
            let got = s.w_left * x0 + s.w_right * x1;
            assert!((got - exact).abs() <= 1e-13 * h, "{lambda} {h}: {got} vs {exact}");
        }
    }

    fn grid_path(t0: f64, dt: f64, t1: f64, f: impl Fn(f64) -> f64) -> SamplePath {
        let len = ((t1 - t0) / dt).round() as usize + 1;
        SamplePath::from_fn(t0, dt, len, f).unwrap()
    }

    #[test]
    fn ibp_on_deterministic_paths() {
        let p = FloupParams::new(1.5, -10.0).unwrap();
        let zero = grid_path(-10.0, 0.01, 5.0, |_| 0.0);
        assert_eq!(floup_via_ibp(&zero, &p, -2.0, 5.0).unwrap().max_abs(), 0.0);

        // linear driver: the rule is exact
        let lin = grid_path(-10.0, 0.01, 5.0, |t| t);
        let out = floup_via_ibp(&lin, &p, -2.0, 5.0).unwrap();
        for (i, &v) in out.values().iter().enumerate() {
            let t = out.time(i);
            let want = (1.0 - (-1.5 * (t + 10.0)).exp()) / 1.5;
            assert!((v - want).abs() < 1e-12, "{t}: {v} vs {want}");
        }

        // stiff case: the output follows L'(t)/λ
        let lambda = 1e3;
        let p = FloupParams::new(lambda, -1.0).unwrap();
        let sine = grid_path(-1.0, 1e-3, 3.0, f64::sin);
        let out = floup_via_ibp(&sine, &p, 0.0, 3.0).unwrap();
        for (i, &v) in out.values().iter().enumerate() {
            let t = out.time(i);
            let exact = (lambda * t.cos() + t.sin() - (-lambda * (t + 1.0)).exp() * (lambda * (-1.0f64).cos() - 1.0f64.sin()))
                / (lambda * lambda + 1.0);
            // linear interpolation error of sin over one step
            assert!((v - exact).abs() < 1e-6 / 8.0, "{t}: {v} vs {exact}");
            assert!(v.abs() <= 1.01 / lambda);
        }
    }

    #[test]
    fn ibp_rejects_short_paths() {
        let p = FloupParams::new(1.0, -10.0).unwrap();
        let short = grid_path(-5.0, 0.01, 5.0, |t| t);
        assert!(matches!(floup_via_ibp(&short, &p, 0.0, 1.0), Err(FlevyError::WindowNotCovered(_))));
        let full = grid_path(-10.0, 0.01, 5.0, |t| t);
        assert!(floup_via_ibp(&full, &p, 0.0, 6.0).is_err());
        assert!(floup_via_ibp(&full, &p, 0.005, 1.0).is_err());
    }

    #[test]
    fn euler_limits() {
        let flp = grid_path(-1.0, 0.01, 4.0, |t| (2.0 * t).sin() + t);
        let e = euler_langevin(&flp, 0.0, 1.0, 0.3).unwrap();
        for i in 0..e.len() {
            let t = e.time(i);
            let want = 0.3 + flp.value_at(t).unwrap() - flp.value_at(1.0).unwrap();
            assert!((e[i] - want).abs() < 1e-12);
        }
        let zero = grid_path(0.0, 0.01, 3.0, |_| 0.0);
        let e = euler_langevin(&zero, 2.0, 0.0, 1.5).unwrap();
        for i in 0..e.len() {
            assert!((e[i] - 1.5 * 0.98f64.powi(i as i32)).abs() < 1e-12);
        }
        assert!(matches!(euler_langevin(&zero, 2.0, 0.005, 1.0), Err(FlevyError::OffGrid { .. })));
    }

    #[test]
    fn ou_operator_identities() {
        let x = grid_path(-2.0, 0.01, 3.0, |t| (3.0 * t).cos() - 0.2 * t);
        let same = ou_operator(&x, 1.2, 0.5, x.value_at(0.5).unwrap()).unwrap();
        for i in 0..x.len() {
            assert!((same[i] - x[i]).abs() <= 1e-15);
        }
        let a = ou_operator(&x, 1.2, 0.5, 4.0).unwrap();
        let b = ou_operator(&x, 1.2, 0.5, -1.0).unwrap();
        assert_eq!(a.value_at(0.5).unwrap(), 4.0);
        for i in 0..x.len() {
            let t = x.time(i);
            let want = (-1.2 * (t - 0.5)).exp() * 5.0;
            assert!(rel(a[i] - b[i], want) < 1e-12, "{t}");
        }
    }

    #[test]
    fn langevin_residual_of_exact_solution_is_small() {
        // X = ∫ e^{−λ(t−s)} dL for L = sin has X' = −λX + L'
        let lambda = 0.8;
        let resid = |dt: f64| {
            let flp = grid_path(0.0, dt, 5.0, f64::sin);
            let x = grid_path(0.0, dt, 5.0, |t| {
                (lambda * t.cos() + t.sin() - (-lambda * t).exp() * lambda) / (lambda * lambda + 1.0)
            });
            langevin_residual(&x, &flp, lambda).unwrap()
        };
        let (a, b) = (resid(0.02), resid(0.01));
        assert!(a < 1e-3 && (a / b - 4.0).abs() < 0.2, "{a} {b}");
    }

    #[test]
    fn gripenberg_norros_values() {
        assert!(rel(gripenberg_norros(1.0, 0.0, 0.25).unwrap(), 5.24411510858424) < 1e-12);
        assert!(rel(gripenberg_norros(2.0, 0.0, 0.25).unwrap(), 5.24411510858424 / 2f64.sqrt()) < 1e-12);
        assert!(gripenberg_norros(1.0, 1.0, 0.25).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn gripenberg_norros_matches_quadrature(t in -3.0..3.0f64, gap in 0.1..3.0f64, d in 0.05..0.45f64) {
            let s = t - gap;
            let g = gripenberg_norros(t, s, d).unwrap();
            prop_assert_eq!(g, gripenberg_norros(s, t, d).unwrap());
            // u = s − w: ∫_0^∞ (gap+w)^{d−1} w^{d−1} dw, singular at 0
            let near = integrate(|v: f64| {
                let w = v.powf(1.0 / d);
                (gap + w).powf(d - 1.0) / d
            }, 0.0, 1.0, QuadOptions::tol(1e-12)).unwrap().value;
            let far = integrate_to_infinity(|w| (gap + w).powf(d - 1.0) * w.powf(d - 1.0), 1.0, QuadOptions::tol(1e-12))
                .unwrap()
                .value;
            prop_assert!(rel(near + far, g) < 1e-6, "{} vs {}", near + far, g);
        }
    }

    #[test]
    fn asymptotic_expansion_values() {
        let one = floup_autocov_asymptotic(10.0, 1, 0.25, 1.0, 1.0).unwrap();
        assert!(rel(one, 0.126156626101008) < 1e-12);
        let lead = covariance_constant(0.3, 2.0) * 0.5f64.powi(-2) * 7f64.powf(-0.4);
        assert!(rel(floup_autocov_asymptotic(7.0, 1, 0.3, 0.5, 2.0).unwrap(), lead) < 1e-13);
        let gap = |s: f64| {
            (floup_autocov_asymptotic(s, 2, 0.25, 1.0, 1.0).unwrap() - floup_autocov_asymptotic(s, 1, 0.25, 1.0, 1.0).unwrap())
                .abs()
        };
        assert!((gap(50.0) / gap(25.0) - 2f64.powf(-2.5)).abs() < 1e-12);
        assert!(floup_autocov_asymptotic(0.0, 1, 0.25, 1.0, 1.0).is_err());
    }

    #[test]
    fn stationary_variance_by_double_integral() {
        for (d, lambda) in [(0.25, 1.0), (0.1, 2.0), (0.4, 0.5)] {
            let v = floup_autocovariance(0.0, d, lambda, 1.3, 1e-8).unwrap();
            let want = floup_stationary_variance(d, lambda, 1.3).unwrap();
            assert!(rel(v, want) < 1e-6, "{d} {lambda}: {v} vs {want}");
        }
    }

    #[test]
    fn variance_agrees_with_squared_response() {
        let (d, lambda) = (0.25, 1.0);
        let g2 = |s: f64| floup_response(d, lambda, 0.0, s, 1e-12).unwrap().powi(2);
        let near = integrate(g2, -20.0, 0.0, QuadOptions::tol(1e-10)).unwrap().value;
        let far = integrate_to_infinity(|w| g2(-20.0 - w), 0.0, QuadOptions::tol(1e-10)).unwrap().value;
        let want = floup_stationary_variance(d, lambda, 1.0).unwrap();
        assert!(rel(near + far, want) < 1e-6, "{} vs {want}", near + far);
    }

    #[test]
    fn covariance_quadrature_properties() {
        let f = |u: f64| if (0.0..=1.0).contains(&u) { 1.0 + u } else { 0.0 };
        let g = |u: f64| if (0.5..=2.0).contains(&u) { (3.0 * u).sin() } else { 0.0 };
        let sf = Support::new(0.0, 1.0).unwrap();
        let sg = Support::new(0.5, 2.0).unwrap();
        let fg = cov_rs_integrals(f, sf, g, sg, &[], 0.3, 1.0, 1e-10).unwrap();
        let gf = cov_rs_integrals(g, sg, f, sf, &[], 0.3, 1.0, 1e-10).unwrap();
        assert!((fg - gf).abs() < 1e-8, "{fg} {gf}");
        let zero = cov_rs_integrals(|_| 0.0, sf, g, sg, &[], 0.3, 1.0, 1e-10).unwrap();
        assert_eq!(zero, 0.0);
        assert!(cov_rs_integrals(g, sg, g, sg, &[], 0.3, 1.0, 1e-10).unwrap() >= 0.0);
        // indicator of [0,1] against itself: Var of an FLP increment of length 1
        let one = |u: f64| if (0.0..=1.0).contains(&u) { 1.0 } else { 0.0 };
        let v = cov_rs_integrals(one, sf, one, sf, &[], 0.3, 1.0, 1e-10).unwrap();
        let want = crate::flp::flp_covariance(1.0, 1.0, 0.3, 1.0).unwrap();
        assert!(rel(v, want) < 1e-7, "{v} vs {want}");
    }

    #[test]
    fn exact_autocovariance_approaches_expansion() {
        let exact = floup_autocovariance(50.0, 0.25, 1.0, 1.0, 1e-9).unwrap();
        let approx = floup_autocov_asymptotic(50.0, 3, 0.25, 1.0, 1.0).unwrap();
        assert!(rel(exact, approx) < 1e-4, "{exact} vs {approx}");
    }
}
