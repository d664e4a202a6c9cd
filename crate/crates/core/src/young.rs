//! Riemann–Stieltjes calculus on uniform grids.
//!
//! All sums tag each cell with its left endpoint.

use crate::error::{invalid, Result};
use crate::path::GridFunction;
use crate::special::CompensatedSum;

/// Σ_i f_i (h_{i+1} − h_i).
pub fn rs_integral(f: &GridFunction, h: &GridFunction) -> Result<f64> {
    f.require_same_grid(h)?;
    let hv = h.values();
    let mut acc = CompensatedSum::new();
    for (i, w) in hv.windows(2).enumerate() {
        acc.add(f[i] * (w[1] - w[0]));
    }
    Ok(acc.value())
}

/// Running integral φ_k = Σ_{i<k} h_i (g_{i+1} − g_i), so φ starts at 0.
pub fn cumulative_rs_integral(h: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    h.require_same_grid(g)?;
    let gv = g.values();
    let mut out = Vec::with_capacity(gv.len());
    let mut acc = CompensatedSum::new();
    out.push(0.0);
    for (i, w) in gv.windows(2).enumerate() {
        acc.add(h[i] * (w[1] - w[0]));
        out.push(acc.value());
    }
    GridFunction::new(g.t0(), g.dt(), out)
}

/// Supremum of Σ|f(x_i) − f(x_{i−1})|^p over subdivisions through grid
/// nodes that keep both endpoints. Quadratic in the number of nodes.
pub fn p_variation(f: &GridFunction, p: f64) -> Result<f64> {
    p_variation_of(f.values(), p)
}

pub fn p_variation_of(values: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", format!("must be at least 1, got {p}")));
    }
    if values.len() < 2 {
        return Ok(0.0);
    }
    if p == 1.0 {
        return Ok(values.windows(2).map(|w| (w[1] - w[0]).abs()).sum());
    }
    // best[j]: largest sum over subdivisions of nodes 0..=j ending at j
    let mut best = vec![0.0f64; values.len()];
    for j in 1..values.len() {
        let vj = values[j];
        let mut m = f64::NEG_INFINITY;
        for i in 0..j {
            let c = best[i] + (vj - values[i]).abs().powf(p);
            if c > m {
                m = c;
            }
        }
        best[j] = m;
    }
    Ok(best[values.len() - 1])
}

/// |F(g_end) − F(g_start) − Σ F′(g_i)(g_{i+1} − g_i)|.
pub fn chain_rule_residual(f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64, g: &GridFunction) -> f64 {
    let gv = g.values();
    let mut acc = CompensatedSum::new();
    for w in gv.windows(2) {
        acc.add(df(w[0]) * (w[1] - w[0]));
    }
    (f(g.last()) - f(g.first()) - acc.value()).abs()
}

/// ∫f dh + ∫h df − [f h] over the grid.
pub fn integration_by_parts_defect(f: &GridFunction, h: &GridFunction) -> Result<f64> {
    let boundary = f.last() * h.last() - f.first() * h.first();
    Ok(rs_integral(f, h)? + rs_integral(h, f)? - boundary)
}
